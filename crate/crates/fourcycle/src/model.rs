//! Model matrices over `[P_inf] = Z_P ∪ {inf}` and the calculus on them:
//! the minus operation, multiplicity predicates, the twisted-condition and
//! girth-6 checks, tires and four-cycle pair assembly, the bicycle
//! reduction, permutation equivalence, and the cyclic-difference-matrix
//! predicate.
//!
//! A model matrix is the compact description of a quasi-cyclic parity-check
//! matrix: entry `v` stands for the P×P cyclic-shift-by-`v` permutation
//! block, `inf` for the P×P zero block. All types here are immutable after
//! construction; transformations return new values.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// One entry of a model matrix: a canonical residue mod P, or `inf`
/// (which expands to a zero block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexValue {
    Finite(u64),
    Infinity,
}

impl IndexValue {
    pub fn is_finite(self) -> bool {
        matches!(self, IndexValue::Finite(_))
    }

    /// Canonicalize an arbitrary residue.
    pub fn finite(v: u64, p: u64) -> IndexValue {
        IndexValue::Finite(v % p)
    }

    /// Negation mod P; `inf` is absorbing.
    pub fn neg(self, p: u64) -> IndexValue {
        match self {
            IndexValue::Finite(v) => IndexValue::Finite((p - v % p) % p),
            IndexValue::Infinity => IndexValue::Infinity,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Finite(v) => write!(f, "{v}"),
            IndexValue::Infinity => write!(f, "inf"),
        }
    }
}

/// Difference in `[P_inf]`: position-wise subtraction mod P with `inf`
/// absorbing on either side.
pub fn index_minus(x: IndexValue, y: IndexValue, p: u64) -> IndexValue {
    match (x, y) {
        (IndexValue::Finite(a), IndexValue::Finite(b)) => {
            IndexValue::Finite((a % p + p - b % p) % p)
        }
        _ => IndexValue::Infinity,
    }
}

/// Position-wise [`index_minus`] between two rows of equal length.
pub fn row_minus(c: &[IndexValue], d: &[IndexValue], p: u64) -> Result<Vec<IndexValue>> {
    if c.len() != d.len() {
        return Err(Error::InvalidInput(format!(
            "row_minus: length mismatch {} vs {}",
            c.len(),
            d.len()
        )));
    }
    Ok(c.iter()
        .zip(d)
        .map(|(&x, &y)| index_minus(x, y, p))
        .collect())
}

/// `true` iff every finite value occurs an even number of times; `inf`
/// entries are exempt.
pub fn is_multiplicity_even(row: &[IndexValue]) -> bool {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for v in row {
        if let IndexValue::Finite(x) = v {
            *counts.entry(*x).or_insert(0) += 1;
        }
    }
    counts.values().all(|c| c % 2 == 0)
}

/// `true` iff no finite value occurs twice. `inf` entries may repeat:
/// a zero block contributes no Tanner edges, so repeated `inf` in a row
/// difference cannot close a 4-cycle.
pub fn is_multiplicity_free(row: &[IndexValue]) -> bool {
    let mut seen: HashMap<u64, ()> = HashMap::new();
    for v in row {
        if let IndexValue::Finite(x) = v {
            if seen.insert(*x, ()).is_some() {
                return false;
            }
        }
    }
    true
}

/// A J×L grid of index values together with the circulant size P.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMatrix {
    p: u64,
    rows: Vec<Vec<IndexValue>>,
}

impl ModelMatrix {
    /// Builds a model matrix, validating that the grid is rectangular,
    /// non-empty, and that every finite entry is canonical mod P.
    pub fn new(p: u64, rows: Vec<Vec<IndexValue>>) -> Result<ModelMatrix> {
        if p == 0 {
            return Err(Error::InvalidInput("circulant size P must be >= 1".into()));
        }
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("model matrix must be non-empty".into()));
        }
        let cols = rows[0].len();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {j} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for v in row {
                if let IndexValue::Finite(x) = v {
                    if *x >= p {
                        return Err(Error::InvalidInput(format!(
                            "entry {x} in row {j} is not canonical mod {p}"
                        )));
                    }
                }
            }
        }
        Ok(ModelMatrix { p, rows })
    }

    /// Convenience constructor from signed integers; negative values are
    /// reduced mod P and `None` stands for `inf`.
    pub fn from_ints(p: u64, rows: &[Vec<Option<i64>>]) -> Result<ModelMatrix> {
        let grid = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| match v {
                        Some(x) => IndexValue::Finite(x.rem_euclid(p as i64) as u64),
                        None => IndexValue::Infinity,
                    })
                    .collect()
            })
            .collect();
        ModelMatrix::new(p, grid)
    }

    pub fn circulant_size(&self) -> u64 {
        self.p
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, j: usize) -> &[IndexValue] {
        &self.rows[j]
    }

    pub fn rows(&self) -> &[Vec<IndexValue>] {
        &self.rows
    }

    pub fn entry(&self, j: usize, l: usize) -> IndexValue {
        self.rows[j][l]
    }

    /// Returns `(J, L)` when the expanded code is (J, L)-regular, which
    /// holds exactly when no entry is `inf`.
    pub fn regularity(&self) -> Option<(usize, usize)> {
        if self
            .rows
            .iter()
            .all(|row| row.iter().all(|v| v.is_finite()))
        {
            Some((self.num_rows(), self.num_cols()))
        } else {
            None
        }
    }

    /// Twisted condition against another model matrix: every pair of rows
    /// (one from each) must have a multiplicity-even difference.
    pub fn check_twisted(&self, other: &ModelMatrix) -> Result<bool> {
        Ok(self.twisted_violations(other)?.is_empty())
    }

    /// Row pairs (j, k) whose difference fails multiplicity-evenness.
    /// Empty result means the twisted condition holds.
    pub fn twisted_violations(&self, other: &ModelMatrix) -> Result<Vec<(usize, usize)>> {
        if self.p != other.p {
            return Err(Error::InvalidInput(format!(
                "circulant size mismatch: {} vs {}",
                self.p, other.p
            )));
        }
        if self.num_cols() != other.num_cols() {
            return Err(Error::InvalidInput(format!(
                "column count mismatch: {} vs {}",
                self.num_cols(),
                other.num_cols()
            )));
        }
        let mut out = Vec::new();
        for (j, c) in self.rows.iter().enumerate() {
            for (k, d) in other.rows.iter().enumerate() {
                if !is_multiplicity_even(&row_minus(c, d, self.p)?) {
                    out.push((j, k));
                }
            }
        }
        Ok(out)
    }

    /// Girth condition: the expanded Tanner graph has girth >= 6 iff all
    /// pairwise row differences are multiplicity free. Vacuously true for
    /// a single row.
    pub fn check_girth6(&self) -> bool {
        self.girth6_violations().is_empty()
    }

    /// Row pairs (j1, j2) whose difference is not multiplicity free.
    pub fn girth6_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j1 in 0..self.rows.len() {
            for j2 in j1 + 1..self.rows.len() {
                let diff = row_minus(&self.rows[j1], &self.rows[j2], self.p)
                    .expect("rows of one matrix have equal length");
                if !is_multiplicity_free(&diff) {
                    out.push((j1, j2));
                }
            }
        }
        out
    }

    /// Cyclic-difference-matrix predicate: P equals the column count and
    /// the girth condition holds. Requires an `inf`-free matrix.
    pub fn is_cdm(&self) -> Result<bool> {
        if self.regularity().is_none() {
            return Err(Error::InvalidInput(
                "is_cdm: matrix contains inf entries".into(),
            ));
        }
        Ok(self.p == self.num_cols() as u64 && self.check_girth6())
    }

    /// Keeps the rows whose mask bit is 1.
    pub fn select_rows(&self, keep: &[bool]) -> Result<ModelMatrix> {
        if keep.len() != self.num_rows() {
            return Err(Error::InvalidInput(format!(
                "mask length {} does not match row count {}",
                keep.len(),
                self.num_rows()
            )));
        }
        let rows: Vec<_> = self
            .rows
            .iter()
            .zip(keep)
            .filter(|(_, &m)| m)
            .map(|(r, _)| r.clone())
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidInput("mask deletes every row".into()));
        }
        ModelMatrix::new(self.p, rows)
    }

    /// Serializes to the text format: first line `J L P`, then J rows of
    /// whitespace-separated entries with `inf` for the zero block.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.num_rows(), self.num_cols(), self.p);
        for row in &self.rows {
            let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. `inf` is the canonical zero-block spelling;
    /// `-1` is accepted on import for compatibility.
    pub fn parse_text(text: &str) -> Result<ModelMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected header `J L P`, got {} tokens", head.len()),
            });
        }
        let parse_dim = |tok: &str, what: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad {what}: {tok:?}"),
            })
        };
        let j = parse_dim(head[0], "row count")? as usize;
        let l = parse_dim(head[1], "column count")? as usize;
        let p = parse_dim(head[2], "circulant size")?;
        let mut rows = Vec::with_capacity(j);
        for _ in 0..j {
            let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {j} rows, input ended early"),
            })?;
            let mut row = Vec::with_capacity(l);
            for tok in line.split_whitespace() {
                let v = match tok {
                    "inf" | "-1" => IndexValue::Infinity,
                    _ => {
                        let x = tok.parse::<u64>().map_err(|_| Error::Parse {
                            line: line_no,
                            msg: format!("bad entry {tok:?}"),
                        })?;
                        if p > 0 && x >= p {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("entry {x} out of range mod {p}"),
                            });
                        }
                        IndexValue::Finite(x)
                    }
                };
                row.push(v);
            }
            if row.len() != l {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {l} entries, got {}", row.len()),
                });
            }
            rows.push(row);
        }
        ModelMatrix::new(p, rows).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })
    }
}

/// A circulant matrix over `[P_inf]`, stored as its first row. Row `r` of
/// the full matrix is the first row rotated right by `r` positions:
/// entry `(r, c) = first_row[(c - r) mod m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tire {
    p: u64,
    first_row: Vec<IndexValue>,
}

impl Tire {
    pub fn new(p: u64, first_row: Vec<IndexValue>) -> Result<Tire> {
        if p == 0 {
            return Err(Error::InvalidInput("circulant size P must be >= 1".into()));
        }
        if first_row.is_empty() {
            return Err(Error::InvalidInput("tire must be non-empty".into()));
        }
        for v in &first_row {
            if let IndexValue::Finite(x) = v {
                if *x >= p {
                    return Err(Error::InvalidInput(format!(
                        "tire entry {x} is not canonical mod {p}"
                    )));
                }
            }
        }
        Ok(Tire { p, first_row })
    }

    pub fn from_ints(p: u64, first_row: &[Option<i64>]) -> Result<Tire> {
        Tire::new(
            p,
            first_row
                .iter()
                .map(|v| match v {
                    Some(x) => IndexValue::Finite(x.rem_euclid(p as i64) as u64),
                    None => IndexValue::Infinity,
                })
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.first_row.len()
    }

    pub fn circulant_size(&self) -> u64 {
        self.p
    }

    /// The m×m model matrix with entry `(r, c) = first_row[(c - r) mod m]`.
    pub fn to_circulant(&self) -> ModelMatrix {
        let m = self.size();
        let rows = (0..m)
            .map(|r| (0..m).map(|c| self.first_row[(c + m - r) % m]).collect())
            .collect();
        ModelMatrix::new(self.p, rows).expect("circulant of a valid tire is valid")
    }

    /// The transpose of a circulant is the circulant of the reversed-shift
    /// first row: entry `i` becomes `first_row[(-i) mod m]`.
    pub fn transpose(&self) -> Tire {
        let m = self.size();
        Tire {
            p: self.p,
            first_row: (0..m).map(|i| self.first_row[(m - i) % m]).collect(),
        }
    }

    /// Entry-wise negation mod P; `inf` maps to `inf`.
    pub fn neg(&self) -> Tire {
        Tire {
            p: self.p,
            first_row: self.first_row.iter().map(|v| v.neg(self.p)).collect(),
        }
    }
}

fn concat_columns(a: &ModelMatrix, b: &ModelMatrix) -> ModelMatrix {
    let rows = a
        .rows()
        .iter()
        .zip(b.rows())
        .map(|(ra, rb)| ra.iter().chain(rb).copied().collect())
        .collect();
    ModelMatrix::new(a.circulant_size(), rows).expect("concatenation of valid matrices")
}

/// Assembles the model-matrix pair `([T_A | T_B], [-T_B^T | -T_A^T])`.
/// The pair always satisfies the twisted condition.
pub fn four_cycle_pair(t_a: &Tire, t_b: &Tire) -> Result<(ModelMatrix, ModelMatrix)> {
    if t_a.circulant_size() != t_b.circulant_size() {
        return Err(Error::InvalidInput(format!(
            "four_cycle_pair: circulant size mismatch {} vs {}",
            t_a.circulant_size(),
            t_b.circulant_size()
        )));
    }
    if t_a.size() != t_b.size() {
        return Err(Error::InvalidInput(format!(
            "four_cycle_pair: tire size mismatch {} vs {}",
            t_a.size(),
            t_b.size()
        )));
    }
    let mc = concat_columns(&t_a.to_circulant(), &t_b.to_circulant());
    let md = concat_columns(
        &t_b.transpose().neg().to_circulant(),
        &t_a.transpose().neg().to_circulant(),
    );
    Ok((mc, md))
}

/// Bicycle construction: for a tire over `{0, inf}` with P = 1 the pair
/// `[T_A | T_A^T]`, `[-T_A | -T_A^T]` collapses to a single self-paired
/// matrix (negation is the identity mod 1).
pub fn bicycle_model(t_a: &Tire) -> Result<ModelMatrix> {
    if t_a.circulant_size() != 1 {
        return Err(Error::InvalidInput(format!(
            "bicycle_model: requires P = 1, got {}",
            t_a.circulant_size()
        )));
    }
    Ok(concat_columns(
        &t_a.to_circulant(),
        &t_a.transpose().to_circulant(),
    ))
}

/// Row and column index maps realizing the equivalence of a four-cycle
/// pair: for matrices expanded from `four_cycle_pair` output,
/// `H_C[i][j] = H_D[row_perm[i]][col_perm[j]]`. Both maps are the
/// anti-diagonal reversals of their index ranges (`m*P` rows, `2*m*P`
/// columns).
pub fn equivalence_permutations(p: u64, m: usize) -> (Vec<usize>, Vec<usize>) {
    let n_rows = m * p as usize;
    let n_cols = 2 * m * p as usize;
    let row_perm = (0..n_rows).map(|i| n_rows - 1 - i).collect();
    let col_perm = (0..n_cols).map(|j| n_cols - 1 - j).collect();
    (row_perm, col_perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: u64) -> IndexValue {
        IndexValue::Finite(v)
    }

    fn row(vals: &[i64], p: u64) -> Vec<IndexValue> {
        vals.iter()
            .map(|&v| {
                if v < 0 {
                    IndexValue::Infinity
                } else {
                    IndexValue::Finite(v as u64 % p)
                }
            })
            .collect()
    }

    /// The (7, 2, 3) worked pair, entered literally.
    fn example_pair() -> (ModelMatrix, ModelMatrix) {
        let mc = ModelMatrix::from_ints(
            7,
            &[
                vec![Some(1), Some(2), Some(4), Some(3), Some(6), Some(5)],
                vec![Some(4), Some(1), Some(2), Some(5), Some(3), Some(6)],
                vec![Some(2), Some(4), Some(1), Some(6), Some(5), Some(3)],
            ],
        )
        .unwrap();
        let md = ModelMatrix::from_ints(
            7,
            &[
                vec![Some(4), Some(2), Some(1), Some(6), Some(3), Some(5)],
                vec![Some(1), Some(4), Some(2), Some(5), Some(6), Some(3)],
                vec![Some(2), Some(1), Some(4), Some(3), Some(5), Some(6)],
            ],
        )
        .unwrap();
        (mc, md)
    }

    #[test]
    fn index_minus_cases() {
        assert_eq!(index_minus(fin(3), fin(5), 7), fin(5));
        assert_eq!(index_minus(IndexValue::Infinity, fin(4), 7), IndexValue::Infinity);
        assert_eq!(index_minus(fin(4), IndexValue::Infinity, 7), IndexValue::Infinity);
        assert_eq!(index_minus(fin(0), fin(0), 7), fin(0));
    }

    #[test]
    fn row_minus_cases() {
        let c = row(&[1, 2, 4, 3, 6, 5], 7);
        let d = row(&[4, 2, 1, 6, 3, 5], 7);
        assert_eq!(row_minus(&c, &d, 7).unwrap(), row(&[4, 0, 3, 4, 3, 0], 7));
        assert!(is_multiplicity_even(&row_minus(&c, &d, 7).unwrap()));
        assert_eq!(row_minus(&c, &c, 7).unwrap(), row(&[0; 6], 7));
        let a = row(&[0, -1], 2);
        let b = row(&[1, 1], 2);
        assert_eq!(row_minus(&a, &b, 2).unwrap(), row(&[1, -1], 2));
        assert!(row_minus(&c, &a, 7).is_err());
    }

    #[test]
    fn multiplicity_even_cases() {
        assert!(is_multiplicity_even(&row(&[0, 1, 1, 0, 3, 3, 3, 3, -1], 7)));
        assert!(!is_multiplicity_even(&row(&[0, 2, 2, 4, 4, 4, 0], 7)));
        assert!(is_multiplicity_even(&[]));
    }

    #[test]
    fn multiplicity_free_cases() {
        assert!(is_multiplicity_free(&row(&[0, 1, 2, 3, 4, 5, 6, 7], 11)));
        assert!(!is_multiplicity_free(&row(&[0, 0, 1, 2, 3, 4, 5], 11)));
        assert!(is_multiplicity_free(&row(&[3], 11)));
        assert!(is_multiplicity_free(&row(&[-1, -1, 2], 11)));
    }

    #[test]
    fn multiplicity_predicates_match_counting() {
        // Count-based brute force on pseudo-random rows.
        let mut state = 0x3c0_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..200 {
            let p = 2 + next() % 9;
            let len = (next() % 9) as usize;
            let r: Vec<IndexValue> = (0..len)
                .map(|_| {
                    if next() % 5 == 0 {
                        IndexValue::Infinity
                    } else {
                        IndexValue::Finite(next() % p)
                    }
                })
                .collect();
            let count = |x: u64| r.iter().filter(|v| **v == fin(x)).count();
            let even = (0..p).all(|x| count(x) % 2 == 0);
            let free = (0..p).all(|x| count(x) <= 1);
            assert_eq!(is_multiplicity_even(&r), even);
            assert_eq!(is_multiplicity_free(&r), free);
        }
    }

    #[test]
    fn twisted_examples() {
        let (mc, md) = example_pair();
        assert!(mc.check_twisted(&md).unwrap());

        // all-zero entries, even L
        let z = ModelMatrix::from_ints(5, &[vec![Some(0); 4], vec![Some(0); 4]]).unwrap();
        assert!(z.check_twisted(&z).unwrap());
        // all-inf matrices expand to zero matrices
        let zinf = ModelMatrix::from_ints(5, &[vec![None; 3]]).unwrap();
        assert!(zinf.check_twisted(&zinf).unwrap());

        let a = ModelMatrix::from_ints(5, &[vec![Some(0), Some(1)]]).unwrap();
        let b = ModelMatrix::from_ints(5, &[vec![Some(0), Some(0)]]).unwrap();
        assert!(!a.check_twisted(&b).unwrap());
        assert_eq!(a.twisted_violations(&b).unwrap(), vec![(0, 0)]);

        let c = ModelMatrix::from_ints(3, &[vec![Some(0), Some(1)]]).unwrap();
        assert!(a.check_twisted(&c).is_err());
    }

    #[test]
    fn girth6_examples() {
        let p = 2u64;
        let hc = ModelMatrix::from_ints(
            4 * p as u64,
            &[
                vec![Some(0), Some(0), Some(0), Some(0)],
                vec![Some(0), Some(p as i64), Some(2 * p as i64), Some(3 * p as i64)],
            ],
        )
        .unwrap();
        assert!(hc.check_girth6());

        let dup = ModelMatrix::from_ints(7, &[vec![Some(1), Some(2)], vec![Some(1), Some(2)]]).unwrap();
        assert!(!dup.check_girth6());
        assert_eq!(dup.girth6_violations(), vec![(0, 1)]);

        let (mc, md) = example_pair();
        assert!(mc.check_girth6());
        assert!(md.check_girth6());
    }

    #[test]
    fn regularity_cases() {
        let (mc, _) = example_pair();
        assert_eq!(mc.regularity(), Some((3, 6)));
        let with_inf = ModelMatrix::from_ints(7, &[vec![Some(1), None]]).unwrap();
        assert_eq!(with_inf.regularity(), None);
        let one = ModelMatrix::from_ints(3, &[vec![Some(0)]]).unwrap();
        assert_eq!(one.regularity(), Some((1, 1)));
    }

    #[test]
    fn tire_circulant() {
        let t = Tire::from_ints(7, &[Some(1), Some(2), Some(4)]).unwrap();
        let m = t.to_circulant();
        assert_eq!(m.row(0), &row(&[1, 2, 4], 7)[..]);
        assert_eq!(m.row(1), &row(&[4, 1, 2], 7)[..]);
        assert_eq!(m.row(2), &row(&[2, 4, 1], 7)[..]);

        let single = Tire::from_ints(7, &[Some(5)]).unwrap().to_circulant();
        assert_eq!(single.row(0), &row(&[5], 7)[..]);

        let zeros = Tire::from_ints(7, &[Some(0), Some(0)]).unwrap().to_circulant();
        assert_eq!(zeros.row(0), &row(&[0, 0], 7)[..]);
        assert_eq!(zeros.row(1), &row(&[0, 0], 7)[..]);
    }

    #[test]
    fn circulant_has_constant_diagonals() {
        let t = Tire::from_ints(11, &[Some(3), None, Some(7), Some(0), Some(5)]).unwrap();
        let m = t.to_circulant();
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(m.entry(r, c), m.entry(0, (c + 5 - r) % 5));
            }
        }
    }

    #[test]
    fn four_cycle_pair_reproduces_worked_example() {
        let t_a = Tire::from_ints(7, &[Some(1), Some(2), Some(4)]).unwrap();
        let t_b = Tire::from_ints(7, &[Some(3), Some(6), Some(5)]).unwrap();
        let (mc, md) = four_cycle_pair(&t_a, &t_b).unwrap();
        let (emc, emd) = example_pair();
        assert_eq!(mc, emc);
        assert_eq!(md, emd);
        assert!(mc.check_twisted(&md).unwrap());
    }

    #[test]
    fn four_cycle_pair_size_mismatch() {
        let t_a = Tire::from_ints(7, &[Some(1)]).unwrap();
        let t_b = Tire::from_ints(7, &[Some(1), Some(2)]).unwrap();
        assert!(four_cycle_pair(&t_a, &t_b).is_err());
        let t_c = Tire::from_ints(5, &[Some(1)]).unwrap();
        assert!(four_cycle_pair(&t_a, &t_c).is_err());
    }

    #[test]
    fn bicycle_is_self_paired() {
        let t = Tire::from_ints(1, &[Some(0), None, None]).unwrap();
        let m = bicycle_model(&t).unwrap();
        assert_eq!(m.num_rows(), 3);
        assert_eq!(m.num_cols(), 6);
        let (mc, md) = four_cycle_pair(&t, &t.transpose()).unwrap();
        assert_eq!(mc, md);
        assert_eq!(m, mc);

        let all_inf = Tire::from_ints(1, &[None, None]).unwrap();
        let z = bicycle_model(&all_inf).unwrap();
        assert!(z.rows().iter().all(|r| r.iter().all(|v| !v.is_finite())));

        let bad = Tire::from_ints(3, &[Some(0)]).unwrap();
        assert!(bicycle_model(&bad).is_err());
    }

    #[test]
    fn equivalence_maps_are_reversals() {
        let (rp, cp) = equivalence_permutations(1, 1);
        assert_eq!(rp, vec![0]);
        assert_eq!(cp, vec![1, 0]);
        let (rp, cp) = equivalence_permutations(7, 3);
        assert_eq!(rp.len(), 21);
        assert_eq!(cp.len(), 42);
        assert_eq!(rp[0], 20);
        assert_eq!(cp[41], 0);
    }

    #[test]
    fn cdm_cases() {
        let good =
            ModelMatrix::from_ints(3, &[vec![Some(0), Some(0), Some(0)], vec![Some(0), Some(1), Some(2)]])
                .unwrap();
        assert!(good.is_cdm().unwrap());
        let dup = ModelMatrix::from_ints(3, &[vec![Some(0); 3], vec![Some(0); 3]]).unwrap();
        assert!(!dup.is_cdm().unwrap());
        let (mc, _) = example_pair();
        assert!(!mc.is_cdm().unwrap()); // P = 7 but L = 6
        let with_inf = ModelMatrix::from_ints(2, &[vec![Some(0), None]]).unwrap();
        assert!(with_inf.is_cdm().is_err());
    }

    #[test]
    fn text_round_trip() {
        let (mc, _) = example_pair();
        let text = mc.to_text();
        assert!(text.starts_with("3 6 7\n"));
        assert_eq!(ModelMatrix::parse_text(&text).unwrap(), mc);

        let with_inf = ModelMatrix::from_ints(5, &[vec![Some(1), None], vec![None, Some(4)]]).unwrap();
        let round = ModelMatrix::parse_text(&with_inf.to_text()).unwrap();
        assert_eq!(round, with_inf);

        // -1 accepted on import only
        let legacy = "1 2 5\n-1 3\n";
        let m = ModelMatrix::parse_text(legacy).unwrap();
        assert_eq!(m.entry(0, 0), IndexValue::Infinity);
        assert_eq!(m.entry(0, 1), fin(3));
        assert!(m.to_text().contains("inf"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match ModelMatrix::parse_text("2 2 7\n1 2\n3 abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match ModelMatrix::parse_text("2 2 7\n1 2 3\n4 5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match ModelMatrix::parse_text("1 1 7\n9\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected range error, got {other:?}"),
        }
    }
}
