//! Exact GF(2) machinery: expansion of model matrices into sparse binary
//! parity-check matrices, product-with-transpose zero tests, rank, exact
//! quantum code rate, and Tanner-graph girth.
//!
//! Matrices are stored row-sparse (sorted column indices); rank and
//! product checks run on transient bit-packed copies, 64 columns per word.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{IndexValue, ModelMatrix};

/// A binary matrix stored as sorted column-index lists, one per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from per-row support lists; indices must be strictly
    /// increasing within each row and below `n_cols`.
    pub fn new(n_rows: usize, n_cols: usize, rows: Vec<Vec<usize>>) -> Result<SparseBinaryMatrix> {
        if rows.len() != n_rows {
            return Err(Error::InvalidInput(format!(
                "expected {n_rows} rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidInput(format!(
                        "row {i}: indices not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= n_cols {
                    return Err(Error::InvalidInput(format!(
                        "row {i}: index {last} >= {n_cols}"
                    )));
                }
            }
        }
        Ok(SparseBinaryMatrix { n_rows, n_cols, rows })
    }

    /// Builds from 0/1 entries.
    pub fn from_dense(entries: &[Vec<u8>]) -> Result<SparseBinaryMatrix> {
        let n_rows = entries.len();
        let n_cols = entries.first().map_or(0, |r| r.len());
        let rows = entries
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, _)| c)
                    .collect()
            })
            .collect();
        SparseBinaryMatrix::new(n_rows, n_cols, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Number of stored 1-entries.
    pub fn weight(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Row as a 0/1 vector.
    pub fn dense_row(&self, i: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.n_cols];
        for &c in &self.rows[i] {
            out[c] = 1;
        }
        out
    }

    /// The matrix with rows and columns remapped:
    /// `out[i][j] = self[row_map[i]][col_map[j]]`.
    pub fn permuted(&self, row_map: &[usize], col_map: &[usize]) -> Result<SparseBinaryMatrix> {
        if row_map.len() != self.n_rows || col_map.len() != self.n_cols {
            return Err(Error::InvalidInput(
                "permutation length does not match matrix shape".into(),
            ));
        }
        let mut col_inv = vec![0usize; self.n_cols];
        for (j, &src) in col_map.iter().enumerate() {
            col_inv[src] = j;
        }
        let rows = row_map
            .iter()
            .map(|&src| {
                let mut row: Vec<usize> = self.rows[src].iter().map(|&c| col_inv[c]).collect();
                row.sort_unstable();
                row
            })
            .collect();
        SparseBinaryMatrix::new(self.n_rows, self.n_cols, rows)
    }

    fn packed_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n_cols.div_ceil(64);
        self.rows
            .iter()
            .map(|row| {
                let mut packed = vec![0u64; words];
                for &c in row {
                    packed[c / 64] |= 1 << (c % 64);
                }
                packed
            })
            .collect()
    }
}

/// Expands a model matrix into its (J*P)×(L*P) parity-check matrix: entry
/// `v` becomes the permutation block with a 1 at `(r, (r + v) mod P)` for
/// each `r`; `inf` becomes a zero block.
pub fn expand(mc: &ModelMatrix) -> SparseBinaryMatrix {
    let p = mc.circulant_size() as usize;
    let (j_blocks, l_blocks) = (mc.num_rows(), mc.num_cols());
    let mut rows = Vec::with_capacity(j_blocks * p);
    for j in 0..j_blocks {
        for r in 0..p {
            let mut row: Vec<usize> = mc
                .row(j)
                .iter()
                .enumerate()
                .filter_map(|(l, v)| match v {
                    IndexValue::Finite(b) => Some(l * p + (r + *b as usize) % p),
                    IndexValue::Infinity => None,
                })
                .collect();
            row.sort_unstable();
            rows.push(row);
        }
    }
    SparseBinaryMatrix::new(j_blocks * p, l_blocks * p, rows)
        .expect("expansion of a valid model matrix is valid")
}

/// `true` iff `a * b^T = 0` over GF(2): every row of `a` has even-sized
/// intersection with every row of `b`.
pub fn product_is_zero(a: &SparseBinaryMatrix, b: &SparseBinaryMatrix) -> Result<bool> {
    if a.n_cols != b.n_cols {
        return Err(Error::InvalidInput(format!(
            "product_is_zero: column mismatch {} vs {}",
            a.n_cols, b.n_cols
        )));
    }
    let pb = b.packed_rows();
    for ra in &a.rows {
        let mut pa = vec![0u64; a.n_cols.div_ceil(64)];
        for &c in ra {
            pa[c / 64] |= 1 << (c % 64);
        }
        for rb in &pb {
            let parity = pa
                .iter()
                .zip(rb)
                .fold(0u32, |acc, (x, y)| acc ^ ((x & y).count_ones() & 1));
            if parity != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank over GF(2), by elimination on bit-packed rows.
pub fn rank(a: &SparseBinaryMatrix) -> usize {
    let mut basis = RowBasis::with_capacity(a.n_cols, a.n_rows.min(a.n_cols));
    for row in a.packed_rows() {
        basis.insert(row);
    }
    basis.rank()
}

/// An incrementally built row-echelon basis of bit-packed GF(2) vectors.
/// Used for rank and for row-space membership tests.
#[derive(Debug, Clone)]
pub struct RowBasis {
    n_cols: usize,
    // pivot column -> reduced row owning that pivot
    pivots: Vec<(usize, Vec<u64>)>,
}

impl RowBasis {
    pub fn new(n_cols: usize) -> RowBasis {
        RowBasis { n_cols, pivots: Vec::new() }
    }

    fn with_capacity(n_cols: usize, cap: usize) -> RowBasis {
        RowBasis { n_cols, pivots: Vec::with_capacity(cap) }
    }

    /// Builds the basis from all rows of a matrix.
    pub fn from_matrix(a: &SparseBinaryMatrix) -> RowBasis {
        let mut basis = RowBasis::with_capacity(a.n_cols(), a.n_rows().min(a.n_cols()));
        for row in a.packed_rows() {
            basis.insert(row);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn leading(row: &[u64]) -> Option<usize> {
        row.iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Reduces `row` against the basis in place; returns its leading
    /// column if a nonzero remainder is left.
    fn reduce(&self, row: &mut [u64]) -> Option<usize> {
        loop {
            let lead = Self::leading(row)?;
            match self.pivots.binary_search_by_key(&lead, |(c, _)| *c) {
                Ok(idx) => {
                    for (w, p) in row.iter_mut().zip(&self.pivots[idx].1) {
                        *w ^= p;
                    }
                }
                Err(_) => return Some(lead),
            }
        }
    }

    /// Inserts a row; returns `true` if it enlarged the basis.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        match self.reduce(&mut row) {
            Some(lead) => {
                let idx = self
                    .pivots
                    .binary_search_by_key(&lead, |(c, _)| *c)
                    .unwrap_err();
                self.pivots.insert(idx, (lead, row));
                true
            }
            None => false,
        }
    }

    /// `true` iff the 0/1 vector lies in the span of the inserted rows.
    pub fn contains(&self, vector: &[u8]) -> bool {
        debug_assert_eq!(vector.len(), self.n_cols);
        let mut row = vec![0u64; self.n_cols.div_ceil(64)];
        for (c, &v) in vector.iter().enumerate() {
            if v != 0 {
                row[c / 64] |= 1 << (c % 64);
            }
        }
        self.reduce(&mut row).is_none()
    }
}

/// Exact quantum code rate `(n - rank(hc) - rank(hd)) / n` of a pair of
/// parity-check matrices on the same length. Errors when the pair does not
/// satisfy the twisted condition (the rate is undefined for a non-CSS pair).
pub fn quantum_rate(hc: &SparseBinaryMatrix, hd: &SparseBinaryMatrix) -> Result<Ratio<i64>> {
    if hc.n_cols != hd.n_cols {
        return Err(Error::InvalidInput(format!(
            "quantum_rate: length mismatch {} vs {}",
            hc.n_cols, hd.n_cols
        )));
    }
    if !product_is_zero(hc, hd)? {
        return Err(Error::InvalidInput(
            "quantum_rate: pair violates the twisted condition".into(),
        ));
    }
    let n = hc.n_cols as i64;
    Ok(Ratio::new(n - rank(hc) as i64 - rank(hd) as i64, n))
}

/// Result of a girth computation capped at `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Exact(usize),
    AtLeast(usize),
}

impl Girth {
    pub fn at_least(self, g: usize) -> bool {
        match self {
            Girth::Exact(v) => v >= g,
            Girth::AtLeast(v) => v >= g,
        }
    }
}

impl std::fmt::Display for Girth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Girth::Exact(v) => write!(f, "{v}"),
            Girth::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Default girth cap: beyond `2*(n_rows + n_cols) + 2` every cycle has
/// been seen, so the cap only guards degenerate searches.
pub fn default_girth_cap(a: &SparseBinaryMatrix) -> usize {
    2 * (a.n_rows + a.n_cols) + 2
}

/// Girth of the bipartite Tanner graph of `a` (checks = rows, variables =
/// columns), exact when below `cap`, reported as `AtLeast(cap)` otherwise.
///
/// Breadth-first search rooted at every check vertex; a non-tree edge
/// `(u, v)` with both endpoints reached closes a cycle of length
/// `dist(u) + dist(v) + 1` through the root, and the minimum over all
/// roots is the exact girth. Depth is limited by the best cycle found so
/// far, so dense small-girth graphs terminate quickly.
pub fn tanner_girth(a: &SparseBinaryMatrix, cap: usize) -> Girth {
    let cap = cap.max(4).next_multiple_of(2);
    let n_checks = a.n_rows;
    let n_vars = a.n_cols;
    // adjacency over vertex ids: checks 0..n_checks, vars n_checks..
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n_checks + n_vars];
    for (i, row) in a.rows.iter().enumerate() {
        for &c in row {
            adj[i].push((n_checks + c) as u32);
            adj[n_checks + c].push(i as u32);
        }
    }

    let mut best = cap;
    let mut dist = vec![u32::MAX; n_checks + n_vars];
    let mut parent = vec![u32::MAX; n_checks + n_vars];
    let mut touched: Vec<u32> = Vec::new();
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();

    for root in 0..n_checks {
        if best == 4 {
            break; // bipartite minimum; nothing shorter exists
        }
        // cycles shorter than `best` need vertices within this depth
        let depth_limit = (best as u32 - 2) / 2;
        queue.clear();
        queue.push_back(root as u32);
        dist[root] = 0;
        touched.push(root as u32);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du >= depth_limit {
                continue;
            }
            for &v in &adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    parent[v as usize] = u;
                    touched.push(v);
                    queue.push_back(v);
                } else if parent[u as usize] != v && parent[v as usize] != u {
                    // non-tree edge; bipartiteness makes the closed walk even
                    let cycle = (du + dist[v as usize] + 1) as usize;
                    if cycle % 2 == 0 && cycle < best {
                        best = cycle;
                    }
                }
            }
        }
        for &t in &touched {
            dist[t as usize] = u32::MAX;
            parent[t as usize] = u32::MAX;
        }
        touched.clear();
    }

    if best < cap {
        Girth::Exact(best)
    } else {
        Girth::AtLeast(cap)
    }
}

/// Serializes in alist interchange form: dimensions, max column/row
/// weights, per-column weights, per-row weights, then 1-based index lists
/// column-by-column and row-by-row.
pub fn to_alist(a: &SparseBinaryMatrix) -> String {
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); a.n_cols];
    for (i, row) in a.rows.iter().enumerate() {
        for &c in row {
            cols[c].push(i);
        }
    }
    let max_col = cols.iter().map(|c| c.len()).max().unwrap_or(0);
    let max_row = a.rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", a.n_cols, a.n_rows));
    out.push_str(&format!("{max_col} {max_row}\n"));
    let weights = |v: &[Vec<usize>]| {
        v.iter()
            .map(|x| x.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&weights(&cols));
    out.push('\n');
    out.push_str(&weights(&a.rows));
    out.push('\n');
    let lists = |v: &[Vec<usize>], out: &mut String| {
        for x in v {
            let toks: Vec<String> = x.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
    };
    lists(&cols, &mut out);
    lists(&a.rows, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{four_cycle_pair, ModelMatrix, Tire};

    fn model(p: u64, rows: &[Vec<Option<i64>>]) -> ModelMatrix {
        ModelMatrix::from_ints(p, rows).unwrap()
    }

    fn example_pair() -> (ModelMatrix, ModelMatrix) {
        let t_a = Tire::from_ints(7, &[Some(1), Some(2), Some(4)]).unwrap();
        let t_b = Tire::from_ints(7, &[Some(3), Some(6), Some(5)]).unwrap();
        four_cycle_pair(&t_a, &t_b).unwrap()
    }

    /// Naive dense product over GF(2), used as an oracle.
    fn dense_product(a: &SparseBinaryMatrix, b: &SparseBinaryMatrix) -> Vec<Vec<u8>> {
        (0..a.n_rows())
            .map(|i| {
                let ra = a.dense_row(i);
                (0..b.n_rows())
                    .map(|j| {
                        let rb = b.dense_row(j);
                        ra.iter().zip(&rb).map(|(x, y)| x & y).fold(0, |p, v| p ^ v)
                    })
                    .collect()
            })
            .collect()
    }

    /// Naive dense Gaussian elimination, used as a rank oracle.
    fn dense_rank(a: &SparseBinaryMatrix) -> usize {
        let mut m: Vec<Vec<u8>> = (0..a.n_rows()).map(|i| a.dense_row(i)).collect();
        let mut rank = 0;
        for col in 0..a.n_cols() {
            if let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] == 1) {
                m.swap(rank, pivot);
                for r in 0..m.len() {
                    if r != rank && m[r][col] == 1 {
                        let (head, tail) = m.split_at_mut(rank.max(r));
                        let (a, b) = if r < rank {
                            (&mut head[r], &tail[0])
                        } else {
                            (&mut tail[0], &head[rank])
                        };
                        for (x, y) in a.iter_mut().zip(b.iter()) {
                            *x ^= *y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn expand_single_blocks() {
        let m1 = expand(&model(3, &[vec![Some(1)]]));
        assert_eq!(m1.rows(), &[vec![1], vec![2], vec![0]]);
        let minf = expand(&model(3, &[vec![None]]));
        assert_eq!(minf.rows(), &[vec![], vec![], vec![]]);
        let m0 = expand(&model(3, &[vec![Some(0)]]));
        assert_eq!(m0.rows(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn expansion_is_regular_without_inf() {
        let (mc, _) = example_pair();
        let h = expand(&mc);
        let mut col_weight = vec![0usize; h.n_cols()];
        for row in h.rows() {
            assert_eq!(row.len(), 6);
            for &c in row {
                col_weight[c] += 1;
            }
        }
        assert!(col_weight.iter().all(|&w| w == 3));
    }

    #[test]
    fn product_zero_cases() {
        let (mc, md) = example_pair();
        assert!(product_is_zero(&expand(&mc), &expand(&md)).unwrap());

        let eye = expand(&model(2, &[vec![Some(0)]]));
        assert!(!product_is_zero(&eye, &eye).unwrap());

        let zero = expand(&model(2, &[vec![None]]));
        assert!(product_is_zero(&eye, &zero).unwrap());

        let wide = expand(&model(3, &[vec![Some(0)]]));
        assert!(product_is_zero(&eye, &wide).is_err());
    }

    #[test]
    fn rank_cases() {
        let eye5 = SparseBinaryMatrix::new(5, 5, (0..5).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(rank(&eye5), 5);

        let (mc, md) = example_pair();
        let hc = expand(&mc);
        assert_eq!(rank(&hc), dense_rank(&hc));
        assert_eq!(rank(&hc), 19);
        assert_eq!(rank(&expand(&md)), 19);

        let dup = SparseBinaryMatrix::new(3, 4, vec![vec![0, 2], vec![0, 2], vec![1]]).unwrap();
        assert_eq!(rank(&dup), 2);
    }

    #[test]
    fn rank_bounds_and_permutation_invariance() {
        let (mc, _) = example_pair();
        let h = expand(&mc);
        let r = rank(&h);
        assert!(r <= h.n_rows().min(h.n_cols()));
        // swap some rows; rank unchanged
        let mut rows = h.rows().to_vec();
        rows.reverse();
        let swapped = SparseBinaryMatrix::new(h.n_rows(), h.n_cols(), rows).unwrap();
        assert_eq!(rank(&swapped), r);
    }

    #[test]
    fn quantum_rate_cases() {
        let (mc, md) = example_pair();
        let rate = quantum_rate(&expand(&mc), &expand(&md)).unwrap();
        assert_eq!(rate, Ratio::new(4, 42));

        let zero = SparseBinaryMatrix::new(2, 4, vec![vec![], vec![]]).unwrap();
        assert_eq!(quantum_rate(&zero, &zero).unwrap(), Ratio::new(1, 1));

        let eye = expand(&model(2, &[vec![Some(0)]]));
        assert!(quantum_rate(&eye, &eye).is_err());
    }

    #[test]
    fn girth_cases() {
        // dual-containing 3x6 example: girth exactly 4
        let h = SparseBinaryMatrix::from_dense(&[
            vec![1, 1, 0, 0, 1, 1],
            vec![0, 0, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 0, 0],
        ])
        .unwrap();
        assert_eq!(tanner_girth(&h, default_girth_cap(&h)), Girth::Exact(4));

        let (mc, md) = example_pair();
        let hc = expand(&mc);
        assert_eq!(tanner_girth(&hc, default_girth_cap(&hc)), Girth::Exact(6));
        let hd = expand(&md);
        assert_eq!(tanner_girth(&hd, default_girth_cap(&hd)), Girth::Exact(6));
        assert_eq!(tanner_girth(&hc, 6), Girth::AtLeast(6));

        // single 1 per column: a forest, no cycles
        let tree = SparseBinaryMatrix::new(2, 4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(tanner_girth(&tree, 14), Girth::AtLeast(14));
    }

    #[test]
    fn product_matches_dense_oracle() {
        let mut state = 0xfeed_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state >> 33
        };
        for _ in 0..50 {
            let p = 2 + next() % 6;
            let rows_a: Vec<Vec<Option<i64>>> = (0..1 + next() % 3)
                .map(|_| {
                    (0..3)
                        .map(|_| if next() % 4 == 0 { None } else { Some((next() % p) as i64) })
                        .collect()
                })
                .collect();
            let rows_b: Vec<Vec<Option<i64>>> = (0..1 + next() % 3)
                .map(|_| {
                    (0..3)
                        .map(|_| if next() % 4 == 0 { None } else { Some((next() % p) as i64) })
                        .collect()
                })
                .collect();
            let a = expand(&model(p, &rows_a));
            let b = expand(&model(p, &rows_b));
            let zero = dense_product(&a, &b).iter().all(|r| r.iter().all(|&v| v == 0));
            assert_eq!(product_is_zero(&a, &b).unwrap(), zero);
        }
    }

    #[test]
    fn row_basis_membership() {
        let (mc, md) = example_pair();
        let hc = expand(&mc);
        let basis = RowBasis::from_matrix(&hc);
        assert_eq!(basis.rank(), 19);
        for i in 0..hc.n_rows() {
            assert!(basis.contains(&hc.dense_row(i)));
        }
        // sum of two rows stays in the span
        let mut sum = hc.dense_row(0);
        for (x, y) in sum.iter_mut().zip(hc.dense_row(5)) {
            *x ^= y;
        }
        assert!(basis.contains(&sum));
        // a row of the partner matrix lies in ker(hc), not in rowspace(hc)
        let hd = expand(&md);
        assert!(!basis.contains(&hd.dense_row(0)));
        // the rows of one circulant block-row sum to the all-ones vector
        let mut ones = hc.dense_row(0);
        for i in 1..7 {
            for (x, y) in ones.iter_mut().zip(hc.dense_row(i)) {
                *x ^= y;
            }
        }
        assert!(ones.iter().all(|&v| v == 1));
        assert!(basis.contains(&ones));
    }

    #[test]
    fn alist_round_shape() {
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let text = to_alist(&h);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "3 2");
        assert_eq!(lines[1], "2 2");
        assert_eq!(lines[2], "1 2 1");
        assert_eq!(lines[3], "2 2");
        // columns then rows, 1-based
        assert_eq!(lines[4], "1");
        assert_eq!(lines[5], "1 2");
        assert_eq!(lines[6], "2");
        assert_eq!(lines[7], "1 2");
        assert_eq!(lines[8], "2 3");
    }
}
