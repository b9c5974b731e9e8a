//! Building CSS candidate pairs from a perfume: the circulant power
//! construction, mask-vector row selection, and code-rate estimation.
//!
//! For a perfume (P, sigma, tau) of order t the two model matrices are
//! built from the tires with first rows `(1, sigma, ..., sigma^{t-1})`
//! and `tau * (1, sigma, ..., sigma^{t-1})`; the pair satisfies both the
//! twisted condition and the girth condition with L = 2t columns.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{four_cycle_pair, IndexValue, ModelMatrix, Tire};
use crate::perfume::Perfume;

/// Binary row selector of length `ord`; bit 0 deletes the row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskVector {
    bits: Vec<bool>,
}

impl MaskVector {
    pub fn new(bits: Vec<bool>) -> MaskVector {
        MaskVector { bits }
    }

    /// All-ones mask (keeps every row).
    pub fn ones(len: usize) -> MaskVector {
        MaskVector { bits: vec![true; len] }
    }

    /// Parses `"11010"` or `"1,1,0,1,0"`.
    pub fn parse(text: &str) -> Result<MaskVector> {
        let stripped: String = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '(' && *c != ')')
            .collect();
        if stripped.is_empty() {
            return Err(Error::InvalidInput("empty mask".into()));
        }
        stripped
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("bad mask character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(MaskVector::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl std::fmt::Display for MaskVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.bits {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A constructed pair of model matrices with its provenance.
#[derive(Debug, Clone)]
pub struct CssCandidate {
    perfume: Perfume,
    mc: ModelMatrix,
    md: ModelMatrix,
    mask_c: MaskVector,
    mask_d: MaskVector,
}

impl CssCandidate {
    pub fn perfume(&self) -> &Perfume {
        &self.perfume
    }

    pub fn mc(&self) -> &ModelMatrix {
        &self.mc
    }

    pub fn md(&self) -> &ModelMatrix {
        &self.md
    }

    pub fn mask_c(&self) -> &MaskVector {
        &self.mask_c
    }

    pub fn mask_d(&self) -> &MaskVector {
        &self.mask_d
    }

    /// Column count L = 2 * ord(sigma).
    pub fn columns(&self) -> usize {
        self.mc.num_cols()
    }

    /// Code length of the expanded pair.
    pub fn code_length(&self) -> u64 {
        self.perfume.modulus() * self.columns() as u64
    }
}

/// Builds the J×L and K×L model matrices of a perfume: row j of the first
/// holds sigma^(l-j) on the left half and tau*sigma^(l-j) on the right;
/// row k of the second holds the negated mirror -tau*sigma^(k-l) and
/// -sigma^(k-l). Exponents live in the cyclic group generated by sigma.
pub fn theorem2_build(pf: &Perfume, j: usize, k: usize) -> Result<CssCandidate> {
    let ord = pf.order() as usize;
    if j == 0 || k == 0 || j > ord || k > ord {
        return Err(Error::InvalidInput(format!(
            "row counts must lie in [1, {ord}], got J={j}, K={k}"
        )));
    }
    let p = pf.modulus();
    let powers: Vec<u64> = {
        let mut v = Vec::with_capacity(ord);
        let mut x = 1u64;
        for _ in 0..ord {
            v.push(x);
            x = ((x as u128 * pf.sigma() as u128) % p as u128) as u64;
        }
        v
    };
    let t_a = Tire::new(p, powers.iter().map(|&x| IndexValue::Finite(x)).collect())?;
    let t_b = Tire::new(
        p,
        powers
            .iter()
            .map(|&x| IndexValue::Finite(((x as u128 * pf.tau() as u128) % p as u128) as u64))
            .collect(),
    )?;
    let (mc_full, md_full) = four_cycle_pair(&t_a, &t_b)?;
    let keep_j: Vec<bool> = (0..ord).map(|r| r < j).collect();
    let keep_k: Vec<bool> = (0..ord).map(|r| r < k).collect();
    let mc = mc_full.select_rows(&keep_j)?;
    let md = md_full.select_rows(&keep_k)?;
    debug_assert!(mc.check_twisted(&md).unwrap_or(false));
    debug_assert!(mc.check_girth6() && md.check_girth6());
    Ok(CssCandidate {
        perfume: *pf,
        mc,
        md,
        mask_c: MaskVector::ones(j),
        mask_d: MaskVector::ones(k),
    })
}

/// Deletes the rows whose mask bit is 0 from a full-order candidate. The
/// surviving pair is (wt(mask_c), L)- and (wt(mask_d), L)-regular and
/// keeps both conditions (row deletion cannot create violations).
pub fn apply_masks(
    cand: &CssCandidate,
    mask_c: &MaskVector,
    mask_d: &MaskVector,
) -> Result<CssCandidate> {
    let ord = cand.perfume.order() as usize;
    if cand.mc.num_rows() != ord || cand.md.num_rows() != ord {
        return Err(Error::InvalidInput(format!(
            "masks apply to a full-order candidate (J = K = {ord})"
        )));
    }
    if mask_c.len() != ord || mask_d.len() != ord {
        return Err(Error::InvalidInput(format!(
            "mask lengths {} / {} do not match order {ord}",
            mask_c.len(),
            mask_d.len()
        )));
    }
    if mask_c.weight() == 0 || mask_d.weight() == 0 {
        return Err(Error::InvalidInput("a mask must keep at least one row".into()));
    }
    Ok(CssCandidate {
        perfume: cand.perfume,
        mc: cand.mc.select_rows(mask_c.bits())?,
        md: cand.md.select_rows(mask_d.bits())?,
        mask_c: mask_c.clone(),
        mask_d: mask_d.clone(),
    })
}

/// Closed-form rate estimate `1 - (J*P + K*P - J - K + 2) / (L*P)` as an
/// exact rational. Tends to `(L - (J + K)) / L` for large P; negative
/// values signal the J + K = L boundary.
pub fn approx_rate(j: u64, k: u64, l: u64, p: u64) -> Ratio<i64> {
    let n = (l * p) as i64;
    Ratio::new(n - (j * p + k * p - j - k + 2) as i64, n)
}

/// Parameter menu for a target rate k/n: the smallest m with
/// `2m(n - k) >= 4`, giving L = 2mn and J = K = m(n - k).
pub fn rate_menu(n: u64, k: u64) -> Result<(u64, u64, u64, u64)> {
    if k >= n {
        return Err(Error::InvalidInput(format!(
            "rate menu needs 0 <= k < n, got k={k}, n={n}"
        )));
    }
    let m = (1..).find(|m| 2 * m * (n - k) >= 4).expect("n - k >= 1");
    Ok((m, 2 * m * n, m * (n - k), m * (n - k)))
}

/// Flat JSON description of a built candidate; the wire format consumed
/// and produced by the command-line tool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
    #[serde(rename = "P")]
    pub p: u64,
    pub sigma: u64,
    pub tau: u64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "mask_C")]
    pub mask_c: Vec<u8>,
    #[serde(rename = "mask_D")]
    pub mask_d: Vec<u8>,
    #[serde(rename = "rows_C")]
    pub rows_c: Vec<Vec<u64>>,
    #[serde(rename = "rows_D")]
    pub rows_d: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<serde_json::Value>,
}

impl CodeDescriptor {
    pub fn from_candidate(cand: &CssCandidate) -> CodeDescriptor {
        let rows = |m: &ModelMatrix| {
            m.rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| match v {
                            IndexValue::Finite(x) => *x,
                            IndexValue::Infinity => unreachable!("construction never emits inf"),
                        })
                        .collect()
                })
                .collect()
        };
        CodeDescriptor {
            meta: None,
            p: cand.perfume.modulus(),
            sigma: cand.perfume.sigma(),
            tau: cand.perfume.tau(),
            l: cand.columns(),
            mask_c: cand.mask_c.bits().iter().map(|&b| b as u8).collect(),
            mask_d: cand.mask_d.bits().iter().map(|&b| b as u8).collect(),
            rows_c: rows(&cand.mc),
            rows_d: rows(&cand.md),
            checks: None,
        }
    }

    /// Reconstructs the model matrices; descriptor rows are trusted data
    /// and re-validated here.
    pub fn matrices(&self) -> Result<(ModelMatrix, ModelMatrix)> {
        let to_model = |rows: &Vec<Vec<u64>>| {
            ModelMatrix::new(
                self.p,
                rows.iter()
                    .map(|r| r.iter().map(|&v| IndexValue::Finite(v % self.p)).collect())
                    .collect(),
            )
        };
        Ok((to_model(&self.rows_c)?, to_model(&self.rows_d)?))
    }
}
