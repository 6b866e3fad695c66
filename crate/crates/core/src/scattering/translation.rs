//! Scalar addition theorem along the z axis.
//!
//! An outgoing wave `k_l(κ|r' + tẑ|) Y_lm` about one centre is re-expanded
//! in regular waves `i_{l'}(κr') Y_{l'm}` about a centre displaced by `−tẑ`:
//!
//! ```text
//! U^m_{l'l}(t) = (−1)^{l'+m} Σ_L c^m_{l l' L} k_L(κt)
//! c^m_{l l' L} = (2L+1) √((2l+1)(2l'+1)) (l l' L; 0 0 0)(l l' L; m −m 0)
//! ```
//!
//! with `L` running over `|l − l'|, …, l + l'` in steps of two. The phase is
//! a similarity transform that cancels in every round trip, so the energies
//! use the symmetric kernel `G^m_{l'l} = Σ_L c k_L` directly.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{invalid, CasimirError, Result};
use crate::numerics::bessel::ln_k_sequence;
use crate::numerics::wigner::{three_j_m_minus_m, three_j_zero, LogFactorials};

/// Largest truncation order accepted by the coefficient table.
pub const MAX_L: usize = 100;

/// Read-only table of `c^m_{l l' L}` for `0 ≤ m ≤ l, l' ≤ l_max`.
#[derive(Debug, Clone)]
pub struct GauntTable {
    l_max: usize,
    /// `blocks[m][(l − m)·n + (l' − m)]` holds `c` for `L = |l − l'|, …, l + l'` step 2,
    /// where `n = l_max − m + 1`.
    blocks: Vec<Vec<Vec<f64>>>,
}

impl GauntTable {
    pub fn new(l_max: usize) -> Result<Self> {
        if l_max > MAX_L {
            return Err(CasimirError::TruncationTooLarge {
                requested: l_max,
                supported: MAX_L,
            });
        }
        let lf = LogFactorials::new(4 * l_max + 4);
        let blocks = (0..=l_max)
            .into_par_iter()
            .map(|m| {
                let n = l_max - m + 1;
                let mut out = vec![Vec::new(); n * n];
                for l in m..=l_max {
                    for lp in l..=l_max {
                        let wm = three_j_m_minus_m(l, lp, m);
                        let lmin = l.abs_diff(lp);
                        let norm = (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt();
                        let c: Vec<f64> = (lmin..=l + lp)
                            .step_by(2)
                            .map(|big| {
                                (2 * big + 1) as f64 * norm * three_j_zero(l, lp, big, &lf) * wm[big - lmin]
                            })
                            .collect();
                        out[(lp - m) * n + (l - m)] = c.clone();
                        out[(l - m) * n + (lp - m)] = c;
                    }
                }
                out
            })
            .collect();
        Ok(Self { l_max, blocks })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Coefficients for `L = |l − l'|, …, l + l'` in steps of two.
    pub fn coefficients(&self, m: usize, l: usize, lp: usize) -> &[f64] {
        let n = self.l_max - m + 1;
        &self.blocks[m][(l - m) * n + (lp - m)]
    }
}

/// `ln k_L(x)` for `L ≤ 2 l_max` and the ratios `k_L/k_{L+2}` for `L ≤ 2 l_max − 2`.
#[derive(Debug, Clone)]
pub(crate) struct KernelSeries {
    pub ln_k: Vec<f64>,
    pub q: Vec<f64>,
}

impl KernelSeries {
    pub fn new(l_max: usize, x: f64) -> Result<Self> {
        let ln_k = ln_k_sequence(2 * l_max, x)?;
        let q = (0..(2 * l_max).saturating_sub(1)).map(|big| (ln_k[big] - ln_k[big + 2]).exp()).collect();
        Ok(Self { ln_k, q })
    }

    /// `Σ_L c_L k_L / k_{l+l'}` by Horner's rule on the ratios.
    #[inline]
    pub fn reduced_sum(&self, coeffs: &[f64], lmin: usize) -> f64 {
        let mut acc = 0.0;
        let mut big = lmin;
        for (i, c) in coeffs.iter().enumerate() {
            if i > 0 {
                acc *= self.q[big];
                big += 2;
            }
            acc += c;
        }
        acc
    }
}

/// `X_{ll'} = e^{a_l + b_{l'}} G^m_{ll'}` for `l, l' = m..=l_max`, evaluated
/// without forming the possibly huge `k_{l+l'}` separately.
pub(crate) fn scaled_kernel_block(
    table: &GauntTable,
    m: usize,
    l_max: usize,
    kernel: &KernelSeries,
    a: &[f64],
    b: &[f64],
    parity_sign: bool,
) -> DMatrix<f64> {
    let n = l_max - m + 1;
    DMatrix::from_fn(n, n, |i, j| {
        let (l, lp) = (m + i, m + j);
        let s = kernel.reduced_sum(table.coefficients(m, l, lp), l.abs_diff(lp));
        let v = (kernel.ln_k[l + lp] + a[l] + b[lp]).exp() * s;
        if parity_sign && (l + lp) % 2 == 1 {
            -v
        } else {
            v
        }
    })
}

/// Translation block `U^m_{l'l}(κ, d)` for `l, l' = m..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationBlock {
    pub m: usize,
    pub l_max: usize,
    pub kappa: f64,
    pub d: f64,
    /// Row index `l' − m`, column index `l − m`.
    pub matrix: DMatrix<f64>,
}

pub fn translation_block(l_max: usize, m: usize, kappa: f64, d: f64) -> Result<TranslationBlock> {
    if m > l_max {
        return Err(invalid("m", format!("must not exceed l_max = {l_max}, got {m}")));
    }
    if !(kappa > 0.0 && d > 0.0) || !(kappa.is_finite() && d.is_finite()) {
        return Err(invalid("kappa·d", format!("need κ > 0 and d > 0, got ({kappa}, {d})")));
    }
    let table = GauntTable::new(l_max)?;
    let kernel = KernelSeries::new(l_max, kappa * d)?;
    let zeros = vec![0.0; l_max + 1];
    let mut g = scaled_kernel_block(&table, m, l_max, &kernel, &zeros, &zeros, false);
    for i in 0..g.nrows() {
        if (m + i + m) % 2 == 1 {
            g.row_mut(i).neg_mut();
        }
    }
    Ok(TranslationBlock {
        m,
        l_max,
        kappa,
        d,
        matrix: g,
    })
}
