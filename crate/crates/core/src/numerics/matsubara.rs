use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, CasimirError, Result};
use crate::numerics::quadrature::QuadratureResult;
use crate::numerics::sum::CompensatedSum;

/// Terms evaluated per parallel batch. Terms past the stopping point are
/// discarded, so the result does not depend on this value.
const CHUNK: usize = 16;

/// Imaginary Matsubara frequencies `ξ_n = 2πnT` with the primed-sum weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraGrid {
    temperature: f64,
    max_terms: usize,
}

impl MatsubaraGrid {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(invalid("temperature", format!("must be positive, got {temperature}")));
        }
        Ok(Self {
            temperature,
            max_terms: 1_000_000,
        })
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(2);
        self
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn frequency(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 * self.temperature
    }

    pub fn weight(&self, n: usize) -> f64 {
        if n == 0 {
            0.5
        } else {
            1.0
        }
    }

    /// First `count` frequencies.
    pub fn frequencies(&self, count: usize) -> Vec<f64> {
        (0..count).map(|n| self.frequency(n)).collect()
    }
}

/// Outcome of a vector-valued Matsubara sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MatsubaraSum {
    /// `T Σ'_n f_n` per component.
    pub values: Vec<f64>,
    /// `T f_0 / 2` per component.
    pub zero_mode: Vec<f64>,
    /// Bound on the neglected tail of the component total.
    pub tail_estimate: f64,
    pub terms: usize,
}

/// Sums `T Σ'_n f(n, ξ_n)` for a vector-valued summand.
///
/// The sum stops at the first `n ≥ 2` for which the integral bound
/// `|g_n| / ln(|g_{n−1}|/|g_n|)` on the remaining total `g = Σ_c f_c` falls
/// below `tail_tol` times the running total.
pub fn matsubara_sum_vec<F>(f: F, dim: usize, grid: &MatsubaraGrid, tail_tol: f64, parallel: bool) -> Result<MatsubaraSum>
where
    F: Fn(usize, f64) -> Result<Vec<f64>> + Sync,
{
    if !(tail_tol > 0.0) {
        return Err(invalid("tail_tol", format!("must be positive, got {tail_tol}")));
    }
    let mut sums = vec![CompensatedSum::new(); dim];
    let mut total = CompensatedSum::new();
    let mut zero_mode = vec![0.0; dim];
    let mut prev = f64::NAN;
    let mut n = 0usize;
    loop {
        let hi = (n + CHUNK).min(grid.max_terms);
        let eval = |k: usize| f(k, grid.frequency(k));
        let batch: Vec<Vec<f64>> = if parallel {
            (n..hi).into_par_iter().map(eval).collect::<Result<_>>()?
        } else {
            (n..hi).map(eval).collect::<Result<_>>()?
        };
        for term in batch {
            let w = grid.weight(n);
            let mut g = 0.0;
            for (c, v) in term.iter().enumerate() {
                if !v.is_finite() {
                    return Err(crate::error::domain("matsubara_sum", format!("summand {n} is {v}")));
                }
                sums[c].add(w * v);
                g += v;
                if n == 0 {
                    zero_mode[c] = 0.5 * grid.temperature * v;
                }
            }
            total.add(w * g);
            let mag = g.abs();
            if n >= 2 {
                let tail = if mag == 0.0 {
                    0.0
                } else if prev > mag {
                    mag / (prev / mag).ln()
                } else {
                    f64::INFINITY
                };
                if tail <= tail_tol * total.value().abs() {
                    return Ok(MatsubaraSum {
                        values: sums.iter().map(|s| grid.temperature * s.value()).collect(),
                        zero_mode,
                        tail_estimate: grid.temperature * tail,
                        terms: n + 1,
                    });
                }
            }
            prev = mag;
            n += 1;
        }
        if n >= grid.max_terms {
            return Err(CasimirError::NonDecaying {
                terms: n,
                last_term: prev,
            });
        }
    }
}

/// `T [f(ξ₀)/2 + Σ_{n≥1} f(ξ_n)]` truncated by the tail bound.
pub fn matsubara_sum<F>(f: F, grid: &MatsubaraGrid, tail_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let s = matsubara_sum_vec(|_, xi| f(xi).map(|v| vec![v]), 1, grid, tail_tol, false)?;
    Ok(QuadratureResult {
        value: s.values[0],
        error_estimate: s.tail_estimate,
        evaluations: s.terms,
    })
}
