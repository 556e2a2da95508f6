//! SMO solver with maximal-violating-pair working-set selection.
//!
//! Keeps the gradient `G = Qα − 1` up to date and, each iteration, picks
//!
//! ```text
//! i = argmax { −yₜGₜ : t ∈ I_up },   j = argmin { −yₜGₜ : t ∈ I_low }
//! ```
//!
//! stopping once the gap `m − M` falls below `tol`. Ties go to the lowest
//! index, so training is deterministic.

use serde::{Deserialize, Serialize};

use super::kernel::KernelCache;
use super::model::SvmModel;
use super::scaler::Scaler;
use super::Matrix;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Iteration cap; `None` means `max(10^7, 100 n)`.
    pub max_iter: Option<usize>,
    pub cache_bytes: usize,
}

impl SvmParams {
    pub fn new(c: f64, gamma: f64) -> Self {
        SvmParams {
            c,
            gamma,
            ..Default::default()
        }
    }
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            gamma: 1.0,
            tol: 1e-3,
            max_iter: None,
            cache_bytes: 256 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn validate(x: &Matrix, y: &[f64], params: &SvmParams) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter(format!("labels must be ±1, got {bad}")));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {}", params.c)));
    }
    if !(params.gamma > 0.0 && params.gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {}",
            params.gamma
        )));
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", params.tol)));
    }
    x.check_finite()?;
    let pos = y.iter().filter(|&&v| v > 0.0).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Solves the dual problem; `alpha` is indexed like the rows of `x`.
pub fn solve(x: &Matrix, y: &[f64], params: &SvmParams) -> Result<DualSolution> {
    validate(x, y, params)?;
    let n = x.rows();
    let c = params.c;
    let max_iter = params.max_iter.unwrap_or((100 * n).max(10_000_000));
    let mut cache = KernelCache::new(x, params.gamma, params.cache_bytes);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut ki = vec![0.0; n];
    let mut kj = vec![0.0; n];

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt < 0.0 && a < c) || (yt > 0.0 && a > 0.0);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < params.tol {
            converged = true;
            break;
        }
        iterations += 1;

        ki.copy_from_slice(cache.row(i));
        kj.copy_from_slice(cache.row(j));
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = ki[j];
        // Q_ii = Q_jj = 1 for the RBF kernel.
        if y[i] != y[j] {
            let quad = (2.0 - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (2.0 - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        for t in 0..n {
            grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
        }
    }

    Ok(DualSolution {
        bias: -rho(&alpha, &grad, y, c),
        alpha,
        iterations,
        converged,
    })
}

/// Offset of the decision function: mean of `yG` over free multipliers,
/// or the midpoint of the feasible interval when none is free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Trains on `x` as given (no scaling, all columns).
pub fn train(x: &Matrix, y: &[f64], params: &SvmParams) -> Result<SvmModel> {
    let sol = solve(x, y, params)?;
    let support: Vec<usize> = (0..x.rows()).filter(|&t| sol.alpha[t] > 0.0).collect();
    let dual_coefs = support.iter().map(|&t| sol.alpha[t] * y[t]).collect();
    Ok(SvmModel {
        support_vectors: x.select_rows(&support),
        dual_coefs,
        bias: sol.bias,
        gamma: params.gamma,
        c: params.c,
        scaler: Scaler::identity(x.cols()),
        feature_mask: (0..x.cols()).collect(),
        feature_names: Vec::new(),
        converged: sol.converged,
        iterations: sol.iterations,
        provenance: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> (Matrix, Vec<f64>) {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        (x, vec![-1.0, -1.0, 1.0, 1.0])
    }

    #[test]
    fn separable_pair() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let y = [-1.0, 1.0];
        let m = train(&x, &y, &SvmParams::new(10.0, 1.0)).unwrap();
        assert_eq!(m.predict(&x).unwrap(), vec![-1.0, 1.0]);
        assert!(m.converged);
    }

    #[test]
    fn xor_is_separated() {
        let (x, y) = xor();
        let m = train(&x, &y, &SvmParams::new(100.0, 1.0)).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
        // decision values recomputed directly from the kernel expansion
        for (r, &label) in x.iter_rows().zip(&y) {
            let mut f = m.bias;
            for (sv, coef) in m.support_vectors.iter_rows().zip(&m.dual_coefs) {
                let d2: f64 = sv.iter().zip(r).map(|(a, b)| (a - b).powi(2)).sum();
                f += coef * (-d2).exp();
            }
            assert!(f * label > 0.0);
        }
    }

    #[test]
    fn contradictory_duplicates() {
        let x = Matrix::from_rows(&[[0.0], [0.0], [1.0], [2.0]]).unwrap();
        let y = [-1.0, 1.0, 1.0, -1.0];
        let params = SvmParams::new(1.0, 1.0);
        let sol = solve(&x, &y, &params).unwrap();
        assert!(sol.converged);
        let m = train(&x, &y, &params).unwrap();
        let pred = m.predict(&x).unwrap();
        let acc = pred.iter().zip(&y).filter(|(p, t)| p == t).count();
        assert!(acc < 4);
        let dual: f64 = sol.alpha.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!(dual.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let p = SvmParams::default();
        assert!(matches!(train(&x, &[1.0, 1.0], &p), Err(Error::SingleClass)));
        assert!(train(&x, &[1.0, 0.0], &p).is_err());
        assert!(train(&x, &[1.0], &p).is_err());
        assert!(train(&x, &[1.0, -1.0], &SvmParams::new(0.0, 1.0)).is_err());
        assert!(train(&x, &[1.0, -1.0], &SvmParams::new(1.0, -1.0)).is_err());
        let bad = Matrix::from_rows(&[[0.0], [f64::INFINITY]]).unwrap();
        assert!(matches!(train(&bad, &[1.0, -1.0], &p), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn tiny_cache_gives_identical_solution() {
        let (x, y) = xor();
        let mut p = SvmParams::new(5.0, 0.5);
        let a = solve(&x, &y, &p).unwrap();
        p.cache_bytes = 1;
        let b = solve(&x, &y, &p).unwrap();
        assert_eq!(a, b);
    }
}
