//! Linear soft-margin SVM trained by sequential minimal optimization.
//!
//! Solves the dual
//!
//! ```text
//! max  Σ αᵢ − ½ Σᵢ Σⱼ αᵢ αⱼ yᵢ yⱼ Kᵢⱼ   s.t.  0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! two multipliers at a time. The working pair is the maximal violating pair
//! (first-order selection); the pair sub-problem is solved analytically and
//! clipped to the box. Iteration stops when the KKT gap `m(α) − M(α)` drops
//! below `tol`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LinearState;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    /// Maximum number of passes; one pass is as many pair updates as there
    /// are samples.
    pub max_iters: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_iters: 10_000,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::param(format!("svm C must be positive, got {}", self.c)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param(format!("svm tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("svm max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Pair updates performed.
    pub iterations: usize,
    /// Final KKT gap `m(α) − M(α)`.
    pub gap: f64,
    /// Dual objective after each pair update, starting with α = 0.
    pub objective_trace: Vec<f64>,
}

pub fn linear_gram(x: &[Vec<f64>]) -> DMatrix<f64> {
    let n = x.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// `Σ αᵢ − ½ αᵀ Q α` with `Qᵢⱼ = yᵢ yⱼ Kᵢⱼ`.
pub fn dual_objective(alpha: &[f64], gram: &DMatrix<f64>, y: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Largest per-sample KKT violation of `(alpha, bias)`:
/// `αᵢ = 0 ⇒ yᵢf ≥ 1`, `αᵢ = C ⇒ yᵢf ≤ 1`, otherwise `yᵢf = 1`.
pub fn kkt_violation(alpha: &[f64], gram: &DMatrix<f64>, y: &[f64], c: f64, bias: f64) -> f64 {
    let n = alpha.len();
    (0..n)
        .map(|i| {
            let f: f64 = (0..n).map(|j| alpha[j] * y[j] * gram[(i, j)]).sum::<f64>() + bias;
            let yf = y[i] * f;
            if alpha[i] <= 0.0 {
                (1.0 - yf).max(0.0)
            } else if alpha[i] >= c {
                (yf - 1.0).max(0.0)
            } else {
                (yf - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Runs SMO on a precomputed kernel matrix with targets `y ∈ {−1, +1}`.
pub fn solve_dual(gram: &DMatrix<f64>, y: &[f64], params: &SvmParams) -> Result<SmoSolution> {
    params.validate()?;
    let n = y.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::param("kernel matrix does not match the number of targets"));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::param("SMO targets must be -1 or +1"));
    }
    let c = params.c;
    let q = |i: usize, j: usize| y[i] * y[j] * gram[(i, j)];

    let mut alpha = vec![0.0; n];
    // Gradient of ½αᵀQα − eᵀα.
    let mut grad = vec![-1.0; n];
    let mut objective = 0.0;
    let mut trace = vec![objective];

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    loop {
        let mut i = usize::MAX;
        let mut m_up = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > m_up {
                m_up = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < m_low {
                m_low = v;
                j = t;
            }
        }
        let gap = if i == usize::MAX || j == usize::MAX {
            0.0
        } else {
            m_up - m_low
        };
        if gap < params.tol {
            let bias = compute_bias(&alpha, &grad, y, c);
            return Ok(SmoSolution {
                alpha,
                bias,
                iterations,
                gap,
                objective_trace: trace,
            });
        }
        if iterations >= params.max_iters.saturating_mul(n) {
            return Err(Error::NotConverged {
                solver: "svm_smo",
                iterations: iterations / n,
                violation: gap,
            });
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (qii, qjj, qij) = (q(i, i), q(j, j), q(i, j));
        if y[i] != y[j] {
            let quad = (qii + qjj + 2.0 * qij).max(TAU);
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
            let quad = (qii + qjj - 2.0 * qij).max(TAU);
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

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        // Exact change of the minimized objective for a two-coordinate step.
        let df = grad[i] * di + grad[j] * dj + 0.5 * (qii * di * di + 2.0 * qij * di * dj + qjj * dj * dj);
        objective -= df;
        trace.push(objective);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(i, t) * di + q(j, t) * dj;
        }
        iterations += 1;
    }
}

fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            n_free += 1;
            free_sum += yg;
        }
    }
    let rho = if n_free > 0 {
        free_sum / n_free as f64
    } else {
        0.5 * (upper + lower)
    };
    -rho
}

/// Fits the primal hyperplane `w = Σ αᵢ yᵢ xᵢ` from the SMO dual.
pub(crate) fn fit_linear(x: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<(LinearState, SmoSolution)> {
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let gram = linear_gram(x);
    let sol = solve_dual(&gram, &y, params)?;
    let dim = x.first().map_or(0, Vec::len);
    let mut weights = vec![0.0; dim];
    for ((a, yi), xi) in sol.alpha.iter().zip(&y).zip(x) {
        if *a != 0.0 {
            for (w, v) in weights.iter_mut().zip(xi) {
                *w += a * yi * v;
            }
        }
    }
    Ok((
        LinearState {
            weights,
            bias: sol.bias,
        },
        sol,
    ))
}

/// Linear SVM weights on the given rows; used by recursive feature
/// elimination.
pub fn linear_weights(x: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<Vec<f64>> {
    Ok(fit_linear(x, labels, params)?.0.weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_problem_matches_closed_form() {
        // K = [[1,-1],[-1,1]]; with α₁ = α₂ = α the dual is 2α − 2α², so
        // α* = 1/2, w = 2α* = 1 and b = 0.
        let x = vec![vec![-1.0], vec![1.0]];
        let params = SvmParams {
            c: 10.0,
            ..SvmParams::default()
        };
        let (lin, sol) = fit_linear(&x, &[0, 1], &params).unwrap();
        assert!((sol.alpha[0] - 0.5).abs() < 1e-12);
        assert!((sol.alpha[1] - 0.5).abs() < 1e-12);
        assert!((lin.weights[0] - 1.0).abs() < 1e-12);
        assert!(lin.bias.abs() < 1e-6);
        assert!(lin.margin(&[0.0]).abs() < 1e-6);
    }

    #[test]
    fn objective_trace_never_decreases() {
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin() * 2.0, (t * 0.91).cos()]
            })
            .collect();
        let labels: Vec<u8> = x.iter().map(|r| u8::from(r[0] + 0.3 * r[1] > 0.1)).collect();
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let gram = linear_gram(&x);
        let sol = solve_dual(&gram, &y, &SvmParams::default()).unwrap();
        for w in sol.objective_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
        let direct = dual_objective(&sol.alpha, &gram, &y);
        assert!((direct - sol.objective_trace.last().unwrap()).abs() < 1e-9);
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!(balance.abs() < 1e-8);
        assert!(kkt_violation(&sol.alpha, &gram, &y, 1.0, sol.bias) <= 1e-3);
    }

    #[test]
    fn iteration_cap_reports_diagnostics() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 1.3).sin(), (i as f64 * 0.7).cos()])
            .collect();
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let params = SvmParams {
            c: 1000.0,
            tol: 1e-6,
            max_iters: 1,
        };
        match fit_linear(&x, &labels, &params) {
            Err(Error::NotConverged {
                iterations, violation, ..
            }) => {
                assert_eq!(iterations, 1);
                assert!(violation > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
