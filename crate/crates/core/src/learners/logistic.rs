//! L2-penalized logistic regression fitted by Newton's method (IRLS).
//!
//! Minimizes the mean negative log-likelihood plus `l2/2 · ‖w‖²`; the
//! intercept is not penalized. Newton steps are damped by backtracking until
//! the objective decreases.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LinearState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub l2: f64,
    /// Convergence threshold on the gradient's infinity norm.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-8,
            tol: 1e-8,
            max_iters: 100,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::param(format!(
                "logistic l2 must be non-negative, got {}",
                self.l2
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param(format!("logistic tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("logistic max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Logistic function, kept strictly inside (0, 1) so saturated inputs still
/// yield a usable probability.
pub fn sigmoid(z: f64) -> f64 {
    let p = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// `ln(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Penalized objective over parameters `[w₁ … w_d, b]`.
pub struct LogisticObjective<'a> {
    x: &'a [Vec<f64>],
    y: Vec<f64>,
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a [Vec<f64>], labels: &[u8], l2: f64) -> Self {
        Self {
            x,
            y: labels.iter().map(|&l| l as f64).collect(),
            l2,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len) + 1
    }

    fn linear(&self, theta: &[f64], row: &[f64]) -> f64 {
        let d = theta.len() - 1;
        row.iter().zip(&theta[..d]).map(|(a, b)| a * b).sum::<f64>() + theta[d]
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        let n = self.x.len() as f64;
        let d = theta.len() - 1;
        let nll: f64 = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(row, &y)| {
                let z = self.linear(theta, row);
                softplus(z) - y * z
            })
            .sum();
        nll / n + 0.5 * self.l2 * theta[..d].iter().map(|w| w * w).sum::<f64>()
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.x.len() as f64;
        let d = theta.len() - 1;
        let mut g = vec![0.0; d + 1];
        for (row, &y) in self.x.iter().zip(&self.y) {
            let r = sigmoid(self.linear(theta, row)) - y;
            for (gk, v) in g.iter_mut().zip(row) {
                *gk += r * v;
            }
            g[d] += r;
        }
        for (k, gk) in g.iter_mut().enumerate() {
            *gk /= n;
            if k < d {
                *gk += self.l2 * theta[k];
            }
        }
        g
    }

    pub fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let n = self.x.len() as f64;
        let d = theta.len() - 1;
        let mut h = DMatrix::zeros(d + 1, d + 1);
        let mut ext = vec![0.0; d + 1];
        for row in self.x {
            let p = sigmoid(self.linear(theta, row));
            let w = p * (1.0 - p) / n;
            ext[..d].copy_from_slice(row);
            ext[d] = 1.0;
            for a in 0..=d {
                for b in a..=d {
                    h[(a, b)] += w * ext[a] * ext[b];
                }
            }
        }
        for a in 0..=d {
            if a < d {
                h[(a, a)] += self.l2;
            }
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
        }
        h
    }
}

fn newton_direction(h: DMatrix<f64>, g: &[f64]) -> Option<DVector<f64>> {
    let rhs = DVector::from_column_slice(g);
    let dim = h.nrows();
    let mut ridge = 0.0;
    for _ in 0..8 {
        let hm = &h + DMatrix::identity(dim, dim) * ridge;
        if let Some(chol) = hm.cholesky() {
            let step = chol.solve(&rhs);
            if step.iter().all(|v| v.is_finite()) {
                return Some(step);
            }
        }
        ridge = if ridge == 0.0 { 1e-12 } else { ridge * 100.0 };
    }
    None
}

pub(crate) fn fit(x: &[Vec<f64>], labels: &[u8], params: &LogisticParams) -> Result<LinearState> {
    params.validate()?;
    let obj = LogisticObjective::new(x, labels, params.l2);
    let mut theta = vec![0.0; obj.dim()];
    let mut value = obj.value(&theta);
    let mut iterations = 0;
    loop {
        let g = obj.gradient(&theta);
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax < params.tol {
            break;
        }
        if iterations >= params.max_iters {
            return Err(Error::NotConverged {
                solver: "logistic",
                iterations,
                violation: gmax,
            });
        }
        let step = newton_direction(obj.hessian(&theta), &g).ok_or(Error::NotConverged {
            solver: "logistic",
            iterations,
            violation: gmax,
        })?;
        // Near the optimum the decrease of a full step falls below one ulp of
        // the objective; a few ulps of slack keep the step from collapsing.
        let slack = 8.0 * f64::EPSILON * value.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let cand: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            let v = obj.value(&cand);
            if v <= value + slack {
                theta = cand;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No representable decrease left along the Newton direction.
            return Err(Error::NotConverged {
                solver: "logistic",
                iterations,
                violation: gmax,
            });
        }
        iterations += 1;
    }
    let d = theta.len() - 1;
    Ok(LinearState {
        weights: theta[..d].to_vec(),
        bias: theta[d],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only_balanced_gives_one_half() {
        let x: Vec<Vec<f64>> = vec![vec![]; 6];
        let params = LogisticParams {
            l2: 0.0,
            ..LogisticParams::default()
        };
        let lin = fit(&x, &[0, 1, 0, 1, 1, 0], &params).unwrap();
        assert!((sigmoid(lin.bias) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn intercept_only_recovers_class_prior() {
        let x: Vec<Vec<f64>> = vec![vec![]; 4];
        let lin = fit(&x, &[1, 1, 1, 0], &LogisticParams::default()).unwrap();
        assert!((sigmoid(lin.bias) - 0.75).abs() < 1e-8);
    }

    #[test]
    fn sigmoid_is_stable_and_bounded() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) > 0.0 && sigmoid(-800.0) < 1e-300);
        assert!(sigmoid(800.0) < 1.0 && sigmoid(800.0) > 1.0 - 1e-15);
        assert!((softplus(-800.0)).abs() < 1e-300);
        assert_eq!(softplus(800.0), 800.0);
    }

    #[test]
    fn gradient_vanishes_at_fit() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.61).sin(), (i as f64 * 0.23).cos()])
            .collect();
        let labels: Vec<u8> = x
            .iter()
            .enumerate()
            .map(|(i, r)| u8::from(r[0] - r[1] + if i % 7 == 0 { 2.0 } else { 0.0 } > 0.0))
            .collect();
        let params = LogisticParams::default();
        let lin = fit(&x, &labels, &params).unwrap();
        let mut theta = lin.weights.clone();
        theta.push(lin.bias);
        let g = LogisticObjective::new(&x, &labels, params.l2).gradient(&theta);
        assert!(g.iter().all(|v| v.abs() < params.tol));
    }
}
