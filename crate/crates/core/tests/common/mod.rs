//! Brute-force reference for the soft-margin SVM dual on tiny problems.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One small dual problem: rows, ±1 targets and C.
pub struct DualFixture {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
}

/// Deterministic set of problems with 2 to 4 samples, both classes present.
pub fn dual_fixtures() -> Vec<DualFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    for n in 2..=4usize {
        for &c in &[0.1, 1.0, 10.0] {
            for dim in [1usize, 2, 4] {
                for _ in 0..4 {
                    let x: Vec<Vec<f64>> = (0..n)
                        .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
                        .collect();
                    let mut y: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                    y[0] = 1.0;
                    y[1] = -1.0;
                    out.push(DualFixture { x, y, c });
                }
            }
        }
    }
    out
}

pub fn gram(x: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), x.len(), |i, j| {
        x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum()
    })
}

fn objective(alpha: &[f64], k: &DMatrix<f64>, y: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Maximum of the dual by enumerating every assignment of each multiplier to
/// its lower bound, upper bound or the free set, solving the equality
/// constrained stationarity system on the free set and keeping feasible
/// candidates.
pub fn brute_force_dual(k: &DMatrix<f64>, y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in &mut state {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let mut alpha = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        for i in 0..n {
            if state[i] == 1 {
                alpha[i] = c;
            }
        }
        if !free.is_empty() {
            let m = free.len();
            let mut a = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = y[i] * y[j] * k[(i, j)];
                }
                a[(r, m)] = -y[i];
                a[(m, r)] = y[i];
                let fixed: f64 = (0..n)
                    .filter(|&j| state[j] != 2)
                    .map(|j| y[i] * y[j] * k[(i, j)] * alpha[j])
                    .sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[m] = -(0..n).filter(|&j| state[j] != 2).map(|j| y[j] * alpha[j]).sum::<f64>();
            let Ok(sol) = a.clone().svd(true, true).solve(&rhs, 1e-12) else {
                continue;
            };
            if (&a * &sol - &rhs).amax() > 1e-8 {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible = alpha.iter().all(|&a| (-1e-9..=c + 1e-9).contains(&a))
            && alpha.iter().zip(y).map(|(a, t)| a * t).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.max(objective(&alpha, k, y));
        }
    }
    best
}

/// Relative error between an analytic gradient and central differences.
pub fn gradient_check<F: Fn(&[f64]) -> f64>(f: F, analytic: &[f64], at: &[f64], step: f64) -> f64 {
    let mut num = Vec::with_capacity(at.len());
    let mut p = at.to_vec();
    for k in 0..at.len() {
        p[k] = at[k] + step;
        let hi = f(&p);
        p[k] = at[k] - step;
        let lo = f(&p);
        p[k] = at[k];
        num.push((hi - lo) / (2.0 * step));
    }
    let diff: f64 = analytic
        .iter()
        .zip(&num)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = analytic
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt()
        .max(num.iter().map(|a| a * a).sum::<f64>().sqrt())
        .max(1e-12);
    diff / scale
}
