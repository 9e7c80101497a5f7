use crate::error::{Error, Result};

/// Binomial probability mass for `k = 0..=n`, computed by the ratio
/// recurrence in log space.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    if p == 0.0 || p == 1.0 {
        let mut pmf = vec![0.0; n + 1];
        pmf[if p == 0.0 { 0 } else { n }] = 1.0;
        return pmf;
    }
    let log_odds = (p / (1.0 - p)).ln();
    let mut log_pmf = n as f64 * (1.0 - p).ln();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push(log_pmf.exp());
        if k < n {
            log_pmf += ((n - k) as f64 / (k + 1) as f64).ln() + log_odds;
        }
    }
    out
}

/// Exact two-sided binomial test: total probability of outcomes no more
/// likely than the observed one under `Binomial(trials, p0)`.
pub fn binomial_test(successes: usize, trials: usize, p0: f64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::precondition("binomial test needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::param(format!("{successes} successes exceed {trials} trials")));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::param(format!("p0 must lie in [0, 1], got {p0}")));
    }
    let pmf = binomial_pmf(trials, p0);
    let cutoff = pmf[successes] * (1.0 + 1e-7);
    let p: f64 = pmf.iter().filter(|&&q| q <= cutoff).sum();
    Ok(p.min(1.0))
}
