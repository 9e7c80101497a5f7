//! Anti-learning tools: inverting a model, testing held-out accuracy against
//! chance, sweeping the number of best or worst ranked attributes, and
//! choosing a model's orientation from an inner cross-validation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{binomial_test, pooled_cv, training_folds, CvSpec, PredictionTable};
use crate::learners::{self, LearnerSpec, Orientation, TrainedModel};
use crate::ranking::{select_best_k, select_worst_k, Ranking};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Copy of `m` with its orientation flipped.
pub fn invert(m: &TrainedModel) -> TrainedModel {
    m.inverted()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Learnable,
    AntiLearnable,
    Chance,
}

impl Verdict {
    pub fn from_accuracy(accuracy: f64, p_value: f64, alpha: f64) -> Self {
        if p_value < alpha && accuracy < 0.5 {
            Verdict::AntiLearnable
        } else if p_value < alpha && accuracy > 0.5 {
            Verdict::Learnable
        } else {
            Verdict::Chance
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Learnable => "learnable",
            Verdict::AntiLearnable => "anti_learnable",
            Verdict::Chance => "chance",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntiLearnReport {
    pub cv_accuracy: f64,
    pub n_correct: usize,
    pub n_total: usize,
    /// Two-sided exact binomial p-value against success probability 0.5.
    pub p_value: f64,
    pub alpha: f64,
    pub verdict: Verdict,
}

impl AntiLearnReport {
    pub fn from_counts(n_correct: usize, n_total: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let p_value = binomial_test(n_correct, n_total, 0.5)?;
        let cv_accuracy = n_correct as f64 / n_total as f64;
        Ok(Self {
            cv_accuracy,
            n_correct,
            n_total,
            p_value,
            alpha,
            verdict: Verdict::from_accuracy(cv_accuracy, p_value, alpha),
        })
    }

    pub fn from_table(table: &PredictionTable, alpha: f64) -> Result<Self> {
        Self::from_counts(table.n_correct(), table.n_samples(), alpha)
    }
}

/// Cross-validates `spec` on all attributes of `d` and tests the pooled
/// held-out accuracy against chance.
pub fn diagnose(spec: &LearnerSpec, d: &Dataset, cv: &CvSpec, alpha: f64) -> Result<AntiLearnReport> {
    let counts = d
        .class_counts()
        .ok_or_else(|| Error::precondition("diagnose needs a labeled dataset"))?;
    if counts.iter().any(|&c| c < 2) {
        return Err(Error::precondition(format!(
            "diagnose needs at least 2 samples per class, got {} and {}",
            counts[0], counts[1]
        )));
    }
    let features: Vec<usize> = (0..d.n_attributes()).collect();
    AntiLearnReport::from_table(&pooled_cv(spec, d, &features, cv)?, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Best,
    Worst,
}

impl End {
    pub fn select(self, r: &Ranking, k: usize) -> Result<Vec<usize>> {
        match self {
            End::Best => select_best_k(r, k),
            End::Worst => select_worst_k(r, k),
        }
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Best => "best",
            End::Worst => "worst",
        })
    }
}

impl FromStr for End {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" => Ok(End::Best),
            "worst" => Ok(End::Worst),
            _ => Err(Error::param(format!("end must be 'best' or 'worst', got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    pub feature_subset: Vec<usize>,
    pub n_correct: usize,
    pub n_total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub end: End,
    pub entries: Vec<SweepEntry>,
    /// Highest-accuracy `k` for the best end, lowest-accuracy `k` (the
    /// inversion optimum) for the worst end; the smaller `k` on ties.
    pub optimum_k: usize,
}

/// Pooled CV accuracy using the best or worst `k` attributes of `r`, for
/// `k = 1..=k_max`. Every entry uses the same folds.
pub fn sweep_attribute_count(
    spec: &LearnerSpec,
    r: &Ranking,
    d: &Dataset,
    end: End,
    k_max: usize,
    cv: &CvSpec,
) -> Result<Sweep> {
    r.check_against(d)?;
    if k_max == 0 || k_max > d.n_attributes() {
        return Err(Error::param(format!(
            "k_max must lie in 1..={}, got {k_max}",
            d.n_attributes()
        )));
    }
    let entries: Vec<SweepEntry> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let feature_subset = end.select(r, k)?;
            let table = pooled_cv(spec, d, &feature_subset, cv)?;
            Ok(SweepEntry {
                k,
                feature_subset,
                n_correct: table.n_correct(),
                n_total: table.n_samples(),
                accuracy: table.accuracy(),
            })
        })
        .collect::<Result<_>>()?;
    let pick = |better: fn(f64, f64) -> bool| {
        entries
            .iter()
            .reduce(|b, e| if better(e.accuracy, b.accuracy) { e } else { b })
            .map_or(1, |e| e.k)
    };
    let optimum_k = match end {
        End::Best => pick(|a, b| a > b),
        End::Worst => pick(|a, b| a < b),
    };
    Ok(Sweep {
        end,
        entries,
        optimum_k,
    })
}

/// Writes `end,k,n_correct,n_total,accuracy,optimum`.
pub fn write_sweep_csv<W: Write>(sweep: &Sweep, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["end", "k", "n_correct", "n_total", "accuracy", "optimum"])?;
    for e in &sweep.entries {
        w.write_record([
            sweep.end.to_string(),
            e.k.to_string(),
            e.n_correct.to_string(),
            e.n_total.to_string(),
            e.accuracy.to_string(),
            (e.k == sweep.optimum_k).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoOriented {
    pub model: TrainedModel,
    /// Pooled inner-CV accuracy of the normal orientation; `None` when the
    /// training set is too small to split, in which case the model stays
    /// normal.
    pub inner_accuracy: Option<f64>,
}

/// Fits `spec` on all of `d` and inverts it when the inner cross-validated
/// accuracy is below 0.5. Exactly 0.5 keeps the normal orientation.
pub fn auto_orient(spec: &LearnerSpec, d: &Dataset, features: &[usize], inner_cv: &CvSpec) -> Result<AutoOriented> {
    let model = learners::fit(spec, d, features)?;
    let inner_accuracy = match training_folds(d, inner_cv) {
        Ok(_) => Some(pooled_cv(spec, d, features, inner_cv)?.accuracy()),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    let orientation = match inner_accuracy {
        Some(a) if a < 0.5 => Orientation::Inverted,
        _ => Orientation::Normal,
    };
    Ok(AutoOriented {
        model: model.with_orientation(orientation),
        inner_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert_eq!(Verdict::from_accuracy(0.1, 0.01, 0.05), Verdict::AntiLearnable);
        assert_eq!(Verdict::from_accuracy(0.9, 0.01, 0.05), Verdict::Learnable);
        assert_eq!(Verdict::from_accuracy(0.4, 0.2, 0.05), Verdict::Chance);
        assert_eq!(Verdict::from_accuracy(0.5, 0.0, 0.05), Verdict::Chance);
    }

    #[test]
    fn report_from_counts() {
        let r = AntiLearnReport::from_counts(0, 10, DEFAULT_ALPHA).unwrap();
        assert_eq!(r.verdict, Verdict::AntiLearnable);
        assert!((r.p_value - 0.001953125).abs() < 1e-12);
        let r = AntiLearnReport::from_counts(6, 10, DEFAULT_ALPHA).unwrap();
        assert_eq!(r.verdict, Verdict::Chance);
        assert!(AntiLearnReport::from_counts(1, 10, 1.0).is_err());
    }

    #[test]
    fn end_parses() {
        assert_eq!("worst".parse::<End>().unwrap(), End::Worst);
        assert!("middle".parse::<End>().is_err());
    }

    #[test]
    fn two_sample_auto_orient_stays_normal() {
        let d = Dataset::from_rows(vec!["x".into()], &[vec![0.0], vec![1.0]])
            .unwrap()
            .with_labels(vec![0, 1])
            .unwrap();
        let out = auto_orient(&LearnerSpec::svm(), &d, &[0], &CvSpec::loo()).unwrap();
        assert_eq!(out.model.orientation(), Orientation::Normal);
        assert_eq!(out.inner_accuracy, None);
    }
}
