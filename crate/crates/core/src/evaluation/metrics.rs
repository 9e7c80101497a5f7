use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::param(format!("{a} predictions but {b} labels")));
    }
    if a == 0 {
        return Err(Error::precondition("no predictions to score"));
    }
    Ok(())
}

pub fn n_correct(predictions: &[u8], labels: &[u8]) -> Result<usize> {
    check_lengths(predictions.len(), labels.len())?;
    Ok(predictions.iter().zip(labels).filter(|(p, l)| p == l).count())
}

/// Fraction of predictions equal to their label.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    Ok(n_correct(predictions, labels)? as f64 / labels.len() as f64)
}

/// Coverage and accuracy of a classifier that may abstain (`None`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectiveMetrics {
    pub n_total: usize,
    pub n_covered: usize,
    pub n_correct: usize,
    pub coverage: f64,
    /// `None` when nothing is covered.
    pub accuracy: Option<f64>,
}

pub fn selective_metrics(predictions: &[Option<u8>], labels: &[u8]) -> Result<SelectiveMetrics> {
    check_lengths(predictions.len(), labels.len())?;
    let mut n_covered = 0;
    let mut n_correct = 0;
    for (p, &l) in predictions.iter().zip(labels) {
        if let Some(p) = p {
            n_covered += 1;
            n_correct += usize::from(*p == l);
        }
    }
    let n_total = labels.len();
    Ok(SelectiveMetrics {
        n_total,
        n_covered,
        n_correct,
        coverage: n_covered as f64 / n_total as f64,
        accuracy: (n_covered > 0).then(|| n_correct as f64 / n_covered as f64),
    })
}
