use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::generators::rng_from;
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::learners::{LearnerSpec, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CvKind {
    Kfold { k: usize },
    Loo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSpec {
    #[serde(flatten)]
    pub kind: CvKind,
    pub seed: u64,
    pub stratified: bool,
}

impl CvSpec {
    /// Stratified k-fold.
    pub fn kfold(k: usize, seed: u64) -> Self {
        Self {
            kind: CvKind::Kfold { k },
            seed,
            stratified: true,
        }
    }

    pub fn loo() -> Self {
        Self {
            kind: CvKind::Loo,
            seed: 0,
            stratified: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl fmt::Display for CvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CvKind::Kfold { k } => write!(f, "kfold:{k}"),
            CvKind::Loo => f.write_str("loo"),
        }
    }
}

/// Parses `kfold:N` or `loo` (seed 0; set it with [`CvSpec::with_seed`]).
impl FromStr for CvSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "loo" {
            return Ok(CvSpec::loo());
        }
        let k = s
            .strip_prefix("kfold:")
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| Error::param(format!("cv must be 'kfold:N' or 'loo', got '{s}'")))?;
        if k < 2 {
            return Err(Error::param(format!("kfold needs k >= 2, got {k}")));
        }
        Ok(CvSpec::kfold(k, 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// SplitMix64 finalizer over `base` and each part, for per-fold and
/// per-entry seeds that do not depend on evaluation order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &p in parts {
        z = z
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(p.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Partitions `0..n` into test folds. Stratified k-fold deals each class's
/// shuffled indices round-robin, continuing across classes, so fold sizes and
/// per-class counts differ by at most one.
pub fn make_folds(n: usize, labels: Option<&[u8]>, cv: &CvSpec) -> Result<Vec<Fold>> {
    let k = match cv.kind {
        CvKind::Loo => {
            if n < 2 {
                return Err(Error::precondition(format!("leave-one-out needs n >= 2, got {n}")));
            }
            return Ok((0..n)
                .map(|i| Fold {
                    train: (0..n).filter(|&j| j != i).collect(),
                    test: vec![i],
                })
                .collect());
        }
        CvKind::Kfold { k } => k,
    };
    if k < 2 {
        return Err(Error::param(format!("kfold needs k >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::precondition(format!(
            "kfold:{k} needs at least {k} samples, got {n}"
        )));
    }
    if let Some(l) = labels {
        if l.len() != n {
            return Err(Error::param("labels do not match sample count"));
        }
    }
    let mut rng = rng_from(cv.seed);
    let groups: Vec<Vec<usize>> = match (cv.stratified, labels) {
        (true, Some(l)) => (0..2u8).map(|c| (0..n).filter(|&i| l[i] == c).collect()).collect(),
        _ => vec![(0..n).collect()],
    };
    let mut tests = vec![Vec::new(); k];
    let mut slot = 0;
    for mut g in groups {
        g.shuffle(&mut rng);
        for i in g {
            tests[slot].push(i);
            slot = (slot + 1) % k;
        }
    }
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            Fold {
                train: (0..n).filter(|&i| !in_test[i]).collect(),
                test,
            }
        })
        .collect())
}

fn single_class_fold(folds: &[Fold], labels: &[u8]) -> Option<usize> {
    folds.iter().position(|f| {
        let ones = f.train.iter().filter(|&&i| labels[i] == 1).count();
        ones == 0 || ones == f.train.len()
    })
}

/// Folds whose training splits all contain both classes. A partition with a
/// single-class training split is re-drawn once with a derived seed.
pub fn training_folds(d: &Dataset, cv: &CvSpec) -> Result<Vec<Fold>> {
    let labels = d.require_labels("cross-validation")?;
    let folds = make_folds(d.n_samples(), Some(labels), cv)?;
    let Some(bad) = single_class_fold(&folds, labels) else {
        return Ok(folds);
    };
    if let CvKind::Kfold { .. } = cv.kind {
        let redraw = cv.with_seed(derive_seed(cv.seed, &[u64::MAX]));
        let folds = make_folds(d.n_samples(), Some(labels), &redraw)?;
        if single_class_fold(&folds, labels).is_none() {
            return Ok(folds);
        }
    }
    Err(Error::precondition(format!(
        "fold {bad} has a single class in its training split"
    )))
}

/// Anything that labels one sample.
pub trait Predictor: Send + Sync {
    fn predict(&self, sample: &Sample<'_>) -> Result<u8>;
}

impl Predictor for TrainedModel {
    fn predict(&self, sample: &Sample<'_>) -> Result<u8> {
        TrainedModel::predict(self, sample)
    }
}

/// Index and derived seed of the fold being trained.
#[derive(Debug, Clone, Copy)]
pub struct FoldContext {
    pub index: usize,
    pub seed: u64,
}

/// Held-out predictions, one per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    pub predictions: Vec<u8>,
    pub labels: Vec<u8>,
    pub fold_of: Vec<usize>,
    pub n_folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_correct: usize,
    pub n_total: usize,
    pub accuracy: f64,
}

impl PredictionTable {
    pub fn n_samples(&self) -> usize {
        self.predictions.len()
    }

    pub fn n_correct(&self) -> usize {
        self.predictions
            .iter()
            .zip(&self.labels)
            .filter(|(p, l)| p == l)
            .count()
    }

    /// Pooled accuracy over all held-out predictions.
    pub fn accuracy(&self) -> f64 {
        self.n_correct() as f64 / self.n_samples() as f64
    }

    pub fn per_fold(&self) -> Vec<FoldMetrics> {
        let mut correct = vec![0usize; self.n_folds];
        let mut total = vec![0usize; self.n_folds];
        for ((p, l), &f) in self.predictions.iter().zip(&self.labels).zip(&self.fold_of) {
            total[f] += 1;
            correct[f] += usize::from(p == l);
        }
        (0..self.n_folds)
            .map(|f| FoldMetrics {
                fold: f,
                n_correct: correct[f],
                n_total: total[f],
                accuracy: correct[f] as f64 / total[f].max(1) as f64,
            })
            .collect()
    }
}

/// Cross-validates an arbitrary training procedure. `train` sees only the
/// training split of each fold, so any feature selection or orientation
/// choice it makes cannot leak test labels. Folds run in parallel; results
/// do not depend on scheduling.
pub fn pooled_cv_with<F, M>(d: &Dataset, cv: &CvSpec, train: F) -> Result<PredictionTable>
where
    F: Fn(&Dataset, FoldContext) -> Result<M> + Sync,
    M: Predictor,
{
    let labels = d.require_labels("pooled_cv")?.to_vec();
    let folds = training_folds(d, cv)?;
    let per_fold: Vec<Vec<(usize, u8)>> = folds
        .par_iter()
        .enumerate()
        .map(|(index, fold)| {
            let ctx = FoldContext {
                index,
                seed: derive_seed(cv.seed, &[index as u64]),
            };
            let model = train(&d.select_rows(&fold.train), ctx)?;
            fold.test
                .iter()
                .map(|&i| Ok((i, model.predict(&d.sample(i))?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = d.n_samples();
    let mut predictions = vec![0u8; n];
    let mut fold_of = vec![0usize; n];
    for (f, preds) in per_fold.into_iter().enumerate() {
        for (i, p) in preds {
            predictions[i] = p;
            fold_of[i] = f;
        }
    }
    Ok(PredictionTable {
        predictions,
        labels,
        fold_of,
        n_folds: folds.len(),
    })
}

/// Cross-validates `spec` on a fixed attribute subset.
pub fn pooled_cv(spec: &LearnerSpec, d: &Dataset, features: &[usize], cv: &CvSpec) -> Result<PredictionTable> {
    pooled_cv_with(d, cv, |train, _| crate::learners::fit(spec, train, features))
}

/// JSON-serializable summary of one cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub learner: LearnerSpec,
    pub cv: CvSpec,
    pub features: Vec<usize>,
    pub folds: Vec<FoldMetrics>,
    pub n_correct: usize,
    pub n_total: usize,
    pub accuracy: f64,
}

impl CvReport {
    pub fn new(learner: &LearnerSpec, cv: &CvSpec, features: &[usize], table: &PredictionTable) -> Self {
        Self {
            learner: learner.clone(),
            cv: *cv,
            features: features.to_vec(),
            folds: table.per_fold(),
            n_correct: table.n_correct(),
            n_total: table.n_samples(),
            accuracy: table.accuracy(),
        }
    }
}
