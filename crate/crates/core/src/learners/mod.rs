//! Binary classifiers behind a common fit / predict interface.
//!
//! Every learner is written from scratch:
//!
//! | kind             | algorithm                                              |
//! |------------------|--------------------------------------------------------|
//! | `svm_smo`        | linear soft-margin SVM, SMO with maximal-violating pair |
//! | `logistic`       | L2-penalized logistic regression, Newton / IRLS         |
//! | `cart`           | binary tree, weighted Gini impurity                     |
//! | `gainratio_tree` | binary tree, information gain ratio                     |
//! | `mlp`            | one logistic hidden layer, full-batch gradient descent  |
//! | `tnm_rule`       | stage 1-2 survive, stage 3-4 do not                     |
//!
//! A [`TrainedModel`] carries an [`Orientation`]; inverted models complement
//! their raw prediction so the same fitted state serves both directions.

pub mod logistic;
pub mod mlp;
pub mod svm;
pub mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};

pub use logistic::LogisticParams;
pub use mlp::MlpParams;
pub use svm::SvmParams;
pub use tree::TreeParams;

/// Learner kind together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerParams {
    SvmSmo(SvmParams),
    Logistic(LogisticParams),
    Cart(TreeParams),
    GainratioTree(TreeParams),
    Mlp(MlpParams),
    TnmRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    #[serde(flatten)]
    pub params: LearnerParams,
    #[serde(default)]
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(params: LearnerParams) -> Self {
        Self { params, seed: 0 }
    }

    pub fn svm() -> Self {
        Self::new(LearnerParams::SvmSmo(SvmParams::default()))
    }

    pub fn svm_with_c(c: f64) -> Self {
        Self::new(LearnerParams::SvmSmo(SvmParams {
            c,
            ..SvmParams::default()
        }))
    }

    pub fn logistic() -> Self {
        Self::new(LearnerParams::Logistic(LogisticParams::default()))
    }

    pub fn cart() -> Self {
        Self::new(LearnerParams::Cart(TreeParams::default()))
    }

    pub fn gainratio_tree() -> Self {
        Self::new(LearnerParams::GainratioTree(TreeParams::default()))
    }

    pub fn mlp() -> Self {
        Self::new(LearnerParams::Mlp(MlpParams::default()))
    }

    pub fn tnm_rule() -> Self {
        Self::new(LearnerParams::TnmRule)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match self.params {
            LearnerParams::SvmSmo(_) => "svm_smo",
            LearnerParams::Logistic(_) => "logistic",
            LearnerParams::Cart(_) => "cart",
            LearnerParams::GainratioTree(_) => "gainratio_tree",
            LearnerParams::Mlp(_) => "mlp",
            LearnerParams::TnmRule => "tnm_rule",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            LearnerParams::SvmSmo(p) => p.validate(),
            LearnerParams::Logistic(p) => p.validate(),
            LearnerParams::Cart(p) | LearnerParams::GainratioTree(p) => p.validate(),
            LearnerParams::Mlp(p) => p.validate(),
            LearnerParams::TnmRule => Ok(()),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Normal,
    Inverted,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Normal => Orientation::Inverted,
            Orientation::Inverted => Orientation::Normal,
        }
    }
}

/// Hyperplane `w·x + b` over the model's feature subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearState {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearState {
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FittedState {
    Linear(LinearState),
    Tree(tree::Tree),
    Mlp(mlp::MlpState),
    TnmRule,
}

pub const MODEL_FORMAT: &str = "agreelearn-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    spec: LearnerSpec,
    feature_subset: Vec<usize>,
    state: FittedState,
    orientation: Orientation,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    #[serde(flatten)]
    model: TrainedModel,
}

/// Fits `spec` on the attributes in `feature_subset` (indices into `d`).
pub fn fit(spec: &LearnerSpec, d: &Dataset, feature_subset: &[usize]) -> Result<TrainedModel> {
    spec.validate()?;
    if let Some(&bad) = feature_subset.iter().find(|&&j| j >= d.n_attributes()) {
        return Err(Error::param(format!(
            "feature index {bad} out of range for {} attributes",
            d.n_attributes()
        )));
    }
    let state = if let LearnerParams::TnmRule = spec.params {
        if d.tnm_stage().is_none() {
            return Err(Error::precondition("tnm_rule requires a TNM stage column"));
        }
        FittedState::TnmRule
    } else {
        let labels = d.require_labels("fit")?;
        let [zeros, ones] = d.class_counts().unwrap_or([0, 0]);
        if zeros == 0 || ones == 0 {
            return Err(Error::precondition(format!(
                "{} needs both classes in the training data ({zeros} of class 0, {ones} of class 1)",
                spec.kind_name()
            )));
        }
        let x = design_matrix(d, feature_subset)?;
        match &spec.params {
            LearnerParams::SvmSmo(p) => FittedState::Linear(svm::fit_linear(&x, labels, p)?.0),
            LearnerParams::Logistic(p) => FittedState::Linear(logistic::fit(&x, labels, p)?),
            LearnerParams::Cart(p) => FittedState::Tree(tree::fit(&x, labels, p, tree::Criterion::Gini)?),
            LearnerParams::GainratioTree(p) => FittedState::Tree(tree::fit(&x, labels, p, tree::Criterion::GainRatio)?),
            LearnerParams::Mlp(p) => FittedState::Mlp(mlp::fit(&x, labels, p, spec.seed)?),
            LearnerParams::TnmRule => unreachable!("handled above"),
        }
    };
    Ok(TrainedModel {
        spec: spec.clone(),
        feature_subset: feature_subset.to_vec(),
        state,
        orientation: Orientation::Normal,
    })
}

/// Rows of `d` restricted to `features`, rejecting missing cells.
pub(crate) fn design_matrix(d: &Dataset, features: &[usize]) -> Result<Vec<Vec<f64>>> {
    (0..d.n_samples())
        .map(|i| {
            features
                .iter()
                .map(|&j| {
                    if d.is_missing(i, j) {
                        Err(Error::precondition(format!(
                            "missing value for attribute '{}' at row {i}; impute first",
                            d.attributes()[j]
                        )))
                    } else {
                        Ok(d.value(i, j))
                    }
                })
                .collect()
        })
        .collect()
}

impl TrainedModel {
    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn feature_subset(&self) -> &[usize] {
        &self.feature_subset
    }

    pub fn state(&self) -> &FittedState {
        &self.state
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Copy with the orientation flipped; fitted state is untouched.
    pub fn inverted(&self) -> TrainedModel {
        TrainedModel {
            orientation: self.orientation.flipped(),
            ..self.clone()
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> TrainedModel {
        self.orientation = orientation;
        self
    }

    fn gather(&self, sample: &Sample<'_>) -> Result<Vec<f64>> {
        self.feature_subset
            .iter()
            .map(|&j| match sample.values.get(j) {
                Some(v) if v.is_finite() => Ok(*v),
                Some(_) => Err(Error::precondition(format!("sample is missing attribute {j}"))),
                None => Err(Error::precondition(format!(
                    "sample has {} attributes, model needs index {j}",
                    sample.values.len()
                ))),
            })
            .collect()
    }

    /// Prediction before orientation is applied.
    pub fn raw_predict(&self, sample: &Sample<'_>) -> Result<u8> {
        if let FittedState::TnmRule = self.state {
            let stage = sample
                .tnm_stage
                .ok_or_else(|| Error::precondition("tnm_rule needs the sample's TNM stage"))?;
            return Ok(u8::from(stage <= 2));
        }
        let x = self.gather(sample)?;
        Ok(match &self.state {
            FittedState::Linear(lin) => match self.spec.params {
                LearnerParams::Logistic(_) => u8::from(logistic::sigmoid(lin.margin(&x)) > 0.5),
                _ => u8::from(lin.margin(&x) > 0.0),
            },
            FittedState::Tree(t) => t.predict(&x),
            FittedState::Mlp(m) => u8::from(m.probability(&x) > 0.5),
            FittedState::TnmRule => unreachable!("handled above"),
        })
    }

    pub fn predict(&self, sample: &Sample<'_>) -> Result<u8> {
        let raw = self.raw_predict(sample)?;
        Ok(match self.orientation {
            Orientation::Normal => raw,
            Orientation::Inverted => 1 - raw,
        })
    }

    pub fn predict_dataset(&self, d: &Dataset) -> Result<Vec<u8>> {
        (0..d.n_samples()).map(|i| self.predict(&d.sample(i))).collect()
    }

    /// Signed margin (SVM) or probability of class 1 (logistic, MLP), before
    /// orientation.
    pub fn decision_value(&self, sample: &Sample<'_>) -> Result<f64> {
        match (&self.state, &self.spec.params) {
            (FittedState::Linear(lin), LearnerParams::Logistic(_)) => {
                Ok(logistic::sigmoid(lin.margin(&self.gather(sample)?)))
            }
            (FittedState::Linear(lin), _) => Ok(lin.margin(&self.gather(sample)?)),
            (FittedState::Mlp(m), _) => Ok(m.probability(&self.gather(sample)?)),
            _ => Err(Error::Unsupported(format!(
                "decision_value is not defined for {}",
                self.spec.kind_name()
            ))),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument {
            format: MODEL_FORMAT.to_string(),
            model: self.clone(),
        })?)
    }

    pub fn from_json(json: &str) -> Result<TrainedModel> {
        let doc: ModelDocument = serde_json::from_str(json)?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Schema(format!(
                "unsupported model format '{}', expected '{MODEL_FORMAT}'",
                doc.format
            )));
        }
        doc.model.spec.validate()?;
        Ok(doc.model)
    }
}

/// Fraction of samples in `d` the model labels correctly.
pub fn accuracy_on(model: &TrainedModel, d: &Dataset) -> Result<f64> {
    let labels = d.require_labels("accuracy_on")?;
    let preds = model.predict_dataset(d)?;
    crate::evaluation::accuracy(&preds, labels)
}
