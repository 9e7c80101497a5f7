use std::path::PathBuf;

use agreelearn::antilearn::End;
use agreelearn::evaluation::CvSpec;
use agreelearn::learners::LearnerSpec;
use agreelearn::ranking::Evaluator;
use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::output::UsageError;

#[derive(Parser, Debug)]
#[command(
    name = "agreelearn",
    version,
    about = "Learning, anti-learning and agreement-voting ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic dataset.
    Generate(GenerateArgs),
    /// Rank attributes with one evaluator.
    Rank(RankArgs),
    /// Cross-validate a learner on the best or worst k attributes, k = 1..k_max.
    Sweep(SweepArgs),
    /// Test a learner's cross-validated accuracy against chance.
    Diagnose(DiagnoseArgs),
    /// Grid of evaluators by learners on the best k attributes.
    Compare(CompareArgs),
    /// Score every subset of an agreement ensemble.
    Ensemble(EnsembleArgs),
    /// Kaplan-Meier curves per TNM stage or per stage and prediction.
    Survival(SurvivalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    ClassSymmetric,
    Hadamard,
    Polynomial,
    MergedXor,
    Mixture,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GeneratorKind,
    /// Sample count (polynomial: 1000, merged_xor: 64, mixture: 400).
    #[arg(long)]
    pub n: Option<usize>,
    /// class_symmetric samples per class.
    #[arg(long, default_value_t = 8)]
    pub n_per_class: usize,
    /// class_symmetric within-class similarity.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    /// class_symmetric between-class similarity.
    #[arg(long, default_value_t = 0.2)]
    pub b: f64,
    /// hadamard order, a power of two.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    /// mixture fraction of easy samples, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub frac_easy: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct InputArgs {
    /// Dataset CSV. Columns named label, months, event and tnm_stage are
    /// read as metadata when present.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub label_column: Option<String>,
    /// Derive labels from survival: 1 if months >= threshold, 0 if the
    /// event came earlier; earlier censored samples are dropped.
    #[arg(long)]
    pub survival_labels: Option<f64>,
    #[arg(long)]
    pub impute_mean: bool,
    #[arg(long)]
    pub zscore: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    SvmSmo,
    Logistic,
    Cart,
    GainratioTree,
    Mlp,
    TnmRule,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::SvmSmo => "svm_smo",
            LearnerKind::Logistic => "logistic",
            LearnerKind::Cart => "cart",
            LearnerKind::GainratioTree => "gainratio_tree",
            LearnerKind::Mlp => "mlp",
            LearnerKind::TnmRule => "tnm_rule",
        }
    }

    fn accepts(self, key: &str) -> bool {
        let keys: &[&str] = match self {
            LearnerKind::SvmSmo => &["c", "tol", "max_iters"],
            LearnerKind::Logistic => &["l2", "tol", "max_iters"],
            LearnerKind::Cart | LearnerKind::GainratioTree => &["max_depth", "min_leaf"],
            LearnerKind::Mlp => &["hidden_units", "learning_rate", "epochs"],
            LearnerKind::TnmRule => &[],
        };
        keys.contains(&key)
    }

    /// Spec with default hyperparameters.
    pub fn spec(self, seed: u64) -> Result<LearnerSpec> {
        let spec: LearnerSpec = serde_json::from_value(serde_json::json!({ "kind": self.name() }))?;
        Ok(spec.with_seed(seed))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LearnerArgs {
    #[arg(long, value_enum, default_value = "svm_smo")]
    pub learner: LearnerKind,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub hidden_units: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
}

impl LearnerArgs {
    /// Learner spec from the flags; a hyperparameter the kind does not take
    /// is a usage error.
    pub fn spec(&self, seed: u64) -> Result<LearnerSpec> {
        let mut map = Map::new();
        map.insert("kind".into(), Value::from(self.learner.name()));
        let given: [(&str, Option<Value>); 9] = [
            ("c", self.c.map(Value::from)),
            ("tol", self.tol.map(Value::from)),
            ("max_iters", self.max_iters.map(Value::from)),
            ("l2", self.l2.map(Value::from)),
            ("max_depth", self.max_depth.map(Value::from)),
            ("min_leaf", self.min_leaf.map(Value::from)),
            ("hidden_units", self.hidden_units.map(Value::from)),
            ("learning_rate", self.learning_rate.map(Value::from)),
            ("epochs", self.epochs.map(Value::from)),
        ];
        for (key, value) in given {
            if let Some(v) = value {
                if !self.learner.accepts(key) {
                    return Err(UsageError(format!(
                        "--{} does not apply to learner {}",
                        key.replace('_', "-"),
                        self.learner.name()
                    ))
                    .into());
                }
                map.insert(key.into(), v);
            }
        }
        let spec: LearnerSpec = serde_json::from_value(Value::Object(map))?;
        let spec = spec.with_seed(seed);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    #[serde(serialize_with = "crate::output::display")]
    pub evaluator: Evaluator,
    /// SVM-RFE soft-margin constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Equal-frequency bins for chi_squared and info_gain.
    #[arg(long)]
    pub n_bins: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl RankArgs {
    pub fn evaluator(&self) -> Result<Evaluator> {
        evaluator_with(self.evaluator, self.c, self.n_bins)
    }
}

pub fn evaluator_with(base: Evaluator, c: Option<f64>, n_bins: Option<usize>) -> Result<Evaluator> {
    match base {
        Evaluator::SvmRfe { c: default } => {
            if n_bins.is_some() {
                return Err(UsageError("--n-bins does not apply to svm_rfe".into()).into());
            }
            Ok(Evaluator::SvmRfe {
                c: c.unwrap_or(default),
            })
        }
        Evaluator::ChiSquared { n_bins: default } | Evaluator::InfoGain { n_bins: default } => {
            if c.is_some() {
                return Err(UsageError(format!("--c does not apply to {}", base.name())).into());
            }
            let n_bins = n_bins.unwrap_or(default);
            Ok(match base {
                Evaluator::ChiSquared { .. } => Evaluator::ChiSquared { n_bins },
                _ => Evaluator::InfoGain { n_bins },
            })
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum EndArg {
    Best,
    Worst,
}

impl From<EndArg> for End {
    fn from(e: EndArg) -> Self {
        match e {
            EndArg::Best => End::Best,
            EndArg::Worst => End::Worst,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Ranking CSV as written by `rank`.
    #[arg(long)]
    pub ranking: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, value_enum)]
    pub end: EndArg,
    #[arg(long)]
    pub k_max: usize,
    /// kfold:N or loo.
    #[arg(long, default_value = "kfold:10")]
    #[serde(serialize_with = "crate::output::display")]
    pub cv: CvSpec,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, default_value = "kfold:10")]
    #[serde(serialize_with = "crate::output::display")]
    pub cv: CvSpec,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "svm_rfe,chi_squared,info_gain")]
    #[serde(serialize_with = "crate::output::display_list")]
    pub evaluators: Vec<Evaluator>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "svm_smo,logistic,cart,gainratio_tree"
    )]
    pub learners: Vec<LearnerKind>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value = "kfold:10")]
    #[serde(serialize_with = "crate::output::display")]
    pub cv: CvSpec,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Member config JSON (format agreelearn-members/1).
    #[arg(long, conflicts_with = "default_roster", required_unless_present = "default_roster")]
    pub config: Option<PathBuf>,
    /// The six-member TNM / SVM / logistic / gain-ratio roster.
    #[arg(long)]
    pub default_roster: bool,
    /// Fixed ranking CSV for best-k / worst-k members.
    #[arg(long, conflicts_with = "rank_per_fold")]
    pub ranking: Option<PathBuf>,
    /// Re-rank with this evaluator on every training split instead.
    #[arg(long)]
    #[serde(serialize_with = "crate::output::display_opt")]
    pub rank_per_fold: Option<Evaluator>,
    #[arg(long, default_value = "kfold:10")]
    #[serde(serialize_with = "crate::output::display")]
    pub cv: CvSpec,
    /// Attribute whose mean is compared between easy and hard samples.
    #[arg(long)]
    pub ease_marker: Option<String>,
    /// Threshold for the marker rule; defaults to the midpoint of the
    /// group means.
    #[arg(long, requires = "ease_marker")]
    pub ease_threshold: Option<f64>,
    /// Attributes for the easy-versus-hard MLP.
    #[arg(long, value_delimiter = ',')]
    pub ease_model_markers: Vec<String>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// CSV with a `prediction` column (1 = survives), one row per sample.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long, default_value_t = 60.0)]
    pub horizon: f64,
    /// One minus the raw death fraction instead of Kaplan-Meier.
    #[arg(long)]
    pub raw_proportion: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
