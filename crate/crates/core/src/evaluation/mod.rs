//! Cross-validation, accuracy metrics, the exact binomial test and survival
//! curves.

mod binomial;
mod cv;
mod metrics;
mod survival;

pub use binomial::{binomial_pmf, binomial_test};
pub use cv::{
    derive_seed, make_folds, pooled_cv, pooled_cv_with, training_folds, CvKind, CvReport, CvSpec, Fold, FoldContext,
    FoldMetrics, PredictionTable, Predictor,
};
pub use metrics::{accuracy, n_correct, selective_metrics, SelectiveMetrics};
pub use survival::{
    kaplan_meier, raw_proportion_curve, stage_curves, survival_groups, write_curves_csv, CurveMethod, CurvePoint,
    SurvivalCurve, SurvivalGroup,
};

/// Default horizon for survival curves, in months.
pub const DEFAULT_HORIZON_MONTHS: f64 = 60.0;
