//! Agreement-voting ensembles that mix conventionally trained classifiers
//! with inverted ("anti-learned") ones.
//!
//! The crate is organised along the experimental pipeline:
//!
//! * [`dataset`]: tabular data, CSV I/O, preprocessing and synthetic
//!   generators with known learnability.
//! * [`ranking`]: attribute evaluators (SVM-RFE, chi-squared, information
//!   gain) and best-k / worst-k selection.
//! * [`learners`]: from-scratch binary classifiers behind one interface.
//! * [`antilearn`]: inversion, chance-deviation diagnosis, attribute-count
//!   sweeps and automatic orientation.
//! * [`ensemble`]: unanimous-vote ensembles, subset enumeration and
//!   ease-of-prognosis analysis.
//! * [`evaluation`]: cross-validation, selective metrics, the exact binomial
//!   test and Kaplan-Meier curves.

pub mod antilearn;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod ranking;

pub use error::{Error, Result};
