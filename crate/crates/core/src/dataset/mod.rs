//! Tabular data model shared by every other module.
//!
//! A [`Dataset`] is a dense samples × attributes matrix with a missing-value
//! mask, an optional binary label per sample, optional survival follow-up and
//! an optional TNM stage. Datasets are immutable once built; every
//! preprocessing step returns a new value.

mod csv_io;
pub mod generators;
mod preprocess;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, write_csv, CsvOptions, DEFAULT_LABEL_COLUMN, EVENT_COLUMN, MONTHS_COLUMN, TNM_COLUMN};
pub use preprocess::{
    binarize_survival, impute_mean, linearize, normalize_zscore, Transform, DEFAULT_SURVIVAL_THRESHOLD,
};

/// Follow-up after the operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub months: f64,
    /// `true` when death was observed, `false` when censored.
    pub event: bool,
}

impl SurvivalRecord {
    pub fn new(months: f64, event: bool) -> Result<Self> {
        if !(months.is_finite() && months >= 0.0) {
            return Err(Error::param(format!(
                "survival months must be finite and non-negative, got {months}"
            )));
        }
        Ok(Self { months, event })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<String>,
    /// Row-major; missing cells hold NaN.
    values: Vec<f64>,
    missing: Vec<bool>,
    n_samples: usize,
    labels: Option<Vec<u8>>,
    survival: Option<Vec<SurvivalRecord>>,
    tnm_stage: Option<Vec<u8>>,
}

/// One row as seen by a trained model.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    /// Attribute values; missing cells are NaN.
    pub values: &'a [f64],
    pub tnm_stage: Option<u8>,
}

impl<'a> Sample<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self {
            values,
            tnm_stage: None,
        }
    }

    pub fn with_tnm(mut self, stage: u8) -> Self {
        self.tnm_stage = Some(stage);
        self
    }
}

impl Dataset {
    /// Builds a fully observed dataset from rows.
    pub fn from_rows(attributes: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let missing = rows.iter().map(|r| vec![false; r.len()]).collect::<Vec<_>>();
        Self::with_missing(attributes, rows, &missing)
    }

    /// Builds a dataset with an explicit missing mask. Masked cells are
    /// stored as NaN regardless of the value supplied.
    pub fn with_missing(attributes: Vec<String>, rows: &[Vec<f64>], missing: &[Vec<bool>]) -> Result<Self> {
        let p = attributes.len();
        let mut seen = HashSet::new();
        for name in &attributes {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute name '{name}'")));
            }
        }
        if rows.len() != missing.len() {
            return Err(Error::Schema(format!(
                "{} value rows but {} mask rows",
                rows.len(),
                missing.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * p);
        let mut mask = Vec::with_capacity(rows.len() * p);
        for (i, (row, mrow)) in rows.iter().zip(missing).enumerate() {
            if row.len() != p || mrow.len() != p {
                return Err(Error::Schema(format!("row {i} has {} values, expected {p}", row.len())));
            }
            for (j, (&v, &m)) in row.iter().zip(mrow).enumerate() {
                if m {
                    values.push(f64::NAN);
                } else if !v.is_finite() {
                    return Err(Error::Schema(format!(
                        "non-finite value {v} at row {i}, attribute '{}'",
                        attributes[j]
                    )));
                } else {
                    values.push(v);
                }
                mask.push(m);
            }
        }
        Ok(Self {
            attributes,
            values,
            missing: mask,
            n_samples: rows.len(),
            labels: None,
            survival: None,
            tnm_stage: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        self.check_len("labels", labels.len())?;
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Schema(format!("label {bad} is not in {{0,1}}")));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_survival(mut self, survival: Vec<SurvivalRecord>) -> Result<Self> {
        self.check_len("survival records", survival.len())?;
        if let Some(bad) = survival.iter().find(|r| !(r.months.is_finite() && r.months >= 0.0)) {
            return Err(Error::Schema(format!(
                "survival months {} must be non-negative",
                bad.months
            )));
        }
        self.survival = Some(survival);
        Ok(self)
    }

    pub fn with_tnm_stage(mut self, stages: Vec<u8>) -> Result<Self> {
        self.check_len("tnm stages", stages.len())?;
        if let Some(bad) = stages.iter().find(|s| !(1..=4).contains(*s)) {
            return Err(Error::Schema(format!("TNM stage {bad} is not in 1..=4")));
        }
        self.tnm_stage = Some(stages);
        Ok(self)
    }

    fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.n_samples {
            return Err(Error::Schema(format!(
                "{what} has {len} entries but the dataset has {} samples",
                self.n_samples
            )));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_attributes();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_samples).map(move |i| self.row(i))
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_attributes() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.value(i, j)).collect()
    }

    pub fn is_missing(&self, i: usize, j: usize) -> bool {
        self.missing[i * self.n_attributes() + j]
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// Labels, or a precondition error naming `op`.
    pub fn require_labels(&self, op: &str) -> Result<&[u8]> {
        self.labels()
            .ok_or_else(|| Error::precondition(format!("{op} requires a labeled dataset")))
    }

    pub fn survival(&self) -> Option<&[SurvivalRecord]> {
        self.survival.as_deref()
    }

    pub fn tnm_stage(&self) -> Option<&[u8]> {
        self.tnm_stage.as_deref()
    }

    pub fn sample(&self, i: usize) -> Sample<'_> {
        Sample {
            values: self.row(i),
            tnm_stage: self.tnm_stage.as_ref().map(|s| s[i]),
        }
    }

    /// Copy of the given rows, in the given order, with all metadata.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let p = self.n_attributes();
        let mut values = Vec::with_capacity(indices.len() * p);
        let mut missing = Vec::with_capacity(indices.len() * p);
        for &i in indices {
            values.extend_from_slice(self.row(i));
            missing.extend_from_slice(&self.missing[i * p..(i + 1) * p]);
        }
        let pick = |v: &Option<Vec<u8>>| v.as_ref().map(|v| indices.iter().map(|&i| v[i]).collect());
        Dataset {
            attributes: self.attributes.clone(),
            values,
            missing,
            n_samples: indices.len(),
            labels: pick(&self.labels),
            survival: self.survival.as_ref().map(|s| indices.iter().map(|&i| s[i]).collect()),
            tnm_stage: pick(&self.tnm_stage),
        }
    }

    /// Copy restricted to the given attribute columns, in the given order.
    pub fn select_attributes(&self, columns: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = columns.iter().find(|&&j| j >= self.n_attributes()) {
            return Err(Error::param(format!(
                "attribute index {bad} out of range for {} attributes",
                self.n_attributes()
            )));
        }
        let attributes = columns.iter().map(|&j| self.attributes[j].clone()).collect::<Vec<_>>();
        let mut seen = HashSet::new();
        if !columns.iter().all(|j| seen.insert(*j)) {
            return Err(Error::param("attribute selection contains duplicates"));
        }
        let mut values = Vec::with_capacity(self.n_samples * columns.len());
        let mut missing = Vec::with_capacity(self.n_samples * columns.len());
        for i in 0..self.n_samples {
            for &j in columns {
                values.push(self.value(i, j));
                missing.push(self.is_missing(i, j));
            }
        }
        Ok(Dataset {
            attributes,
            values,
            missing,
            n_samples: self.n_samples,
            labels: self.labels.clone(),
            survival: self.survival.clone(),
            tnm_stage: self.tnm_stage.clone(),
        })
    }

    pub(crate) fn replace_values(&self, values: Vec<f64>, missing: Vec<bool>) -> Dataset {
        debug_assert_eq!(values.len(), self.values.len());
        Dataset {
            values,
            missing,
            ..self.clone()
        }
    }

    pub(crate) fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn raw_missing(&self) -> &[bool] {
        &self.missing
    }

    /// Appends the columns of `other` (same sample count) after this
    /// dataset's columns. Labels and metadata are kept from `self`.
    pub fn concat_attributes(&self, other: &Dataset) -> Result<Dataset> {
        if other.n_samples != self.n_samples {
            return Err(Error::Schema(format!(
                "cannot concatenate {} samples with {}",
                self.n_samples, other.n_samples
            )));
        }
        let mut attributes = self.attributes.clone();
        attributes.extend(other.attributes.iter().cloned());
        let rows = (0..self.n_samples)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(other.row(i));
                r
            })
            .collect::<Vec<_>>();
        let mask = (0..self.n_samples)
            .map(|i| {
                let mut m = (0..self.n_attributes())
                    .map(|j| self.is_missing(i, j))
                    .collect::<Vec<_>>();
                m.extend((0..other.n_attributes()).map(|j| other.is_missing(i, j)));
                m
            })
            .collect::<Vec<_>>();
        let mut out = Dataset::with_missing(attributes, &rows, &mask)?;
        out.labels = self.labels.clone();
        out.survival = self.survival.clone();
        out.tnm_stage = self.tnm_stage.clone();
        Ok(out)
    }

    /// Single-attribute view whose only column is the TNM stage.
    pub fn tnm_view(&self) -> Result<Dataset> {
        let stages = self
            .tnm_stage()
            .ok_or_else(|| Error::precondition("dataset has no TNM stage column"))?;
        let rows = stages.iter().map(|&s| vec![s as f64]).collect::<Vec<_>>();
        let mut out = Dataset::from_rows(vec!["tnm_stage".to_string()], &rows)?;
        out.labels = self.labels.clone();
        out.survival = self.survival.clone();
        out.tnm_stage = self.tnm_stage.clone();
        Ok(out)
    }

    /// Counts of label 0 and label 1.
    pub fn class_counts(&self) -> Option<[usize; 2]> {
        self.labels().map(|l| {
            let ones = l.iter().filter(|&&v| v == 1).count();
            [l.len() - ones, ones]
        })
    }
}
