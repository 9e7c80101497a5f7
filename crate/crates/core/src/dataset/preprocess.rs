use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Replaces every missing cell by the mean of the observed values in its
/// column.
pub fn impute_mean(d: &Dataset) -> Result<Dataset> {
    let (n, p) = (d.n_samples(), d.n_attributes());
    let mut values = d.raw_values().to_vec();
    for j in 0..p {
        let (sum, count) = (0..n)
            .filter(|&i| !d.is_missing(i, j))
            .fold((0.0, 0usize), |(s, c), i| (s + d.value(i, j), c + 1));
        if count == n {
            continue;
        }
        if count == 0 {
            return Err(Error::AllMissing(d.attributes()[j].clone()));
        }
        let mean = sum / count as f64;
        for i in 0..n {
            if d.is_missing(i, j) {
                values[i * p + j] = mean;
            }
        }
    }
    Ok(d.replace_values(values, vec![false; n * p]))
}

/// Centers each column and scales it to unit population standard deviation
/// (divisor n). Zero-variance columns become all zeros.
pub fn normalize_zscore(d: &Dataset) -> Result<Dataset> {
    if d.has_missing() {
        return Err(Error::precondition("normalize_zscore requires no missing values"));
    }
    let (n, p) = (d.n_samples(), d.n_attributes());
    let mut values = d.raw_values().to_vec();
    if n == 0 {
        return Ok(d.clone());
    }
    for j in 0..p {
        let col = d.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for i in 0..n {
            values[i * p + j] = if sd > 0.0 { (col[i] - mean) / sd } else { 0.0 };
        }
    }
    Ok(d.replace_values(values, d.raw_missing().to_vec()))
}

/// Elementwise transform used to straighten attributes with a non-linear
/// effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Reciprocal,
    Log,
}

impl Transform {
    fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Reciprocal => "reciprocal",
            Transform::Log => "log",
        }
    }

    fn apply(self, v: f64) -> Option<f64> {
        match self {
            Transform::Identity => Some(v),
            Transform::Reciprocal => (v != 0.0).then(|| 1.0 / v),
            Transform::Log => (v > 0.0).then(|| v.ln()),
        }
    }
}

/// Applies the listed transforms by attribute name. Missing cells stay
/// missing.
pub fn linearize(d: &Dataset, transforms: &BTreeMap<String, Transform>) -> Result<Dataset> {
    let p = d.n_attributes();
    let mut values = d.raw_values().to_vec();
    for (name, &t) in transforms {
        let j = d
            .attribute_index(name)
            .ok_or_else(|| Error::param(format!("unknown attribute '{name}'")))?;
        for i in 0..d.n_samples() {
            if d.is_missing(i, j) {
                continue;
            }
            let v = d.value(i, j);
            values[i * p + j] = t.apply(v).ok_or_else(|| Error::Domain {
                attribute: name.clone(),
                row: i,
                transform: t.name(),
                value: v,
            })?;
        }
    }
    Ok(d.replace_values(values, d.raw_missing().to_vec()))
}

/// Survival threshold in months used to define "survived".
pub const DEFAULT_SURVIVAL_THRESHOLD: f64 = 60.0;

/// Labels samples 1 when they survived at least `threshold_months` and 0 when
/// death was observed before it. Samples censored before the threshold carry
/// no usable label and are dropped.
pub fn binarize_survival(d: &Dataset, threshold_months: f64) -> Result<Dataset> {
    let survival = d
        .survival()
        .ok_or_else(|| Error::precondition("binarize_survival requires survival metadata"))?;
    let mut keep = Vec::new();
    let mut labels = Vec::new();
    for (i, r) in survival.iter().enumerate() {
        if r.months >= threshold_months {
            keep.push(i);
            labels.push(1);
        } else if r.event {
            keep.push(i);
            labels.push(0);
        }
    }
    d.select_rows(&keep).with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SurvivalRecord;

    fn col(values: &[Option<f64>]) -> Dataset {
        let rows = values.iter().map(|v| vec![v.unwrap_or(0.0)]).collect::<Vec<_>>();
        let mask = values.iter().map(|v| vec![v.is_none()]).collect::<Vec<_>>();
        Dataset::with_missing(vec!["x".into()], &rows, &mask).unwrap()
    }

    #[test]
    fn impute_fills_with_column_mean() {
        let d = impute_mean(&col(&[Some(1.0), None, Some(3.0)])).unwrap();
        assert_eq!(d.column(0), vec![1.0, 2.0, 3.0]);
        assert!(!d.has_missing());
    }

    #[test]
    fn impute_without_missing_is_identity() {
        let d = col(&[Some(1.0), Some(7.5)]);
        assert_eq!(impute_mean(&d).unwrap(), d);
    }

    #[test]
    fn impute_all_missing_names_attribute() {
        match impute_mean(&col(&[None, None])) {
            Err(Error::AllMissing(name)) => assert_eq!(name, "x"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zscore_uses_population_sd() {
        let d = normalize_zscore(&col(&[Some(0.0), Some(2.0)])).unwrap();
        assert_eq!(d.column(0), vec![-1.0, 1.0]);
        let c = normalize_zscore(&col(&[Some(5.0), Some(5.0), Some(5.0)])).unwrap();
        assert_eq!(c.column(0), vec![0.0, 0.0, 0.0]);
        assert!(normalize_zscore(&col(&[Some(1.0), None])).is_err());
    }

    #[test]
    fn zscore_is_stable_when_reapplied() {
        let d = normalize_zscore(&col(&[Some(0.3), Some(-2.0), Some(4.1), Some(9.9)])).unwrap();
        let again = normalize_zscore(&d).unwrap();
        for (a, b) in d.column(0).iter().zip(again.column(0)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn linearize_reciprocal_and_domain_errors() {
        let d = col(&[Some(0.5), Some(2.0)]);
        let mut t = BTreeMap::new();
        t.insert("x".to_string(), Transform::Reciprocal);
        assert_eq!(linearize(&d, &t).unwrap().column(0), vec![2.0, 0.5]);
        assert_eq!(linearize(&d, &BTreeMap::new()).unwrap(), d);

        let z = col(&[Some(1.0), Some(0.0)]);
        t.insert("x".to_string(), Transform::Log);
        match linearize(&z, &t) {
            Err(Error::Domain { attribute, row, .. }) => {
                assert_eq!(attribute, "x");
                assert_eq!(row, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binarize_applies_threshold_and_drops_early_censoring() {
        let d = col(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0)])
            .with_survival(vec![
                SurvivalRecord {
                    months: 72.0,
                    event: false,
                },
                SurvivalRecord {
                    months: 40.0,
                    event: true,
                },
                SurvivalRecord {
                    months: 40.0,
                    event: false,
                },
                SurvivalRecord {
                    months: 60.0,
                    event: true,
                },
            ])
            .unwrap();
        let b = binarize_survival(&d, DEFAULT_SURVIVAL_THRESHOLD).unwrap();
        assert_eq!(b.n_samples(), 3);
        assert_eq!(b.labels().unwrap(), &[1, 0, 1]);
        assert_eq!(b.column(0), vec![1.0, 2.0, 4.0]);
        assert!(binarize_survival(&col(&[Some(1.0)]), 60.0).is_err());
    }
}
