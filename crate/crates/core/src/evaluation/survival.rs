//! Kaplan-Meier survival curves and the stage-by-prediction grouping.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SurvivalRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub time: f64,
    pub survival: f64,
    pub n_at_risk: usize,
}

/// Right-continuous step function; the first point is always `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub points: Vec<CurvePoint>,
    pub n_samples: usize,
}

impl SurvivalCurve {
    /// Survival probability at time `t ≥ 0`.
    pub fn survival_at(&self, t: f64) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.time <= t)
            .last()
            .map_or(1.0, |p| p.survival)
    }
}

fn sorted_event_times(records: &[SurvivalRecord], horizon: f64) -> Vec<f64> {
    let mut times: Vec<f64> = records
        .iter()
        .filter(|r| r.event && r.months <= horizon)
        .map(|r| r.months)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

fn check(records: &[SurvivalRecord], horizon: f64) -> Result<()> {
    if records.is_empty() {
        return Err(Error::precondition("survival curve of an empty group"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

/// Kaplan-Meier estimate up to `horizon`. Subjects censored at an event time
/// count as at risk at that time.
pub fn kaplan_meier(records: &[SurvivalRecord], horizon: f64) -> Result<SurvivalCurve> {
    check(records, horizon)?;
    let mut s = 1.0;
    let mut points = vec![CurvePoint {
        time: 0.0,
        survival: 1.0,
        n_at_risk: records.len(),
    }];
    for t in sorted_event_times(records, horizon) {
        let at_risk = records.iter().filter(|r| r.months >= t).count();
        let deaths = records.iter().filter(|r| r.event && r.months == t).count();
        s *= 1.0 - deaths as f64 / at_risk as f64;
        points.push(CurvePoint {
            time: t,
            survival: s,
            n_at_risk: at_risk,
        });
    }
    Ok(SurvivalCurve {
        points,
        n_samples: records.len(),
    })
}

/// One minus the raw fraction of the group that died by each event time,
/// ignoring censoring.
pub fn raw_proportion_curve(records: &[SurvivalRecord], horizon: f64) -> Result<SurvivalCurve> {
    check(records, horizon)?;
    let n = records.len();
    let mut points = vec![CurvePoint {
        time: 0.0,
        survival: 1.0,
        n_at_risk: n,
    }];
    for t in sorted_event_times(records, horizon) {
        let dead = records.iter().filter(|r| r.event && r.months <= t).count();
        points.push(CurvePoint {
            time: t,
            survival: 1.0 - dead as f64 / n as f64,
            n_at_risk: records.iter().filter(|r| r.months >= t).count(),
        });
    }
    Ok(SurvivalCurve { points, n_samples: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    KaplanMeier,
    RawProportion,
}

impl CurveMethod {
    pub fn curve(self, records: &[SurvivalRecord], horizon: f64) -> Result<SurvivalCurve> {
        match self {
            CurveMethod::KaplanMeier => kaplan_meier(records, horizon),
            CurveMethod::RawProportion => raw_proportion_curve(records, horizon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalGroup {
    pub name: String,
    pub stage: u8,
    pub predicted: u8,
    pub indices: Vec<usize>,
    /// `None` for an empty group.
    pub curve: Option<SurvivalCurve>,
}

/// Splits TNM stage 2 and stage 3 samples by the model's prediction
/// (1 = survives past the horizon) and estimates a curve for each of the
/// four groups. Every sample must be at stage 2 or 3.
pub fn survival_groups(
    d: &Dataset,
    predictions: &[u8],
    horizon: f64,
    method: CurveMethod,
) -> Result<Vec<SurvivalGroup>> {
    let survival = d
        .survival()
        .ok_or_else(|| Error::precondition("survival groups need survival records"))?;
    let stages = d
        .tnm_stage()
        .ok_or_else(|| Error::precondition("survival groups need TNM stages"))?;
    if predictions.len() != d.n_samples() {
        return Err(Error::param(format!(
            "{} predictions for {} samples",
            predictions.len(),
            d.n_samples()
        )));
    }
    if let Some(i) = stages.iter().position(|s| !(2..=3).contains(s)) {
        return Err(Error::precondition(format!(
            "survival groups need TNM stage 2 or 3, sample {i} is stage {}",
            stages[i]
        )));
    }
    let mut groups = Vec::with_capacity(4);
    for stage in [2u8, 3] {
        for predicted in [1u8, 0] {
            let indices: Vec<usize> = (0..d.n_samples())
                .filter(|&i| stages[i] == stage && predictions[i] == predicted)
                .collect();
            let records: Vec<SurvivalRecord> = indices.iter().map(|&i| survival[i]).collect();
            let curve = if records.is_empty() {
                None
            } else {
                Some(method.curve(&records, horizon)?)
            };
            let outcome = if predicted == 1 { "survive" } else { "die" };
            groups.push(SurvivalGroup {
                name: format!("tnm{stage}_predicted_{outcome}"),
                stage,
                predicted,
                indices,
                curve,
            });
        }
    }
    Ok(groups)
}

/// One curve per TNM stage present in the data, in stage order.
pub fn stage_curves(d: &Dataset, horizon: f64, method: CurveMethod) -> Result<Vec<(u8, SurvivalCurve)>> {
    let survival = d
        .survival()
        .ok_or_else(|| Error::precondition("stage curves need survival records"))?;
    let stages = d
        .tnm_stage()
        .ok_or_else(|| Error::precondition("stage curves need TNM stages"))?;
    let mut out = Vec::new();
    for stage in 1..=4u8 {
        let records: Vec<SurvivalRecord> = (0..d.n_samples())
            .filter(|&i| stages[i] == stage)
            .map(|i| survival[i])
            .collect();
        if !records.is_empty() {
            out.push((stage, method.curve(&records, horizon)?));
        }
    }
    Ok(out)
}

/// Long-format CSV: `time,survival,n_at_risk,group`.
pub fn write_curves_csv<W: Write>(curves: &[(String, &SurvivalCurve)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["time", "survival", "n_at_risk", "group"])?;
    for (name, curve) in curves {
        for p in &curve.points {
            w.write_record([
                p.time.to_string(),
                p.survival.to_string(),
                p.n_at_risk.to_string(),
                name.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(months: f64, event: bool) -> SurvivalRecord {
        SurvivalRecord::new(months, event).unwrap()
    }

    #[test]
    fn two_deaths() {
        let c = kaplan_meier(&[rec(10.0, true), rec(20.0, true)], 60.0).unwrap();
        assert_eq!(c.survival_at(0.0), 1.0);
        assert_eq!(c.survival_at(9.99), 1.0);
        assert_eq!(c.survival_at(10.0), 0.5);
        assert_eq!(c.survival_at(15.0), 0.5);
        assert_eq!(c.survival_at(20.0), 0.0);
    }

    #[test]
    fn censoring_before_the_only_death() {
        let c = kaplan_meier(&[rec(10.0, false), rec(20.0, true)], 60.0).unwrap();
        assert_eq!(c.survival_at(10.0), 1.0);
        assert_eq!(c.survival_at(19.9), 1.0);
        assert_eq!(c.survival_at(20.0), 0.0);
        assert_eq!(c.points.len(), 2);
    }

    #[test]
    fn all_censored_never_steps() {
        let c = kaplan_meier(&[rec(3.0, false), rec(40.0, false)], 60.0).unwrap();
        assert_eq!(c.points.len(), 1);
        assert_eq!(c.survival_at(60.0), 1.0);
    }

    #[test]
    fn censoring_shrinks_the_risk_set() {
        let c = kaplan_meier(
            &[rec(5.0, false), rec(10.0, true), rec(20.0, true), rec(30.0, false)],
            60.0,
        )
        .unwrap();
        assert!((c.survival_at(10.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.survival_at(20.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.points[1].n_at_risk, 3);
    }

    #[test]
    fn censored_at_event_time_is_still_at_risk() {
        let c = kaplan_meier(&[rec(10.0, true), rec(10.0, false)], 60.0).unwrap();
        assert_eq!(c.survival_at(10.0), 0.5);
    }

    #[test]
    fn events_past_horizon_are_dropped() {
        let c = kaplan_meier(&[rec(10.0, true), rec(70.0, true)], 60.0).unwrap();
        assert_eq!(c.points.len(), 2);
        assert_eq!(c.survival_at(100.0), 0.5);
    }

    #[test]
    fn raw_proportion_differs_under_censoring() {
        let recs = [rec(5.0, false), rec(10.0, true)];
        assert_eq!(raw_proportion_curve(&recs, 60.0).unwrap().survival_at(10.0), 0.5);
        assert_eq!(kaplan_meier(&recs, 60.0).unwrap().survival_at(10.0), 0.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(kaplan_meier(&[], 60.0).is_err());
    }
}
