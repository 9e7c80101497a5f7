//! Unanimous-agreement ensembles.
//!
//! A member pairs a learner with a feature selection and an orientation
//! policy. An ensemble predicts a class only when every member votes for it
//! and abstains otherwise. [`evaluate_subsets`] fits each member once per
//! fold, records the held-out votes and scores all `2^m − 1` member subsets
//! from that single vote matrix.

use std::collections::HashSet;
use std::io::Write;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antilearn::auto_orient;
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::evaluation::{derive_seed, pooled_cv, selective_metrics, training_folds, CvSpec, SelectiveMetrics};
use crate::learners::{self, LearnerSpec, Orientation, TrainedModel};
use crate::ranking::{select_best_k, select_worst_k, Ranking, RankingSource};

pub const MEMBERS_FORMAT: &str = "agreelearn-members/1";
pub const MAX_MEMBERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeatureSelection {
    Explicit { attributes: Vec<String> },
    BestK { k: usize },
    WorstK { k: usize },
    TnmOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationPolicy {
    #[default]
    Normal,
    Inverted,
    /// Chosen on each training split by an inner cross-validation.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub name: String,
    pub learner: LearnerSpec,
    pub features: FeatureSelection,
    #[serde(default)]
    pub orientation: OrientationPolicy,
}

impl EnsembleMember {
    pub fn new(name: &str, learner: LearnerSpec, features: FeatureSelection, orientation: OrientationPolicy) -> Self {
        Self {
            name: name.to_string(),
            learner,
            features,
            orientation,
        }
    }
}

/// Members plus the ranking their best-k / worst-k selections refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<RankingSource>,
}

#[derive(Serialize, Deserialize)]
struct MembersDocument {
    format: String,
    #[serde(flatten)]
    ensemble: Ensemble,
}

impl Ensemble {
    pub fn new(members: Vec<EnsembleMember>, ranking: Option<RankingSource>) -> Self {
        Self { members, ranking }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|m| m.name.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&MembersDocument {
            format: MEMBERS_FORMAT.to_string(),
            ensemble: self.clone(),
        })?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: MembersDocument = serde_json::from_str(json)?;
        if doc.format != MEMBERS_FORMAT {
            return Err(Error::Unsupported(format!(
                "member config format '{}' (expected '{MEMBERS_FORMAT}')",
                doc.format
            )));
        }
        Ok(doc.ensemble)
    }

    /// Checks the roster against `d`; errors name the offending member.
    pub fn validate(&self, d: &Dataset) -> Result<()> {
        if self.members.is_empty() || self.members.len() > MAX_MEMBERS {
            return Err(Error::param(format!(
                "an ensemble needs 1..={MAX_MEMBERS} members, got {}",
                self.members.len()
            )));
        }
        let mut seen = HashSet::new();
        for m in &self.members {
            if !seen.insert(m.name.as_str()) {
                return Err(Error::param(format!("duplicate member name '{}'", m.name)));
            }
            self.validate_member(m, d).map_err(|e| e.in_member(&m.name))?;
        }
        if let Some(RankingSource::Fixed { ranking }) = &self.ranking {
            ranking.check_against(d)?;
        }
        Ok(())
    }

    fn validate_member(&self, m: &EnsembleMember, d: &Dataset) -> Result<()> {
        m.learner.validate()?;
        match &m.features {
            FeatureSelection::Explicit { attributes } => {
                if attributes.is_empty() {
                    return Err(Error::param("explicit feature list is empty"));
                }
                for a in attributes {
                    if d.attribute_index(a).is_none() {
                        return Err(Error::Schema(format!("attribute '{a}' is not in the dataset")));
                    }
                }
            }
            FeatureSelection::BestK { k } | FeatureSelection::WorstK { k } => {
                if self.ranking.is_none() {
                    return Err(Error::param("best_k/worst_k selection needs a ranking"));
                }
                if *k == 0 || *k > d.n_attributes() {
                    return Err(Error::param(format!("k must lie in 1..={}, got {k}", d.n_attributes())));
                }
            }
            FeatureSelection::TnmOnly => {
                if d.tnm_stage().is_none() {
                    return Err(Error::precondition("tnm_only selection needs a TNM stage column"));
                }
            }
        }
        if matches!(m.learner.params, learners::LearnerParams::TnmRule) && d.tnm_stage().is_none() {
            return Err(Error::precondition("tnm_rule needs a TNM stage column"));
        }
        Ok(())
    }
}

/// The six-member roster: CART on TNM stage; SVM on the best 8; inverted
/// SVM on the worst 8; logistic on the best 8; inverted logistic on the
/// worst 9; gain-ratio tree on the best 8.
pub fn default_roster() -> Vec<EnsembleMember> {
    use FeatureSelection::{BestK, TnmOnly, WorstK};
    use OrientationPolicy::{Inverted, Normal};
    vec![
        EnsembleMember::new("cart_tnm", LearnerSpec::cart(), TnmOnly, Normal),
        EnsembleMember::new("svm_best8", LearnerSpec::svm(), BestK { k: 8 }, Normal),
        EnsembleMember::new("svm_worst8", LearnerSpec::svm(), WorstK { k: 8 }, Inverted),
        EnsembleMember::new("logistic_best8", LearnerSpec::logistic(), BestK { k: 8 }, Normal),
        EnsembleMember::new("logistic_worst9", LearnerSpec::logistic(), WorstK { k: 9 }, Inverted),
        EnsembleMember::new("gainratio_best8", LearnerSpec::gainratio_tree(), BestK { k: 8 }, Normal),
    ]
}

/// [`default_roster`] over a fixed ranking of `d`'s attributes.
pub fn build_default_members(d: &Dataset, ranking: &Ranking) -> Result<Ensemble> {
    if d.tnm_stage().is_none() {
        return Err(Error::precondition("the default roster needs a TNM stage column"));
    }
    d.require_labels("the default roster")?;
    ranking.check_against(d)?;
    let ensemble = Ensemble::new(
        default_roster(),
        Some(RankingSource::Fixed {
            ranking: ranking.clone(),
        }),
    );
    ensemble.validate(d)?;
    Ok(ensemble)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    Attributes,
    /// The model was trained on the single attribute `tnm_stage`.
    Tnm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedMember {
    pub name: String,
    pub view: View,
    pub model: TrainedModel,
    pub inner_accuracy: Option<f64>,
}

impl FittedMember {
    pub fn predict(&self, sample: &Sample<'_>) -> Result<u8> {
        let vote = match self.view {
            View::Attributes => self.model.predict(sample),
            View::Tnm => {
                let stage = sample
                    .tnm_stage
                    .ok_or_else(|| Error::precondition("sample has no TNM stage"))?;
                self.model.predict(&Sample::new(&[stage as f64]).with_tnm(stage))
            }
        };
        vote.map_err(|e| e.in_member(&self.name))
    }
}

/// Fits every member on `train`, resolving rankings and auto orientations
/// on `train` only.
pub fn fit_members(ensemble: &Ensemble, train: &Dataset, seed: u64) -> Result<Vec<FittedMember>> {
    ensemble.validate(train)?;
    let needs_ranking = ensemble.members.iter().any(|m| {
        matches!(
            m.features,
            FeatureSelection::BestK { .. } | FeatureSelection::WorstK { .. }
        )
    });
    let ranking = match (&ensemble.ranking, needs_ranking) {
        (Some(source), true) => Some(source.resolve(train)?),
        _ => None,
    };
    let tnm = if ensemble.members.iter().any(|m| m.features == FeatureSelection::TnmOnly) {
        Some(train.tnm_view()?)
    } else {
        None
    };
    ensemble
        .members
        .iter()
        .enumerate()
        .map(|(idx, m)| {
            let fit_one = || -> Result<FittedMember> {
                let (view, data, features) = match &m.features {
                    FeatureSelection::Explicit { attributes } => (
                        View::Attributes,
                        train,
                        attributes.iter().filter_map(|a| train.attribute_index(a)).collect(),
                    ),
                    FeatureSelection::BestK { k } => {
                        let r = ranking.as_deref().expect("validated");
                        (View::Attributes, train, select_best_k(r, *k)?)
                    }
                    FeatureSelection::WorstK { k } => {
                        let r = ranking.as_deref().expect("validated");
                        (View::Attributes, train, select_worst_k(r, *k)?)
                    }
                    FeatureSelection::TnmOnly => (View::Tnm, tnm.as_ref().expect("validated"), vec![0]),
                };
                let (model, inner_accuracy) = match m.orientation {
                    OrientationPolicy::Normal => (learners::fit(&m.learner, data, &features)?, None),
                    OrientationPolicy::Inverted => (learners::fit(&m.learner, data, &features)?.inverted(), None),
                    OrientationPolicy::Auto => {
                        let inner = CvSpec::kfold(5.min(data.n_samples()).max(2), derive_seed(seed, &[idx as u64]));
                        let out = auto_orient(&m.learner, data, &features, &inner)?;
                        (out.model, out.inner_accuracy)
                    }
                };
                Ok(FittedMember {
                    name: m.name.clone(),
                    view,
                    model,
                    inner_accuracy,
                })
            };
            fit_one().map_err(|e| e.in_member(&m.name))
        })
        .collect()
}

/// The unanimous class of `votes`, or `None` when they disagree.
pub fn agreement_of(votes: &[u8]) -> Option<u8> {
    let (&first, rest) = votes.split_first()?;
    rest.iter().all(|&v| v == first).then_some(first)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementPrediction {
    /// `None` is an abstention.
    pub value: Option<u8>,
    pub votes: Vec<u8>,
}

pub fn predict_agreement(members: &[FittedMember], sample: &Sample<'_>) -> Result<AgreementPrediction> {
    let votes = members.iter().map(|m| m.predict(sample)).collect::<Result<Vec<_>>>()?;
    Ok(AgreementPrediction {
        value: agreement_of(&votes),
        votes,
    })
}

/// All non-empty subsets of `m` members as bitmasks (bit `i` = member `i`),
/// ordered by size and then lexicographically by member index.
pub fn enumerate_subsets(m: usize) -> Result<Vec<u32>> {
    if m == 0 || m > MAX_MEMBERS {
        return Err(Error::param(format!(
            "subset enumeration needs 1..={MAX_MEMBERS} members, got {m}"
        )));
    }
    Ok((1..=m)
        .flat_map(|size| (0..m).combinations(size))
        .map(|c| c.into_iter().fold(0u32, |mask, i| mask | (1 << i)))
        .collect())
}

pub fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Held-out votes, one row per sample and one column per member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteMatrix {
    pub member_names: Vec<String>,
    pub votes: Vec<Vec<u8>>,
    pub labels: Vec<u8>,
    pub fold_of: Vec<usize>,
}

impl VoteMatrix {
    pub fn n_samples(&self) -> usize {
        self.votes.len()
    }

    pub fn n_members(&self) -> usize {
        self.member_names.len()
    }

    /// Agreement of the members in `mask` on sample `i`.
    pub fn agreement(&self, mask: u32, i: usize) -> Option<u8> {
        let mut members = mask_members(mask);
        let first = self.votes[i][members.next()?];
        members.all(|j| self.votes[i][j] == first).then_some(first)
    }

    pub fn agreements(&self, mask: u32) -> Vec<Option<u8>> {
        (0..self.n_samples()).map(|i| self.agreement(mask, i)).collect()
    }

    pub fn full_mask(&self) -> u32 {
        if self.n_members() == 32 {
            u32::MAX
        } else {
            (1u32 << self.n_members()) - 1
        }
    }

    pub fn metrics(&self, mask: u32) -> Result<SelectiveMetrics> {
        selective_metrics(&self.agreements(mask), &self.labels)
    }

    /// One report per non-empty member subset.
    pub fn subset_reports(&self) -> Result<Vec<SubsetReport>> {
        enumerate_subsets(self.n_members())?
            .into_iter()
            .map(|mask| {
                let m = self.metrics(mask)?;
                Ok(SubsetReport {
                    bitmask: mask,
                    members: mask_members(mask).map(|i| self.member_names[i].clone()).collect(),
                    size: mask.count_ones() as usize,
                    n_matches: m.n_covered,
                    n_correct: m.n_correct,
                    accuracy: m.accuracy,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub bitmask: u32,
    pub members: Vec<String>,
    pub size: usize,
    pub n_matches: usize,
    pub n_correct: usize,
    /// `None` when no sample is unanimous.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub size: usize,
    pub n_subsets: usize,
    pub mean_matches: f64,
    /// Mean over the subsets that have at least one match.
    pub mean_accuracy: Option<f64>,
}

pub fn aggregate_by_size(reports: &[SubsetReport]) -> Vec<SizeAggregate> {
    let max = reports.iter().map(|r| r.size).max().unwrap_or(0);
    (1..=max)
        .filter_map(|size| {
            let group: Vec<&SubsetReport> = reports.iter().filter(|r| r.size == size).collect();
            if group.is_empty() {
                return None;
            }
            let accs: Vec<f64> = group.iter().filter_map(|r| r.accuracy).collect();
            Some(SizeAggregate {
                size,
                n_subsets: group.len(),
                mean_matches: group.iter().map(|r| r.n_matches as f64).sum::<f64>() / group.len() as f64,
                mean_accuracy: (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEvaluation {
    pub votes: VoteMatrix,
    pub subsets: Vec<SubsetReport>,
    pub by_size: Vec<SizeAggregate>,
}

/// Held-out votes of every member under `cv`. Each fold fits the members
/// once on its training split.
pub fn collect_votes(ensemble: &Ensemble, d: &Dataset, cv: &CvSpec) -> Result<VoteMatrix> {
    ensemble.validate(d)?;
    let labels = d.require_labels("ensemble evaluation")?.to_vec();
    let folds = training_folds(d, cv)?;
    let per_fold: Vec<Vec<(usize, Vec<u8>)>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let fitted = fit_members(ensemble, &d.select_rows(&fold.train), derive_seed(cv.seed, &[f as u64]))?;
            fold.test
                .iter()
                .map(|&i| Ok((i, predict_agreement(&fitted, &d.sample(i))?.votes)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = d.n_samples();
    let mut votes = vec![Vec::new(); n];
    let mut fold_of = vec![0; n];
    for (f, rows) in per_fold.into_iter().enumerate() {
        for (i, v) in rows {
            votes[i] = v;
            fold_of[i] = f;
        }
    }
    Ok(VoteMatrix {
        member_names: ensemble.names(),
        votes,
        labels,
        fold_of,
    })
}

/// Cross-validated reports for all member subsets, pooled over folds.
pub fn evaluate_subsets(ensemble: &Ensemble, d: &Dataset, cv: &CvSpec) -> Result<EnsembleEvaluation> {
    let votes = collect_votes(ensemble, d, cv)?;
    let subsets = votes.subset_reports()?;
    let by_size = aggregate_by_size(&subsets);
    Ok(EnsembleEvaluation {
        votes,
        subsets,
        by_size,
    })
}

/// Writes `subset_bitmask,subset_names,size,n_matches,n_correct,accuracy`;
/// names are joined with `+` and an undefined accuracy is left empty.
pub fn write_subsets_csv<W: Write>(reports: &[SubsetReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "subset_bitmask",
        "subset_names",
        "size",
        "n_matches",
        "n_correct",
        "accuracy",
    ])?;
    for r in reports {
        w.write_record([
            r.bitmask.to_string(),
            r.members.join("+"),
            r.size.to_string(),
            r.n_matches.to_string(),
            r.n_correct.to_string(),
            r.accuracy.map(|a| a.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-sample votes and the agreement of the members in `mask`:
/// `sample,label,fold,<member>...,agreement`.
pub fn write_agreement_csv<W: Write>(votes: &VoteMatrix, mask: u32, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["sample".to_string(), "label".to_string(), "fold".to_string()];
    header.extend(votes.member_names.iter().cloned());
    header.push("agreement".to_string());
    w.write_record(&header)?;
    for i in 0..votes.n_samples() {
        let mut row = vec![i.to_string(), votes.labels[i].to_string(), votes.fold_of[i].to_string()];
        row.extend(votes.votes[i].iter().map(u8::to_string));
        row.push(votes.agreement(mask, i).map(|v| v.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ease {
    Easy,
    Hard,
    Excluded,
}

/// Unanimous votes are easy, an exact half split is hard, anything else is
/// excluded. Needs an even member count.
pub fn ease_from_votes(votes: &[Vec<u8>]) -> Result<Vec<Ease>> {
    let m = votes.first().map_or(0, Vec::len);
    if m == 0 || m % 2 == 1 {
        return Err(Error::precondition(format!(
            "ease labels need an even, non-zero member count, got {m}"
        )));
    }
    votes
        .iter()
        .map(|v| {
            if v.len() != m {
                return Err(Error::param("ragged vote matrix"));
            }
            let ones = v.iter().filter(|&&x| x == 1).count();
            Ok(if ones == 0 || ones == m {
                Ease::Easy
            } else if 2 * ones == m {
                Ease::Hard
            } else {
                Ease::Excluded
            })
        })
        .collect()
}

/// Ease labels from the members' cross-validated votes.
pub fn ease_labels(ensemble: &Ensemble, d: &Dataset, cv: &CvSpec) -> Result<Vec<Ease>> {
    if ensemble.len() % 2 == 1 {
        return Err(Error::precondition(format!(
            "ease labels need an even member count, got {}",
            ensemble.len()
        )));
    }
    ease_from_votes(&collect_votes(ensemble, d, cv)?.votes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerAnalysis {
    pub marker: String,
    pub n_easy: usize,
    pub n_hard: usize,
    /// Mean marker value over easy samples.
    pub rate_easy: f64,
    pub rate_hard: f64,
    pub threshold: f64,
    /// Accuracy of the one-threshold easy/hard rule on the labeled samples.
    pub accuracy: f64,
}

/// Mean marker value per ease group and the accuracy of a single-threshold
/// rule separating them. Samples beyond the threshold on the hard group's
/// side are called hard; values exactly at the threshold, and every value
/// when the group means coincide, get the larger group.
pub fn ease_marker_analysis(
    d: &Dataset,
    ease: &[Ease],
    marker: usize,
    threshold: Option<f64>,
) -> Result<MarkerAnalysis> {
    if ease.len() != d.n_samples() {
        return Err(Error::param(format!(
            "{} ease labels for {} samples",
            ease.len(),
            d.n_samples()
        )));
    }
    if marker >= d.n_attributes() {
        return Err(Error::param(format!("marker index {marker} out of range")));
    }
    let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (i, e) in ease.iter().enumerate() {
        let g = match e {
            Ease::Easy => 0,
            Ease::Hard => 1,
            Ease::Excluded => continue,
        };
        if d.is_missing(i, marker) {
            return Err(Error::precondition(format!(
                "marker '{}' is missing at row {i}",
                d.attributes()[marker]
            )));
        }
        groups[g].push(d.value(i, marker));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::precondition(
            "marker analysis needs at least one easy and one hard sample",
        ));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (rate_easy, rate_hard) = (mean(&groups[0]), mean(&groups[1]));
    let threshold = threshold.unwrap_or(0.5 * (rate_easy + rate_hard));
    let majority_hard = groups[1].len() > groups[0].len();
    let call_hard = |v: f64| {
        if rate_hard > rate_easy && v != threshold {
            v > threshold
        } else if rate_hard < rate_easy && v != threshold {
            v < threshold
        } else {
            majority_hard
        }
    };
    let correct =
        groups[0].iter().filter(|&&v| !call_hard(v)).count() + groups[1].iter().filter(|&&v| call_hard(v)).count();
    Ok(MarkerAnalysis {
        marker: d.attributes()[marker].clone(),
        n_easy: groups[0].len(),
        n_hard: groups[1].len(),
        rate_easy,
        rate_hard,
        threshold,
        accuracy: correct as f64 / (groups[0].len() + groups[1].len()) as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaseModel {
    pub model: TrainedModel,
    pub loo_accuracy: f64,
    pub n_samples: usize,
}

/// Fits `spec` to predict hard (1) versus easy (0) from the given markers on
/// the labeled samples, reporting leave-one-out accuracy.
pub fn ease_model(d: &Dataset, ease: &[Ease], markers: &[usize], spec: &LearnerSpec) -> Result<EaseModel> {
    if ease.len() != d.n_samples() {
        return Err(Error::param("ease labels do not match the dataset"));
    }
    if markers.is_empty() {
        return Err(Error::param("ease model needs at least one marker"));
    }
    let rows: Vec<usize> = (0..d.n_samples()).filter(|&i| ease[i] != Ease::Excluded).collect();
    let labels: Vec<u8> = rows.iter().map(|&i| u8::from(ease[i] == Ease::Hard)).collect();
    let hard = labels.iter().filter(|&&l| l == 1).count();
    if hard < 4 || labels.len() - hard < 4 {
        return Err(Error::precondition(format!(
            "ease model needs at least 4 easy and 4 hard samples, got {} and {hard}",
            labels.len() - hard
        )));
    }
    let sub = d.select_attributes(markers)?.select_rows(&rows).with_labels(labels)?;
    let features: Vec<usize> = (0..markers.len()).collect();
    let table = pooled_cv(spec, &sub, &features, &CvSpec::loo())?;
    Ok(EaseModel {
        model: learners::fit(spec, &sub, &features)?,
        loo_accuracy: table.accuracy(),
        n_samples: sub.n_samples(),
    })
}

/// Orientation actually used by each fitted member.
pub fn orientations(members: &[FittedMember]) -> Vec<Orientation> {
    members.iter().map(|m| m.model.orientation()).collect()
}
