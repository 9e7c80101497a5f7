//! Attribute rankings: SVM recursive feature elimination, chi-squared and
//! information gain over equal-frequency bins, best/worst-k selection and
//! the evaluator-by-learner comparison grid.
//!
//! Ties always go to the lower attribute index.

use std::borrow::Cow;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{pooled_cv_with, CvSpec};
use crate::learners::{self, svm, LearnerSpec};

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "evaluator", rename_all = "snake_case")]
pub enum Evaluator {
    SvmRfe { c: f64 },
    ChiSquared { n_bins: usize },
    InfoGain { n_bins: usize },
}

impl Evaluator {
    pub fn svm_rfe() -> Self {
        Evaluator::SvmRfe { c: 1.0 }
    }

    pub fn chi_squared() -> Self {
        Evaluator::ChiSquared { n_bins: DEFAULT_BINS }
    }

    pub fn info_gain() -> Self {
        Evaluator::InfoGain { n_bins: DEFAULT_BINS }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Evaluator::SvmRfe { .. } => "svm_rfe",
            Evaluator::ChiSquared { .. } => "chi_squared",
            Evaluator::InfoGain { .. } => "info_gain",
        }
    }

    pub fn rank(&self, d: &Dataset) -> Result<Ranking> {
        match *self {
            Evaluator::SvmRfe { c } => rank_svm_rfe(d, c),
            Evaluator::ChiSquared { n_bins } => rank_chi_squared(d, n_bins),
            Evaluator::InfoGain { n_bins } => rank_info_gain(d, n_bins),
        }
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses an evaluator name with default parameters.
impl FromStr for Evaluator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm_rfe" => Ok(Evaluator::svm_rfe()),
            "chi_squared" => Ok(Evaluator::chi_squared()),
            "info_gain" => Ok(Evaluator::info_gain()),
            _ => Err(Error::param(format!(
                "unknown evaluator '{s}' (expected svm_rfe, chi_squared or info_gain)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub evaluator: String,
    /// Names of all ranked attributes, by attribute index.
    pub attribute_names: Vec<String>,
    /// Attribute indices, best first.
    pub order: Vec<usize>,
    /// Scores aligned with `order`; non-increasing.
    pub scores: Vec<f64>,
}

impl Ranking {
    /// Orders attributes by descending score, lower index first on ties.
    pub fn from_scores(evaluator: &str, attribute_names: &[String], per_attribute: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..per_attribute.len()).collect();
        order.sort_by(|&a, &b| per_attribute[b].total_cmp(&per_attribute[a]).then(a.cmp(&b)));
        Self {
            evaluator: evaluator.to_string(),
            attribute_names: attribute_names.to_vec(),
            scores: order.iter().map(|&i| per_attribute[i]).collect(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks that the ranking covers exactly the attributes of `d`, by name
    /// and position.
    pub fn check_against(&self, d: &Dataset) -> Result<()> {
        if self.attribute_names.as_slice() != d.attributes() {
            let missing: Vec<&str> = self
                .attribute_names
                .iter()
                .filter(|n| d.attribute_index(n).is_none())
                .map(String::as_str)
                .collect();
            return Err(Error::Schema(if missing.is_empty() {
                "ranking and dataset attributes differ".to_string()
            } else {
                format!("ranking names attributes not in the dataset: {}", missing.join(", "))
            }));
        }
        Ok(())
    }
}

fn check_k(r: &Ranking, k: usize) -> Result<()> {
    if k == 0 || k > r.len() {
        return Err(Error::param(format!("k must lie in 1..={}, got {k}", r.len())));
    }
    Ok(())
}

/// The `k` best-ranked attributes, best first.
pub fn select_best_k(r: &Ranking, k: usize) -> Result<Vec<usize>> {
    check_k(r, k)?;
    Ok(r.order[..k].to_vec())
}

/// The `k` worst-ranked attributes, worst first.
pub fn select_worst_k(r: &Ranking, k: usize) -> Result<Vec<usize>> {
    check_k(r, k)?;
    Ok(r.order.iter().rev().take(k).copied().collect())
}

fn complete_column(d: &Dataset, j: usize) -> Result<Vec<f64>> {
    (0..d.n_samples())
        .map(|i| {
            if d.is_missing(i, j) {
                Err(Error::precondition(format!(
                    "attribute '{}' has missing values; impute first",
                    d.attributes()[j]
                )))
            } else {
                Ok(d.value(i, j))
            }
        })
        .collect()
}

/// Recursive feature elimination with a linear SVM. Each round removes the
/// surviving attribute with the smallest squared weight (the higher index on
/// ties); an attribute's score is the round in which it was removed, and
/// the last survivor scores `n_attributes - 1`.
pub fn rank_svm_rfe(d: &Dataset, c: f64) -> Result<Ranking> {
    let labels = d.require_labels("svm_rfe ranking")?;
    if d.n_samples() < 4 {
        return Err(Error::precondition(format!(
            "svm_rfe needs at least 4 samples, got {}",
            d.n_samples()
        )));
    }
    let params = svm::SvmParams {
        c,
        ..svm::SvmParams::default()
    };
    params.validate()?;
    let columns: Vec<Vec<f64>> = (0..d.n_attributes())
        .map(|j| complete_column(d, j))
        .collect::<Result<_>>()?;
    let mut surviving: Vec<usize> = (0..d.n_attributes()).collect();
    let mut round_of = vec![0.0; d.n_attributes()];
    let mut round = 0;
    while surviving.len() > 1 {
        let x: Vec<Vec<f64>> = (0..d.n_samples())
            .map(|i| surviving.iter().map(|&j| columns[j][i]).collect())
            .collect();
        let w = svm::linear_weights(&x, labels, &params)?;
        let mut drop = 0;
        for p in 1..surviving.len() {
            // `<=` moves ties onto the later, higher-index attribute.
            if w[p] * w[p] <= w[drop] * w[drop] {
                drop = p;
            }
        }
        round_of[surviving.remove(drop)] = round as f64;
        round += 1;
    }
    if let Some(&last) = surviving.first() {
        round_of[last] = round as f64;
    }
    Ok(Ranking::from_scores("svm_rfe", d.attributes(), &round_of))
}

/// Equal-frequency bin index per non-missing value (`None` where missing).
/// Tied values share the bin of their first sorted position, which makes
/// the binning invariant to any strictly increasing rescaling.
pub fn equal_frequency_bins(d: &Dataset, j: usize, n_bins: usize) -> Vec<Option<usize>> {
    let present: Vec<usize> = (0..d.n_samples()).filter(|&i| !d.is_missing(i, j)).collect();
    let m = present.len();
    let mut sorted = present.clone();
    sorted.sort_by(|&a, &b| d.value(a, j).total_cmp(&d.value(b, j)).then(a.cmp(&b)));
    let mut bins = vec![None; d.n_samples()];
    let mut current = 0;
    for (pos, &i) in sorted.iter().enumerate() {
        if pos == 0 || d.value(i, j) != d.value(sorted[pos - 1], j) {
            current = pos * n_bins / m;
        }
        bins[i] = Some(current);
    }
    bins
}

fn contingency(d: &Dataset, labels: &[u8], j: usize, n_bins: usize) -> Vec<[f64; 2]> {
    let mut table = vec![[0.0; 2]; n_bins];
    for (i, b) in equal_frequency_bins(d, j, n_bins).into_iter().enumerate() {
        if let Some(b) = b {
            table[b][labels[i] as usize] += 1.0;
        }
    }
    table
}

fn check_binned(d: &Dataset, n_bins: usize, op: &str) -> Result<()> {
    if n_bins < 2 {
        return Err(Error::param(format!("{op} needs at least 2 bins, got {n_bins}")));
    }
    if d.n_samples() < n_bins {
        return Err(Error::precondition(format!(
            "{op} with {n_bins} bins needs at least {n_bins} samples, got {}",
            d.n_samples()
        )));
    }
    Ok(())
}

/// Pearson chi-squared statistic of a bins × class table.
pub fn chi_squared_statistic(table: &[[f64; 2]]) -> f64 {
    let total: f64 = table.iter().map(|r| r[0] + r[1]).sum();
    let class_totals = [
        table.iter().map(|r| r[0]).sum::<f64>(),
        table.iter().map(|r| r[1]).sum::<f64>(),
    ];
    let mut chi = 0.0;
    for row in table {
        let row_total = row[0] + row[1];
        for c in 0..2 {
            let expected = row_total * class_totals[c] / total;
            if expected > 0.0 {
                chi += (row[c] - expected).powi(2) / expected;
            }
        }
    }
    chi
}

fn entropy_bits(counts: [f64; 2]) -> f64 {
    let n = counts[0] + counts[1];
    counts
        .iter()
        .filter(|&&k| k > 0.0)
        .map(|&k| {
            let p = k / n;
            -p * p.log2()
        })
        .sum()
}

/// `H(Y) − H(Y | bin)` in bits, clamped at zero against rounding.
pub fn information_gain(table: &[[f64; 2]]) -> f64 {
    let class_totals = [
        table.iter().map(|r| r[0]).sum::<f64>(),
        table.iter().map(|r| r[1]).sum::<f64>(),
    ];
    let total = class_totals[0] + class_totals[1];
    if total == 0.0 {
        return 0.0;
    }
    let conditional: f64 = table.iter().map(|r| (r[0] + r[1]) / total * entropy_bits(*r)).sum();
    (entropy_bits(class_totals) - conditional).max(0.0)
}

pub fn rank_chi_squared(d: &Dataset, n_bins: usize) -> Result<Ranking> {
    let labels = d.require_labels("chi_squared ranking")?;
    check_binned(d, n_bins, "chi_squared")?;
    let scores: Vec<f64> = (0..d.n_attributes())
        .map(|j| chi_squared_statistic(&contingency(d, labels, j, n_bins)))
        .collect();
    Ok(Ranking::from_scores("chi_squared", d.attributes(), &scores))
}

pub fn rank_info_gain(d: &Dataset, n_bins: usize) -> Result<Ranking> {
    let labels = d.require_labels("info_gain ranking")?;
    check_binned(d, n_bins, "info_gain")?;
    let scores: Vec<f64> = (0..d.n_attributes())
        .map(|j| information_gain(&contingency(d, labels, j, n_bins)))
        .collect();
    Ok(Ranking::from_scores("info_gain", d.attributes(), &scores))
}

/// Where a feature-selecting procedure gets its ranking. `PerFold`
/// re-ranks on each training split, so held-out labels never influence the
/// selected attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum RankingSource {
    Fixed {
        ranking: Ranking,
    },
    PerFold {
        #[serde(flatten)]
        evaluator: Evaluator,
    },
}

impl RankingSource {
    pub fn resolve<'a>(&'a self, train: &Dataset) -> Result<Cow<'a, Ranking>> {
        match self {
            RankingSource::Fixed { ranking } => {
                ranking.check_against(train)?;
                Ok(Cow::Borrowed(ranking))
            }
            RankingSource::PerFold { evaluator } => Ok(Cow::Owned(evaluator.rank(train)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorGrid {
    pub evaluators: Vec<String>,
    pub learners: Vec<String>,
    pub k: usize,
    /// `accuracy[e][l]`: pooled CV accuracy of learner `l` on the best `k`
    /// attributes of evaluator `e`.
    pub accuracy: Vec<Vec<f64>>,
    /// Best evaluator per learner (the earlier evaluator on ties).
    pub winners: Vec<String>,
}

/// Cross-validates each learner on the best `k` attributes of each
/// evaluator, ranking inside every fold. All cells share the fold partition
/// so their accuracies are paired.
pub fn compare_evaluators(
    d: &Dataset,
    evaluators: &[Evaluator],
    learner_specs: &[LearnerSpec],
    k: usize,
    cv: &CvSpec,
) -> Result<EvaluatorGrid> {
    if evaluators.is_empty() || learner_specs.is_empty() {
        return Err(Error::param("comparison needs at least one evaluator and one learner"));
    }
    if k == 0 || k > d.n_attributes() {
        return Err(Error::param(format!("k must lie in 1..={}, got {k}", d.n_attributes())));
    }
    let cells: Vec<(usize, usize)> = (0..evaluators.len())
        .flat_map(|e| (0..learner_specs.len()).map(move |l| (e, l)))
        .collect();
    let results: Vec<f64> = cells
        .par_iter()
        .map(|&(e, l)| {
            let table = pooled_cv_with(d, cv, |train, _| {
                let r = evaluators[e].rank(train)?;
                learners::fit(&learner_specs[l], train, &select_best_k(&r, k)?)
            })?;
            Ok(table.accuracy())
        })
        .collect::<Result<_>>()?;
    let accuracy: Vec<Vec<f64>> = results.chunks(learner_specs.len()).map(<[f64]>::to_vec).collect();
    let winners = (0..learner_specs.len())
        .map(|l| {
            let best = (0..evaluators.len())
                .reduce(|b, e| if accuracy[e][l] > accuracy[b][l] { e } else { b })
                .unwrap_or(0);
            evaluators[best].name().to_string()
        })
        .collect();
    Ok(EvaluatorGrid {
        evaluators: evaluators.iter().map(|e| e.name().to_string()).collect(),
        learners: learner_specs.iter().map(|s| s.kind_name().to_string()).collect(),
        k,
        accuracy,
        winners,
    })
}

const CSV_HEADER: [&str; 4] = ["evaluator", "rank", "attribute_name", "score"];

/// Writes `evaluator,rank,attribute_name,score`, one row per attribute,
/// rank 1 first.
pub fn write_ranking_csv<W: Write>(r: &Ranking, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for (pos, (&j, score)) in r.order.iter().zip(&r.scores).enumerate() {
        w.write_record([
            r.evaluator.clone(),
            (pos + 1).to_string(),
            r.attribute_names[j].clone(),
            score.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a ranking CSV and maps its names onto `attribute_names`, which must
/// match the ranked set exactly.
pub fn read_ranking_csv<R: Read>(reader: R, attribute_names: &[String]) -> Result<Ranking> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Schema(format!(
            "ranking header must be {}, got {}",
            CSV_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut rows: Vec<(usize, usize, f64)> = Vec::new();
    let mut evaluator = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let parse_err = |column: &str, message: String| Error::Parse {
            row,
            column: column.to_string(),
            message,
        };
        evaluator.get_or_insert_with(|| rec[0].to_string());
        let rank: usize = rec[1]
            .parse()
            .map_err(|_| parse_err("rank", format!("'{}' is not a rank", &rec[1])))?;
        let name = &rec[2];
        let j = attribute_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Schema(format!("ranking attribute '{name}' is not in the dataset")))?;
        let score: f64 = rec[3]
            .parse()
            .map_err(|_| parse_err("score", format!("'{}' is not a number", &rec[3])))?;
        rows.push((rank, j, score));
    }
    rows.sort_by_key(|r| r.0);
    let n = attribute_names.len();
    let mut seen = vec![false; n];
    for (pos, &(rank, j, _)) in rows.iter().enumerate() {
        if rank != pos + 1 || seen[j] {
            return Err(Error::Schema(
                "ranking ranks must be 1..n with each attribute once".into(),
            ));
        }
        seen[j] = true;
    }
    if rows.len() != n {
        return Err(Error::Schema(format!(
            "ranking covers {} attributes but the dataset has {n}",
            rows.len()
        )));
    }
    Ok(Ranking {
        evaluator: evaluator.unwrap_or_default(),
        attribute_names: attribute_names.to_vec(),
        order: rows.iter().map(|r| r.1).collect(),
        scores: rows.iter().map(|r| r.2).collect(),
    })
}
