use std::fs;
use std::io::Write;
use std::path::Path;

use agreelearn::antilearn::{diagnose as diagnose_learner, sweep_attribute_count, write_sweep_csv};
use agreelearn::dataset::generators::{
    gen_class_symmetric, gen_hadamard, gen_merged_xor, gen_mixture, gen_polynomial, SubPopulation,
};
use agreelearn::dataset::{write_csv, Dataset};
use agreelearn::ensemble::{
    default_roster, ease_from_votes, ease_marker_analysis, ease_model, evaluate_subsets, write_agreement_csv,
    write_subsets_csv, Ease, Ensemble,
};
use agreelearn::evaluation::{stage_curves, survival_groups, write_curves_csv, CurveMethod, SurvivalCurve};
use agreelearn::learners::LearnerSpec;
use agreelearn::ranking::{compare_evaluators, read_ranking_csv, write_ranking_csv, RankingSource};
use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::args::{
    evaluator_with, CompareArgs, DiagnoseArgs, EnsembleArgs, GenerateArgs, GeneratorKind, RankArgs, SurvivalArgs,
    SweepArgs,
};
use crate::output::{load_input, OutDir, UsageError};

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out)?;
    let (d, subpopulation) = match args.kind {
        GeneratorKind::ClassSymmetric => (gen_class_symmetric(args.n_per_class, args.a, args.b, args.seed)?, None),
        GeneratorKind::Hadamard => (gen_hadamard(args.order, args.seed)?, None),
        GeneratorKind::Polynomial => (gen_polynomial(args.n.unwrap_or(1000), args.seed)?, None),
        GeneratorKind::MergedXor => (gen_merged_xor(args.n.unwrap_or(64), args.seed)?, None),
        GeneratorKind::Mixture => {
            let m = gen_mixture(args.n.unwrap_or(400), args.frac_easy, args.seed)?;
            (m.dataset, Some(m.subpopulation))
        }
    };
    out.write_with("dataset.csv", |w| Ok(write_csv(&d, w)?))?;
    if let Some(tags) = subpopulation {
        out.write_with("subpopulation.csv", |w| {
            writeln!(w, "sample,subpopulation")?;
            for (i, t) in tags.iter().enumerate() {
                let name = match t {
                    SubPopulation::Easy => "easy",
                    SubPopulation::Hard => "hard",
                };
                writeln!(w, "{i},{name}")?;
            }
            Ok(())
        })?;
    }
    out.finish("generate", args, args.seed)
}

pub fn rank(args: &RankArgs) -> Result<()> {
    let evaluator = args.evaluator()?;
    let d = load_input(&args.input)?;
    let mut out = OutDir::create(&args.out)?;
    let ranking = evaluator.rank(&d)?;
    out.write_with("ranking.csv", |w| Ok(write_ranking_csv(&ranking, w)?))?;
    out.finish("rank", args, args.seed)
}

fn read_ranking(path: &Path, d: &Dataset) -> Result<agreelearn::ranking::Ranking> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_ranking_csv(file, d.attributes()).with_context(|| format!("ranking {}", path.display()))
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let spec = args.learner.spec(args.seed)?;
    let d = load_input(&args.input)?;
    let ranking = read_ranking(&args.ranking, &d)?;
    let mut out = OutDir::create(&args.out)?;
    let cv = args.cv.with_seed(args.seed);
    let sweep = sweep_attribute_count(&spec, &ranking, &d, args.end.into(), args.k_max, &cv)?;
    out.write_with("sweep.csv", |w| Ok(write_sweep_csv(&sweep, w)?))?;
    out.write_json("sweep.json", &sweep)?;
    out.finish("sweep", args, args.seed)
}

#[derive(Serialize)]
struct DiagnoseOutput<'a> {
    learner: &'a LearnerSpec,
    cv: String,
    #[serde(flatten)]
    report: agreelearn::antilearn::AntiLearnReport,
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let spec = args.learner.spec(args.seed)?;
    let d = load_input(&args.input)?;
    let mut out = OutDir::create(&args.out)?;
    let cv = args.cv.with_seed(args.seed);
    let report = diagnose_learner(&spec, &d, &cv, args.alpha)?;
    out.write_json(
        "report.json",
        &DiagnoseOutput {
            learner: &spec,
            cv: cv.to_string(),
            report,
        },
    )?;
    out.finish("diagnose", args, args.seed)
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let specs = args
        .learners
        .iter()
        .map(|k| k.spec(args.seed))
        .collect::<Result<Vec<_>>>()?;
    let d = load_input(&args.input)?;
    let mut out = OutDir::create(&args.out)?;
    let cv = args.cv.with_seed(args.seed);
    let grid = compare_evaluators(&d, &args.evaluators, &specs, args.k, &cv)?;
    out.write_with("grid.csv", |w| {
        writeln!(w, "evaluator,learner,accuracy")?;
        for (e, row) in grid.evaluators.iter().zip(&grid.accuracy) {
            for (l, a) in grid.learners.iter().zip(row) {
                writeln!(w, "{e},{l},{a}")?;
            }
        }
        Ok(())
    })?;
    out.write_json("grid.json", &grid)?;
    out.finish("compare", args, args.seed)
}

fn load_roster(args: &EnsembleArgs, d: &Dataset) -> Result<Ensemble> {
    let mut ensemble = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ensemble::from_json(&text).with_context(|| format!("member config {}", path.display()))?
        }
        None => Ensemble::new(default_roster(), None),
    };
    if let Some(path) = &args.ranking {
        ensemble.ranking = Some(RankingSource::Fixed {
            ranking: read_ranking(path, d)?,
        });
    } else if let Some(evaluator) = args.rank_per_fold {
        ensemble.ranking = Some(RankingSource::PerFold {
            evaluator: evaluator_with(evaluator, None, None)?,
        });
    } else if args.default_roster {
        return Err(UsageError("--default-roster needs --ranking or --rank-per-fold".into()).into());
    }
    ensemble.validate(d)?;
    Ok(ensemble)
}

#[derive(Serialize)]
struct EaseOutput {
    n_easy: usize,
    n_hard: usize,
    n_excluded: usize,
    labels: Vec<Ease>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marker: Option<agreelearn::ensemble::MarkerAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<EaseModelOutput>,
}

#[derive(Serialize)]
struct EaseModelOutput {
    markers: Vec<String>,
    loo_accuracy: f64,
    n_samples: usize,
}

fn attribute(d: &Dataset, name: &str) -> Result<usize> {
    d.attribute_index(name)
        .with_context(|| format!("attribute '{name}' is not in the dataset"))
}

pub fn ensemble(args: &EnsembleArgs) -> Result<()> {
    let d = load_input(&args.input)?;
    let roster = load_roster(args, &d)?;
    let mut out = OutDir::create(&args.out)?;
    let cv = args.cv.with_seed(args.seed);
    let eval = evaluate_subsets(&roster, &d, &cv)?;
    out.write_with("subsets.csv", |w| Ok(write_subsets_csv(&eval.subsets, w)?))?;
    out.write_with("by_size.csv", |w| {
        writeln!(w, "size,n_subsets,mean_matches,mean_accuracy")?;
        for s in &eval.by_size {
            let acc = s.mean_accuracy.map(|a| a.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{acc}", s.size, s.n_subsets, s.mean_matches)?;
        }
        Ok(())
    })?;
    let full = eval.votes.full_mask();
    out.write_with("agreement.csv", |w| Ok(write_agreement_csv(&eval.votes, full, w)?))?;
    out.write_with("members.json", |w| {
        w.write_all(roster.to_json()?.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    if args.ease_marker.is_some() || !args.ease_model_markers.is_empty() {
        let labels = ease_from_votes(&eval.votes.votes)?;
        let count = |e: Ease| labels.iter().filter(|&&l| l == e).count();
        let marker = match &args.ease_marker {
            Some(name) => Some(ease_marker_analysis(
                &d,
                &labels,
                attribute(&d, name)?,
                args.ease_threshold,
            )?),
            None => None,
        };
        let model = if args.ease_model_markers.is_empty() {
            None
        } else {
            let idx = args
                .ease_model_markers
                .iter()
                .map(|m| attribute(&d, m))
                .collect::<Result<Vec<_>>>()?;
            let fitted = ease_model(&d, &labels, &idx, &LearnerSpec::mlp().with_seed(args.seed))?;
            Some(EaseModelOutput {
                markers: args.ease_model_markers.clone(),
                loo_accuracy: fitted.loo_accuracy,
                n_samples: fitted.n_samples,
            })
        };
        out.write_json(
            "ease.json",
            &EaseOutput {
                n_easy: count(Ease::Easy),
                n_hard: count(Ease::Hard),
                n_excluded: count(Ease::Excluded),
                labels,
                marker,
                model,
            },
        )?;
    }
    out.finish("ensemble", args, args.seed)
}

fn read_predictions(path: &Path, n: usize) -> Result<Vec<u8>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == "prediction")
        .with_context(|| format!("{} has no 'prediction' column", path.display()))?;
    let mut preds = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let p = match rec.get(col).map(str::trim) {
            Some("0") => 0,
            Some("1") => 1,
            other => bail!(
                "prediction row {}: expected 0 or 1, got {:?}",
                i + 1,
                other.unwrap_or("")
            ),
        };
        preds.push(p);
    }
    if preds.len() != n {
        bail!("{} has {} predictions for {n} samples", path.display(), preds.len());
    }
    Ok(preds)
}

#[derive(Serialize)]
struct GroupSummary {
    group: String,
    n_samples: usize,
    survival_at_horizon: Option<f64>,
}

pub fn survival(args: &SurvivalArgs) -> Result<()> {
    let d = load_input(&args.input)?;
    if d.survival().is_none() {
        bail!("input has no survival columns (months, event)");
    }
    let method = if args.raw_proportion {
        CurveMethod::RawProportion
    } else {
        CurveMethod::KaplanMeier
    };
    let mut out = OutDir::create(&args.out)?;
    let curves: Vec<(String, usize, Option<SurvivalCurve>)> = match &args.predictions {
        Some(path) => {
            let preds = read_predictions(path, d.n_samples())?;
            survival_groups(&d, &preds, args.horizon, method)?
                .into_iter()
                .map(|g| (g.name, g.indices.len(), g.curve))
                .collect()
        }
        None if d.tnm_stage().is_some() => stage_curves(&d, args.horizon, method)?
            .into_iter()
            .map(|(stage, c)| (format!("tnm{stage}"), c.n_samples, Some(c)))
            .collect(),
        None => {
            let c = method.curve(d.survival().unwrap_or_default(), args.horizon)?;
            vec![("all".to_string(), c.n_samples, Some(c))]
        }
    };
    let present: Vec<(String, &SurvivalCurve)> = curves
        .iter()
        .filter_map(|(name, _, c)| c.as_ref().map(|c| (name.clone(), c)))
        .collect();
    out.write_with("km.csv", |w| Ok(write_curves_csv(&present, w)?))?;
    let summary: Vec<GroupSummary> = curves
        .iter()
        .map(|(name, n, c)| GroupSummary {
            group: name.clone(),
            n_samples: *n,
            survival_at_horizon: c.as_ref().map(|c| c.survival_at(args.horizon)),
        })
        .collect();
    out.write_json("groups.json", &summary)?;
    out.finish("survival", args, args.seed)
}
