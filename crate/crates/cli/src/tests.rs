use std::fs;
use std::path::Path;

use agreelearn::dataset::{write_csv, Dataset, SurvivalRecord};
use agreelearn::ensemble::{Ensemble, EnsembleMember, FeatureSelection, OrientationPolicy};
use agreelearn::learners::LearnerSpec;
use clap::Parser;
use tempfile::TempDir;

use crate::args::Cli;
use crate::{exit_code, run};

fn invoke(args: &[&str]) -> anyhow::Result<()> {
    let cli = Cli::try_parse_from(std::iter::once("agreelearn").chain(args.iter().copied()))?;
    run(&cli.command)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_rows(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect()
}

/// Twelve attributes, labels, survival and TNM stages 1 to 4.
fn cohort(n: usize, stages: &[u8]) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..12)
                .map(|j| ((i * 7 + j * 13) % 17) as f64 + if j == 0 { (i % 2) as f64 * 20.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let survival: Vec<SurvivalRecord> = (0..n)
        .map(|i| SurvivalRecord::new(if i % 2 == 1 { 70.0 } else { 5.0 + (i % 11) as f64 * 4.0 }, i % 2 == 0).unwrap())
        .collect();
    let names = (0..12).map(|j| format!("g{j}")).collect();
    Dataset::from_rows(names, &rows)
        .unwrap()
        .with_labels(labels)
        .unwrap()
        .with_survival(survival)
        .unwrap()
        .with_tnm_stage((0..n).map(|i| stages[i % stages.len()]).collect())
        .unwrap()
}

fn write_dataset(dir: &Path, name: &str, d: &Dataset) -> String {
    let p = dir.join(name);
    write_csv(d, fs::File::create(&p).unwrap()).unwrap();
    path(&p).to_string()
}

#[test]
fn unknown_evaluator_is_a_usage_error() {
    let err = Cli::try_parse_from([
        "agreelearn",
        "rank",
        "--input",
        "x.csv",
        "--evaluator",
        "relief",
        "--out",
        "o",
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn default_roster_without_a_ranking_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let input = write_dataset(tmp.path(), "d.csv", &cohort(40, &[1, 2, 3, 4]));
    let out = tmp.path().join("o");
    let err = invoke(&[
        "ensemble",
        "--input",
        &input,
        "--default-roster",
        "--seed",
        "1",
        "--out",
        path(&out),
    ])
    .unwrap_err();
    assert_eq!(exit_code(&err), 2);
}

#[test]
fn class_symmetric_rejects_within_above_between() {
    let tmp = TempDir::new().unwrap();
    let err = invoke(&[
        "generate",
        "class_symmetric",
        "--a",
        "0.9",
        "--b",
        "0.1",
        "--seed",
        "1",
        "--out",
        path(tmp.path()),
    ])
    .unwrap_err();
    assert!(
        format!("{err:#}").contains("between-class similarity must exceed within-class"),
        "{err:#}"
    );
    assert_eq!(exit_code(&err), 1);
}

#[test]
fn hadamard_csv_has_order_minus_one_rows_and_a_manifest() {
    let tmp = TempDir::new().unwrap();
    invoke(&[
        "generate",
        "hadamard",
        "--order",
        "16",
        "--seed",
        "1",
        "--out",
        path(tmp.path()),
    ])
    .unwrap();
    assert_eq!(data_rows(&tmp.path().join("dataset.csv")).len(), 15);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["outputs"][0], "dataset.csv");
}

#[test]
fn rank_then_sweep() {
    let tmp = TempDir::new().unwrap();
    let input = write_dataset(tmp.path(), "d.csv", &cohort(40, &[1, 2, 3, 4]));
    let rdir = tmp.path().join("rank");
    invoke(&[
        "rank",
        "--input",
        &input,
        "--evaluator",
        "info_gain",
        "--out",
        path(&rdir),
    ])
    .unwrap();
    let rows = data_rows(&rdir.join("ranking.csv"));
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("info_gain,1,g0,"), "{}", rows[0]);

    let ranking = rdir.join("ranking.csv");
    let sdir = tmp.path().join("sweep");
    let args = [
        "sweep",
        "--input",
        &input,
        "--ranking",
        path(&ranking),
        "--learner",
        "cart",
        "--end",
        "worst",
        "--k-max",
        "1",
        "--cv",
        "kfold:5",
        "--seed",
        "3",
        "--out",
        path(&sdir),
    ];
    invoke(&args).unwrap();
    assert_eq!(data_rows(&sdir.join("sweep.csv")).len(), 1);

    let other = write_dataset(
        tmp.path(),
        "other.csv",
        &cohort(40, &[1]).select_attributes(&[0, 1, 2]).unwrap(),
    );
    let bad = [
        "sweep",
        "--input",
        &other,
        "--ranking",
        path(&ranking),
        "--end",
        "best",
        "--k-max",
        "1",
        "--seed",
        "3",
        "--out",
        path(&sdir),
    ];
    assert!(invoke(&bad).is_err());
}

#[test]
fn diagnose_and_compare_write_reports() {
    let tmp = TempDir::new().unwrap();
    let input = write_dataset(tmp.path(), "d.csv", &cohort(40, &[1, 2, 3, 4]));
    let ddir = tmp.path().join("diag");
    invoke(&[
        "diagnose",
        "--input",
        &input,
        "--learner",
        "logistic",
        "--cv",
        "kfold:5",
        "--seed",
        "2",
        "--out",
        path(&ddir),
    ])
    .unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(ddir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["n_total"], 40);
    let cdir = tmp.path().join("cmp");
    invoke(&[
        "compare",
        "--input",
        &input,
        "--learners",
        "cart,logistic",
        "--k",
        "3",
        "--cv",
        "kfold:5",
        "--seed",
        "2",
        "--out",
        path(&cdir),
    ])
    .unwrap();
    assert_eq!(data_rows(&cdir.join("grid.csv")).len(), 6);
    let err = invoke(&[
        "diagnose",
        "--input",
        &input,
        "--learner",
        "cart",
        "--c",
        "2",
        "--seed",
        "2",
        "--out",
        path(&ddir),
    ])
    .unwrap_err();
    assert_eq!(exit_code(&err), 2);
}

#[test]
fn ensemble_subset_rows() {
    let tmp = TempDir::new().unwrap();
    let input = write_dataset(tmp.path(), "d.csv", &cohort(48, &[1, 2, 3, 4]));
    let full = tmp.path().join("full");
    invoke(&[
        "ensemble",
        "--input",
        &input,
        "--default-roster",
        "--rank-per-fold",
        "chi_squared",
        "--cv",
        "kfold:4",
        "--seed",
        "5",
        "--out",
        path(&full),
    ])
    .unwrap();
    assert_eq!(data_rows(&full.join("subsets.csv")).len(), 63);
    assert_eq!(data_rows(&full.join("by_size.csv")).len(), 6);
    assert_eq!(data_rows(&full.join("agreement.csv")).len(), 48);

    let explicit = |names: &[&str]| FeatureSelection::Explicit {
        attributes: names.iter().map(|s| s.to_string()).collect(),
    };
    let pair = Ensemble::new(
        vec![
            EnsembleMember::new(
                "svm_g0",
                LearnerSpec::svm(),
                explicit(&["g0", "g1"]),
                OrientationPolicy::Normal,
            ),
            EnsembleMember::new(
                "cart_g2",
                LearnerSpec::cart(),
                explicit(&["g2"]),
                OrientationPolicy::Auto,
            ),
        ],
        None,
    );
    let config = tmp.path().join("pair.json");
    fs::write(&config, pair.to_json().unwrap()).unwrap();
    let two = tmp.path().join("two");
    invoke(&[
        "ensemble",
        "--input",
        &input,
        "--config",
        path(&config),
        "--cv",
        "kfold:4",
        "--seed",
        "5",
        "--out",
        path(&two),
    ])
    .unwrap();
    assert_eq!(data_rows(&two.join("subsets.csv")).len(), 3);

    let broken = Ensemble::new(
        vec![EnsembleMember::new(
            "needs_x",
            LearnerSpec::svm(),
            explicit(&["ulbp3"]),
            OrientationPolicy::Normal,
        )],
        None,
    );
    fs::write(&config, broken.to_json().unwrap()).unwrap();
    let err = invoke(&[
        "ensemble",
        "--input",
        &input,
        "--config",
        path(&config),
        "--seed",
        "5",
        "--out",
        path(&two),
    ])
    .unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("needs_x") && msg.contains("ulbp3"), "{msg}");
}

#[test]
fn survival_curves_per_stage_and_per_group() {
    let tmp = TempDir::new().unwrap();
    let input = write_dataset(tmp.path(), "d.csv", &cohort(40, &[1, 2, 3, 4]));
    let sdir = tmp.path().join("stages");
    invoke(&["survival", "--input", &input, "--out", path(&sdir)]).unwrap();
    let groups: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(sdir.join("groups.json")).unwrap()).unwrap();
    assert_eq!(groups.len(), 4);
    let km = fs::read_to_string(sdir.join("km.csv")).unwrap();
    for g in ["tnm1", "tnm2", "tnm3", "tnm4"] {
        let first = km.lines().find(|l| l.ends_with(&format!(",{g}"))).unwrap();
        assert!(first.starts_with("0,1,"), "{first}");
    }

    let input = write_dataset(tmp.path(), "mid.csv", &cohort(40, &[2, 3]));
    let preds = tmp.path().join("preds.csv");
    let body: String = (0..40).map(|i| format!("{}\n", i % 2)).collect();
    fs::write(&preds, format!("prediction\n{body}")).unwrap();
    let gdir = tmp.path().join("groups");
    invoke(&[
        "survival",
        "--input",
        &input,
        "--predictions",
        path(&preds),
        "--out",
        path(&gdir),
    ])
    .unwrap();
    let groups: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(gdir.join("groups.json")).unwrap()).unwrap();
    assert_eq!(groups.len(), 4);

    let bad = tmp.path().join("stage5.csv");
    let text = fs::read_to_string(&input).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let col = lines[0].split(',').position(|h| h == "tnm_stage").unwrap();
    let mut cells: Vec<String> = lines[1].split(',').map(str::to_string).collect();
    cells[col] = "5".into();
    lines[1] = cells.join(",");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    assert!(invoke(&["survival", "--input", path(&bad), "--out", path(&gdir)]).is_err());

    let plain = write_dataset(
        tmp.path(),
        "plain.csv",
        &Dataset::from_rows(vec!["x".into()], &[vec![1.0], vec![2.0]]).unwrap(),
    );
    assert!(invoke(&["survival", "--input", &plain, "--out", path(&gdir)]).is_err());
}
