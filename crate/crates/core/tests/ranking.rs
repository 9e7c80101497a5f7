use agreelearn::dataset::generators::gen_polynomial;
use agreelearn::dataset::Dataset;
use agreelearn::evaluation::{pooled_cv_with, CvSpec};
use agreelearn::learners::{fit, LearnerSpec};
use agreelearn::ranking::{
    chi_squared_statistic, compare_evaluators, equal_frequency_bins, information_gain, rank_svm_rfe, read_ranking_csv,
    select_best_k, select_worst_k, write_ranking_csv, Evaluator,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Column 0 equals the label shifted to ±1; the rest are uniform noise.
fn one_perfect_attribute(n: usize, noise: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| {
            let mut r = vec![if l == 1 { 1.0 } else { -1.0 }];
            r.extend((0..noise).map(|_| rng.random_range(-1.0..1.0)));
            r
        })
        .collect();
    let names = (0..=noise).map(|j| format!("a{j}")).collect();
    Dataset::from_rows(names, &rows).unwrap().with_labels(labels).unwrap()
}

fn evaluators() -> [Evaluator; 3] {
    [Evaluator::svm_rfe(), Evaluator::chi_squared(), Evaluator::info_gain()]
}

#[test]
fn perfect_attribute_ranks_first() {
    let d = one_perfect_attribute(60, 6, 1);
    for e in evaluators() {
        let r = e.rank(&d).unwrap();
        assert_eq!(r.order[0], 0, "{e}");
        assert!(r.scores.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn duplicated_attribute_occupies_adjacent_ranks() {
    let base = one_perfect_attribute(60, 5, 2);
    let copy = base.select_attributes(&[0]).unwrap();
    let renamed = Dataset::from_rows(
        vec!["copy".into()],
        &copy.rows().map(<[f64]>::to_vec).collect::<Vec<_>>(),
    )
    .unwrap();
    let d = base.concat_attributes(&renamed).unwrap();
    let dup = d.n_attributes() - 1;
    for e in evaluators() {
        let r = e.rank(&d).unwrap();
        let a = r.order.iter().position(|&j| j == 0).unwrap();
        let b = r.order.iter().position(|&j| j == dup).unwrap();
        assert_eq!(a.abs_diff(b), 1, "{e}: {:?}", r.order);
    }
}

#[test]
fn rfe_removes_the_smallest_linear_weight_first() {
    // Attribute 2 carries the label through the largest weight, attribute 0 none.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..80 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        labels.push(u8::from(0.2 * x[1] + 2.0 * x[2] > 0.0));
        rows.push(x);
    }
    let d = Dataset::from_rows(vec!["a".into(), "b".into(), "c".into()], &rows)
        .unwrap()
        .with_labels(labels)
        .unwrap();
    let r = rank_svm_rfe(&d, 10.0).unwrap();
    assert_eq!(r.order[0], 2);
    assert_eq!(r.scores, vec![2.0, 1.0, 0.0]);
}

/// Pearson statistic from the textbook expected-count formula.
fn chi2_reference(table: &[[f64; 2]]) -> f64 {
    let total: f64 = table.iter().flatten().sum();
    let cols = [
        table.iter().map(|r| r[0]).sum::<f64>(),
        table.iter().map(|r| r[1]).sum::<f64>(),
    ];
    let mut stat = 0.0;
    for row in table {
        let row_sum = row[0] + row[1];
        for c in 0..2 {
            let expected = row_sum * cols[c] / total;
            if expected > 0.0 {
                stat += (row[c] - expected).powi(2) / expected;
            }
        }
    }
    stat
}

#[test]
fn chi_squared_and_information_gain_hand_values() {
    assert!((chi_squared_statistic(&[[10.0, 0.0], [0.0, 10.0]]) - 20.0).abs() < 1e-12);
    assert!(chi_squared_statistic(&[[5.0, 5.0], [3.0, 3.0]]).abs() < 1e-12);
    assert!((information_gain(&[[10.0, 0.0], [0.0, 10.0]]) - 1.0).abs() < 1e-12);
    assert!(information_gain(&[[4.0, 4.0], [2.0, 2.0]]).abs() < 1e-12);
}

#[test]
fn equal_frequency_bins_are_balanced() {
    let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![f64::from(i)]).collect();
    let d = Dataset::from_rows(vec!["x".into()], &rows).unwrap();
    let bins = equal_frequency_bins(&d, 0, 10);
    for b in 0..10 {
        assert_eq!(bins.iter().filter(|&&x| x == Some(b)).count(), 10);
    }
}

#[test]
fn single_cell_grid_matches_in_fold_ranking() {
    let d = gen_polynomial(90, 12).unwrap();
    let cv = CvSpec::kfold(5, 8);
    for e in evaluators() {
        let grid = compare_evaluators(&d, &[e], &[LearnerSpec::cart()], 2, &cv).unwrap();
        let direct = pooled_cv_with(&d, &cv, |train, _| {
            let r = e.rank(train)?;
            fit(&LearnerSpec::cart(), train, &select_best_k(&r, 2)?)
        })
        .unwrap();
        assert_eq!(grid.accuracy[0][0], direct.accuracy());
        assert_eq!(grid.winners, vec![e.name().to_string()]);
    }
}

#[test]
fn ranking_csv_round_trip_and_schema_errors() {
    let d = one_perfect_attribute(40, 3, 4);
    let r = Evaluator::chi_squared().rank(&d).unwrap();
    let mut buf = Vec::new();
    write_ranking_csv(&r, &mut buf).unwrap();
    let back = read_ranking_csv(buf.as_slice(), d.attributes()).unwrap();
    assert_eq!(back.order, r.order);
    let other: Vec<String> = vec!["a0".into(), "a1".into(), "zz".into(), "a3".into()];
    assert!(read_ranking_csv(buf.as_slice(), &other).is_err());
}

fn tables() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0u32..30, 0u32..30), 1..12)
        .prop_map(|v| v.into_iter().map(|(a, b)| [f64::from(a), f64::from(b)]).collect())
        .prop_filter("non-empty", |t: &Vec<[f64; 2]>| t.iter().flatten().sum::<f64>() > 0.0)
}

proptest! {
    #[test]
    fn statistics_are_non_negative_and_match_reference(t in tables()) {
        let chi = chi_squared_statistic(&t);
        prop_assert!(chi >= 0.0);
        prop_assert!((chi - chi2_reference(&t)).abs() <= 1e-9 * chi.max(1.0));
        prop_assert!(information_gain(&t) >= 0.0);
    }

    #[test]
    fn best_and_worst_selections_are_disjoint(seed in any::<u64>(), p in 2usize..10, split in 0.0f64..1.0) {
        let d = one_perfect_attribute(30, p - 1, seed);
        let r = Evaluator::info_gain().rank(&d).unwrap();
        let k = ((p as f64 * split) as usize).clamp(1, p - 1);
        let best = select_best_k(&r, k).unwrap();
        let worst = select_worst_k(&r, p - k).unwrap();
        prop_assert!(best.iter().all(|b| !worst.contains(b)));
        let mut all: Vec<usize> = best.iter().chain(&worst).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..p).collect::<Vec<_>>());
        prop_assert!(select_best_k(&r, 0).is_err());
        prop_assert!(select_best_k(&r, p + 1).is_err());
    }
}
