use agreelearn::dataset::generators::{
    gen_class_symmetric, gen_hadamard, gen_merged_xor, gen_mixture, gen_polynomial, polynomial_score, SubPopulation,
};
use agreelearn::dataset::{load_csv, normalize_zscore, write_csv, CsvOptions, Dataset};
use agreelearn::evaluation::{pooled_cv, CvSpec};
use agreelearn::learners::LearnerSpec;
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Leave-one-out nearest centroid by mean inner product, computed directly
/// from the rows.
fn loo_nearest_centroid(d: &Dataset) -> Vec<u8> {
    let labels = d.labels().unwrap();
    (0..d.n_samples())
        .map(|i| {
            let mut sum = [0.0; 2];
            let mut count = [0usize; 2];
            for j in (0..d.n_samples()).filter(|&j| j != i) {
                let c = labels[j] as usize;
                sum[c] += dot(d.row(i), d.row(j));
                count[c] += 1;
            }
            let mean = [sum[0] / count[0] as f64, sum[1] / count[1] as f64];
            u8::from(mean[1] > mean[0])
        })
        .collect()
}

#[test]
fn feasible_class_symmetric_defeats_nearest_centroid() {
    let d = gen_class_symmetric(8, 0.1, 0.2, 11).unwrap();
    let labels = d.labels().unwrap();
    let preds = loo_nearest_centroid(&d);
    assert!(preds.iter().zip(labels).all(|(p, l)| p != l));
}

#[test]
fn infeasible_class_symmetric_target_is_reported() {
    let err = gen_class_symmetric(8, 0.1, 0.4, 0).unwrap_err();
    assert!(err.to_string().contains("positive semidefinite"), "{err}");
}

#[test]
fn hadamard_small_orders() {
    let d = gen_hadamard(4, 0).unwrap();
    assert_eq!((d.n_samples(), d.n_attributes()), (3, 3));
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 3.0 } else { -1.0 };
            assert_eq!(dot(d.row(i), d.row(j)), expected);
        }
    }
    let d = gen_hadamard(8, 5).unwrap();
    assert_eq!(d.n_samples(), 7);
    assert!((0..7).all(|i| dot(d.row(i), d.row(i)) == 7.0));
}

#[test]
fn polynomial_corner_sample_is_positive() {
    assert_eq!(polynomial_score(10.0, 0.5, 1.0), 11.0);
    for seed in 0..5 {
        let d = gen_polynomial(50, seed).unwrap();
        let mut scores: Vec<f64> = d.rows().map(|r| polynomial_score(r[0], r[1], r[2])).collect();
        scores.sort_by(f64::total_cmp);
        let median = 0.5 * (scores[24] + scores[25]);
        assert!(11.0 > median);
    }
}

#[test]
fn merged_xor_shapes() {
    let d = gen_merged_xor(64, 3).unwrap();
    assert_eq!(d.n_samples(), 64);
    assert_eq!(d.n_attributes(), 64 + 3);
    assert_eq!(d.class_counts().unwrap().iter().sum::<usize>(), 64);
}

#[test]
fn mixture_single_svm_sits_between_chance_and_easy_slice() {
    let m = gen_mixture(400, 0.5, 42).unwrap();
    let features: Vec<usize> = (0..6).collect();
    let cv = CvSpec::kfold(10, 42);
    let spec = LearnerSpec::svm();
    let all = pooled_cv(&spec, &m.dataset, &features, &cv).unwrap().accuracy();
    let easy = m.dataset.select_rows(&m.indices_of(SubPopulation::Easy));
    let easy_acc = pooled_cv(&spec, &easy, &features, &cv).unwrap().accuracy();
    assert!(0.5 < all && all < easy_acc, "all {all}, easy-only {easy_acc}");
}

#[test]
fn mixture_tags_are_reproducible() {
    let a = gen_mixture(100, 0.3, 9).unwrap();
    let b = gen_mixture(100, 0.3, 9).unwrap();
    assert_eq!(a.subpopulation, b.subpopulation);
    assert_eq!(a.dataset, b.dataset);
    assert_eq!(a.indices_of(SubPopulation::Easy).len(), 30);
}

fn small_dataset() -> impl Strategy<Value = Dataset> {
    (2usize..12, 1usize..5).prop_flat_map(|(n, p)| {
        (
            prop::collection::vec(prop::collection::vec(-1e3f64..1e3, p), n),
            prop::collection::vec(0u8..2, n),
        )
            .prop_map(move |(rows, labels)| {
                let names = (0..p).map(|j| format!("v{j}")).collect();
                Dataset::from_rows(names, &rows).unwrap().with_labels(labels).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn zscore_is_idempotent(d in small_dataset()) {
        let once = normalize_zscore(&d).unwrap();
        let twice = normalize_zscore(&once).unwrap();
        for i in 0..d.n_samples() {
            for j in 0..d.n_attributes() {
                prop_assert!((once.value(i, j) - twice.value(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn csv_round_trip_is_lossless(d in small_dataset()) {
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = load_csv(buf.as_slice(), &CsvOptions::written_by(&d)).unwrap();
        prop_assert_eq!(back, d);
    }
}
