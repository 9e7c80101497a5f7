//! Synthetic datasets with known learnability.
//!
//! * [`gen_class_symmetric`] and [`gen_hadamard`] are anti-learnable: held-out
//!   points are systematically closer to the opposite class.
//! * [`gen_polynomial`] is learnable by any smooth classifier.
//! * [`gen_merged_xor`] glues the two together and asks for the XOR of the
//!   labels, which neither approach can recover.
//! * [`gen_mixture`] mixes an easy (learnable) and a hard (label-noise)
//!   sub-population for exercising abstaining ensembles.
//!
//! Every generator is a pure function of its arguments including `seed`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Minimum eigenvalue below which the class-symmetric Gram target is
/// rejected.
pub const PSD_TOLERANCE: f64 = -1e-10;

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Gram target: unit diagonal, `within` between samples of the same class,
/// `between` across classes. Samples `0..n` are class 0, `n..2n` class 1.
pub fn class_symmetric_gram(n_per_class: usize, within: f64, between: f64) -> DMatrix<f64> {
    let m = 2 * n_per_class;
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            1.0
        } else if (i < n_per_class) == (j < n_per_class) {
            within
        } else {
            between
        }
    })
}

/// Points whose pairwise inner products equal the class-symmetric Gram
/// target exactly (up to rounding), realized in `2 * n_per_class`
/// dimensions by eigen-factorization followed by a random rotation.
pub fn gen_class_symmetric(n_per_class: usize, within: f64, between: f64, seed: u64) -> Result<Dataset> {
    if n_per_class < 2 {
        return Err(Error::param(format!(
            "class_symmetric needs at least 2 samples per class, got {n_per_class}"
        )));
    }
    if !(within.is_finite() && between.is_finite()) {
        return Err(Error::param("similarities must be finite"));
    }
    if between <= within {
        return Err(Error::param(format!(
            "between-class similarity must exceed within-class (within {within}, between {between})"
        )));
    }
    let m = 2 * n_per_class;
    let gram = class_symmetric_gram(n_per_class, within, between);
    let eig = SymmetricEigen::new(gram);
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    let scale = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let points = &eig.eigenvectors * DMatrix::from_diagonal(&scale);

    let mut rng = rng_from(seed);
    let rotation = random_orthogonal(m, &mut rng);
    let points = points * rotation;

    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let rows = order
        .iter()
        .map(|&i| points.row(i).iter().copied().collect())
        .collect::<Vec<Vec<f64>>>();
    let labels = order.iter().map(|&i| u8::from(i >= n_per_class)).collect();
    Dataset::from_rows(names("cs", m), &rows)?.with_labels(labels)
}

fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| normal.sample(rng));
    gaussian.qr().q()
}

/// Sylvester Hadamard matrix of the given order (power of two).
pub fn sylvester_hadamard(order: usize) -> Result<Vec<Vec<i32>>> {
    if order < 4 || !order.is_power_of_two() {
        return Err(Error::param(format!(
            "Hadamard order must be a power of two >= 4, got {order}"
        )));
    }
    let mut h = vec![vec![1i32]];
    while h.len() < order {
        let k = h.len();
        let mut next = vec![vec![0i32; 2 * k]; 2 * k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = h[i][j];
                next[i][j + k] = h[i][j];
                next[i + k][j] = h[i][j];
                next[i + k][j + k] = -h[i][j];
            }
        }
        h = next;
    }
    Ok(h)
}

/// Rows 1.. of a Sylvester Hadamard matrix with the all-ones first column
/// removed. Any two samples have inner product -1; each has squared norm
/// `order - 1`. The label is the parity of the sample's row in the
/// Hadamard matrix; `seed` only permutes the sample order.
pub fn gen_hadamard(order: usize, seed: u64) -> Result<Dataset> {
    let h = sylvester_hadamard(order)?;
    let mut order_idx: Vec<usize> = (1..order).collect();
    order_idx.shuffle(&mut rng_from(seed));
    let rows = order_idx
        .iter()
        .map(|&r| h[r][1..].iter().map(|&v| v as f64).collect())
        .collect::<Vec<Vec<f64>>>();
    let labels = order_idx.iter().map(|&r| (r % 2) as u8).collect();
    Dataset::from_rows(names("h", order - 1), &rows)?.with_labels(labels)
}

/// Score whose sign relative to the sample median defines the polynomial
/// task's label.
pub fn polynomial_score(x: f64, y: f64, z: f64) -> f64 {
    x + 1.0 / y - z
}

fn polynomial_rows(n: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<u8>) {
    let xz = Uniform::new(1.0, 10.0).expect("valid range");
    let yd = Uniform::new(0.5, 2.0).expect("valid range");
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![xz.sample(rng), yd.sample(rng), xz.sample(rng)])
        .collect();
    let scores: Vec<f64> = rows.iter().map(|r| polynomial_score(r[0], r[1], r[2])).collect();
    let med = median(&scores);
    let labels = scores.iter().map(|&s| u8::from(s > med)).collect();
    (rows, labels)
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `x ~ U[1,10]`, `y ~ U[0.5,2]`, `z ~ U[1,10]`; label 1 iff
/// `x + 1/y - z` exceeds its sample median.
pub fn gen_polynomial(n: usize, seed: u64) -> Result<Dataset> {
    if n < 20 {
        return Err(Error::param(format!("polynomial needs n >= 20, got {n}")));
    }
    let (rows, labels) = polynomial_rows(n, &mut rng_from(seed));
    Dataset::from_rows(vec!["x".into(), "y".into(), "z".into()], &rows)?.with_labels(labels)
}

/// Within/between similarities of the class-symmetric half of
/// [`gen_merged_xor`]: the widest gap that stays positive semidefinite with
/// half of the eigenvalue budget to spare.
pub fn merged_xor_similarities(n_per_class: usize) -> (f64, f64) {
    (0.0, 0.5 / n_per_class as f64)
}

/// Concatenates a class-symmetric sample with a polynomial sample per row;
/// the label is the XOR of the two source labels.
pub fn gen_merged_xor(n: usize, seed: u64) -> Result<Dataset> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(Error::param(format!("merged_xor needs an even n >= 16, got {n}")));
    }
    let mut rng = rng_from(seed);
    let (cs_seed, poly_seed) = (rng.random::<u64>(), rng.random::<u64>());
    let (within, between) = merged_xor_similarities(n / 2);
    let cs = gen_class_symmetric(n / 2, within, between, cs_seed)?;
    let (rows, poly_labels) = polynomial_rows(n, &mut rng_from(poly_seed));
    let poly = Dataset::from_rows(vec!["x".into(), "y".into(), "z".into()], &rows)?;
    let labels = cs
        .labels()
        .expect("generated with labels")
        .iter()
        .zip(&poly_labels)
        .map(|(a, b)| a ^ b)
        .collect();
    cs.concat_attributes(&poly)?.with_labels(labels)
}

/// Hidden sub-population tag of a [`gen_mixture`] sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubPopulation {
    Easy,
    Hard,
}

#[derive(Debug, Clone)]
pub struct Mixture {
    pub dataset: Dataset,
    /// Ground truth, for assertions only; never given to learners.
    pub subpopulation: Vec<SubPopulation>,
}

impl Mixture {
    pub fn indices_of(&self, which: SubPopulation) -> Vec<usize> {
        (0..self.subpopulation.len())
            .filter(|&i| self.subpopulation[i] == which)
            .collect()
    }
}

const MIXTURE_LABEL_NOISE: f64 = 0.05;
const MIXTURE_VIEW_NOISE: f64 = 0.2;

/// Six attributes in three pairs: `a0,a1` and `b0,b1` are two noisy views of
/// a latent score, `n0,n1` are pure noise.
///
/// Easy samples share one latent `t` across both views and are labeled
/// `t > 0` with 5% label noise. Hard samples draw an independent latent per
/// view and a fair-coin label, so the views disagree with each other and
/// with the label.
pub fn gen_mixture(n: usize, frac_easy: f64, seed: u64) -> Result<Mixture> {
    if !(frac_easy > 0.0 && frac_easy < 1.0) {
        return Err(Error::param(format!("frac_easy must lie in (0,1), got {frac_easy}")));
    }
    if n < 2 {
        return Err(Error::param(format!("mixture needs n >= 2, got {n}")));
    }
    let mut rng = rng_from(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let view_noise = Normal::new(0.0, MIXTURE_VIEW_NOISE).expect("valid sd");
    let n_easy = ((n as f64) * frac_easy).round().clamp(1.0, (n - 1) as f64) as usize;
    let mut tags = vec![SubPopulation::Easy; n_easy];
    tags.extend(std::iter::repeat_n(SubPopulation::Hard, n - n_easy));
    tags.shuffle(&mut rng);

    let dir = std::f64::consts::FRAC_1_SQRT_2;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for tag in &tags {
        let t_a: f64 = unit.sample(&mut rng);
        let t_b: f64 = match tag {
            SubPopulation::Easy => t_a,
            SubPopulation::Hard => unit.sample(&mut rng),
        };
        let mut row = Vec::with_capacity(6);
        for t in [t_a, t_b] {
            row.push(t * dir + view_noise.sample(&mut rng));
            row.push(t * dir + view_noise.sample(&mut rng));
        }
        row.push(unit.sample(&mut rng));
        row.push(unit.sample(&mut rng));
        let label = match tag {
            SubPopulation::Easy => {
                let clean = u8::from(t_a > 0.0);
                if rng.random::<f64>() < MIXTURE_LABEL_NOISE {
                    1 - clean
                } else {
                    clean
                }
            }
            SubPopulation::Hard => u8::from(rng.random::<bool>()),
        };
        rows.push(row);
        labels.push(label);
    }
    let attrs = ["a0", "a1", "b0", "b1", "n0", "n1"].map(String::from).to_vec();
    let dataset = Dataset::from_rows(attrs, &rows)?.with_labels(labels)?;
    Ok(Mixture {
        dataset,
        subpopulation: tags,
    })
}
