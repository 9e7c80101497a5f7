//! Binary decision trees over continuous attributes.
//!
//! Both criteria grow axis-aligned threshold splits (`x ≤ t` goes left).
//! [`Criterion::Gini`] picks the split with the lowest weighted Gini
//! impurity. [`Criterion::GainRatio`] follows C4.5: each attribute's best
//! threshold is chosen by information gain, and among attributes whose gain
//! is at least the average gain, the one with the highest gain ratio wins.
//! No post-pruning is done.
//!
//! Ties go to the lower attribute index, then the lower threshold. Leaves
//! predict the majority class, class 0 on ties.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: Some(10),
            min_leaf: 2,
        }
    }
}

impl TreeParams {
    pub fn unbounded() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::param("tree min_leaf must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::param("tree max_depth must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Gini,
    GainRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: u8,
        counts: [usize; 2],
    },
    Split {
        /// Position within the model's feature subset.
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub root: Node,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> u8 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn n_leaves(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { left, right, .. } => walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }
}

fn counts_of(labels: &[u8], idx: &[usize]) -> [usize; 2] {
    let ones = idx.iter().filter(|&&i| labels[i] == 1).count();
    [idx.len() - ones, ones]
}

fn gini(c: [usize; 2]) -> f64 {
    let n = (c[0] + c[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = c[1] as f64 / n;
    2.0 * p * (1.0 - p)
}

fn entropy(c: [usize; 2]) -> f64 {
    let n = (c[0] + c[1]) as f64;
    c.iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    /// Higher is better.
    score: f64,
    gain: f64,
    ratio: f64,
}

/// Best threshold of one feature by `score`, scanning thresholds upward so
/// the lowest threshold wins ties.
fn scan_feature(
    x: &[Vec<f64>],
    labels: &[u8],
    idx: &[usize],
    feature: usize,
    min_leaf: usize,
    criterion: Criterion,
) -> Option<Candidate> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
    let total = counts_of(labels, idx);
    let n = idx.len();
    let parent_entropy = entropy(total);
    let mut left = [0usize; 2];
    let mut best: Option<Candidate> = None;
    for pos in 0..n - 1 {
        left[labels[order[pos]] as usize] += 1;
        let lo = x[order[pos]][feature];
        let hi = x[order[pos + 1]][feature];
        if lo == hi {
            continue;
        }
        let n_left = pos + 1;
        if n_left < min_leaf || n - n_left < min_leaf {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let wl = n_left as f64 / n as f64;
        let wr = 1.0 - wl;
        let (score, gain, ratio) = match criterion {
            Criterion::Gini => (-(wl * gini(left) + wr * gini(right)), 0.0, 0.0),
            Criterion::GainRatio => {
                let gain = (parent_entropy - wl * entropy(left) - wr * entropy(right)).max(0.0);
                let split_info = entropy([n_left, n - n_left]);
                (gain, gain, gain / split_info)
            }
        };
        if best.is_none_or(|b| score > b.score) {
            let mut threshold = 0.5 * (lo + hi);
            if threshold >= hi {
                threshold = lo;
            }
            best = Some(Candidate {
                feature,
                threshold,
                score,
                gain,
                ratio,
            });
        }
    }
    best
}

fn choose_split(
    x: &[Vec<f64>],
    labels: &[u8],
    idx: &[usize],
    n_features: usize,
    min_leaf: usize,
    criterion: Criterion,
) -> Option<Candidate> {
    let per_feature: Vec<Candidate> = (0..n_features)
        .filter_map(|f| scan_feature(x, labels, idx, f, min_leaf, criterion))
        .collect();
    if per_feature.is_empty() {
        return None;
    }
    match criterion {
        Criterion::Gini => per_feature
            .into_iter()
            .reduce(|best, c| if c.score > best.score { c } else { best }),
        Criterion::GainRatio => {
            let mean_gain = per_feature.iter().map(|c| c.gain).sum::<f64>() / per_feature.len() as f64;
            per_feature
                .into_iter()
                .filter(|c| c.gain >= mean_gain - 1e-12)
                .reduce(|best, c| if c.ratio > best.ratio { c } else { best })
        }
    }
}

fn leaf(counts: [usize; 2]) -> Node {
    Node::Leaf {
        class: u8::from(counts[1] > counts[0]),
        counts,
    }
}

fn grow(
    x: &[Vec<f64>],
    labels: &[u8],
    idx: Vec<usize>,
    depth: usize,
    params: &TreeParams,
    criterion: Criterion,
) -> Node {
    let counts = counts_of(labels, &idx);
    let n_features = x.first().map_or(0, Vec::len);
    if counts[0] == 0
        || counts[1] == 0
        || params.max_depth.is_some_and(|m| depth >= m)
        || idx.len() < 2 * params.min_leaf
    {
        return leaf(counts);
    }
    let Some(split) = choose_split(x, labels, &idx, n_features, params.min_leaf, criterion) else {
        return leaf(counts);
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][split.feature] <= split.threshold);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(x, labels, l, depth + 1, params, criterion)),
        right: Box::new(grow(x, labels, r, depth + 1, params, criterion)),
    }
}

pub(crate) fn fit(x: &[Vec<f64>], labels: &[u8], params: &TreeParams, criterion: Criterion) -> Result<Tree> {
    params.validate()?;
    let idx = (0..x.len()).collect();
    Ok(Tree {
        root: grow(x, labels, idx, 0, params, criterion),
    })
}
