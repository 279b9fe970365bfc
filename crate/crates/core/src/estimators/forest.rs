//! Random forest of Gini-split binary classification trees.
//!
//! Each tree sees a bootstrap sample and considers `floor(sqrt(m))` randomly
//! chosen features per split. Leaves store the positive-class fraction, and
//! the forest score is the mean leaf value over trees.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::RandomSeed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(p) => return p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

struct Builder<'a, R> {
    xs: &'a [&'a [f64]],
    ys: &'a [bool],
    max_depth: usize,
    n_features: usize,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

impl<R: Rng> Builder<'_, R> {
    fn grow(&mut self, samples: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let n = samples.len();
        let pos = samples.iter().filter(|&&i| self.ys[i]).count();
        let leaf = Node::Leaf(pos as f64 / n as f64);
        self.nodes.push(leaf.clone());
        if depth >= self.max_depth || n < 2 || pos == 0 || pos == n {
            return id;
        }

        let m = self.xs[0].len();
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in sample(self.rng, m, self.n_features.min(m)).into_iter() {
            samples.sort_by(|&a, &b| self.xs[a][feature].total_cmp(&self.xs[b][feature]));
            let mut left_pos = 0;
            for cut in 1..n {
                if self.ys[samples[cut - 1]] {
                    left_pos += 1;
                }
                let lo = self.xs[samples[cut - 1]][feature];
                let hi = self.xs[samples[cut]][feature];
                if lo == hi {
                    continue;
                }
                let right_n = n - cut;
                let impurity = (cut as f64 * gini(left_pos, cut)
                    + right_n as f64 * gini(pos - left_pos, right_n))
                    / n as f64;
                if best.is_none_or(|(b, _, _)| impurity < b) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((impurity, feature, threshold));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };

        let split = partition(samples, |i| self.xs[i][feature] <= threshold);
        let (left_samples, right_samples) = samples.split_at_mut(split);
        let left = self.grow(left_samples, depth + 1);
        let right = self.grow(right_samples, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Stable partition; returns the number of elements satisfying `pred`.
fn partition(items: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = items.iter().partition(|&&i| pred(i));
    let k = yes.len();
    items[..k].copy_from_slice(&yes);
    items[k..].copy_from_slice(&no);
    k
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    input: usize,
}

impl Forest {
    pub fn train(xs: &[&[f64]], ys: &[bool], config: &ForestConfig, seed: RandomSeed) -> Self {
        let n = xs.len();
        let m = xs.first().map_or(0, |x| x.len());
        let n_features = ((m as f64).sqrt().floor() as usize).max(1);
        let trees = (0..config.n_trees.max(1))
            .map(|t| {
                let mut rng = seed.child(&format!("forest/tree{t}")).rng();
                let mut samples: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let mut builder = Builder {
                    xs,
                    ys,
                    max_depth: config.max_depth,
                    n_features,
                    rng: &mut rng,
                    nodes: Vec::new(),
                };
                builder.grow(&mut samples, 0);
                Tree {
                    nodes: builder.nodes,
                }
            })
            .collect();
        Forest { trees, input: m }
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}
