//! Numerical substrate shared by the attacks.

pub mod forest;
pub mod kde;
pub mod mlp;
pub mod neighbors;

pub use forest::{Forest, ForestConfig};
pub use kde::{scott_bandwidth, KdeModel, MIN_BANDWIDTH};
pub use mlp::{Mlp, MlpConfig};
pub use neighbors::{Neighbor, NeighborIndex, SearchStrategy};

use serde::{Deserialize, Serialize};

use crate::preprocess::EncodedMatrix;
use crate::seed::RandomSeed;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DiscriminatorConfig {
    Mlp(MlpConfig),
    Forest(ForestConfig),
}

/// Binary classifier separating positives (label 1) from negatives.
#[derive(Clone, Debug, PartialEq)]
pub enum Discriminator {
    Mlp(Mlp),
    Forest(Forest),
}

pub fn train_discriminator(
    config: &DiscriminatorConfig,
    positives: &EncodedMatrix,
    negatives: &EncodedMatrix,
    seed: RandomSeed,
) -> Result<Discriminator> {
    if positives.n_rows() < 2 || negatives.n_rows() < 2 {
        return Err(Error::InvalidArgument(format!(
            "each class needs at least 2 rows (got {} positives, {} negatives)",
            positives.n_rows(),
            negatives.n_rows()
        )));
    }
    if positives.n_cols() != negatives.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: positives.n_cols(),
            found: negatives.n_cols(),
        });
    }
    let xs: Vec<&[f64]> = positives.rows().chain(negatives.rows()).collect();
    let labels: Vec<bool> = std::iter::repeat_n(true, positives.n_rows())
        .chain(std::iter::repeat_n(false, negatives.n_rows()))
        .collect();
    Ok(match config {
        DiscriminatorConfig::Mlp(cfg) => {
            let ys: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
            Discriminator::Mlp(Mlp::train(&xs, &ys, cfg, seed))
        }
        DiscriminatorConfig::Forest(cfg) => {
            Discriminator::Forest(Forest::train(&xs, &labels, cfg, seed))
        }
    })
}

impl Discriminator {
    pub fn input_dim(&self) -> usize {
        match self {
            Discriminator::Mlp(m) => m.input_dim(),
            Discriminator::Forest(f) => f.input_dim(),
        }
    }

    /// Probability that `query` belongs to the positive class.
    pub fn score(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: query.len(),
            });
        }
        Ok(match self {
            Discriminator::Mlp(m) => m.predict(query),
            Discriminator::Forest(f) => f.predict(query),
        })
    }
}
