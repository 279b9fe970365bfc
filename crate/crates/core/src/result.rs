use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Membership scores for one attack, aligned with ground-truth labels
/// (`true` = member). Higher scores are more member-like.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    attack_id: String,
    scores: Vec<f64>,
    labels: Vec<bool>,
    hyperparams: BTreeMap<String, f64>,
    seed: u64,
}

impl AttackResult {
    pub fn new(
        attack_id: impl Into<String>,
        scores: Vec<f64>,
        labels: Vec<bool>,
        hyperparams: BTreeMap<String, f64>,
        seed: u64,
    ) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: scores.len(),
            });
        }
        if scores.len() < 2 {
            return Err(Error::InvalidArgument(
                "an attack result needs at least two targets".into(),
            ));
        }
        if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
            return Err(Error::SingleClass);
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "score {i} is {} (clamp infinities before storing)",
                scores[i]
            )));
        }
        Ok(AttackResult {
            attack_id: attack_id.into(),
            scores,
            labels,
            hyperparams,
            seed,
        })
    }

    /// Bare result for metric computations.
    pub fn from_scores(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        Self::new("scores", scores, labels, BTreeMap::new(), 0)
    }

    /// Members first, then non-members.
    pub fn from_groups(members: &[f64], nonmembers: &[f64]) -> Result<Self> {
        let scores = members.iter().chain(nonmembers).copied().collect();
        let labels = std::iter::repeat_n(true, members.len())
            .chain(std::iter::repeat_n(false, nonmembers.len()))
            .collect();
        Self::from_scores(scores, labels)
    }

    pub fn attack_id(&self) -> &str {
        &self.attack_id
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn hyperparams(&self) -> &BTreeMap<String, f64> {
        &self.hyperparams
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_members(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_nonmembers(&self) -> usize {
        self.labels.len() - self.n_members()
    }

    /// Same labels, every score negated.
    pub fn negated(&self) -> AttackResult {
        AttackResult {
            scores: self.scores.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }
}
