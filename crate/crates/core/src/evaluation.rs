//! ROC-derived metrics for a single [`AttackResult`].
//!
//! A target is predicted to be a member iff `score > γ`. All metrics below
//! are read off the exact empirical ROC, with no interpolation.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::result::AttackResult;
use crate::{Error, Result};

/// FPR budgets reported by default.
pub const DEFAULT_FPR_TARGETS: [f64; 4] = [0.0, 0.001, 0.01, 0.1];

/// Empirical ROC. Point `i` counts the targets predicted as members at
/// threshold `thresholds[i]`; thresholds run from `+∞` (nothing predicted)
/// down to `-∞` (everything predicted).
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    thresholds: Vec<f64>,
    tp: Vec<usize>,
    fp: Vec<usize>,
    n_members: usize,
    n_nonmembers: usize,
}

impl RocCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn tpr(&self, i: usize) -> f64 {
        self.tp[i] as f64 / self.n_members as f64
    }

    pub fn fpr(&self, i: usize) -> f64 {
        self.fp[i] as f64 / self.n_nonmembers as f64
    }

    pub fn true_positives(&self) -> &[usize] {
        &self.tp
    }

    pub fn false_positives(&self) -> &[usize] {
        &self.fp
    }

    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn n_nonmembers(&self) -> usize {
        self.n_nonmembers
    }

    /// `(FPR, TPR)` pairs in threshold order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| (self.fpr(i), self.tpr(i))).collect()
    }

    /// Trapezoidal area under the curve.
    pub fn trapezoid_area(&self) -> f64 {
        let pts = self.points();
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }
}

/// Exact ROC; tied scores share one threshold.
pub fn roc(result: &AttackResult) -> RocCurve {
    let scores = result.scores();
    let labels = result.labels();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (vec![0], vec![0]);
    let (mut t, mut f) = (0, 0);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                t += 1;
            } else {
                f += 1;
            }
            i += 1;
        }
        // Everything scoring ≥ s is now predicted; the threshold that does
        // this under the strict rule is the next lower score.
        thresholds.push(order.get(i).map_or(f64::NEG_INFINITY, |&j| scores[j]));
        tp.push(t);
        fp.push(f);
    }
    RocCurve {
        thresholds,
        tp,
        fp,
        n_members: result.n_members(),
        n_nonmembers: result.n_nonmembers(),
    }
}

/// Mann–Whitney AUC: `P(member > non-member) + ½·P(tie)`.
///
/// Computed from integer pair counts so that `auc(s) + auc(-s) == 1`
/// holds exactly in floating point.
pub fn auc(result: &AttackResult) -> f64 {
    let scores = result.scores();
    let labels = result.labels();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Twice the Mann–Whitney U: 2 per won pair, 1 per tie.
    let mut u2: u128 = 0;
    let mut nonmembers_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut m, mut n) = (0u128, 0u128);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                m += 1;
            } else {
                n += 1;
            }
            i += 1;
        }
        u2 += m * (2 * nonmembers_below + n);
        nonmembers_below += n;
    }
    let pairs2 = 2 * result.n_members() as u128 * result.n_nonmembers() as u128;
    if 2 * u2 <= pairs2 {
        u2 as f64 / pairs2 as f64
    } else {
        1.0 - (pairs2 - u2) as f64 / pairs2 as f64
    }
}

/// Highest TPR over thresholds whose empirical FPR is at most `alpha`.
pub fn tpr_at_fpr(result: &AttackResult, alpha: f64) -> f64 {
    tpr_at_fpr_on(&roc(result), alpha)
}

fn tpr_at_fpr_on(curve: &RocCurve, alpha: f64) -> f64 {
    (0..curve.len())
        .filter(|&i| curve.fpr(i) <= alpha)
        .map(|i| curve.tpr(i))
        .fold(0.0, f64::max)
}

/// `advantage = max_γ (TPR − FPR)` and `privacy_gain = 1 − advantage`.
pub fn advantage_and_privacy_gain(result: &AttackResult) -> (f64, f64) {
    let adv = advantage_on(&roc(result));
    (adv, 1.0 - adv)
}

fn advantage_on(curve: &RocCurve) -> f64 {
    (0..curve.len())
        .map(|i| curve.tpr(i) - curve.fpr(i))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Best accuracy over all thresholds.
pub fn accuracy_best(result: &AttackResult) -> f64 {
    accuracy_on(&roc(result))
}

fn accuracy_on(curve: &RocCurve) -> f64 {
    let n = curve.n_members + curve.n_nonmembers;
    let best = (0..curve.len())
        .map(|i| curve.tp[i] + (curve.n_nonmembers - curve.fp[i]))
        .max()
        .unwrap_or(0);
    best as f64 / n as f64
}

/// Mean squared error of min-max-normalised scores against the labels.
/// Constant scores normalise to 0.5.
pub fn brier(result: &AttackResult) -> f64 {
    let scores = result.scores();
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let total: f64 = scores
        .iter()
        .zip(result.labels())
        .map(|(&s, &l)| {
            let p = if range > 0.0 && range.is_finite() {
                (s - lo) / range
            } else if range > 0.0 {
                // Span overflows f64; scale both ends first.
                (s / 2.0 - lo / 2.0) / (hi / 2.0 - lo / 2.0)
            } else {
                0.5
            };
            let y = if l { 1.0 } else { 0.0 };
            (p - y) * (p - y)
        })
        .sum();
    total / scores.len() as f64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonMode {
    /// Plug-in rates, FPR floored at `1/(3·n_nonmembers)`.
    #[default]
    #[serde(rename = "point")]
    Point,
    /// One-sided Clopper–Pearson bounds on both rates.
    #[serde(rename = "cp", alias = "clopper_pearson")]
    ClopperPearson,
}

impl fmt::Display for EpsilonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpsilonMode::Point => "point",
            EpsilonMode::ClopperPearson => "cp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonConfig {
    pub mode: EpsilonMode,
    pub delta: f64,
    pub confidence: f64,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        EpsilonConfig {
            mode: EpsilonMode::Point,
            delta: 0.0,
            confidence: 0.95,
        }
    }
}

impl EpsilonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Lower one-sided Clopper–Pearson bound on a binomial rate.
pub fn clopper_pearson_lower(k: usize, n: usize, confidence: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let beta = Beta::new(k as f64, (n - k + 1) as f64).expect("positive shape parameters");
    beta.inverse_cdf(1.0 - confidence)
}

/// Upper one-sided Clopper–Pearson bound on a binomial rate.
pub fn clopper_pearson_upper(k: usize, n: usize, confidence: f64) -> f64 {
    if k == n {
        return 1.0;
    }
    let beta = Beta::new((k + 1) as f64, (n - k) as f64).expect("positive shape parameters");
    beta.inverse_cdf(confidence)
}

/// Empirical ε from `TPR ≤ e^ε·FPR + δ`, maximised over thresholds and over
/// the test with negated scores. Never negative.
pub fn effective_epsilon(result: &AttackResult, config: &EpsilonConfig) -> Result<f64> {
    config.validate()?;
    let direct = epsilon_on(&roc(result), config);
    let flipped = epsilon_on(&roc(&result.negated()), config);
    Ok(direct.max(flipped).max(0.0))
}

fn epsilon_on(curve: &RocCurve, config: &EpsilonConfig) -> f64 {
    let floor = 1.0 / (3.0 * curve.n_nonmembers as f64);
    let mut best = 0.0f64;
    for i in 0..curve.len() {
        let (tpr, fpr) = match config.mode {
            EpsilonMode::Point => (curve.tpr(i), curve.fpr(i)),
            EpsilonMode::ClopperPearson => (
                clopper_pearson_lower(curve.tp[i], curve.n_members, config.confidence),
                clopper_pearson_upper(curve.fp[i], curve.n_nonmembers, config.confidence),
            ),
        };
        if tpr > config.delta {
            best = best.max(((tpr - config.delta) / fpr.max(floor)).ln());
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub fpr_targets: Vec<f64>,
    pub epsilon: EpsilonConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            fpr_targets: DEFAULT_FPR_TARGETS.to_vec(),
            epsilon: EpsilonConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fpr_targets.is_empty() {
            return Err(Error::InvalidArgument("no FPR targets given".into()));
        }
        if let Some(t) = self.fpr_targets.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidArgument(format!("FPR target {t} is outside [0, 1]")));
        }
        self.epsilon.validate()
    }
}

/// JSON key for a TPR@FPR target, e.g. `0.001` → `tpr_at_fpr_0p001`.
pub fn tpr_key(target: f64) -> String {
    format!("tpr_at_fpr_{}", target.to_string().replace('.', "p"))
}

fn parse_tpr_key(key: &str) -> Option<f64> {
    key.strip_prefix("tpr_at_fpr_")?.replace('p', ".").parse().ok()
}

/// All metrics for one attack instance.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub auc: f64,
    /// `(target, TPR)` pairs in ascending target order.
    pub tpr_at_fpr: Vec<(f64, f64)>,
    pub accuracy: f64,
    pub advantage: f64,
    pub privacy_gain: f64,
    pub brier: f64,
    pub effective_epsilon: f64,
    pub n_members: usize,
    pub n_nonmembers: usize,
}

impl MetricReport {
    /// Real-valued metrics keyed by their JSON names, in serialization order.
    pub fn values(&self) -> Vec<(String, f64)> {
        let mut out = vec![("auc".to_string(), self.auc)];
        out.extend(self.tpr_at_fpr.iter().map(|&(t, v)| (tpr_key(t), v)));
        out.extend([
            ("accuracy".to_string(), self.accuracy),
            ("advantage".to_string(), self.advantage),
            ("privacy_gain".to_string(), self.privacy_gain),
            ("brier".to_string(), self.brier),
            ("effective_epsilon".to_string(), self.effective_epsilon),
        ]);
        out
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values().into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn tpr_at(&self, target: f64) -> Option<f64> {
        self.tpr_at_fpr.iter().find(|(t, _)| *t == target).map(|&(_, v)| v)
    }
}

impl Serialize for MetricReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let values = self.values();
        let mut map = serializer.serialize_map(Some(values.len() + 2))?;
        for (k, v) in &values {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("n_members", &self.n_members)?;
        map.serialize_entry("n_nonmembers", &self.n_nonmembers)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for MetricReport {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ReportVisitor;

        impl<'de> Visitor<'de> for ReportVisitor {
            type Value = MetricReport;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a flat metric object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<MetricReport, A::Error> {
                let mut scalars: BTreeMap<String, f64> = BTreeMap::new();
                let mut tpr = Vec::new();
                let mut counts = (None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "n_members" => counts.0 = Some(map.next_value()?),
                        "n_nonmembers" => counts.1 = Some(map.next_value()?),
                        k if k.starts_with("tpr_at_fpr_") => {
                            let target = parse_tpr_key(k)
                                .ok_or_else(|| de::Error::custom(format!("bad key {k:?}")))?;
                            tpr.push((target, map.next_value()?));
                        }
                        _ => {
                            scalars.insert(key, map.next_value()?);
                        }
                    }
                }
                let mut take = |k: &'static str| scalars.remove(k).ok_or_else(|| de::Error::missing_field(k));
                tpr.sort_by(|a: &(f64, f64), b| a.0.total_cmp(&b.0));
                Ok(MetricReport {
                    auc: take("auc")?,
                    tpr_at_fpr: tpr,
                    accuracy: take("accuracy")?,
                    advantage: take("advantage")?,
                    privacy_gain: take("privacy_gain")?,
                    brier: take("brier")?,
                    effective_epsilon: take("effective_epsilon")?,
                    n_members: counts.0.ok_or_else(|| de::Error::missing_field("n_members"))?,
                    n_nonmembers: counts.1.ok_or_else(|| de::Error::missing_field("n_nonmembers"))?,
                })
            }
        }

        deserializer.deserialize_map(ReportVisitor)
    }
}

pub fn metric_report(result: &AttackResult, config: &EvalConfig) -> Result<MetricReport> {
    config.validate()?;
    let curve = roc(result);
    let mut targets = config.fpr_targets.clone();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let advantage = advantage_on(&curve);
    Ok(MetricReport {
        auc: auc(result),
        tpr_at_fpr: targets.iter().map(|&t| (t, tpr_at_fpr_on(&curve, t))).collect(),
        accuracy: accuracy_on(&curve),
        advantage,
        privacy_gain: 1.0 - advantage,
        brier: brier(result),
        effective_epsilon: effective_epsilon(result, &config.epsilon)?,
        n_members: result.n_members(),
        n_nonmembers: result.n_nonmembers(),
    })
}
