//! Membership-inference attacks.
//!
//! Every attack is a scoring function `f(x*)`; a target is predicted to be a
//! member when `f(x*) > γ`. Thresholds are swept later, in
//! [`crate::evaluation`].
//!
//! | family               | needs reference | encoding |
//! |----------------------|-----------------|----------|
//! | `dcr`                | no              | one-hot  |
//! | `dcr_diff`           | yes             | one-hot  |
//! | `density`            | no              | ordinal  |
//! | `domias`             | yes             | ordinal  |
//! | `dpi`                | yes             | one-hot  |
//! | `gen_lra`            | yes             | ordinal  |
//! | `local_neighborhood` | no              | one-hot  |
//! | `logan`              | yes             | one-hot  |
//! | `classifier`         | yes             | one-hot  |
//! | `mc`                 | no              | one-hot  |

pub mod scores;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use scores::{
    classifier_score, dcr_diff_score, dcr_score, density_score, domias_score, dpi_score,
    gen_lra_score, local_neighborhood_score, logan_score, mc_epsilon, mc_score,
};

use crate::estimators::{ForestConfig, MlpConfig};
use crate::preprocess::{EncodedMatrix, EncodingMode, TransformerSet};
use crate::quadruple::{EvalSet, Quadruple};
use crate::result::AttackResult;
use crate::seed::RandomSeed;
use crate::{Error, Result};

/// Neighbourhood sizes swept for `dpi` and `gen_lra`.
pub const DEFAULT_K_GRID: [usize; 6] = [1, 5, 10, 25, 50, 100];
pub const DEFAULT_RADIUS: f64 = 1.0;

/// Scores at or beyond this magnitude are clamped before storage.
pub const SCORE_CLAMP: f64 = 1e308;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackFamily {
    Dcr,
    DcrDiff,
    Density,
    Domias,
    Dpi,
    GenLra,
    LocalNeighborhood,
    Logan,
    Classifier,
    Mc,
}

impl AttackFamily {
    pub const ALL: [AttackFamily; 10] = [
        AttackFamily::Dcr,
        AttackFamily::DcrDiff,
        AttackFamily::Density,
        AttackFamily::Domias,
        AttackFamily::Dpi,
        AttackFamily::GenLra,
        AttackFamily::LocalNeighborhood,
        AttackFamily::Logan,
        AttackFamily::Classifier,
        AttackFamily::Mc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackFamily::Dcr => "dcr",
            AttackFamily::DcrDiff => "dcr_diff",
            AttackFamily::Density => "density",
            AttackFamily::Domias => "domias",
            AttackFamily::Dpi => "dpi",
            AttackFamily::GenLra => "gen_lra",
            AttackFamily::LocalNeighborhood => "local_neighborhood",
            AttackFamily::Logan => "logan",
            AttackFamily::Classifier => "classifier",
            AttackFamily::Mc => "mc",
        }
    }

    /// Calibrated attacks read the reference table; no-box attacks only see
    /// the synthetic table.
    pub fn requires_reference(self) -> bool {
        matches!(
            self,
            AttackFamily::DcrDiff
                | AttackFamily::Domias
                | AttackFamily::Dpi
                | AttackFamily::GenLra
                | AttackFamily::Logan
                | AttackFamily::Classifier
        )
    }

    /// KDE-backed attacks use ordinal codes; everything else one-hot.
    pub fn encoding(self) -> EncodingMode {
        match self {
            AttackFamily::Density | AttackFamily::Domias | AttackFamily::GenLra => {
                EncodingMode::Ordinal
            }
            _ => EncodingMode::Onehot,
        }
    }

    /// One spec per point of the family's default hyperparameter grid.
    pub fn default_grid(self) -> Vec<AttackSpec> {
        match self {
            AttackFamily::Dcr => vec![AttackSpec::Dcr],
            AttackFamily::DcrDiff => vec![AttackSpec::DcrDiff],
            AttackFamily::Density => vec![AttackSpec::Density],
            AttackFamily::Domias => vec![AttackSpec::Domias],
            AttackFamily::Dpi => DEFAULT_K_GRID.iter().map(|&k| AttackSpec::Dpi { k }).collect(),
            AttackFamily::GenLra => DEFAULT_K_GRID
                .iter()
                .map(|&k| AttackSpec::GenLra {
                    k,
                    refit_bandwidth: true,
                })
                .collect(),
            AttackFamily::LocalNeighborhood => vec![AttackSpec::LocalNeighborhood {
                radius: DEFAULT_RADIUS,
            }],
            AttackFamily::Logan => vec![AttackSpec::Logan {
                epochs: MlpConfig::default().epochs,
            }],
            AttackFamily::Classifier => {
                let f = ForestConfig::default();
                vec![AttackSpec::Classifier {
                    trees: f.n_trees,
                    max_depth: f.max_depth,
                }]
            }
            AttackFamily::Mc => vec![AttackSpec::Mc],
        }
    }
}

impl fmt::Display for AttackFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

fn default_true() -> bool {
    true
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS
}

fn default_epochs() -> usize {
    MlpConfig::default().epochs
}

fn default_trees() -> usize {
    ForestConfig::default().n_trees
}

fn default_depth() -> usize {
    ForestConfig::default().max_depth
}

/// One attack instance: a family plus its hyperparameters.
///
/// JSON form: `{"family":"dpi","k":25}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AttackSpec {
    Dcr,
    DcrDiff,
    Density,
    Domias,
    Dpi {
        k: usize,
    },
    GenLra {
        k: usize,
        #[serde(default = "default_true")]
        refit_bandwidth: bool,
    },
    LocalNeighborhood {
        #[serde(default = "default_radius")]
        radius: f64,
    },
    Logan {
        #[serde(default = "default_epochs")]
        epochs: usize,
    },
    Classifier {
        #[serde(default = "default_trees")]
        trees: usize,
        #[serde(default = "default_depth")]
        max_depth: usize,
    },
    Mc,
}

impl AttackSpec {
    pub fn family(&self) -> AttackFamily {
        match self {
            AttackSpec::Dcr => AttackFamily::Dcr,
            AttackSpec::DcrDiff => AttackFamily::DcrDiff,
            AttackSpec::Density => AttackFamily::Density,
            AttackSpec::Domias => AttackFamily::Domias,
            AttackSpec::Dpi { .. } => AttackFamily::Dpi,
            AttackSpec::GenLra { .. } => AttackFamily::GenLra,
            AttackSpec::LocalNeighborhood { .. } => AttackFamily::LocalNeighborhood,
            AttackSpec::Logan { .. } => AttackFamily::Logan,
            AttackSpec::Classifier { .. } => AttackFamily::Classifier,
            AttackSpec::Mc => AttackFamily::Mc,
        }
    }

    pub fn requires_reference(&self) -> bool {
        self.family().requires_reference()
    }

    pub fn encoding(&self) -> EncodingMode {
        self.family().encoding()
    }

    pub fn hyperparams(&self) -> BTreeMap<String, f64> {
        let mut map = BTreeMap::new();
        match *self {
            AttackSpec::Dpi { k } => {
                map.insert("k".into(), k as f64);
            }
            AttackSpec::GenLra { k, refit_bandwidth } => {
                map.insert("k".into(), k as f64);
                map.insert("refit_bandwidth".into(), if refit_bandwidth { 1.0 } else { 0.0 });
            }
            AttackSpec::LocalNeighborhood { radius } => {
                map.insert("radius".into(), radius);
            }
            AttackSpec::Logan { epochs } => {
                map.insert("epochs".into(), epochs as f64);
            }
            AttackSpec::Classifier { trees, max_depth } => {
                map.insert("trees".into(), trees as f64);
                map.insert("max_depth".into(), max_depth as f64);
            }
            _ => {}
        }
        map
    }

    /// Stable instance id, e.g. `dcr` or `dpi[k=25]`.
    pub fn id(&self) -> String {
        let family = self.family().name();
        let params = match *self {
            AttackSpec::Dpi { k } => format!("k={k}"),
            AttackSpec::GenLra { k, refit_bandwidth: true } => format!("k={k}"),
            AttackSpec::GenLra { k, refit_bandwidth: false } => format!("k={k},refit=false"),
            AttackSpec::LocalNeighborhood { radius } => format!("radius={radius}"),
            AttackSpec::Logan { epochs } if epochs != default_epochs() => format!("epochs={epochs}"),
            AttackSpec::Classifier { trees, max_depth }
                if trees != default_trees() || max_depth != default_depth() =>
            {
                format!("trees={trees},max_depth={max_depth}")
            }
            _ => return family.to_string(),
        };
        format!("{family}[{params}]")
    }

    /// Parses `family` or `family:key=value[:key=value]`, e.g. `dpi:k=25`.
    /// A bare family name expands to the family's default grid.
    pub fn parse_list_entry(entry: &str) -> Result<Vec<AttackSpec>> {
        let mut parts = entry.trim().split(':');
        let family: AttackFamily = parts.next().unwrap_or_default().parse()?;
        let overrides: Vec<&str> = parts.collect();
        if overrides.is_empty() {
            return Ok(family.default_grid());
        }
        let mut obj = serde_json::Map::new();
        obj.insert("family".into(), family.name().into());
        for kv in overrides {
            let (key, value) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value in attack entry {entry:?}"))
            })?;
            let value: serde_json::Value = serde_json::from_str(value)
                .map_err(|_| Error::InvalidArgument(format!("bad value in {entry:?}")))?;
            obj.insert(key.to_string(), value);
        }
        let spec: AttackSpec = serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| Error::InvalidArgument(format!("attack entry {entry:?}: {e}")))?;
        Ok(vec![spec])
    }
}

/// Targets, synthetic and reference rows under one encoding.
#[derive(Clone, Debug)]
pub struct EncodedViews {
    pub targets: EncodedMatrix,
    pub synthetic: EncodedMatrix,
    pub reference: Option<EncodedMatrix>,
}

/// Everything an attack reads, encoded once and shared between attacks.
#[derive(Clone, Debug)]
pub struct AttackInputs {
    pub onehot: EncodedViews,
    pub ordinal: EncodedViews,
    pub labels: Vec<bool>,
}

impl AttackInputs {
    pub fn prepare(quad: &Quadruple, eval: &EvalSet, transformers: &TransformerSet) -> Result<Self> {
        let encode = |mode: EncodingMode| -> Result<EncodedViews> {
            let t = transformers.get(mode);
            Ok(EncodedViews {
                targets: t.transform(&eval.targets)?,
                synthetic: t.transform(&quad.synthetic)?,
                reference: quad.reference.as_ref().map(|r| t.transform(r)).transpose()?,
            })
        };
        Ok(AttackInputs {
            onehot: encode(EncodingMode::Onehot)?,
            ordinal: encode(EncodingMode::Ordinal)?,
            labels: eval.labels.clone(),
        })
    }

    pub fn calibrated(&self) -> bool {
        self.onehot.reference.is_some()
    }

    pub fn views(&self, mode: EncodingMode) -> &EncodedViews {
        match mode {
            EncodingMode::Onehot => &self.onehot,
            EncodingMode::Ordinal => &self.ordinal,
        }
    }
}

/// Runs one attack instance and packages its scores with the labels.
pub fn run_attack(spec: &AttackSpec, inputs: &AttackInputs, seed: RandomSeed) -> Result<AttackResult> {
    let views = inputs.views(spec.encoding());
    let reference = || {
        views
            .reference
            .as_ref()
            .ok_or_else(|| Error::MissingReference(spec.id()))
    };
    if spec.requires_reference() {
        reference()?;
    }
    let (t, s) = (&views.targets, &views.synthetic);
    let raw = match *spec {
        AttackSpec::Dcr => dcr_score(t, s)?,
        AttackSpec::DcrDiff => dcr_diff_score(t, s, reference()?)?,
        AttackSpec::Density => density_score(t, s)?,
        AttackSpec::Domias => domias_score(t, s, reference()?)?,
        AttackSpec::Dpi { k } => dpi_score(t, s, reference()?, k)?,
        AttackSpec::GenLra { k, refit_bandwidth } => {
            gen_lra_score(t, s, reference()?, k, refit_bandwidth)?
        }
        AttackSpec::LocalNeighborhood { radius } => local_neighborhood_score(t, s, radius)?,
        AttackSpec::Logan { epochs } => {
            let config = MlpConfig {
                epochs,
                ..MlpConfig::default()
            };
            logan_score(t, s, reference()?, &config, seed)?
        }
        AttackSpec::Classifier { trees, max_depth } => {
            let config = ForestConfig {
                n_trees: trees,
                max_depth,
            };
            classifier_score(t, s, reference()?, &config, seed)?
        }
        AttackSpec::Mc => mc_score(t, s)?,
    };
    let scores = raw
        .into_iter()
        .map(|v| {
            if v.is_nan() {
                Err(Error::InvalidArgument(format!("{} produced a NaN score", spec.id())))
            } else {
                Ok(v.clamp(-SCORE_CLAMP, SCORE_CLAMP))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    AttackResult::new(
        spec.id(),
        scores,
        inputs.labels.clone(),
        spec.hyperparams(),
        seed.value(),
    )
}
