//! Leakage-safe encoders.
//!
//! Encoders are fit on exactly one adversary-visible table (synthetic by
//! default, reference on request) and then applied unchanged to every other
//! table. Two modes exist: one-hot + min-max for distance and classifier
//! attacks, ordinal + min-max for the KDE-backed attacks.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{ColumnKind, DataTable, Value};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMode {
    Onehot,
    Ordinal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitSource {
    #[default]
    Synthetic,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnEncoder {
    Numeric { name: String, min: f64, max: f64 },
    Categorical { name: String, categories: Vec<String> },
}

impl ColumnEncoder {
    fn name(&self) -> &str {
        match self {
            ColumnEncoder::Numeric { name, .. } | ColumnEncoder::Categorical { name, .. } => name,
        }
    }

    fn width(&self, mode: EncodingMode) -> usize {
        match (self, mode) {
            (ColumnEncoder::Categorical { categories, .. }, EncodingMode::Onehot) => categories.len(),
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedTransformer {
    mode: EncodingMode,
    fit_source: FitSource,
    columns: Vec<ColumnEncoder>,
    output_dim: usize,
}

pub fn fit_transformer(
    data: &DataTable,
    mode: EncodingMode,
    fit_source: FitSource,
) -> Result<FittedTransformer> {
    if data.n_rows() == 0 {
        return Err(Error::EmptyTable("fit source".into()));
    }
    let columns: Vec<ColumnEncoder> = data
        .schema()
        .columns()
        .iter()
        .enumerate()
        .map(|(j, col)| match col.kind {
            ColumnKind::Numeric => {
                let (mut min, mut max) = data
                    .rows()
                    .iter()
                    .filter_map(|r| r[j].as_num())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                if min == max {
                    min -= 0.5;
                    max += 0.5;
                }
                ColumnEncoder::Numeric {
                    name: col.name.clone(),
                    min,
                    max,
                }
            }
            ColumnKind::Categorical => {
                let categories = match &col.categories {
                    Some(declared) => declared.clone(),
                    None => {
                        let mut seen: Vec<String> = Vec::new();
                        for r in data.rows() {
                            let v = r[j].as_cat().unwrap_or_default();
                            if !seen.iter().any(|s| s == v) {
                                seen.push(v.to_string());
                            }
                        }
                        seen
                    }
                };
                ColumnEncoder::Categorical {
                    name: col.name.clone(),
                    categories,
                }
            }
        })
        .collect();
    let output_dim = columns.iter().map(|c| c.width(mode)).sum();
    Ok(FittedTransformer {
        mode,
        fit_source,
        columns,
        output_dim,
    })
}

impl FittedTransformer {
    pub fn mode(&self) -> EncodingMode {
        self.mode
    }

    pub fn fit_source(&self) -> FitSource {
        self.fit_source
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn columns(&self) -> &[ColumnEncoder] {
        &self.columns
    }

    /// Short hex digest of the serialized state.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("transformer state serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn transform(&self, data: &DataTable) -> Result<EncodedMatrix> {
        let schema = data.schema();
        if schema.len() != self.columns.len() {
            return Err(Error::SchemaMismatch(format!(
                "transformer expects {} columns, table has {}",
                self.columns.len(),
                schema.len()
            )));
        }
        for (enc, col) in self.columns.iter().zip(schema.columns()) {
            let kind_ok = matches!(
                (enc, col.kind),
                (ColumnEncoder::Numeric { .. }, ColumnKind::Numeric)
                    | (ColumnEncoder::Categorical { .. }, ColumnKind::Categorical)
            );
            if enc.name() != col.name || !kind_ok {
                return Err(Error::SchemaMismatch(format!(
                    "column {:?} does not match the fitted column {:?}",
                    col.name,
                    enc.name()
                )));
            }
        }

        let mut values = Array2::<f64>::zeros((data.n_rows(), self.output_dim));
        for (i, row) in data.rows().iter().enumerate() {
            let mut out = values.row_mut(i);
            let mut offset = 0;
            for (enc, cell) in self.columns.iter().zip(row) {
                match (enc, cell) {
                    (ColumnEncoder::Numeric { min, max, .. }, Value::Num(v)) => {
                        out[offset] = min_max(*v, *min, *max);
                    }
                    (ColumnEncoder::Categorical { categories, .. }, Value::Cat(v)) => {
                        let k = categories.len();
                        let idx = categories.iter().position(|c| c == v);
                        match self.mode {
                            EncodingMode::Onehot => {
                                // Unseen categories leave the block all zero.
                                if let Some(idx) = idx {
                                    out[offset + idx] = 1.0;
                                }
                            }
                            EncodingMode::Ordinal => {
                                out[offset] = match idx {
                                    Some(_) if k == 1 => 0.5,
                                    Some(idx) => idx as f64 / (k - 1) as f64,
                                    None => 1.0 + 1.0 / k as f64,
                                };
                            }
                        }
                    }
                    _ => unreachable!("cells were validated against the schema"),
                }
                offset += enc.width(self.mode);
            }
        }
        Ok(EncodedMatrix {
            values,
            transformer_id: self.digest(),
        })
    }
}

fn min_max(v: f64, min: f64, max: f64) -> f64 {
    let (num, den) = (v - min, max - min);
    if den <= 0.0 {
        // A constant column so large that the ±0.5 widening rounded away.
        0.5
    } else if num.is_finite() && den.is_finite() {
        num / den
    } else {
        (v / 2.0 - min / 2.0) / (max / 2.0 - min / 2.0)
    }
}

/// Numeric matrix produced by a [`FittedTransformer`].
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedMatrix {
    pub values: Array2<f64>,
    pub transformer_id: String,
}

impl EncodedMatrix {
    /// Matrix not tied to any transformer (tests, direct estimator use).
    pub fn raw(values: Array2<f64>) -> Self {
        EncodedMatrix {
            values,
            transformer_id: "raw".into(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("rows have different lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let values = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self::raw(values))
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.values.ncols();
        &self.values.as_slice().expect("standard layout")[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }
}

/// The two encoders every audit uses, fit on the same source table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformerSet {
    pub onehot: FittedTransformer,
    pub ordinal: FittedTransformer,
}

impl TransformerSet {
    pub fn fit(source: &DataTable, fit_source: FitSource) -> Result<Self> {
        Ok(TransformerSet {
            onehot: fit_transformer(source, EncodingMode::Onehot, fit_source)?,
            ordinal: fit_transformer(source, EncodingMode::Ordinal, fit_source)?,
        })
    }

    pub fn get(&self, mode: EncodingMode) -> &FittedTransformer {
        match mode {
            EncodingMode::Onehot => &self.onehot,
            EncodingMode::Ordinal => &self.ordinal,
        }
    }
}
