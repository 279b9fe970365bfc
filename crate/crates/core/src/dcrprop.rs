//! DCR-Prop: for each synthetic row, is it nearer to the training table or
//! to the reference table?
//!
//! This is a similarity metric, not an attack. `proportion` is the share of
//! synthetic rows closer to the reference table (ties count ½), so 0.5 means
//! balanced and 0 means every synthetic row hugs the training data.
//! `leakage_proportion = 1 − proportion` is the same number oriented so that
//! higher means leakier; both are reported because published tables use
//! either convention.

use serde::{Deserialize, Serialize};

use crate::data::DataTable;
use crate::estimators::NeighborIndex;
use crate::preprocess::FittedTransformer;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcrPropResult {
    pub proportion: f64,
    pub leakage_proportion: f64,
    pub n_closer_to_train: usize,
    pub n_closer_to_reference: usize,
    pub n_ties: usize,
}

impl DcrPropResult {
    pub fn n_synthetic(&self) -> usize {
        self.n_closer_to_train + self.n_closer_to_reference + self.n_ties
    }
}

pub fn dcr_prop(
    train: &DataTable,
    reference: &DataTable,
    synthetic: &DataTable,
    transformer: &FittedTransformer,
) -> Result<DcrPropResult> {
    for (name, t) in [("train", train), ("reference", reference), ("synthetic", synthetic)] {
        if t.n_rows() == 0 {
            return Err(Error::EmptyTable(name.into()));
        }
    }
    let train_index = NeighborIndex::new(&transformer.transform(train)?);
    let reference_index = NeighborIndex::new(&transformer.transform(reference)?);
    let s = transformer.transform(synthetic)?;

    let (mut to_train, mut to_reference, mut ties) = (0, 0, 0);
    for row in s.rows() {
        let dt = train_index.nn_distance(row)?;
        let dr = reference_index.nn_distance(row)?;
        match dt.total_cmp(&dr) {
            std::cmp::Ordering::Less => to_train += 1,
            std::cmp::Ordering::Greater => to_reference += 1,
            std::cmp::Ordering::Equal => ties += 1,
        }
    }
    let n = s.n_rows() as f64;
    let proportion = (to_reference as f64 + 0.5 * ties as f64) / n;
    Ok(DcrPropResult {
        proportion,
        leakage_proportion: 1.0 - proportion,
        n_closer_to_train: to_train,
        n_closer_to_reference: to_reference,
        n_ties: ties,
    })
}
