//! The (train, holdout, synthetic, reference) bundle and the evaluation set
//! built from it.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::data::DataTable;
use crate::seed::RandomSeed;
use crate::{Error, Result};

/// Validated dataset roles. All tables share one column layout.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub train: DataTable,
    pub holdout: DataTable,
    pub synthetic: DataTable,
    pub reference: Option<DataTable>,
    warnings: Vec<String>,
}

impl Quadruple {
    /// Whether attacks that need a reference table can run.
    pub fn calibrated(&self) -> bool {
        self.reference.is_some()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

pub fn validate_quadruple(
    train: DataTable,
    holdout: DataTable,
    synthetic: DataTable,
    reference: Option<DataTable>,
) -> Result<Quadruple> {
    let schema = train.schema();
    let others = [
        ("holdout", Some(&holdout)),
        ("synthetic", Some(&synthetic)),
        ("reference", reference.as_ref()),
    ];
    for (role, table) in others {
        if let Some(table) = table {
            schema
                .check_compatible(table.schema())
                .map_err(|e| Error::SchemaMismatch(format!("train vs {role}: {e}")))?;
        }
    }

    let mut warnings = Vec::new();
    let train_keys: HashSet<Vec<u8>> = train.rows().iter().map(|r| DataTable::row_key(r)).collect();
    let overlap = holdout
        .rows()
        .iter()
        .filter(|r| train_keys.contains(&DataTable::row_key(r)))
        .count();
    if overlap > 0 {
        warnings.push(format!(
            "{overlap} holdout row(s) also appear in the training table"
        ));
    }

    Ok(Quadruple {
        train,
        holdout,
        synthetic,
        reference,
        warnings,
    })
}

/// Evaluation targets: members first, then non-members.
#[derive(Clone, Debug)]
pub struct EvalSet {
    pub targets: DataTable,
    pub labels: Vec<bool>,
}

impl EvalSet {
    pub fn n_members(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_nonmembers(&self) -> usize {
        self.labels.len() - self.n_members()
    }
}

/// Shuffles each source with its own child stream of `seed`, then keeps at
/// most `cap` rows from each.
pub fn build_eval_set(
    train: &DataTable,
    holdout: &DataTable,
    cap: usize,
    seed: RandomSeed,
) -> Result<EvalSet> {
    if cap == 0 {
        return Err(Error::InvalidArgument("evaluation cap must be at least 1".into()));
    }
    let pick = |table: &DataTable, tag: &str| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..table.n_rows()).collect();
        idx.shuffle(&mut seed.child(tag).rng());
        idx.truncate(cap);
        idx
    };
    let members = train.select(&pick(train, "eval/train"))?;
    let nonmembers = holdout.select(&pick(holdout, "eval/holdout"))?;
    let labels = std::iter::repeat_n(true, members.n_rows())
        .chain(std::iter::repeat_n(false, nonmembers.n_rows()))
        .collect();
    Ok(EvalSet {
        targets: members.concat(&nonmembers)?,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, TableSchema, Value};

    fn table(n: usize, offset: f64) -> DataTable {
        DataTable::from_numeric_rows((0..n).map(|i| vec![i as f64 + offset]).collect()).unwrap()
    }

    #[test]
    fn calibrated_flag() {
        let q = validate_quadruple(table(5, 0.0), table(5, 100.0), table(5, 0.0), Some(table(5, 200.0))).unwrap();
        assert!(q.calibrated());
        assert!(q.warnings().is_empty());
        let q = validate_quadruple(table(5, 0.0), table(5, 100.0), table(5, 0.0), None).unwrap();
        assert!(!q.calibrated());
    }

    #[test]
    fn extra_column_is_mismatch() {
        let wide = DataTable::from_numeric_rows(vec![vec![1.0, 2.0]]).unwrap();
        let err = validate_quadruple(table(5, 0.0), wide, table(5, 0.0), None).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(_)));
    }

    #[test]
    fn kind_mismatch() {
        let cat = DataTable::new(
            TableSchema::new(vec![Column::categorical("x0")]).unwrap(),
            vec![vec![Value::Cat("a".into())]],
        )
        .unwrap();
        assert!(validate_quadruple(table(3, 0.0), table(3, 0.0), cat, None).is_err());
    }

    #[test]
    fn overlap_is_a_warning() {
        let q = validate_quadruple(table(5, 0.0), table(5, 3.0), table(5, 0.0), None).unwrap();
        assert_eq!(q.warnings().len(), 1);
        assert!(q.warnings()[0].starts_with("2 holdout"));
    }

    #[test]
    fn eval_set_caps_each_side() {
        let e = build_eval_set(&table(1200, 0.0), &table(300, 0.5), 1000, RandomSeed(1)).unwrap();
        assert_eq!((e.n_members(), e.n_nonmembers()), (1000, 300));
        assert_eq!(e.targets.n_rows(), 1300);
        assert!(e.labels[..1000].iter().all(|&l| l));

        let e = build_eval_set(&table(50, 0.0), &table(50, 0.5), 1000, RandomSeed(1)).unwrap();
        assert_eq!((e.n_members(), e.n_nonmembers()), (50, 50));

        assert!(build_eval_set(&table(5, 0.0), &table(5, 0.5), 0, RandomSeed(1)).is_err());
    }

    #[test]
    fn eval_set_deterministic() {
        let a = build_eval_set(&table(40, 0.0), &table(40, 0.5), 10, RandomSeed(3)).unwrap();
        let b = build_eval_set(&table(40, 0.0), &table(40, 0.5), 10, RandomSeed(3)).unwrap();
        assert_eq!(a.targets, b.targets);
        let c = build_eval_set(&table(40, 0.0), &table(40, 0.5), 10, RandomSeed(4)).unwrap();
        assert_ne!(a.targets, c.targets);
    }
}
