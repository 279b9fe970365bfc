//! Fit the one-hot and ordinal encoders on an adversary-visible table and
//! apply them to a table they never saw.
//!
//! cargo run --example encoders

use synth_audit::data::{Column, DataTable, TableSchema, Value};
use synth_audit::preprocess::{FitSource, TransformerSet};

fn table(rows: &[(f64, &str)]) -> synth_audit::Result<DataTable> {
    let schema = TableSchema::new(vec![Column::numeric("x"), Column::categorical("colour")])?;
    DataTable::new(schema, rows.iter().map(|&(x, c)| vec![Value::Num(x), Value::Cat(c.into())]).collect())
}

fn main() -> synth_audit::Result<()> {
    let synthetic = table(&[(0.0, "red"), (5.0, "green"), (10.0, "blue"), (2.5, "red")])?;
    let train = table(&[(-5.0, "red"), (7.5, "violet")])?;

    let set = TransformerSet::fit(&synthetic, FitSource::Synthetic)?;
    println!("{}", serde_json::to_string_pretty(&set)?);
    let before = (set.onehot.digest(), set.ordinal.digest());

    for (label, t) in [("onehot", &set.onehot), ("ordinal", &set.ordinal)] {
        let encoded = t.transform(&train)?;
        println!("\n{label}: width {}", t.output_dim());
        for row in encoded.rows() {
            println!("  {row:?}");
        }
    }
    // Out-of-range numbers fall outside [0, 1]; unseen categories map to
    // all-zero one-hot and an out-of-range ordinal.
    assert_eq!(before, (set.onehot.digest(), set.ordinal.digest()));
    println!("\ndigests unchanged after transforming train: {} {}", before.0, before.1);
    Ok(())
}
