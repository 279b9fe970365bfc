//! Read a mixed-type CSV, infer its schema and split it into train,
//! holdout and reference partitions.
//!
//! cargo run --example ingest_split

use synth_audit::ingest::{fingerprint_hex, read_table_from, split_real, write_table_to, SplitSpec};
use synth_audit::seed::RandomSeed;

const CSV: &str = "age,job,income
34,clerk,41000
51,engineer,88000
29,\"nurse, night shift\",52000
62,retired,23000
45,engineer,91000
38,clerk,39000
27,nurse,47000
55,teacher,61000
41,teacher,58000
33,engineer,76000
";

fn main() -> synth_audit::Result<()> {
    let table = read_table_from(CSV.as_bytes(), None)?;
    for col in table.schema().columns() {
        println!("{:8} {:12} {:?}", col.name, col.kind.to_string(), col.categories);
    }
    println!("fingerprint {}", fingerprint_hex(&table));

    let split = split_real(&table, &SplitSpec::new(0.4, RandomSeed(1))?)?;
    for (name, part) in [("train", &split.train), ("holdout", &split.holdout), ("reference", &split.reference)] {
        let mut csv = Vec::new();
        write_table_to(&mut csv, part)?;
        println!("\n{name} ({} rows)\n{}", part.n_rows(), String::from_utf8_lossy(&csv).trim_end());
    }
    Ok(())
}
