//! CSV and schema IO, the train/holdout/reference split and table
//! fingerprints.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use sha2::{Digest, Sha256};

use crate::data::{Column, ColumnKind, DataTable, TableSchema, Value};
use crate::seed::RandomSeed;
use crate::{Error, Result};

/// Reads a headed CSV file. With a schema, cells are checked against it;
/// without one, a column is numeric iff every cell parses as a finite real.
pub fn read_table(path: impl AsRef<Path>, schema: Option<&TableSchema>) -> Result<DataTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    read_table_from(file, schema).map_err(|e| e.in_file(path))
}

pub fn read_table_from<R: Read>(reader: R, schema: Option<&TableSchema>) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::EmptyTable("csv".into()));
    }

    let mut raw: Vec<Vec<String>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row,
                found: record.len(),
                expected: header.len(),
            });
        }
        let cells: Vec<String> = record.iter().map(|c| c.trim().to_string()).collect();
        if let Some(j) = cells.iter().position(String::is_empty) {
            return Err(Error::MissingValue {
                row,
                column: header[j].clone(),
            });
        }
        raw.push(cells);
    }
    if raw.is_empty() {
        return Err(Error::EmptyTable("csv".into()));
    }

    let schema = match schema {
        Some(schema) => {
            let names: Vec<&str> = schema.columns().iter().map(|c| c.name.as_str()).collect();
            if names != header {
                return Err(Error::SchemaMismatch(format!(
                    "file header {header:?} does not match schema columns {names:?}"
                )));
            }
            schema.clone()
        }
        None => infer_schema(&header, &raw)?,
    };

    let rows = raw
        .into_iter()
        .enumerate()
        .map(|(i, cells)| {
            cells
                .into_iter()
                .zip(schema.columns())
                .map(|(cell, col)| match col.kind {
                    ColumnKind::Numeric => parse_finite(&cell)
                        .map(Value::Num)
                        .ok_or_else(|| Error::ParseNumeric {
                            row: i + 1,
                            column: col.name.clone(),
                            value: cell,
                        }),
                    ColumnKind::Categorical => Ok(Value::Cat(cell)),
                })
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DataTable::new(schema, rows)
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn infer_schema(header: &[String], raw: &[Vec<String>]) -> Result<TableSchema> {
    let columns = header
        .iter()
        .enumerate()
        .map(|(j, name)| {
            if raw.iter().all(|r| parse_finite(&r[j]).is_some()) {
                Column::numeric(name.clone())
            } else {
                let mut seen = Vec::new();
                for r in raw {
                    if !seen.contains(&r[j]) {
                        seen.push(r[j].clone());
                    }
                }
                Column::categorical(name.clone()).with_categories(seen)
            }
        })
        .collect();
    TableSchema::new(columns)
}

pub fn write_table(path: impl AsRef<Path>, table: &DataTable) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::from(e).in_file(path))?;
    write_table_to(file, table).map_err(|e| e.in_file(path))
}

/// Numbers are written in their shortest round-trip form.
pub fn write_table_to<W: Write>(writer: W, table: &DataTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(table.schema().columns().iter().map(|c| c.name.as_str()))?;
    for row in table.rows() {
        wtr.write_record(row.iter().map(Value::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_schema(path: impl AsRef<Path>) -> Result<TableSchema> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
}

pub fn write_schema(path: impl AsRef<Path>, schema: &TableSchema) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(schema)?;
    std::fs::write(path, text).map_err(|e| Error::from(e).in_file(path))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    test_fraction: f64,
    seed: RandomSeed,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: RandomSeed) -> Result<Self> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "test fraction must lie in (0, 1), got {test_fraction}"
            )));
        }
        Ok(SplitSpec {
            test_fraction,
            seed,
        })
    }

    /// 80:20 train/test.
    pub fn with_seed(seed: RandomSeed) -> Self {
        SplitSpec {
            test_fraction: 0.2,
            seed,
        }
    }

    pub fn test_fraction(&self) -> f64 {
        self.test_fraction
    }

    pub fn seed(&self) -> RandomSeed {
        self.seed
    }

    /// `(train, holdout, reference)` sizes for `n` rows: the test share is
    /// `ceil(f * n)`, halved with the extra row going to the holdout.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize, usize)> {
        // The epsilon keeps products like 0.2 * 100 from rounding up past an integer.
        let test = ((self.test_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
        let test = test.min(n);
        let train = n - test;
        let holdout = test.div_ceil(2);
        let reference = test / 2;
        if train == 0 || holdout == 0 || reference == 0 {
            return Err(Error::InvalidArgument(format!(
                "{n} rows cannot be split into non-empty train/holdout/reference \
                 partitions at test fraction {}",
                self.test_fraction
            )));
        }
        Ok((train, holdout, reference))
    }
}

pub struct Split {
    pub train: DataTable,
    pub holdout: DataTable,
    pub reference: DataTable,
}

/// Seeded permutation split into disjoint train, holdout and reference
/// partitions that together cover `data`.
pub fn split_real(data: &DataTable, spec: &SplitSpec) -> Result<Split> {
    let n = data.n_rows();
    let (n_train, n_holdout, _) = spec.sizes(n)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut spec.seed.child("split").rng());
    let (train, rest) = idx.split_at(n_train);
    let (holdout, reference) = rest.split_at(n_holdout);
    Ok(Split {
        train: data.select(train)?,
        holdout: data.select(holdout)?,
        reference: data.select(reference)?,
    })
}

/// Order-sensitive digest of schema and cells.
pub fn fingerprint(data: &DataTable) -> u64 {
    let mut hasher = Sha256::new();
    for col in data.schema().columns() {
        hasher.update((col.name.len() as u64).to_le_bytes());
        hasher.update(col.name.as_bytes());
        hasher.update([col.kind as u8]);
    }
    for row in data.rows() {
        hasher.update([0xff]);
        hasher.update(DataTable::row_key(row));
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_be_bytes(bytes)
}

pub fn fingerprint_hex(data: &DataTable) -> String {
    format!("{:016x}", fingerprint(data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<DataTable> {
        read_table_from(text.as_bytes(), None)
    }

    #[test]
    fn reads_numeric_table() {
        let t = parse("a,b\n1,2\n3,4.5\n-1,1e3\n").unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (3, 2));
        assert!(t.schema().is_all_numeric());
        assert_eq!(t.row(2)[1], Value::Num(1000.0));
    }

    #[test]
    fn infers_categorical() {
        let t = parse("a\n1\n2\nx\n").unwrap();
        let col = &t.schema().columns()[0];
        assert_eq!(col.kind, ColumnKind::Categorical);
        assert_eq!(col.categories.as_deref().unwrap(), ["1", "2", "x"]);
        // Non-finite tokens do not count as numbers.
        let t = parse("a\n1\ninf\n").unwrap();
        assert_eq!(t.schema().columns()[0].kind, ColumnKind::Categorical);
    }

    #[test]
    fn missing_value_names_coordinates() {
        let text = "id,age\n1,30\n2,31\n3,32\n4,33\n5,\n";
        match parse(text).unwrap_err() {
            Error::MissingValue { row, column } => {
                assert_eq!(row, 5);
                assert_eq!(column, "age");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_inputs() {
        assert!(parse("").is_err());
        assert!(matches!(parse("a,b\n"), Err(Error::EmptyTable(_))));
    }

    #[test]
    fn quoted_fields() {
        let t = parse("name,v\n\"Smith, J\",1\n\"x\"\"y\",2\n").unwrap();
        assert_eq!(t.row(0)[0], Value::Cat("Smith, J".into()));
        assert_eq!(t.row(1)[0], Value::Cat("x\"y".into()));
    }

    #[test]
    fn schema_guided_read() {
        let schema = TableSchema::new(vec![
            Column::numeric("age"),
            Column::categorical("sex").with_categories(["M", "F"]),
        ])
        .unwrap();
        let t = read_table_from("age,sex\n3,M\n4,F\n".as_bytes(), Some(&schema)).unwrap();
        assert_eq!(t.schema(), &schema);
        let bad = read_table_from("age,sex\nold,M\n".as_bytes(), Some(&schema));
        assert!(matches!(bad, Err(Error::ParseNumeric { row: 1, .. })));
        let unseen = read_table_from("age,sex\n3,X\n".as_bytes(), Some(&schema));
        assert!(matches!(unseen, Err(Error::UnknownCategory { .. })));
        let header = read_table_from("sex,age\nM,3\n".as_bytes(), Some(&schema));
        assert!(matches!(header, Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn split_sizes() {
        let spec = SplitSpec::with_seed(RandomSeed(0));
        assert_eq!(spec.sizes(100).unwrap(), (80, 10, 10));
        assert_eq!(spec.sizes(101).unwrap(), (80, 11, 10));
        assert!(spec.sizes(5).is_err());
        let half = SplitSpec::new(0.5, RandomSeed(0)).unwrap();
        assert_eq!(half.sizes(100).unwrap(), (50, 25, 25));
        assert!(SplitSpec::new(0.0, RandomSeed(0)).is_err());
        assert!(SplitSpec::new(1.0, RandomSeed(0)).is_err());
    }

    #[test]
    fn split_size_accounting_is_exhaustive() {
        // Independent integer accounting: test = ceil(f n) via integer math for f = p/q.
        for (p, q) in [(1u64, 5u64), (1, 2), (1, 10), (3, 10), (1, 3)] {
            let f = p as f64 / q as f64;
            let spec = SplitSpec::new(f, RandomSeed(0)).unwrap();
            for n in 1..400u64 {
                let test = (p * n).div_ceil(q);
                let expect = (n - test, test.div_ceil(2), test / 2);
                match spec.sizes(n as usize) {
                    Ok((a, b, c)) => {
                        assert_eq!((a as u64, b as u64, c as u64), expect, "n={n} f={f}");
                        assert!(b.abs_diff(c) <= 1);
                    }
                    Err(_) => assert!(expect.0 == 0 || expect.1 == 0 || expect.2 == 0),
                }
            }
        }
    }

    #[test]
    fn split_partitions_cover_rows() {
        let data = DataTable::from_numeric_rows((0..101).map(|i| vec![i as f64]).collect()).unwrap();
        let s = split_real(&data, &SplitSpec::with_seed(RandomSeed(5))).unwrap();
        let mut all: Vec<i64> = [&s.train, &s.holdout, &s.reference]
            .iter()
            .flat_map(|t| t.rows().iter().map(|r| r[0].as_num().unwrap() as i64))
            .collect();
        assert_eq!((s.train.n_rows(), s.holdout.n_rows(), s.reference.n_rows()), (80, 11, 10));
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());

        let again = split_real(&data, &SplitSpec::with_seed(RandomSeed(5))).unwrap();
        assert_eq!(again.train, s.train);
    }

    #[test]
    fn fingerprint_properties() {
        let t = parse("a,b\n1,x\n2,y\n").unwrap();
        assert_eq!(fingerprint(&t), fingerprint(&t.clone()));
        let swapped = t.select(&[1, 0]).unwrap();
        assert_ne!(fingerprint(&t), fingerprint(&swapped));
    }

    #[test]
    fn fingerprint_single_cell_changes_do_not_collide() {
        let base: Vec<Vec<f64>> = (0..5).map(|i| (0..4).map(|j| (i * 4 + j) as f64).collect()).collect();
        let mut seen = std::collections::HashSet::new();
        seen.insert(fingerprint(&DataTable::from_numeric_rows(base.clone()).unwrap()));
        for k in 0..100 {
            let mut rows = base.clone();
            rows[k % 5][(k / 5) % 4] += 0.5 + (k / 20) as f64;
            assert!(seen.insert(fingerprint(&DataTable::from_numeric_rows(rows).unwrap())));
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![vec![0.1 + 0.2, 1.0 / 3.0, -2.5e-300], vec![std::f64::consts::PI, 1e300, 0.0]];
        let t = DataTable::from_numeric_rows(rows).unwrap();
        let mut buf = Vec::new();
        write_table_to(&mut buf, &t).unwrap();
        let back = read_table_from(buf.as_slice(), Some(t.schema())).unwrap();
        assert_eq!(back, t);
    }
}
