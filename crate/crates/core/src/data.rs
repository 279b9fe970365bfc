//! Typed tabular data.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Numeric => f.write_str("numeric"),
            ColumnKind::Categorical => f.write_str("categorical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Explicit vocabulary for a categorical column. Its order fixes the
    /// one-hot column order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
            categories: None,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical,
            categories: None,
        }
    }

    pub fn with_categories<I, S>(mut self, categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.categories = Some(categories.into_iter().map(Into::into).collect());
        self
    }
}

/// Ordered, validated column list.
///
/// Serializes as `{"columns":[{"name":..,"kind":..,"categories":[..]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct TableSchema {
    columns: Vec<Column>,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    columns: Vec<Column>,
}

impl TryFrom<RawSchema> for TableSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        TableSchema::new(raw.columns)
    }
}

impl From<TableSchema> for RawSchema {
    fn from(schema: TableSchema) -> Self {
        RawSchema {
            columns: schema.columns,
        }
    }
}

impl TableSchema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidSchema("a schema needs at least one column".into()));
        }
        let mut seen = HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate column name {:?}",
                    col.name
                )));
            }
            if let Some(categories) = &col.categories {
                if col.kind == ColumnKind::Numeric {
                    return Err(Error::InvalidSchema(format!(
                        "numeric column {:?} cannot declare categories",
                        col.name
                    )));
                }
                if categories.is_empty() {
                    return Err(Error::InvalidSchema(format!(
                        "column {:?} declares an empty vocabulary",
                        col.name
                    )));
                }
                let distinct: HashSet<&str> = categories.iter().map(String::as_str).collect();
                if distinct.len() != categories.len() {
                    return Err(Error::InvalidSchema(format!(
                        "column {:?} repeats a category",
                        col.name
                    )));
                }
            }
        }
        Ok(TableSchema { columns })
    }

    /// All-numeric schema with the given column names.
    pub fn numeric<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TableSchema::new(names.into_iter().map(Column::numeric).collect())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Checks that names, kinds and order agree. Vocabularies are not
    /// compared: each table records the categories it has seen.
    pub fn check_compatible(&self, other: &TableSchema) -> Result<()> {
        if self.columns.len() != other.columns.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} columns vs {} columns",
                self.columns.len(),
                other.columns.len()
            )));
        }
        for (i, (a, b)) in self.columns.iter().zip(&other.columns).enumerate() {
            if a.name != b.name {
                return Err(Error::SchemaMismatch(format!(
                    "column {i} is {:?} in one table and {:?} in the other",
                    a.name, b.name
                )));
            }
            if a.kind != b.kind {
                return Err(Error::SchemaMismatch(format!(
                    "column {:?} is {} in one table and {} in the other",
                    a.name, a.kind, b.kind
                )));
            }
        }
        Ok(())
    }

    /// Same columns with all declared vocabularies dropped.
    pub fn without_categories(&self) -> TableSchema {
        TableSchema {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    categories: None,
                    ..c.clone()
                })
                .collect(),
        }
    }

    pub fn is_all_numeric(&self) -> bool {
        self.columns.iter().all(|c| c.kind == ColumnKind::Numeric)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(String),
}

impl Value {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Cat(_) => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            Value::Num(_) => None,
            Value::Cat(s) => Some(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Display for f64 is the shortest string that parses back to the same bits.
            Value::Num(v) => write!(f, "{v}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

/// An immutable `n × d` table conforming to its schema.
#[derive(Clone, Debug, PartialEq)]
pub struct DataTable {
    schema: TableSchema,
    rows: Vec<Vec<Value>>,
}

impl DataTable {
    /// Validates every cell against the schema. Rows are 1-based in errors.
    pub fn new(schema: TableSchema, rows: Vec<Vec<Value>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyTable("input".into()));
        }
        let d = schema.len();
        let vocabularies: Vec<Option<HashSet<&str>>> = schema
            .columns()
            .iter()
            .map(|c| {
                c.categories
                    .as_ref()
                    .map(|cats| cats.iter().map(String::as_str).collect())
            })
            .collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    found: row.len(),
                    expected: d,
                });
            }
            for ((cell, col), vocab) in row.iter().zip(schema.columns()).zip(&vocabularies) {
                match (cell, col.kind) {
                    (Value::Num(v), ColumnKind::Numeric) => {
                        if !v.is_finite() {
                            return Err(Error::ParseNumeric {
                                row: i + 1,
                                column: col.name.clone(),
                                value: v.to_string(),
                            });
                        }
                    }
                    (Value::Cat(s), ColumnKind::Categorical) => {
                        if let Some(vocab) = vocab {
                            if !vocab.contains(s.as_str()) {
                                return Err(Error::UnknownCategory {
                                    row: i + 1,
                                    column: col.name.clone(),
                                    value: s.clone(),
                                });
                            }
                        }
                    }
                    (cell, kind) => {
                        return Err(Error::SchemaMismatch(format!(
                            "row {} column {:?} holds {cell:?} but the column is {kind}",
                            i + 1,
                            col.name
                        )))
                    }
                }
            }
        }
        Ok(DataTable { schema, rows })
    }

    /// All-numeric table with columns `x0..x{d-1}`.
    pub fn from_numeric_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let schema = TableSchema::numeric((0..d).map(|j| format!("x{j}")))?;
        Self::with_numeric_rows(schema, rows)
    }

    pub fn with_numeric_rows(schema: TableSchema, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Value::Num).collect())
            .collect();
        DataTable::new(schema, rows)
    }

    pub fn schema(&self) -> &TableSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    /// Numeric view of the table; `None` if any column is categorical.
    pub fn numeric_rows(&self) -> Option<Vec<Vec<f64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(Value::as_num).collect())
            .collect()
    }

    /// New table with the rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<DataTable> {
        if indices.is_empty() {
            return Err(Error::EmptyTable("selection".into()));
        }
        Ok(DataTable {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        })
    }

    /// Row-wise concatenation; schemas must be compatible. The result keeps
    /// `self`'s schema with declared vocabularies dropped.
    pub fn concat(&self, other: &DataTable) -> Result<DataTable> {
        self.schema.check_compatible(&other.schema)?;
        let schema = if self.schema == other.schema {
            self.schema.clone()
        } else {
            self.schema.without_categories()
        };
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(DataTable { schema, rows })
    }

    /// Stable per-row key, exact on numeric bits.
    pub(crate) fn row_key(row: &[Value]) -> Vec<u8> {
        let mut key = Vec::new();
        for cell in row {
            match cell {
                Value::Num(v) => {
                    key.push(0);
                    key.extend_from_slice(&v.to_bits().to_le_bytes());
                }
                Value::Cat(s) => {
                    key.push(1);
                    key.extend_from_slice(&(s.len() as u64).to_le_bytes());
                    key.extend_from_slice(s.as_bytes());
                }
            }
        }
        key
    }
}
