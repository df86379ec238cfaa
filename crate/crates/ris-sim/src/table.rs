//! Result tables with unit-tagged columns and a provenance footer.
//!
//! CSV: header row `name[unit]`, RFC 4180 quoting, LF line endings, numbers
//! with 9 significant digits, provenance as trailing `#` comment lines.
//! JSON: `{columns, rows, provenance}`. Both renderings are byte-identical
//! across runs of the same (config, seed).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} cells, table has {expected} columns")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("numeric column \"{0}\" is missing a unit tag")]
    MissingUnit(String),
    #[error("table JSON parse error: {0}")]
    Json(String),
}

/// A column with its unit tag (`"1"` for dimensionless numbers, `"-"` for
/// text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Output provenance: enough to re-run the experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, provenance: Provenance) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Rectangularity and unit-tag checks.
    pub fn check(&self) -> Result<(), TableError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(TableError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: self.columns.len(),
                });
            }
        }
        for (c, column) in self.columns.iter().enumerate() {
            let numeric = self.rows.iter().any(|r| matches!(r[c], Cell::Num(_)));
            if numeric && (column.unit.is_empty() || column.unit == "-") {
                return Err(TableError::MissingUnit(column.name.clone()));
            }
        }
        Ok(())
    }

    /// Render as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| csv_quote(&format!("{}[{}]", c.name, c.unit)))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Num(v) => format_sig9(*v),
                    Cell::Text(s) => csv_quote(s),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out.push_str(&format!(
            "# config_sha256={}\n",
            self.provenance.config_sha256
        ));
        out.push_str(&format!("# seed={}\n", self.provenance.seed));
        out.push_str(&format!("# version={}\n", self.provenance.version));
        out
    }

    /// Render as JSON (pretty, stable field order).
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("table serializes");
        out.push('\n');
        out
    }

    /// Parse a table back from its JSON rendering.
    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let table: ResultTable =
            serde_json::from_str(text).map_err(|e| TableError::Json(e.to_string()))?;
        table.check()?;
        Ok(table)
    }
}

/// 9 significant digits in scientific notation.
fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{v:.8e}")
    }
}

/// RFC 4180: quote fields containing comma, quote, or newline; double
/// embedded quotes.
fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
