//! CSV ingestion for real-data runs.

use std::io::Read;
use std::path::Path;

use sparsir_core::{DMatrix, Dataset};

use crate::{CliError, CliResult};

/// A complete numeric table split into response and design.
#[derive(Clone, Debug, PartialEq)]
pub struct IngestedTable {
    /// Design column names in header order (the response column removed).
    pub columns: Vec<String>,
    pub y_column: String,
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    /// Rows dropped because a cell was missing.
    pub rejected_rows: usize,
}

impl IngestedTable {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dataset(&self) -> CliResult<Dataset> {
        Ok(Dataset::from_parts(self.x.clone(), self.y.clone())?)
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.to_ascii_lowercase().as_str(), "" | "na" | "nan")
}

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn ingest_csv(path: &Path, y_column: &str) -> CliResult<IngestedTable> {
    read_table(open(path)?, y_column).map_err(|m| CliError::input(path, m))
}

/// Rows are numbered from 1 at the first data row; the header is line 1.
pub fn read_table<R: Read>(reader: R, y_column: &str) -> Result<IngestedTable, String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> =
        rdr.headers().map_err(|e| format!("cannot read header: {e}"))?.iter().map(|h| h.trim().to_string()).collect();
    let y_idx = header
        .iter()
        .position(|h| h == y_column)
        .ok_or_else(|| format!("response column \"{y_column}\" not found in header"))?;
    if header.len() < 2 {
        return Err("need at least one predictor column besides the response".into());
    }
    let columns: Vec<String> = header.iter().enumerate().filter(|(j, _)| *j != y_idx).map(|(_, h)| h.clone()).collect();

    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut rejected_rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| format!("row {row}: {e}"))?;
        let cells: Vec<&str> = record.iter().map(str::trim).collect();
        if cells.iter().any(|c| is_missing(c)) {
            rejected_rows += 1;
            continue;
        }
        let mut values = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(format!(
                        "row {row} (line {}), column \"{}\": '{cell}' is not a finite number",
                        row + 1,
                        header[j]
                    ))
                }
            }
        }
        y.push(values[y_idx]);
        x.extend(values.iter().enumerate().filter(|(j, _)| *j != y_idx).map(|(_, v)| *v));
    }
    if y.len() < 2 {
        return Err(format!("need at least 2 complete rows, found {} ({rejected_rows} rejected for missing values)", y.len()));
    }
    let x = DMatrix::from_row_slice(y.len(), columns.len(), &x);
    Ok(IngestedTable { columns, y_column: y_column.to_string(), x, y, rejected_rows })
}

/// Headerless square numeric matrix.
pub fn read_matrix_csv(path: &Path) -> CliResult<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, format!("row {}: {e}", r + 1)))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    CliError::input(path, format!("row {}, column {}: '{}' is not a finite number", r + 1, j + 1, c.trim()))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    let p = rows.len();
    if p == 0 || rows.iter().any(|r| r.len() != p) {
        return Err(CliError::input(path, format!("expected a square matrix, got {p} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>())));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_splits() {
        let t = read_table("y,a,b\n1,2,3\n4,5,6\n7,8,9\n".as_bytes(), "y").unwrap();
        assert_eq!((t.n(), t.p()), (3, 2));
        assert_eq!(t.columns, ["a", "b"]);
        assert_eq!(t.y, [1.0, 4.0, 7.0]);
        assert_eq!(t.x[(2, 1)], 9.0);
    }

    #[test]
    fn response_anywhere_in_header() {
        let t = read_table("a,y,b\n1,2,3\n4,5,6\n".as_bytes(), "y").unwrap();
        assert_eq!(t.columns, ["a", "b"]);
        assert_eq!(t.y, [2.0, 5.0]);
        assert_eq!(t.x.row(1).iter().copied().collect::<Vec<_>>(), [4.0, 6.0]);
    }

    #[test]
    fn missing_column_named() {
        let e = read_table("y,a\n1,2\n3,4\n".as_bytes(), "target").unwrap_err();
        assert!(e.contains("\"target\""), "{e}");
    }

    #[test]
    fn bad_cell_cites_row_and_column() {
        let e = read_table("y,a,b\n1,2,3\n4,oops,6\n".as_bytes(), "y").unwrap_err();
        assert!(e.contains("row 2") && e.contains("column \"a\""), "{e}");
    }

    #[test]
    fn missing_values_reject_rows() {
        let t = read_table("y,a\n1,2\n,3\n4,NA\n5,NaN\n6,7\n".as_bytes(), "y").unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.rejected_rows, 3);
        let e = read_table("y,a\n1,2\n,3\n".as_bytes(), "y").unwrap_err();
        assert!(e.contains("at least 2 complete rows"), "{e}");
    }
}
