use std::io::Read;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{Error, Result};
use crate::problems::Dataset;

fn numeric(record: &StringRecord) -> Option<Vec<f64>> {
    record
        .iter()
        .map(|cell| cell.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect()
}

fn csv_error(row: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        row,
        message: message.into(),
    }
}

/// Reads a rectangular numeric CSV, taking `label_column` (zero-based) as the
/// labels and the remaining columns, in order, as features. A first row with
/// any non-numeric cell is treated as a header.
pub fn parse_dense_csv<R: Read>(reader: R, label_column: usize) -> Result<Dataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(reader);

    let mut width = None;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(k + 1, |p| p.line() as usize);
            csv_error(row, e.to_string())
        })?;
        let row = record.position().map_or(k + 1, |p| p.line() as usize);
        let Some(values) = numeric(&record) else {
            if k == 0 {
                continue;
            }
            let (col, cell) = record
                .iter()
                .enumerate()
                .find(|(_, c)| c.parse::<f64>().map_or(true, |v| !v.is_finite()))
                .expect("a non-numeric cell exists");
            return Err(csv_error(
                row,
                format!("column {}: `{cell}` is not a number", col + 1),
            ));
        };
        let expected = *width.get_or_insert(values.len());
        if values.len() != expected {
            return Err(csv_error(
                row,
                format!("expected {expected} fields, found {}", values.len()),
            ));
        }
        if label_column >= expected {
            return Err(Error::InvalidParameter(format!(
                "label column {label_column} out of range for {expected} columns"
            )));
        }
        for (j, v) in values.into_iter().enumerate() {
            if j == label_column {
                labels.push(v);
            } else {
                features.push(v);
            }
        }
    }
    let dim = width.ok_or(Error::EmptyInput)? - 1;
    Dataset::from_flat(features, labels, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_first() {
        let data = parse_dense_csv("1,2,3\n4,5,6".as_bytes(), 0).unwrap();
        assert_eq!(data.labels(), &[1.0, 4.0]);
        assert_eq!(data.row(0), &[2.0, 3.0]);
        assert_eq!(data.row(1), &[5.0, 6.0]);
    }

    #[test]
    fn label_last_with_header() {
        let data = parse_dense_csv("a,b,c\n1,2,3\n4,5,6\n".as_bytes(), 2).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.labels(), &[3.0, 6.0]);
        assert_eq!(data.row(1), &[4.0, 5.0]);
    }

    #[test]
    fn ragged_row_reports_its_number() {
        match parse_dense_csv("1,2,3\n4,5,6\n7,8\n".as_bytes(), 0) {
            Err(Error::Csv { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_body_cell() {
        match parse_dense_csv("x,y\n1,2\n3,oops\n".as_bytes(), 0) {
            Err(Error::Csv { row, message }) => {
                assert_eq!(row, 3);
                assert!(message.contains("oops"));
            }
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn header_only_or_empty() {
        assert!(matches!(
            parse_dense_csv("a,b\n".as_bytes(), 0),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            parse_dense_csv("".as_bytes(), 0),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn label_column_out_of_range() {
        assert!(parse_dense_csv("1,2\n".as_bytes(), 2).is_err());
    }
}
