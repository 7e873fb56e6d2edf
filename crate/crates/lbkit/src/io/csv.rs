//! Comma-separated table writer.

use std::fs;
use std::path::Path;

use crate::Error;

/// Writes a rectangular table: the header line first, then one line per
/// row with values printed to `precision` significant digits (16 when
/// `None`).
pub fn write_csv<P: AsRef<Path>>(
    rows: &[Vec<f64>],
    header: &[&str],
    path: P,
    precision: Option<usize>,
) -> Result<(), Error> {
    let precision = precision.unwrap_or(16).max(1);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::Validation(format!(
                "csv row {i} has {} values for {} columns",
                row.len(),
                header.len()
            )));
        }
    }
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .map(|v| format!("{v:.*e}", precision - 1))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&[vec![50.0, 0.01]], &["N", "err"], &path, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "N,err");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv(&[], &["a", "b"], &path, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n");
    }

    #[test]
    fn parse_back_recovers_values_at_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round.csv");
        let rows = vec![
            vec![1.0 / 3.0, -2.718281828459045e-9],
            vec![6.02214076e23, 0.0],
        ];
        write_csv(&rows, &["x", "y"], &path, Some(16)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        for (line, row) in text.lines().skip(1).zip(&rows) {
            for (cell, expected) in line.split(',').zip(row) {
                let parsed: f64 = cell.parse().unwrap();
                assert!((parsed - expected).abs() <= expected.abs() * 1e-15);
            }
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_csv(&[vec![1.0]], &["a", "b"], dir.path().join("x.csv"), None).is_err());
    }
}
