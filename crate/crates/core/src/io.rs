//! On-disk formats. Rows and columns are 1-based here.
//!
//! Matrix text: a header line `m n`, then `m` lines of `n` integers. Lines
//! starting with `#` and blank lines are ignored.
//!
//! Segmentation JSON:
//! `{"rows": m, "cols": n, "segments": [{"value": v, "rows": [{"row": i, "l": a, "r": b}]}]}`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{IntensityMatrix, SegmentMatrix, Segmentation, MAX_CELL_VALUE};

pub fn parse_matrix(text: &str) -> Result<IntensityMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing 'm n' header".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [m, n] = dims[..] else {
        return Err(parse_err(hline, format!("expected 'm n', got '{header}'")));
    };
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(hline, format!("bad dimension '{s}'")))
    };
    let (rows, cols) = (dim(m)?, dim(n)?);

    let mut cells = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 20));
    let mut seen = 0;
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        if seen == rows {
            return Err(parse_err(lineno, format!("more than {rows} matrix rows")));
        }
        let before = cells.len();
        for tok in line.split_whitespace() {
            let v: u64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("'{tok}' is not a non-negative integer")))?;
            if v > MAX_CELL_VALUE {
                return Err(parse_err(
                    lineno,
                    format!("value {v} exceeds the maximum {MAX_CELL_VALUE}"),
                ));
            }
            cells.push(v);
        }
        if cells.len() - before != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} values, found {}", cells.len() - before),
            ));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(
            last_line,
            format!("expected {rows} matrix rows, found {seen}"),
        ));
    }
    IntensityMatrix::new(rows, cols, cells)
}

pub fn format_matrix(matrix: &IntensityMatrix) -> String {
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols());
    for row in matrix.row_iter() {
        let line: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct RowRecord {
    row: usize,
    l: usize,
    r: usize,
}

#[derive(Serialize, Deserialize)]
struct SegmentRecord {
    value: u64,
    rows: Vec<RowRecord>,
}

#[derive(Serialize, Deserialize)]
struct SegmentationRecord {
    rows: usize,
    cols: usize,
    segments: Vec<SegmentRecord>,
}

pub fn segmentation_to_json(seg: &Segmentation) -> String {
    let (rows, cols) = seg.dims();
    let record = SegmentationRecord {
        rows,
        cols,
        segments: seg
            .segments()
            .iter()
            .map(|s| SegmentRecord {
                value: s.value(),
                rows: s
                    .intervals()
                    .iter()
                    .map(|(&row, &(l, r))| RowRecord {
                        row: row + 1,
                        l: l + 1,
                        r: r + 1,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn segmentation_from_json(text: &str) -> Result<Segmentation> {
    let record: SegmentationRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let one_based = |x: usize, what: &str| {
        x.checked_sub(1)
            .ok_or_else(|| Error::InvalidSegment(format!("{what} indices start at 1")))
    };
    let segments = record
        .segments
        .into_iter()
        .map(|s| {
            let intervals: BTreeMap<usize, (usize, usize)> = s
                .rows
                .iter()
                .map(|r| {
                    let row = one_based(r.row, "row")?;
                    Ok((row, (one_based(r.l, "column")?, one_based(r.r, "column")?)))
                })
                .collect::<Result<_>>()?;
            if intervals.len() != s.rows.len() {
                return Err(Error::InvalidSegment(
                    "a row appears twice in one segment".into(),
                ));
            }
            SegmentMatrix::new(s.value, intervals)
        })
        .collect::<Result<Vec<_>>>()?;
    Segmentation::new(record.rows, record.cols, segments)
}

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &Path) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

/// Writes a file, or standard output for `-`.
pub fn write_output(path: &Path, text: &str) -> std::io::Result<()> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()
    } else {
        fs::write(path, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let text = "# comment\n2 3\n1 0 2\n\n# another\n0 4 5\n";
        let t = parse_matrix(text).unwrap();
        assert_eq!(t.row(1), &[0, 4, 5]);
        assert_eq!(parse_matrix(&format_matrix(&t)).unwrap(), t);
    }

    #[test]
    fn matrix_errors_carry_lines() {
        let cases = [
            ("", 1),
            ("2 2\n1 1\n", 2),
            ("1 2\n1 x\n", 2),
            ("1 2\n1 2 3\n", 2),
            ("1 1\n4294967297\n", 2),
            ("1 1\n-1\n", 2),
            ("1 1\n1\n1\n", 3),
        ];
        for (text, line) in cases {
            match parse_matrix(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse_matrix("1 1\n4294967296\n").is_ok());
    }

    #[test]
    fn segmentation_round_trip() {
        let seg = Segmentation::new(
            2,
            3,
            vec![
                SegmentMatrix::new(2, [(0, (0, 1)), (1, (2, 2))].into_iter().collect()).unwrap(),
                SegmentMatrix::single(1, 0, 0, 1).unwrap(),
            ],
        )
        .unwrap();
        let text = segmentation_to_json(&seg);
        assert!(text.contains("\"l\": 1"));
        assert_eq!(segmentation_from_json(&text).unwrap(), seg);
        let empty = Segmentation::empty(3, 3);
        assert_eq!(
            segmentation_from_json(&segmentation_to_json(&empty)).unwrap(),
            empty
        );
    }

    #[test]
    fn segmentation_rejects_bad_indices() {
        let zero_row =
            r#"{"rows":1,"cols":1,"segments":[{"value":1,"rows":[{"row":0,"l":1,"r":1}]}]}"#;
        assert!(segmentation_from_json(zero_row).is_err());
        let outside =
            r#"{"rows":1,"cols":1,"segments":[{"value":1,"rows":[{"row":1,"l":1,"r":2}]}]}"#;
        assert!(segmentation_from_json(outside).is_err());
        assert!(matches!(
            segmentation_from_json("{"),
            Err(Error::Parse { .. })
        ));
    }
}
