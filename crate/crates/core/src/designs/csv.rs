//! Headerless CSV design files: one run per line, comma-separated entries in
//! {-1, 0, 1}. Center runs are stored as explicit rows of zeros.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use super::conference::{validate_conference, ConferenceDesign};
use crate::error::{Error, Result};

/// Parses CSV text into a three-level design matrix.
pub fn parse_design(text: &str) -> Result<Array2<i8>> {
    let mut rows: Vec<Vec<i8>> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|token| {
                let token = token.trim();
                let value: i64 = token.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("token {token:?} is not an integer"),
                })?;
                if !(-1..=1).contains(&value) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("entry {value} is not in {{-1, 0, 1}}"),
                    });
                }
                Ok(value as i8)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let Some(width) = rows.first().map(Vec::len) else {
        return Err(Error::Parse { line: 0, message: "no runs".into() });
    };
    let height = rows.len();
    let flat: Vec<i8> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((height, width), flat).expect("rows have equal length"))
}

pub fn format_design(design: ArrayView2<'_, i8>) -> String {
    let mut out = String::with_capacity(design.len() * 3);
    for row in design.rows() {
        let line: Vec<String> = row.iter().map(i8::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn load_design_csv(path: impl AsRef<Path>) -> Result<Array2<i8>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_design(&text)
}

/// Loads a conference design and checks every conference-design invariant.
pub fn load_conference_csv(path: impl AsRef<Path>) -> Result<ConferenceDesign> {
    validate_conference(load_design_csv(path)?)
}

pub fn save_csv(design: ArrayView2<'_, i8>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io { path: path.into(), source };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(format_design(design).as_bytes()).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::paley_conference;

    #[test]
    fn round_trip_paley() {
        let c = paley_conference(5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c6.csv");
        save_csv(c.entries(), &path).unwrap();
        assert_eq!(load_conference_csv(&path).unwrap(), c);
    }

    #[test]
    fn out_of_domain_token() {
        let err = parse_design("1,0,-1\n1,2,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn non_integer_and_ragged() {
        assert!(matches!(parse_design("1,x,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_design("1,0,1\n1,1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_design("\n\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn tolerates_whitespace_and_trailing_blank_lines() {
        let d = parse_design(" 1, -1 ,0\n0,0,0\n\n").unwrap();
        assert_eq!(d.dim(), (2, 3));
        assert_eq!(d[[0, 1]], -1);
    }
}
