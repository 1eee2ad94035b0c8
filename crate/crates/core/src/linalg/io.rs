//! Matrix JSON files: `{"n": 2, "entries": [[[re, im], ...], ...]}`, row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::{c, CMat, ComplexMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let n = m.nrows();
        let entries = (0..n)
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { n, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.n == 0 {
            return Err(Error::Format("n must be at least 1".into()));
        }
        if self.entries.len() != self.n {
            return Err(Error::Format(format!(
                "expected {} rows, found {}",
                self.n,
                self.entries.len()
            )));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::Format(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.n
                )));
            }
        }
        let m = CMat::from_fn(self.n, self.n, |i, j| {
            let [re, im] = self.entries[i][j];
            c(re, im)
        });
        ComplexMatrix::new(m)
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile = serde_json::from_str(text)?;
    f.to_matrix()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn to_json(m: &CMat) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}

pub fn write_matrix(path: impl AsRef<Path>, m: &CMat) -> Result<()> {
    fs::write(path, to_json(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let text = r#"{"n": 2, "entries": [[[6, 0], [-3, 0]], [[-3, 0], [4, 0.5]]]}"#;
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.matrix()[(1, 1)], c(4.0, 0.5));
        let again = parse_matrix(&to_json(m.matrix())).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_ragged_and_non_square() {
        assert!(parse_matrix(r#"{"n": 2, "entries": [[[1, 0]], [[0, 0], [1, 0]]]}"#).is_err());
        assert!(parse_matrix(r#"{"n": 2, "entries": [[[1, 0], [0, 0]]]}"#).is_err());
        assert!(parse_matrix(r#"{"n": 0, "entries": []}"#).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        // JSON has no NaN literal; huge exponents overflow to infinity
        let r = parse_matrix(r#"{"n": 1, "entries": [[[1e999, 0]]]}"#);
        assert!(r.is_err());
    }
}
