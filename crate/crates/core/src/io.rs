//! JSON matrix files and deterministic JSON output.
//!
//! A matrix file is `{"dim": N, "data": [[re, im], ...]}` with the `N^2`
//! entries in row-major order. Every float written by this module uses 17
//! significant digits, so output round-trips bit-exactly and identical inputs
//! give byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::linops::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            data: m.to_row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let expected = self.dim.checked_mul(self.dim).ok_or_else(|| Error::Parse("dim too large".into()))?;
        if self.data.len() != expected {
            return Err(Error::Parse(format!(
                "data has {} entries, dim {} needs {expected}",
                self.data.len(),
                self.dim
            )));
        }
        let entries: Vec<Complex64> = self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::from_row_major(self.dim, &entries)
    }
}

/// Compact JSON formatter printing floats with 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` with [`ExactFloatFormatter`], followed by a newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file.to_matrix()
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String> {
    to_json_string(&MatrixFile::from_matrix(m))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    write_text(path, &matrix_to_json(m)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = ComplexMatrix::from_row_major(
            2,
            &[
                Complex64::new(0.1, -1.0 / 3.0),
                Complex64::new(std::f64::consts::PI, 0.0),
                Complex64::new(-2.5e-300, 1e300),
                Complex64::new(0.0, -0.0),
            ],
        )
        .unwrap();
        let text = matrix_to_json(&m).unwrap();
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back.to_row_major(), m.to_row_major());
        assert_eq!(matrix_to_json(&back).unwrap(), text);
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_json_string(&[0.1f64]).unwrap();
        assert_eq!(text, "[1.0000000000000001e-1]\n");
    }

    #[test]
    fn rejects_bad_files() {
        assert_eq!(parse_matrix("{\"dim\": 2, \"data\": [[1, 0]]}").unwrap_err().kind(), "ParseError");
        assert_eq!(parse_matrix("{\"dim\": 1, \"data\": [[1, 0]").unwrap_err().kind(), "ParseError");
        assert_eq!(parse_matrix("{\"dim\": 0, \"data\": []}").unwrap_err().kind(), "ParseError");
        assert_eq!(
            parse_matrix("{\"dim\": 1, \"data\": [[1, 0]], \"extra\": 1}").unwrap_err().kind(),
            "ParseError"
        );
        let m = parse_matrix("{\"dim\": 1, \"data\": [[0.5, 0]]}").unwrap();
        assert_eq!(m.get(0, 0), Complex64::new(0.5, 0.0));
    }
}
