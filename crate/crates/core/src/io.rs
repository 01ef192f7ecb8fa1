//! JSON encodings shared by the CLI and the browser demo.
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as a real
//! value) and matrices are row-major nested arrays. Documents carry a
//! top-level `"schema"` tag.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numlin::{CMatrix, CVector};

pub const SCHEMA: &str = "symcontract/v1";

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Pair([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

pub fn complex_to_json(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_rows(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    a.row_iter().map(|r| r.iter().map(|z| complex_to_json(*z)).collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidInput("matrix rows have different lengths".into()));
    }
    if nrows == 0 || ncols == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let m = CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    if !crate::numlin::is_finite(&m) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(m)
}

/// `#[serde(with = "complex")]` for a single complex scalar.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        complex_to_json(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        Ok(Entry::deserialize(d)?.into())
    }
}

/// `#[serde(with = "complex_vec")]` for a list of complex scalars.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| complex_to_json(*z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}

/// `#[serde(with = "cvector")]` for a coefficient vector.
pub mod cvector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| complex_to_json(*z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        let v: Vec<Complex64> = super::complex_vec::deserialize(d)?;
        Ok(CVector::from_vec(v))
    }
}

/// `#[serde(with = "matrix")]` for a dense matrix.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(a: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(a).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows: Vec<Vec<Entry>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> =
            rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
        rows_to_matrix(&rows).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "opt_matrix")]` for an optional matrix.
pub mod opt_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(a: &Option<CMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        a.as_ref().map(matrix_to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<CMatrix>, D::Error> {
        let rows: Option<Vec<Vec<Entry>>> = Option::deserialize(d)?;
        match rows {
            None => Ok(None),
            Some(rows) => {
                let rows: Vec<Vec<Complex64>> =
                    rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
                rows_to_matrix(&rows).map(Some).map_err(serde::de::Error::custom)
            }
        }
    }
}

/// `#[serde(with = "matrix_vec")]` for a list of matrices.
pub mod matrix_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[CMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(matrix_to_rows).collect::<Vec<_>>().serialize(s)
    }
}

/// A matrix document: either a bare nested array or an object with a
/// `"matrix"` field.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    Bare(#[serde(with = "matrix")] CMatrix),
    Tagged {
        #[serde(with = "matrix")]
        matrix: CMatrix,
    },
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))?;
    Ok(match doc {
        MatrixDoc::Bare(m) | MatrixDoc::Tagged { matrix: m } => m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::c;

    #[test]
    fn matrix_round_trip() {
        let m = crate::numlin::from_rows(2, 2, &[c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.0), c(3.0, 0.25)]);
        let text = serde_json::to_string(&matrix_to_rows(&m)).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), m);
        let tagged = format!("{{\"schema\": \"{SCHEMA}\", \"matrix\": {text}}}");
        assert_eq!(parse_matrix(&tagged).unwrap(), m);
    }

    #[test]
    fn real_entries_are_accepted() {
        let m = parse_matrix("[[0, 1], [0, 0]]").unwrap();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(parse_matrix("[[1, 2], [3]]").is_err());
        assert!(parse_matrix("[]").is_err());
        assert!(parse_matrix("{\"rows\": 1}").is_err());
    }
}
