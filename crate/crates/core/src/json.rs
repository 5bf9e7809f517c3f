//! JSON encoding of complex matrices as nested `[re, im]` pairs.

use crate::error::{Result, TbsfError};
use crate::linalg::{c, CMatrix};
use serde::{Deserialize, Serialize};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &ComplexRows) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(TbsfError::InvalidInput("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

/// A square operator (density matrix, observable, effect) in JSON form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub matrix: ComplexRows,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            dim: m.nrows(),
            matrix: matrix_to_rows(m),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let m = rows_to_matrix(&self.matrix)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(TbsfError::DimensionMismatch(format!(
                "declared dim {} but matrix is {}x{}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

/// `#[serde(with = "complex_rows")]` for matrix fields.
pub mod complex_rows {
    use super::{matrix_to_rows, rows_to_matrix, ComplexRows};
    use crate::linalg::CMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = ComplexRows::deserialize(d)?;
        rows_to_matrix(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 1.0]]];
        assert!(rows_to_matrix(&rows).is_err());
    }

    #[test]
    fn matrix_json_checks_dim() {
        let m = crate::linalg::identity(2);
        let mut j = MatrixJson::from_matrix(&m);
        assert_eq!(j.to_matrix().unwrap(), m);
        j.dim = 3;
        assert!(j.to_matrix().is_err());
    }
}
