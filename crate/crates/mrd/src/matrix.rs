//! Dense matrices of exact rationals.
//!
//! Everything downstream of series construction lives in matrix land:
//! lower-triangular array blocks, production matrices, transit matrices
//! between arrays, and minor extraction for positivity certificates. All
//! arithmetic here is exact; determinants use Gaussian elimination over the
//! rationals, never floating point.
//!
//! The interchange form (used by the CLI's JSON output and accepted back as
//! input) is `{"rows": R, "cols": C, "entries": [[..row 0..], ..]}` with
//! each entry in the canonical `"p"`/`"p/q"` text form.

use crate::rational::{rat_from_str, rat_to_string, Rational};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch { left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },

    /// Forward substitution hit a zero diagonal entry.
    #[error("matrix is not invertible as a triangular system: zero diagonal at row {row}")]
    NotTriangularInvertible { row: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    // row-major, rows * cols entries
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrices have at least one row and column");
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = RationalMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.entry_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty(), "matrices have at least one row and column");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nrows = rows.len();
        RationalMatrix { rows: nrows, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.entry(k, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, MatrixError> {
        if self.cols != v.len() {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.len(),
                right_cols: 1,
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_entrywise_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    /// First strictly negative entry in row-major order, if any.
    pub fn first_negative_entry(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| x.is_negative())
            .map(|p| (p / self.cols, p % self.cols))
    }

    /// Solve `self * X = B` by forward substitution, treating `self` as
    /// lower triangular (entries above the diagonal are ignored). Fails on a
    /// zero diagonal entry.
    pub fn solve_lower_triangular(&self, b: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        if self.rows != self.cols || self.rows != b.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let n = self.rows;
        let mut x = RationalMatrix::zeros(n, b.cols);
        for j in 0..b.cols {
            for i in 0..n {
                let diag = self.entry(i, i);
                if diag.is_zero() {
                    return Err(MatrixError::NotTriangularInvertible { row: i });
                }
                let mut acc = b.entry(i, j).clone();
                for k in 0..i {
                    let a = self.entry(i, k);
                    if !a.is_zero() {
                        acc -= a * x.entry(k, j);
                    }
                }
                *x.entry_mut(i, j) = acc / diag;
            }
        }
        Ok(x)
    }

    /// Exact determinant by Gaussian elimination with rational pivots.
    /// Square matrices only.
    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m: Vec<Vec<Rational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !m[r][col].is_zero()) {
                Some(r) => r,
                None => return Rational::zero(),
            };
            if pivot_row != col {
                m.swap(pivot_row, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] / &pivot;
                let (upper, lower) = m.split_at_mut(r);
                for (cell, basis) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *cell -= &factor * basis;
                }
            }
        }
        det
    }

    /// Submatrix selected by explicit row and column indices (in the given
    /// order, so repeated or permuted selections are representable).
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> RationalMatrix {
        RationalMatrix::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self.entry(row_idx[i], col_idx[j]).clone()
        })
    }

    /// Minor: determinant of the selected square submatrix.
    pub fn minor(&self, row_idx: &[usize], col_idx: &[usize]) -> Rational {
        assert_eq!(row_idx.len(), col_idx.len(), "minors are square");
        self.select(row_idx, col_idx).det()
    }

    /// Leading principal block of the given size.
    pub fn leading_block(&self, rows: usize, cols: usize) -> RationalMatrix {
        assert!(rows <= self.rows && cols <= self.cols);
        RationalMatrix::from_fn(rows, cols, |i, j| self.entry(i, j).clone())
    }

    /// Drop the first `k` rows.
    pub fn without_leading_rows(&self, k: usize) -> RationalMatrix {
        assert!(k < self.rows, "cannot drop every row");
        RationalMatrix::from_fn(self.rows - k, self.cols, |i, j| self.entry(i + k, j).clone())
    }

    /// Column-aligned plain text, one row per line.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(rat_to_string).collect())
            .collect();
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(1))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> =
                row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(line.join(" ").trim_end());
            out.push('\n');
        }
        out
    }

    /// One row per line, comma separated, canonical rational entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(rat_to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().map(rat_to_string).collect())
            .collect();
        MatrixWire { rows: self.rows, cols: self.cols, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.rows {
            return Err(D::Error::custom(format!(
                "matrix declares {} rows but carries {}",
                wire.rows,
                wire.entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(wire.rows);
        for (i, row) in wire.entries.iter().enumerate() {
            if row.len() != wire.cols {
                return Err(D::Error::custom(format!(
                    "matrix declares {} cols but row {} carries {}",
                    wire.cols,
                    i,
                    row.len()
                )));
            }
            let parsed: Result<Vec<Rational>, String> = row.iter().map(|s| rat_from_str(s)).collect();
            rows.push(parsed.map_err(D::Error::custom)?);
        }
        Ok(RationalMatrix::from_rows(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(a.mul(&RationalMatrix::identity(2)).unwrap(), a);
        assert_eq!(RationalMatrix::identity(3).mul(&a).unwrap(), a);
    }

    #[test]
    fn multiplication_matches_hand_product() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let b = RationalMatrix::from_i64_rows(&[&[5, 6], &[7, 8]]);
        assert_eq!(a.mul(&b).unwrap(), RationalMatrix::from_i64_rows(&[&[19, 22], &[43, 50]]));
        assert!(matches!(
            a.mul(&RationalMatrix::identity(3)),
            Err(MatrixError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn forward_substitution_round_trips() {
        let l = RationalMatrix::from_i64_rows(&[&[2, 0, 0], &[1, 3, 0], &[4, -1, 5]]);
        let b = RationalMatrix::from_i64_rows(&[&[2, 4], &[7, -1], &[3, 0]]);
        let x = l.solve_lower_triangular(&b).unwrap();
        assert_eq!(l.mul(&x).unwrap(), b);
    }

    #[test]
    fn forward_substitution_reports_zero_diagonal() {
        let l = RationalMatrix::from_i64_rows(&[&[1, 0], &[2, 0]]);
        let b = RationalMatrix::identity(2);
        assert_eq!(
            l.solve_lower_triangular(&b),
            Err(MatrixError::NotTriangularInvertible { row: 1 })
        );
    }

    #[test]
    fn determinants_are_exact() {
        assert_eq!(RationalMatrix::identity(4).det(), rat_int(1));
        let a = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.det(), rat_int(-2));
        // needs a row swap to find a pivot
        let b = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(b.det(), rat_int(-1));
        let singular = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(singular.det(), rat_int(0));
        // Vandermonde on 1, 1/2, 1/3:
        // det = (1/2 - 1)(1/3 - 1)(1/3 - 1/2) = -1/18
        let v = RationalMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(1), rat_int(1)],
            vec![rat_int(1), rat(1, 2), rat(1, 4)],
            vec![rat_int(1), rat(1, 3), rat(1, 9)],
        ]);
        assert_eq!(v.det(), rat(-1, 18));
    }

    #[test]
    fn minors_select_arbitrary_rows_and_columns() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(a.minor(&[0, 2], &[1, 2]), rat_int(2 * 10 - 3 * 8));
        assert_eq!(a.minor(&[0], &[0]), rat_int(1));
        assert_eq!(a.det(), rat_int(-3));
    }

    #[test]
    fn negativity_scan_reports_row_major_first() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, -2], &[-1, 0]]);
        assert!(!a.is_entrywise_nonnegative());
        assert_eq!(a.first_negative_entry(), Some((1, 1)));
        assert!(RationalMatrix::identity(2).is_entrywise_nonnegative());
    }

    #[test]
    fn block_and_shift_views() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(a.leading_block(2, 2), RationalMatrix::from_i64_rows(&[&[1, 2], &[4, 5]]));
        assert_eq!(
            a.without_leading_rows(1),
            RationalMatrix::from_i64_rows(&[&[4, 5, 6], &[7, 8, 9]])
        );
    }

    #[test]
    fn json_wire_round_trip() {
        let a = RationalMatrix::from_rows(vec![
            vec![rat_int(1), rat(1, 2)],
            vec![rat_int(0), rat(-3, 7)],
        ]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"rows":2,"cols":2,"entries":[["1","1/2"],["0","-3/7"]]}"#);
        let back: RationalMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        // declared dimensions must match the payload
        let bad = r#"{"rows":2,"cols":2,"entries":[["1","2"]]}"#;
        assert!(serde_json::from_str::<RationalMatrix>(bad).is_err());
    }

    #[test]
    fn text_and_csv_forms() {
        let a = RationalMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat(1, 2), rat_int(10)],
        ]);
        assert_eq!(a.to_text(), "  1  0\n1/2 10\n");
        assert_eq!(a.to_csv(), "1,0\n1/2,10\n");
    }
}
