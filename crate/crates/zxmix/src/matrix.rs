//! Dense complex matrices and the scalar-aware equality used by the
//! soundness checks.

use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("shape mismatch: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(usize, usize, usize, usize),
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// 1×1 matrix holding a scalar.
    pub fn scalar(z: C64) -> Self {
        Self { rows: 1, cols: 1, data: vec![z] }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize { self.rows }

    pub fn cols(&self) -> usize { self.cols }

    pub fn entries(&self) -> &[C64] { &self.data }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::ShapeMismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if !self.same_shape(rhs) {
            return Err(MatrixError::ShapeMismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * z).collect() }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖∞` over entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other), "max_abs_diff on mismatched shapes");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.same_shape(other) && self.max_abs_diff(other) <= tol
    }

    /// Deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, "  ")?;
                }
                let z = self[(i, j)];
                write!(f, "{}", format_c64(z, prec))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Format a complex number with `prec` significant digits, dropping
/// negligible parts.
pub fn format_c64(z: C64, prec: usize) -> String {
    let fmt1 = |x: f64| format!("{:.*}", prec, x);
    if z.im.abs() < 10f64.powi(-(prec as i32 + 3)) {
        fmt1(z.re)
    } else if z.re.abs() < 10f64.powi(-(prec as i32 + 3)) {
        format!("{}i", fmt1(z.im))
    } else if z.im < 0.0 {
        format!("{}{}i", fmt1(z.re), fmt1(z.im))
    } else {
        format!("{}+{}i", fmt1(z.re), fmt1(z.im))
    }
}

/// Kronecker product; the left factor supplies the high-order index bits.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = z * b[(k, l)];
                }
            }
        }
    }
    out
}

/// How strictly two matrices must agree.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ScalarPolicy {
    /// Entrywise within tolerance.
    Exact,
    /// Within tolerance after fitting a nonzero scalar λ to the right side.
    UpToScalar,
}

/// Compare under a policy, returning the fitted scalar on success
/// (`1` for exact matches and for the all-zero case).
pub fn scalar_compare(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    policy: ScalarPolicy,
    tol: f64,
) -> Result<Option<C64>, MatrixError> {
    if !a.same_shape(b) {
        return Err(MatrixError::ShapeMismatch(a.rows(), a.cols(), b.rows(), b.cols()));
    }
    match policy {
        ScalarPolicy::Exact => {
            Ok((a.max_abs_diff(b) <= tol).then_some(C64::new(1.0, 0.0)))
        }
        ScalarPolicy::UpToScalar => {
            // λ fitted from the largest-magnitude entry of b
            let k = (0..b.entries().len())
                .max_by(|&i, &j| {
                    b.entries()[i].norm().partial_cmp(&b.entries()[j].norm()).unwrap()
                });
            let Some(k) = k else {
                return Ok(Some(C64::new(1.0, 0.0))); // empty matrices
            };
            if b.entries()[k].norm() <= tol {
                // b ≈ 0: equal iff a ≈ 0 too
                return Ok((a.max_abs() <= tol).then_some(C64::new(1.0, 0.0)));
            }
            let lambda = a.entries()[k] / b.entries()[k];
            if lambda.norm() <= tol {
                return Ok(None);
            }
            Ok((a.max_abs_diff(&b.scale(lambda)) <= tol).then_some(lambda))
        }
    }
}

/// `true` if `a` equals `b` under the policy within `tol`.
pub fn scalar_equal(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    policy: ScalarPolicy,
    tol: f64,
) -> Result<bool, MatrixError> {
    Ok(scalar_compare(a, b, policy, tol)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 { C64::new(re, im) }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        // scalar absorption
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 2.0)]]);
        let s = ComplexMatrix::scalar(c(0.0, 1.0));
        assert_eq!(kron(&a, &s), a.scale(c(0.0, 1.0)));
        assert_eq!(kron(&s, &a), a.scale(c(0.0, 1.0)));
    }

    #[test]
    fn kron_block_layout() {
        // kron(H, I₂)|00⟩ = |+0⟩: first column is (1,0,1,0)/√2
        let h = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
        ])
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let hi = kron(&h, &ComplexMatrix::identity(2));
        let col0: Vec<C64> = (0..4).map(|i| hi[(i, 0)]).collect();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((col0[0] - c(r, 0.0)).norm() < 1e-15);
        assert!(col0[1].norm() < 1e-15);
        assert!((col0[2] - c(r, 0.0)).norm() < 1e-15);
        assert!(col0[3].norm() < 1e-15);
    }

    #[test]
    fn scalar_compare_policies() {
        let i2 = ComplexMatrix::identity(2);
        let scaled = i2.scale(c(0.0, std::f64::consts::SQRT_2));
        assert_eq!(
            scalar_compare(&i2, &i2, ScalarPolicy::Exact, 1e-12).unwrap(),
            Some(c(1.0, 0.0)),
        );
        assert_eq!(scalar_compare(&scaled, &i2, ScalarPolicy::Exact, 1e-12).unwrap(), None);
        let lam = scalar_compare(&scaled, &i2, ScalarPolicy::UpToScalar, 1e-12)
            .unwrap()
            .unwrap();
        assert!((lam - c(0.0, std::f64::consts::SQRT_2)).norm() < 1e-12);
        // not proportional
        let zmat = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ]);
        assert!(!scalar_equal(&i2, &zmat, ScalarPolicy::UpToScalar, 1e-12).unwrap());
    }

    #[test]
    fn zero_matrices_compare_equal_up_to_scalar() {
        let z = ComplexMatrix::zeros(2, 2);
        assert!(scalar_equal(&z, &z, ScalarPolicy::UpToScalar, 1e-12).unwrap());
        assert!(!scalar_equal(&ComplexMatrix::identity(2), &z, ScalarPolicy::UpToScalar, 1e-12).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(scalar_equal(&a, &b, ScalarPolicy::Exact, 1e-12).is_err());
    }
}
