//! Banded linear algebra for the piecewise-linear discretization.
//!
//! Everything assembled on a 1D mesh with linear elements is tridiagonal, so
//! the only kernels needed are a symmetric tridiagonal matrix type, its
//! Cholesky factor (lower bidiagonal) and a Thomas solve for the general
//! (non-symmetric) tridiagonal Jacobians that appear in Newton's method.

use std::ops::Range;

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    /// Panics if `off.len() + 1 != diag.len()` (for non-empty matrices).
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len(), diag.len().saturating_sub(1), "off-diagonal must have one entry less than the diagonal");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `off()[i]` is the entry at `(i, i + 1)` (and `(i + 1, i)`).
    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Adds a symmetric 2x2 element block `[[a, b], [b, c]]` at rows/cols `i, i+1`.
    pub fn add_block(&mut self, i: usize, a: f64, b: f64, c: f64) {
        self.diag[i] += a;
        self.diag[i + 1] += c;
        self.off[i] += b;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// `xᵀ A y`.
    pub fn quad(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for i in 0..n {
            let mut row = self.diag[i] * y[i];
            if i > 0 {
                row += self.off[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                row += self.off[i] * y[i + 1];
            }
            s += x[i] * row;
        }
        s
    }

    /// Principal submatrix on a contiguous index range.
    pub fn restrict(&self, range: Range<usize>) -> Self {
        let diag = self.diag[range.clone()].to_vec();
        let off = if range.len() > 1 { self.off[range.start..range.end - 1].to_vec() } else { Vec::new() };
        Self { diag, off }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + s * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { diag: self.diag.iter().map(|a| s * a).collect(), off: self.off.iter().map(|a| s * a).collect() }
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.len();
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut d = self.diag[i];
            if i > 0 {
                d -= sub[i - 1] * sub[i - 1];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: i, value: d });
            }
            diag[i] = d.sqrt();
            if i + 1 < n {
                sub[i] = self.off[i] / diag[i];
            }
        }
        Ok(Cholesky { diag, sub })
    }

    /// Direct solve through the Thomas algorithm (no pivoting).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        solve_tridiagonal(&self.off, &self.diag, &self.off, rhs)
    }
}

/// Lower bidiagonal Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl Cholesky {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Solves `L x = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        for i in 0..self.len() {
            if i > 0 {
                b[i] -= self.sub[i - 1] * b[i - 1];
            }
            b[i] /= self.diag[i];
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn backward_in_place(&self, b: &mut [f64]) {
        for i in (0..self.len()).rev() {
            if i + 1 < self.len() {
                b[i] -= self.sub[i] * b[i + 1];
            }
            b[i] /= self.diag[i];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }
}

/// Thomas algorithm for `lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: rhs.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Singular { pivot: 0 });
    }
    if n > 1 {
        c[0] = upper[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Singular { pivot: i });
        }
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag::from_parts(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn solve_matches_matvec() {
        let a = laplacian(7);
        let x: Vec<f64> = (0..7).map(|i| (i as f64).sin() + 0.3).collect();
        let b = a.matvec(&x);
        let y = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
        let z = a.cholesky().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&z) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SymTridiag::from_parts(vec![1.0, 1.0], vec![2.0]);
        assert!(matches!(a.cholesky(), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }

    #[test]
    fn restrict_and_quad() {
        let a = laplacian(5);
        let r = a.restrict(1..4);
        assert_eq!(r.diag(), &[2.0, 2.0, 2.0]);
        assert_eq!(r.off(), &[-1.0, -1.0]);
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(a.quad(&x, &x), dot(&x, &a.matvec(&x)));
        assert_eq!(a.get(2, 3), -1.0);
        assert_eq!(a.get(0, 3), 0.0);
    }

    #[test]
    fn singular_system_reported() {
        let err = solve_tridiagonal(&[1.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::Singular { pivot: 0 });
    }
}
