use nalgebra::{DMatrix, SymmetricEigen};

use super::DiffractionOperator;
use crate::error::{Error, Result};
use crate::linalg::{dot, SymTridiag};

/// Leading eigenpairs of the generalized problem `Kw = λMw`.
///
/// Eigenvectors are stored as full nodal fields (Dirichlet entries zero),
/// normalized so that `(wᵢ, wⱼ)_H = δᵢⱼ`, and signed so that their first
/// non-negligible entry is positive. Indices are zero-based: `vector(0)` is
/// the principal mode.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    mass: SymTridiag,
}

impl EigenBasis {
    pub(super) fn compute(op: &DiffractionOperator, n: usize) -> Result<Self> {
        let m = op.free_count();
        if n > m {
            return Err(Error::TooManyModes { requested: n, available: m });
        }
        let factor = op.free_mass().cholesky()?;
        let k = op.free_stiffness();

        // C = L⁻¹ K L⁻ᵀ, built column by column from the bidiagonal factor.
        let mut x = DMatrix::<f64>::zeros(m, m);
        let mut col = vec![0.0; m];
        for j in 0..m {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = k.diag()[j];
            if j > 0 {
                col[j - 1] = k.off()[j - 1];
            }
            if j + 1 < m {
                col[j + 1] = k.off()[j];
            }
            factor.forward_in_place(&mut col);
            x.column_mut(j).copy_from_slice(&col);
        }
        // X = L⁻¹K, so C = L⁻¹Xᵀ
        let mut c = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            for i in 0..m {
                col[i] = x[(j, i)];
            }
            factor.forward_in_place(&mut col);
            c.column_mut(j).copy_from_slice(&col);
        }
        let c = (&c + c.transpose()) * 0.5;

        let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut eigenvalues = Vec::with_capacity(n);
        let mut vectors = Vec::with_capacity(n);
        for &idx in order.iter().take(n) {
            let mut w: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            factor.backward_in_place(&mut w);
            let scale = w.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if let Some(first) = w.iter().find(|v| v.abs() > 1e-8 * scale) {
                if *first < 0.0 {
                    w.iter_mut().for_each(|v| *v = -*v);
                }
            }
            eigenvalues.push(eig.eigenvalues[idx]);
            vectors.push(op.embed_free(&w));
        }
        if let Some(&l1) = eigenvalues.first() {
            if !(l1 > 0.0) {
                return Err(Error::Eigensolver(format!("non-positive leading eigenvalue {l1}")));
            }
        }
        Ok(Self { eigenvalues, vectors, mass: op.mass().clone() })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn node_count(&self) -> usize {
        self.mass.len()
    }

    fn check_modes(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::TooManyModes { requested: n, available: self.len() });
        }
        Ok(())
    }

    /// Coefficients `(u, wⱼ)_H` for `j < n`.
    pub fn project(&self, u: &[f64], n: usize) -> Result<Vec<f64>> {
        self.check_modes(n)?;
        if u.len() != self.node_count() {
            return Err(Error::DimensionMismatch { expected: self.node_count(), actual: u.len() });
        }
        let mu = self.mass.matvec(u);
        Ok(self.coefficients_of(&mu, n))
    }

    /// Coefficients from a precomputed full-node `M u`.
    pub(crate) fn coefficients_of(&self, mass_times_u: &[f64], n: usize) -> Vec<f64> {
        self.vectors[..n].iter().map(|w| dot(w, mass_times_u)).collect()
    }

    /// `∑ cⱼ wⱼ` over the supplied coefficients.
    pub fn reconstruct(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_modes(coeffs.len())?;
        let mut u = vec![0.0; self.node_count()];
        self.reconstruct_into(coeffs, &mut u);
        Ok(u)
    }

    pub(crate) fn reconstruct_into(&self, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, w) in coeffs.iter().zip(&self.vectors) {
            if *c != 0.0 {
                for (o, wi) in out.iter_mut().zip(w) {
                    *o += c * wi;
                }
            }
        }
    }

    /// `P_n u`.
    pub fn project_field(&self, u: &[f64], n: usize) -> Result<Vec<f64>> {
        let c = self.project(u, n)?;
        self.reconstruct(&c)
    }

    /// `Q_n u = u − P_n u`.
    pub fn complement(&self, u: &[f64], n: usize) -> Result<Vec<f64>> {
        let p = self.project_field(u, n)?;
        Ok(u.iter().zip(&p).map(|(a, b)| a - b).collect())
    }
}
