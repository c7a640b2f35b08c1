//! The diffraction operator `A` on an interface-aligned mesh.
//!
//! With piecewise-linear elements the bilinear form `a(u, v) = ∫ b u′ v′ w dr`
//! and the `L²` inner product `(u, v) = ∫ u v w dr` (with `w = r^(N-1)`)
//! become a pair of symmetric tridiagonal matrices `K` and `M`. The discrete
//! strong operator is `Au = M⁻¹Ku` on the free (non-Dirichlet) nodes.
//!
//! All matrices are kept over the full node set; the free-node blocks are
//! extracted once at assembly. Nodal fields passed in are full-length
//! vectors whose Dirichlet entries are expected to be zero.

mod basis;
mod diffusion;

pub use basis::EigenBasis;
pub use diffusion::DiffusionField;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::linalg::{Cholesky, SymTridiag};

/// Three-point Gauss-Legendre rule on `[-1, 1]`.
const GAUSS3: [(f64, f64); 3] =
    [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];

fn gauss3(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GAUSS3.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `‖u‖_H`, the weighted L² norm.
    H,
    /// `‖u‖_V = (‖u‖²_H + ‖∇u‖²_H)^½`.
    V,
    /// Gradient seminorm `‖∇u‖_H` (unit diffusivity).
    VSemi,
    /// `‖Au‖_H`, the graph norm of the discrete strong operator.
    DA,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(Self::H),
            "v" => Ok(Self::V),
            "v_semi" | "vsemi" => Ok(Self::VSemi),
            "da" => Ok(Self::DA),
            other => Err(Error::InvalidConfig(format!("unknown norm kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiffractionOperator {
    mesh: Mesh,
    diffusion: DiffusionField,
    stiffness: SymTridiag,
    gradient: SymTridiag,
    mass: SymTridiag,
    free_stiffness: SymTridiag,
    free_mass: SymTridiag,
    mass_factor: Cholesky,
}

/// `∫ₐᵇ b(r) r^p dr`, exact for constant `b` and for the smoothstep ramp.
fn weighted_diffusivity(diffusion: &DiffusionField, interface: f64, p: i32, a: f64, b: f64) -> f64 {
    let weight = |r: f64| r.powi(p);
    match diffusion.ramp(interface) {
        Some((lo, hi)) if b > lo && a < hi => {
            // split at the ramp ends so each piece is polynomial (degree ≤ 5)
            let mut cuts = vec![a];
            for c in [lo, hi] {
                if c > a && c < b {
                    cuts.push(c);
                }
            }
            cuts.push(b);
            cuts.windows(2).map(|w| gauss3(w[0], w[1], |r| diffusion.value(r, interface) * weight(r))).sum()
        }
        _ => {
            let side = diffusion.value(0.5 * (a + b), interface);
            side * (b.powi(p + 1) - a.powi(p + 1)) / (p + 1) as f64
        }
    }
}

impl DiffractionOperator {
    pub fn assemble(mesh: &Mesh, diffusion: &DiffusionField) -> Result<Self> {
        let geometry = mesh.geometry();
        if mesh.nodes()[mesh.interface_index()] != geometry.interface() {
            return Err(Error::InvalidMesh("interface node missing".into()));
        }
        let n = mesh.node_count();
        let p = mesh.weight_exponent() as i32;
        let unit = DiffusionField::uniform(1.0)?;

        let mut stiffness = SymTridiag::zeros(n);
        let mut gradient = SymTridiag::zeros(n);
        let mut mass = SymTridiag::zeros(n);
        for e in 0..mesh.element_count() {
            let (a, b) = mesh.element(e);
            let h = b - a;
            let k = weighted_diffusivity(diffusion, geometry.interface(), p, a, b) / (h * h);
            stiffness.add_block(e, k, -k, k);
            let g = weighted_diffusivity(&unit, geometry.interface(), p, a, b) / (h * h);
            gradient.add_block(e, g, -g, g);

            let phi_a = |r: f64| (b - r) / h;
            let phi_b = |r: f64| (r - a) / h;
            let w = |r: f64| r.powi(p);
            let maa = gauss3(a, b, |r| phi_a(r) * phi_a(r) * w(r));
            let mab = gauss3(a, b, |r| phi_a(r) * phi_b(r) * w(r));
            let mbb = gauss3(a, b, |r| phi_b(r) * phi_b(r) * w(r));
            mass.add_block(e, maa, mab, mbb);
        }

        let free = mesh.free_range();
        let free_stiffness = stiffness.restrict(free.clone());
        let free_mass = mass.restrict(free);
        let mass_factor = free_mass.cholesky()?;
        Ok(Self {
            mesh: mesh.clone(),
            diffusion: *diffusion,
            stiffness,
            gradient,
            mass,
            free_stiffness,
            free_mass,
            mass_factor,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn diffusion(&self) -> &DiffusionField {
        &self.diffusion
    }

    /// Full-node stiffness matrix realizing `a(·,·)`.
    pub fn stiffness(&self) -> &SymTridiag {
        &self.stiffness
    }

    /// Full-node stiffness with unit diffusivity (gradient seminorm).
    pub fn gradient_stiffness(&self) -> &SymTridiag {
        &self.gradient
    }

    /// Full-node mass matrix realizing `(·,·)_H`.
    pub fn mass(&self) -> &SymTridiag {
        &self.mass
    }

    pub fn free_stiffness(&self) -> &SymTridiag {
        &self.free_stiffness
    }

    pub fn free_mass(&self) -> &SymTridiag {
        &self.free_mass
    }

    pub fn node_count(&self) -> usize {
        self.mesh.node_count()
    }

    pub fn free_count(&self) -> usize {
        self.mesh.free_count()
    }

    pub(crate) fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.node_count() {
            return Err(Error::DimensionMismatch { expected: self.node_count(), actual: u.len() });
        }
        Ok(())
    }

    /// Nodal field with Dirichlet entries forced to zero.
    pub fn field(&self, mut values: Vec<f64>) -> Result<Vec<f64>> {
        self.check(&values)?;
        self.mesh.pin_dirichlet(&mut values);
        Ok(values)
    }

    /// Nodal field sampled from a function of position.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut u: Vec<f64> = self.mesh.nodes().iter().map(|&x| f(x)).collect();
        self.mesh.pin_dirichlet(&mut u);
        u
    }

    /// `a(u, v) = uᵀKv`.
    pub fn bilinear_form(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.stiffness.quad(u, v))
    }

    /// `(u, v)_H = uᵀMv`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mass.quad(u, v))
    }

    pub fn norm(&self, u: &[f64], kind: NormKind) -> Result<f64> {
        self.check(u)?;
        Ok(match kind {
            NormKind::H => self.mass.quad(u, u).max(0.0).sqrt(),
            NormKind::VSemi => self.gradient.quad(u, u).max(0.0).sqrt(),
            NormKind::V => (self.mass.quad(u, u) + self.gradient.quad(u, u)).max(0.0).sqrt(),
            NormKind::DA => {
                let au = self.apply_a(u)?;
                self.mass.quad(&au, &au).max(0.0).sqrt()
            }
        })
    }

    fn free_part(&self, full: &[f64]) -> Vec<f64> {
        full[self.mesh.free_range()].to_vec()
    }

    fn embed(&self, free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.node_count()];
        full[self.mesh.free_range()].copy_from_slice(free);
        full
    }

    /// Free rows of `M r`: the load vector of a nodal field against the test functions.
    pub fn load(&self, r: &[f64]) -> Result<Vec<f64>> {
        self.check(r)?;
        Ok(self.free_part(&self.mass.matvec(r)))
    }

    /// Discrete strong operator `Au = M⁻¹Ku` on the free space.
    pub fn apply_a(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let ku = self.free_part(&self.stiffness.matvec(u));
        Ok(self.embed(&self.mass_factor.solve(&ku)))
    }

    /// H-orthogonal projection of an arbitrary nodal field onto the free space.
    pub fn project_free(&self, r: &[f64]) -> Result<Vec<f64>> {
        let load = self.load(r)?;
        Ok(self.embed(&self.mass_factor.solve(&load)))
    }

    /// H-norm of the Riesz representative of a free-row dual vector, `(Rᵀ M⁻¹ R)^½`.
    pub fn dual_norm(&self, residual: &[f64]) -> Result<f64> {
        if residual.len() != self.free_count() {
            return Err(Error::DimensionMismatch { expected: self.free_count(), actual: residual.len() });
        }
        let mut y = residual.to_vec();
        self.mass_factor.forward_in_place(&mut y);
        Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Solves `Au = rhs`, i.e. `K u = M rhs` on the free nodes.
    pub fn solve_elliptic(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let load = self.load(rhs)?;
        Ok(self.embed(&self.free_stiffness.solve(&load)?))
    }

    /// Solves `K u = load` for a free-row load vector.
    pub fn solve_stiffness(&self, load: &[f64]) -> Result<Vec<f64>> {
        if load.len() != self.free_count() {
            return Err(Error::DimensionMismatch { expected: self.free_count(), actual: load.len() });
        }
        Ok(self.embed(&self.free_stiffness.solve(load)?))
    }

    pub(crate) fn embed_free(&self, free: &[f64]) -> Vec<f64> {
        self.embed(free)
    }

    /// First `n` eigenpairs of `Kw = λMw`, ascending and mass-orthonormal.
    pub fn eigenbasis(&self, n: usize) -> Result<EigenBasis> {
        EigenBasis::compute(self, n)
    }

    pub fn full_eigenbasis(&self) -> Result<EigenBasis> {
        EigenBasis::compute(self, self.free_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CoreShellGeometry;

    fn interval_op(b1: f64, b2: f64, spacing: f64) -> DiffractionOperator {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let mesh = Mesh::build(&g, spacing).unwrap();
        DiffractionOperator::assemble(&mesh, &DiffusionField::new(b1, b2).unwrap()).unwrap()
    }

    #[test]
    fn hand_assembled_rows() {
        // b ≡ 1, h = 1/3 needs an interface on a node: use Γ = 1/3.
        let g = CoreShellGeometry::interval(1.0 / 3.0, 1.0).unwrap();
        let mesh = Mesh::build(&g, 1.0 / 3.0).unwrap();
        assert_eq!(mesh.element_count(), 3);
        let op = DiffractionOperator::assemble(&mesh, &DiffusionField::uniform(1.0).unwrap()).unwrap();
        let k = op.stiffness();
        let m = op.mass();
        assert!((k.get(1, 0) + 3.0).abs() < 1e-12);
        assert!((k.get(1, 1) - 6.0).abs() < 1e-12);
        assert!((k.get(1, 2) + 3.0).abs() < 1e-12);
        assert!((m.get(1, 0) - 1.0 / 18.0).abs() < 1e-15);
        assert!((m.get(1, 1) - 4.0 / 18.0).abs() < 1e-15);
        assert!((m.get(1, 2) - 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn interface_row_sees_both_diffusivities() {
        let op = interval_op(2.0, 1.0, 0.125);
        let h = 0.125;
        let k = op.mesh().interface_index();
        assert!((op.stiffness().get(k, k) - (2.0 / h + 1.0 / h)).abs() < 1e-12);
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        for op in [interval_op(4.0, 1.0, 0.05), {
            let g = CoreShellGeometry::radial(3, 0.5, 1.0).unwrap();
            let mesh = Mesh::build(&g, 0.05).unwrap();
            DiffractionOperator::assemble(&mesh, &DiffusionField::regularized(4.0, 1.0, 0.2).unwrap()).unwrap()
        }] {
            let ones = vec![1.0; op.node_count()];
            for r in op.stiffness().matvec(&ones) {
                assert!(r.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn radial_mass_integrates_weight() {
        let g = CoreShellGeometry::radial(3, 0.5, 1.0).unwrap();
        let mesh = Mesh::build(&g, 0.1).unwrap();
        let op = DiffractionOperator::assemble(&mesh, &DiffusionField::uniform(1.0).unwrap()).unwrap();
        let ones = vec![1.0; op.node_count()];
        // ∫₀¹ r² dr
        assert!((op.mass().quad(&ones, &ones) - 1.0 / 3.0).abs() < 1e-14);
        // ∫₀¹ r · r² dr with the interpolant of r (exact: linear)
        let r: Vec<f64> = mesh.nodes().to_vec();
        assert!((op.mass().quad(&r, &ones) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn poisson_solution() {
        let op = interval_op(1.0, 1.0, 1.0 / 64.0);
        let rhs = vec![1.0; op.node_count()];
        let u = op.solve_elliptic(&rhs).unwrap();
        for (x, v) in op.mesh().nodes().iter().zip(&u) {
            assert!((v - x * (1.0 - x) / 2.0).abs() < 1e-4);
        }
        let mid = op.mesh().interface_index();
        assert!((u[mid] - 0.125).abs() < 1e-4);
    }

    #[test]
    fn elliptic_inverts_strong_operator() {
        let op = interval_op(4.0, 1.0, 0.05);
        let u = op.interpolate(|x| x * (1.0 - x) * (1.0 + x));
        let au = op.apply_a(&u).unwrap();
        let back = op.solve_elliptic(&au).unwrap();
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn norms_of_zero_and_dimension_errors() {
        let op = interval_op(4.0, 1.0, 0.1);
        let z = vec![0.0; op.node_count()];
        for k in [NormKind::H, NormKind::V, NormKind::VSemi, NormKind::DA] {
            assert_eq!(op.norm(&z, k).unwrap(), 0.0);
        }
        assert_eq!(op.bilinear_form(&z, &z).unwrap(), 0.0);
        assert!(matches!(op.bilinear_form(&z[1..], &z), Err(Error::DimensionMismatch { .. })));
        assert!("bogus".parse::<NormKind>().is_err());
        assert_eq!("v_semi".parse::<NormKind>().unwrap(), NormKind::VSemi);
    }
}
