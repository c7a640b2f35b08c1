use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::operators::{DiffractionOperator, DiffusionField};
use crate::reactions::ReactionTerm;
use crate::solvers::{FemIntegrator, SolveConfig};

/// Minimum number of elements required across the narrowest ramp.
pub const MIN_ELEMENTS_PER_RAMP: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizationRow {
    pub width: f64,
    /// `(∫₀ᵀ ‖u_ε − u‖²_H dt)^½` against the sharp-interface solution.
    pub discrepancy: f64,
    /// Largest nodal second difference near the interface over all times.
    pub regularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationStudy {
    pub rows: Vec<RegularizationRow>,
    /// Regularity monitor of the sharp-interface solution itself.
    pub sharp_regularity: f64,
}

impl RegularizationStudy {
    pub fn discrepancy_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy)
    }

    pub fn regularity_non_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].regularity >= w[0].regularity)
    }
}

/// Second difference at the interface node and its two neighbours,
/// with the non-uniform three-point stencil.
pub fn interface_second_difference(mesh: &Mesh, u: &[f64]) -> f64 {
    let x = mesh.nodes();
    let k = mesh.interface_index();
    let lo = k.saturating_sub(1).max(1);
    let hi = (k + 1).min(x.len() - 2);
    (lo..=hi)
        .map(|i| {
            let hl = x[i] - x[i - 1];
            let hr = x[i + 1] - x[i];
            (2.0 * ((u[i + 1] - u[i]) / hr - (u[i] - u[i - 1]) / hl) / (hl + hr)).abs()
        })
        .fold(0.0, f64::max)
}

/// Replaces the jump by smoothstep ramps of decreasing width and compares the
/// regularized solutions against the sharp one on a common fixed mesh.
pub fn regularization_study(
    mesh: &Mesh,
    diffusion: &DiffusionField,
    term: &ReactionTerm,
    config: &SolveConfig,
    widths: &[f64],
) -> Result<RegularizationStudy> {
    if widths.is_empty() || widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidConfig("widths must be positive".into()));
    }
    if widths.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig("widths must be strictly descending".into()));
    }
    let narrowest = *widths.last().unwrap();
    let per_ramp = narrowest / mesh.max_spacing();
    if per_ramp < MIN_ELEMENTS_PER_RAMP {
        return Err(Error::InvalidMesh(format!(
            "mesh too coarse: {per_ramp:.2} elements across the narrowest ramp (need {MIN_ELEMENTS_PER_RAMP})"
        )));
    }

    let sharp = DiffractionOperator::assemble(mesh, &diffusion.sharp())?;
    let mut smoothed = Vec::with_capacity(widths.len());
    for &w in widths {
        let field = DiffusionField::regularized(diffusion.b1(), diffusion.b2(), w)?;
        smoothed.push(DiffractionOperator::assemble(mesh, &field)?);
    }
    let u0 = config.initial.resolve(&sharp, None)?;
    let mut reference = FemIntegrator::new(&sharp, term, u0.clone())?;
    let mut runs = smoothed.iter().map(|op| FemIntegrator::new(op, term, u0.clone())).collect::<Result<Vec<_>>>()?;

    let mut discrepancy_sq = vec![0.0; widths.len()];
    let mut regularity = vec![0.0_f64; widths.len()];
    let mut sharp_regularity = 0.0_f64;
    let steps = config.step_sizes();
    for step in 0..=steps.len() {
        let u = reference.state();
        sharp_regularity = sharp_regularity.max(interface_second_difference(mesh, u));
        for (i, run) in runs.iter().enumerate() {
            regularity[i] = regularity[i].max(interface_second_difference(mesh, run.state()));
            if step < steps.len() {
                let d: Vec<f64> = run.state().iter().zip(u).map(|(a, b)| a - b).collect();
                discrepancy_sq[i] += steps[step] * sharp.mass().quad(&d, &d);
            }
        }
        if step == steps.len() {
            break;
        }
        reference.step(steps[step])?;
        for run in runs.iter_mut() {
            run.step(steps[step])?;
        }
    }

    let rows = widths
        .iter()
        .zip(discrepancy_sq)
        .zip(regularity)
        .map(|((&width, d2), regularity)| RegularizationRow { width, discrepancy: d2.max(0.0).sqrt(), regularity })
        .collect();
    Ok(RegularizationStudy { rows, sharp_regularity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CoreShellGeometry;

    #[test]
    fn equal_coefficients_give_zero_discrepancy() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let mesh = Mesh::with_elements(&g, 128).unwrap();
        let term = ReactionTerm::michaelis_menten(1.0, 0.5, 1.0).unwrap();
        let study = regularization_study(
            &mesh,
            &DiffusionField::new(2.0, 2.0).unwrap(),
            &term,
            &SolveConfig::new(0.1, 0.01, 1),
            &[0.2, 0.1],
        )
        .unwrap();
        assert!(study.rows.iter().all(|r| r.discrepancy == 0.0));
    }

    #[test]
    fn rejects_coarse_mesh_and_bad_widths() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let mesh = Mesh::with_elements(&g, 16).unwrap();
        let b = DiffusionField::new(4.0, 1.0).unwrap();
        let term = ReactionTerm::zero();
        let cfg = SolveConfig::new(0.1, 0.01, 1);
        assert!(matches!(regularization_study(&mesh, &b, &term, &cfg, &[0.2, 0.1]), Err(Error::InvalidMesh(_))));
        assert!(regularization_study(&mesh, &b, &term, &cfg, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn second_difference_of_kink() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let mesh = Mesh::with_elements(&g, 10).unwrap();
        let u: Vec<f64> = mesh.nodes().iter().map(|&x| (x - 0.5).abs()).collect();
        // slope jump 2 over (h + h)/2
        assert!((interface_second_difference(&mesh, &u) - 2.0 / 0.1).abs() < 1e-9);
    }
}
