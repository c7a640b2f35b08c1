use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::operators::{DiffractionOperator, DiffusionField, EigenBasis};
use crate::reactions::ReactionTerm;
use crate::solvers::{fem_solve, galerkin_solve, SolveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GalerkinRow {
    pub modes: usize,
    /// Relative final-time H-error against the nodal reference.
    pub error: f64,
}

/// Final-time error of the Galerkin solution for each mode count, measured
/// against the method-of-lines reference on the same mesh and time step.
pub fn galerkin_convergence(
    op: &DiffractionOperator,
    basis: &EigenBasis,
    term: &ReactionTerm,
    config: &SolveConfig,
    mode_counts: &[usize],
) -> Result<Vec<GalerkinRow>> {
    if mode_counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("mode counts must be strictly ascending".into()));
    }
    let reference = fem_solve(op, term, config)?;
    mode_counts
        .iter()
        .map(|&modes| {
            let cfg = SolveConfig { modes, ..config.clone() };
            let tr = galerkin_solve(basis, op, term, &cfg)?;
            Ok(GalerkinRow {
                modes,
                error: crate::solvers::relative_h_error(op, tr.final_state(), reference.final_state()),
            })
        })
        .collect()
}

/// True when each error is at most `1 + slack` times its predecessor.
pub fn non_increasing_with_slack(errors: &[f64], slack: f64) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) || w[1] <= 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshRow {
    pub elements: usize,
    pub spacing: f64,
    /// Relative final-time H-error against the finest mesh, measured on this mesh's nodes.
    pub error: f64,
    /// `log₂` of the error ratio to the previous (coarser) row.
    pub order: Option<f64>,
}

/// Mesh-refinement study of the nodal solver: `levels + 1` nested meshes,
/// each compared against the finest.
pub fn mesh_convergence(
    coarse: &Mesh,
    diffusion: &DiffusionField,
    term: &ReactionTerm,
    config: &SolveConfig,
    levels: usize,
) -> Result<Vec<MeshRow>> {
    if levels == 0 {
        return Err(Error::InvalidConfig("need at least one refinement level".into()));
    }
    if !matches!(config.initial, crate::solvers::InitialCondition::Zero) {
        return Err(Error::InvalidConfig("mesh study requires a mesh-independent (zero) initial condition".into()));
    }
    let mut meshes = vec![coarse.clone()];
    for _ in 0..levels {
        let next = meshes.last().unwrap().refine();
        meshes.push(next);
    }
    let mut finals = Vec::with_capacity(meshes.len());
    let mut ops = Vec::with_capacity(meshes.len());
    for mesh in &meshes {
        let op = DiffractionOperator::assemble(mesh, diffusion)?;
        finals.push(fem_solve(&op, term, config)?.final_state().to_vec());
        ops.push(op);
    }
    let finest = finals.last().unwrap();
    let mut rows: Vec<MeshRow> = Vec::new();
    for (level, (op, u)) in ops.iter().zip(&finals).enumerate().take(levels) {
        let stride = 1 << (levels - level);
        let restricted: Vec<f64> = finest.iter().step_by(stride).copied().collect();
        let error = crate::solvers::relative_h_error(op, u, &restricted);
        let order = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(MeshRow { elements: op.mesh().element_count(), spacing: op.mesh().max_spacing(), error, order });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_rule() {
        assert!(non_increasing_with_slack(&[1.0, 0.5, 0.54, 0.1], 0.1));
        assert!(!non_increasing_with_slack(&[1.0, 0.5, 0.6], 0.1));
        assert!(non_increasing_with_slack(&[1e-13, 2e-13], 0.1));
    }
}
