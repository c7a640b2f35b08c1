//! Audits of the a priori estimates and the numerical studies built on the solvers.

mod admissibility;
mod convergence;
mod dependence;
mod energy;
mod flux;
mod regularization;

pub use admissibility::{admissibility_audit, lipschitz_audit, AdmissibilityAudit, LipschitzAudit};
pub use convergence::{galerkin_convergence, mesh_convergence, non_increasing_with_slack, GalerkinRow, MeshRow};
pub use dependence::{dependence_check, perturbation_pairs, DependenceReport, DependenceSample, RATIO_ROUNDING};
pub use energy::{energy_bounds, EnergyReport};
pub use flux::flux_jump;
pub use regularization::{
    interface_second_difference, regularization_study, RegularizationRow, RegularizationStudy, MIN_ELEMENTS_PER_RAMP,
};

/// Observed convergence order `log₂(e_coarse / e_fine)` for successive halvings.
pub fn observed_orders(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0].abs() / w[1].abs()).log2()).collect()
}
