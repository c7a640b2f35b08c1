use serde::Serialize;

use crate::error::Result;
use crate::operators::DiffractionOperator;
use crate::reactions::ReactionTerm;
use crate::solvers::Trajectory;

/// Margins of the a priori estimates along one trajectory. A margin is
/// "bound minus observed quantity", so negative values are violations.
///
/// Time integrals follow the IMEX step structure: the dissipation
/// `∫‖∇u‖²` is summed at the implicitly treated (new) time level of each
/// step, the forcing `∫‖P f(u)‖²` at the explicitly treated (old) level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    /// Certified admissibility constant `K`.
    pub admissibility: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub t_final: f64,
    /// `γ = K T + ½‖u(0)‖²_H`.
    pub gamma: f64,
    pub times: Vec<f64>,
    /// `K t + ½‖u₀‖² − ½‖u(t)‖² − b_min ∫₀ᵗ‖∇u‖²` at each sample.
    pub weak_margins: Vec<f64>,
    /// Running `∫₀ᵗ ‖∇u‖²_H`.
    pub dissipation_integral: Vec<f64>,
    /// Running `∫₀ᵗ ‖P f(u)‖²_H`.
    pub forcing_integral: Vec<f64>,
    pub worst_weak_margin: f64,
    /// `2γ − sup_t ‖u(t)‖²_H`.
    pub sup_margin: f64,
    /// `γ / b_min − ∫₀ᵀ ‖∇u‖²_H`.
    pub integral_margin: f64,
    /// `a(u₀, u₀) + ∫₀ᵀ ‖P f(u)‖² − a(u(T), u(T))`.
    pub strong_margin: f64,
    /// `∫₀ᵀ ‖P f(u)‖² − (b_min ‖∇u(T)‖² − b_max ‖∇u₀‖²)`.
    pub strong_seminorm_margin: f64,
    /// `min_t (K − (u(t), f(u(t)))_H)`.
    pub admissibility_margin: f64,
    /// First-order scheme slack `C·dt` with `C = ½ ∫₀ᵀ ‖P f(u)‖²`.
    pub tolerance: f64,
    pub pass: bool,
}

impl EnergyReport {
    pub fn compute(trajectory: &Trajectory, term: &ReactionTerm, op: &DiffractionOperator) -> Result<Self> {
        let k = term.certify_admissibility(op.mesh().geometry())?;
        Ok(Self::with_admissibility(trajectory, k, op))
    }

    pub fn with_admissibility(trajectory: &Trajectory, admissibility: f64, op: &DiffractionOperator) -> Self {
        let b_min = op.diffusion().b_min();
        let b_max = op.diffusion().b_max();
        let records = &trajectory.records;
        let times = &trajectory.times;
        let first = records[0];
        let last = *trajectory.final_record();
        let t_final = trajectory.t_final();
        let half_h0 = 0.5 * first.h_norm_sq;
        let gamma = admissibility * t_final + half_h0;

        let mut dissipation = Vec::with_capacity(records.len());
        let mut forcing = Vec::with_capacity(records.len());
        let mut weak = Vec::with_capacity(records.len());
        let (mut diss, mut forc) = (0.0, 0.0);
        for (i, r) in records.iter().enumerate() {
            if i > 0 {
                let dt = times[i] - times[i - 1];
                diss += dt * r.grad_norm_sq;
                forc += dt * records[i - 1].forcing_norm_sq;
            }
            dissipation.push(diss);
            forcing.push(forc);
            weak.push((half_h0 - 0.5 * r.h_norm_sq - b_min * diss) + admissibility * times[i]);
        }

        let worst_weak_margin = weak.iter().copied().fold(f64::INFINITY, f64::min);
        let sup_h = records.iter().map(|r| r.h_norm_sq).fold(0.0, f64::max);
        let sup_margin = 2.0 * gamma - sup_h;
        let integral_margin = gamma / b_min - diss;
        let strong_margin = (first.energy - last.energy) + forc;
        let strong_seminorm_margin = forc - (b_min * last.grad_norm_sq - b_max * first.grad_norm_sq);
        let admissibility_margin = records.iter().map(|r| admissibility - r.u_f_inner).fold(f64::INFINITY, f64::min);

        let tolerance = trajectory.dt * 0.5 * forc;
        let pass = worst_weak_margin >= -tolerance
            && sup_margin >= -2.0 * tolerance
            && integral_margin >= -tolerance / b_min
            && strong_margin >= -tolerance
            && strong_seminorm_margin >= -tolerance
            && admissibility_margin >= 0.0;

        Self {
            admissibility,
            b_min,
            b_max,
            t_final,
            gamma,
            times: times.clone(),
            weak_margins: weak,
            dissipation_integral: dissipation,
            forcing_integral: forcing,
            worst_weak_margin,
            sup_margin,
            integral_margin,
            strong_margin,
            strong_seminorm_margin,
            admissibility_margin,
            tolerance,
            pass,
        }
    }
}

/// `γ = K T + ½‖u₀‖²_H` together with the sup and integral bounds it implies.
pub fn energy_bounds(admissibility: f64, t_final: f64, h_norm_sq0: f64, b_min: f64) -> (f64, f64, f64) {
    let gamma = admissibility * t_final + 0.5 * h_norm_sq0;
    (gamma, 2.0 * gamma, gamma / b_min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_arithmetic() {
        let (g, sup, int) = energy_bounds(2.0, 1.0, 1.0, 0.5);
        assert_eq!(g, 2.5);
        assert_eq!(sup, 5.0);
        assert_eq!(int, 5.0);
    }
}
