use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::operators::DiffractionOperator;
use crate::reactions::ReactionTerm;
use crate::solvers::{FemIntegrator, SolveConfig};

/// Relative slack allowed on bound ratios for floating-point rounding.
pub const RATIO_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceSample {
    pub time: f64,
    /// `‖u(t) − v(t)‖_H`
    pub diff_h: f64,
    /// `‖u₀ − v₀‖_H e^{L t}`
    pub bound_h: f64,
    /// `‖u(t) − v(t)‖²_V`
    pub diff_v_sq: f64,
    /// `(b_max / b_min) ‖u₀ − v₀‖²_V exp(L² t / b_min)`
    pub bound_v_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceReport {
    pub lipschitz: f64,
    /// `b₁/b₂` when `b₁ ≥ b₂`, else `b₂/b₁`.
    pub prefactor: f64,
    pub samples: Vec<DependenceSample>,
    pub worst_h_ratio: f64,
    pub worst_v_ratio: f64,
    pub pass: bool,
}

fn ratio(diff: f64, bound: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / bound
    }
}

/// Integrates two initial conditions with the same discretization and checks
/// the H- and V-norm continuous-dependence bounds at every step.
pub fn dependence_check(
    op: &DiffractionOperator,
    term: &ReactionTerm,
    u0: &[f64],
    v0: &[f64],
    config: &SolveConfig,
) -> Result<DependenceReport> {
    let lipschitz = term.certify_lipschitz()?;
    let b = op.diffusion();
    let prefactor = b.b_max() / b.b_min();
    let mut u = FemIntegrator::new(op, term, u0.to_vec())?;
    let mut v = FemIntegrator::new(op, term, v0.to_vec())?;

    let diff = |a: &FemIntegrator, b: &FemIntegrator| -> Vec<f64> {
        a.state().iter().zip(b.state()).map(|(x, y)| x - y).collect()
    };
    let w0 = diff(&u, &v);
    let h0 = op.mass().quad(&w0, &w0).max(0.0).sqrt();
    let v0_sq = op.mass().quad(&w0, &w0) + op.gradient_stiffness().quad(&w0, &w0);

    let steps = config.step_sizes();
    let mut samples = Vec::with_capacity(steps.len() + 1);
    let mut t = 0.0;
    for step in 0..=steps.len() {
        let w = diff(&u, &v);
        let h_sq = op.mass().quad(&w, &w).max(0.0);
        samples.push(DependenceSample {
            time: t,
            diff_h: h_sq.sqrt(),
            bound_h: h0 * (lipschitz * t).exp(),
            diff_v_sq: h_sq + op.gradient_stiffness().quad(&w, &w),
            bound_v_sq: prefactor * v0_sq * (lipschitz * lipschitz * t / b.b_min()).exp(),
        });
        if step == steps.len() {
            break;
        }
        u.step(steps[step])?;
        v.step(steps[step])?;
        t = if step + 1 == steps.len() { config.t_final } else { t + steps[step] };
    }

    let worst_h_ratio = samples.iter().map(|s| ratio(s.diff_h, s.bound_h)).fold(0.0, f64::max);
    let worst_v_ratio = samples.iter().map(|s| ratio(s.diff_v_sq, s.bound_v_sq)).fold(0.0, f64::max);
    let pass = worst_h_ratio <= 1.0 + RATIO_ROUNDING && worst_v_ratio <= 1.0 + RATIO_ROUNDING;
    Ok(DependenceReport { lipschitz, prefactor, samples, worst_h_ratio, worst_v_ratio, pass })
}

/// Seeded initial-condition pairs `(u₀, v₀)`: `u₀` uniform in `[−c0, c0]`
/// nodewise, `v₀ = u₀ + δ` with `‖δ‖_H = distance`.
pub fn perturbation_pairs(
    op: &DiffractionOperator,
    c0: f64,
    count: usize,
    distance: f64,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.node_count();
    (0..count)
        .map(|_| {
            let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-c0..=c0)).collect();
            op.mesh().pin_dirichlet(&mut u);
            let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            op.mesh().pin_dirichlet(&mut d);
            let norm = op.mass().quad(&d, &d).sqrt();
            let v = u.iter().zip(&d).map(|(a, b)| a + distance * b / norm).collect();
            (u, v)
        })
        .collect()
}
