use super::{keep_snapshot, NormRecord, Scheme, Snapshot, SolveConfig, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::operators::{DiffractionOperator, EigenBasis};
use crate::reactions::ReactionTerm;

/// Integrates `dv/dt + Av = P_n f(v)`, `v(0) = P_n u₀` in modal coordinates.
///
/// Each step reconstructs `u_n` on the mesh, applies `f` nodewise and
/// projects back, so the forcing is exactly `P_n f(u_n)`.
pub fn galerkin_solve(
    basis: &EigenBasis,
    op: &DiffractionOperator,
    term: &ReactionTerm,
    config: &SolveConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let n = config.modes;
    if n > basis.len() {
        return Err(Error::TooManyModes { requested: n, available: basis.len() });
    }
    op.check(basis.vector(0))?;
    let u0 = config.initial.resolve(op, Some(basis))?;
    let lambda = &basis.eigenvalues()[..n];

    let mut coeffs = basis.project(&u0, n)?;
    let mut field = vec![0.0; op.node_count()];
    let mut reaction = vec![0.0; op.node_count()];
    let mut load = vec![0.0; op.node_count()];

    let steps = config.step_sizes();
    let mut times = Vec::with_capacity(steps.len() + 1);
    let mut records = Vec::with_capacity(steps.len() + 1);
    let mut snapshots = Vec::new();
    let mut t = 0.0;

    for step in 0..=steps.len() {
        basis.reconstruct_into(&coeffs, &mut field);
        term.apply_f_into(&field, &mut reaction);
        op.mass().matvec_into(&reaction, &mut load);
        let forcing = basis.coefficients_of(&load, n);

        let h = dot(&coeffs, &coeffs);
        let grad = op.gradient_stiffness().quad(&field, &field);
        let record = NormRecord {
            h_norm_sq: h,
            grad_norm_sq: grad,
            v_norm_sq: h + grad,
            da_norm_sq: coeffs.iter().zip(lambda).map(|(c, l)| (l * c) * (l * c)).sum(),
            u_f_inner: dot(&coeffs, &forcing),
            energy: coeffs.iter().zip(lambda).map(|(c, l)| l * c * c).sum(),
            forcing_norm_sq: dot(&forcing, &forcing),
        };
        if !coeffs.iter().all(|c| c.is_finite()) || !record.forcing_norm_sq.is_finite() {
            return Err(Error::Blowup { step, time: t });
        }
        times.push(t);
        records.push(record);
        if keep_snapshot(config.snapshot_stride, step, steps.len()) {
            snapshots.push(Snapshot { step, time: t, field: field.clone(), coefficients: Some(coeffs.clone()) });
        }
        if step == steps.len() {
            break;
        }

        let dt = steps[step];
        for ((c, &l), &f) in coeffs.iter_mut().zip(lambda).zip(&forcing) {
            *c = match config.scheme {
                Scheme::ImexEuler => (*c + dt * f) / (1.0 + dt * l),
                Scheme::ExponentialEuler => {
                    let decay = (-l * dt).exp();
                    decay * *c - (-l * dt).exp_m1() / l * f
                }
            };
        }
        t = if step + 1 == steps.len() { config.t_final } else { t + dt };
    }

    Ok(Trajectory { times, records, snapshots, modes: Some(n), dt: config.dt })
}
