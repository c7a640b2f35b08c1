use super::{keep_snapshot, NormRecord, Snapshot, SolveConfig, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::operators::DiffractionOperator;
use crate::reactions::ReactionTerm;

/// Nodal IMEX Euler stepper: `(M + dt K) u⁺ = M (u + dt f(u))` on the free nodes.
#[derive(Debug, Clone)]
pub struct FemIntegrator<'a> {
    op: &'a DiffractionOperator,
    term: &'a ReactionTerm,
    state: Vec<f64>,
    reaction: Vec<f64>,
    factor: Option<(f64, Cholesky)>,
}

impl<'a> FemIntegrator<'a> {
    pub fn new(op: &'a DiffractionOperator, term: &'a ReactionTerm, initial: Vec<f64>) -> Result<Self> {
        let state = op.field(initial)?;
        let reaction = term.apply_f(&state);
        Ok(Self { op, term, state, reaction, factor: None })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    /// `f(u)` at the current state.
    pub fn reaction(&self) -> &[f64] {
        &self.reaction
    }

    pub fn record(&self) -> Result<NormRecord> {
        let op = self.op;
        let u = &self.state;
        let h = op.mass().quad(u, u);
        let grad = op.gradient_stiffness().quad(u, u);
        let ku: Vec<f64> = op.stiffness().matvec(u)[op.mesh().free_range()].to_vec();
        let da = op.dual_norm(&ku)?;
        let forcing = op.dual_norm(&op.load(&self.reaction)?)?;
        Ok(NormRecord {
            h_norm_sq: h,
            grad_norm_sq: grad,
            v_norm_sq: h + grad,
            da_norm_sq: da * da,
            u_f_inner: op.mass().quad(u, &self.reaction),
            energy: op.stiffness().quad(u, u),
            forcing_norm_sq: forcing * forcing,
        })
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let op = self.op;
        let stale = !matches!(&self.factor, Some((cached, _)) if *cached == dt);
        if stale {
            let system = op.free_mass().add_scaled(op.free_stiffness(), dt);
            self.factor = Some((dt, system.cholesky()?));
        }
        let explicit: Vec<f64> = self.state.iter().zip(&self.reaction).map(|(u, f)| u + dt * f).collect();
        let rhs = op.load(&explicit)?;
        let free = self.factor.as_ref().expect("factor set above").1.solve(&rhs);
        self.state = op.embed_free(&free);
        self.term.apply_f_into(&self.state, &mut self.reaction);
        Ok(())
    }
}

/// Method-of-lines reference integrator on nodal values (IMEX Euler; the
/// configured scheme and mode count are not used).
pub fn fem_solve(op: &DiffractionOperator, term: &ReactionTerm, config: &SolveConfig) -> Result<Trajectory> {
    let mut cfg = config.clone();
    cfg.modes = cfg.modes.max(1);
    cfg.validate()?;
    let u0 = config.initial.resolve(op, None)?;
    let mut integrator = FemIntegrator::new(op, term, u0)?;

    let steps = config.step_sizes();
    let mut times = Vec::with_capacity(steps.len() + 1);
    let mut records = Vec::with_capacity(steps.len() + 1);
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    for step in 0..=steps.len() {
        let record = integrator.record()?;
        if !integrator.state().iter().all(|v| v.is_finite()) || !record.h_norm_sq.is_finite() {
            return Err(Error::Blowup { step, time: t });
        }
        times.push(t);
        records.push(record);
        if keep_snapshot(config.snapshot_stride, step, steps.len()) {
            snapshots.push(Snapshot { step, time: t, field: integrator.state().to_vec(), coefficients: None });
        }
        if step == steps.len() {
            break;
        }
        integrator.step(steps[step])?;
        t = if step + 1 == steps.len() { config.t_final } else { t + steps[step] };
    }
    Ok(Trajectory { times, records, snapshots, modes: None, dt: config.dt })
}

/// Relative H-distance `‖a − b‖_H / ‖b‖_H` (absolute when `b` vanishes).
pub(crate) fn relative_h_error(op: &DiffractionOperator, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let num = op.mass().quad(&d, &d).max(0.0).sqrt();
    let den = op.mass().quad(b, b).max(0.0).sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}
