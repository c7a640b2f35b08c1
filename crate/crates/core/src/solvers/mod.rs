//! Time integration and stationary solves.
//!
//! [`galerkin_solve`] advances the truncated modal system in the eigenbasis
//! of `A`; [`fem_solve`] integrates the nodal method-of-lines system and is
//! used as an independent reference for it. Both produce a [`Trajectory`]
//! carrying the norms every energy audit needs at every step.

mod fem;
mod galerkin;
mod stationary;

pub(crate) use fem::relative_h_error;
pub use fem::{fem_solve, FemIntegrator};
pub use galerkin::galerkin_solve;
pub use stationary::{stationary_solve, NewtonOptions, StationaryState};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{DiffractionOperator, EigenBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Implicit in `A`, explicit in `f`.
    #[default]
    ImexEuler,
    /// Exact propagation of the linear part with `f` frozen over the step.
    ExponentialEuler,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    #[default]
    Zero,
    /// The `j`-th eigenfunction (1-based, `j = 1` is the principal mode).
    Mode { j: usize },
    /// Nodal values over the full mesh; Dirichlet entries are overwritten with zero.
    Table { values: Vec<f64> },
}

impl InitialCondition {
    /// Nodal field for this initial condition. `basis` is used for `Mode`
    /// when it holds enough modes; otherwise one is computed.
    pub fn resolve(&self, op: &DiffractionOperator, basis: Option<&EigenBasis>) -> Result<Vec<f64>> {
        match self {
            Self::Zero => Ok(vec![0.0; op.node_count()]),
            Self::Mode { j } => {
                if *j == 0 {
                    return Err(Error::InvalidConfig("mode index is 1-based".into()));
                }
                match basis {
                    Some(b) if b.len() >= *j => Ok(b.vector(j - 1).to_vec()),
                    _ => Ok(op.eigenbasis(*j)?.vector(j - 1).to_vec()),
                }
            }
            Self::Table { values } => op.field(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub t_final: f64,
    pub dt: f64,
    pub modes: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub initial: InitialCondition,
    /// Keep every `snapshot_stride`-th state (0 keeps only the first and last).
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl SolveConfig {
    pub fn new(t_final: f64, dt: f64, modes: usize) -> Self {
        Self { t_final, dt, modes, scheme: Scheme::ImexEuler, initial: InitialCondition::Zero, snapshot_stride: 0 }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt > self.t_final {
            return Err(Error::InvalidConfig(format!("dt = {} exceeds t_final = {}", self.dt, self.t_final)));
        }
        if self.modes == 0 {
            return Err(Error::InvalidConfig("modes must be at least 1".into()));
        }
        Ok(())
    }

    /// Fixed steps of size `dt`; the last one is shortened to land on `t_final`.
    pub fn step_sizes(&self) -> Vec<f64> {
        let q = self.t_final / self.dt;
        let steps = ((q - 1e-9 * q).ceil() as usize).max(1);
        let mut sizes = vec![self.dt; steps];
        let last = self.t_final - (steps - 1) as f64 * self.dt;
        sizes[steps - 1] = last;
        sizes
    }
}

/// Squared norms and inner products of one state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormRecord {
    /// `‖u‖²_H`
    pub h_norm_sq: f64,
    /// `‖∇u‖²_H`
    pub grad_norm_sq: f64,
    /// `‖u‖²_V`
    pub v_norm_sq: f64,
    /// `‖Au‖²_H`
    pub da_norm_sq: f64,
    /// `(u, f(u))_H`
    pub u_f_inner: f64,
    /// `a(u, u)`
    pub energy: f64,
    /// `‖P f(u)‖²_H`, with `P` the projection onto the discrete solution space.
    pub forcing_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    /// Nodal field.
    pub field: Vec<f64>,
    /// Modal coefficients, for Galerkin trajectories.
    pub coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub records: Vec<NormRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Galerkin truncation, or `None` for nodal (FEM) trajectories.
    pub modes: Option<usize>,
    pub dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.snapshots.first().expect("initial snapshot").field
    }

    pub fn final_state(&self) -> &[f64] {
        &self.snapshots.last().expect("final snapshot").field
    }

    pub fn initial_record(&self) -> &NormRecord {
        &self.records[0]
    }

    pub fn final_record(&self) -> &NormRecord {
        self.records.last().expect("trajectory has at least one record")
    }
}

pub(crate) fn keep_snapshot(stride: usize, step: usize, last: usize) -> bool {
    step == 0 || step == last || (stride > 0 && step.is_multiple_of(stride))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_sizes_land_on_t_final() {
        let c = SolveConfig::new(1.0, 0.1, 1);
        let s = c.step_sizes();
        assert_eq!(s.len(), 10);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let c = SolveConfig::new(1.0, 0.3, 1);
        let s = c.step_sizes();
        assert_eq!(s.len(), 4);
        assert!((s[3] - 0.1).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(SolveConfig::new(1.0, 0.0, 1).validate().is_err());
        assert!(SolveConfig::new(0.0, 0.1, 1).validate().is_err());
        assert!(SolveConfig::new(1.0, 2.0, 1).validate().is_err());
        assert!(SolveConfig::new(1.0, 0.1, 0).validate().is_err());
        assert!(SolveConfig::new(1.0, 0.1, 4).validate().is_ok());
    }
}
