use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::operators::DiffractionOperator;
use crate::reactions::ReactionTerm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Absolute tolerance on the H-norm of the residual field.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Smallest damping factor tried before a step is accepted anyway.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 50, min_damping: 1.0 / 1024.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub state: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Residual norm after each iteration, starting with the initial guess.
    pub history: Vec<f64>,
}

struct Residual {
    free: Vec<f64>,
    norm: f64,
}

fn residual(op: &DiffractionOperator, term: &ReactionTerm, u: &[f64]) -> Result<Residual> {
    let ku = op.stiffness().matvec(u);
    let mf = op.mass().matvec(&term.apply_f(u));
    let free: Vec<f64> = op.mesh().free_range().map(|i| ku[i] - mf[i]).collect();
    let norm = op.dual_norm(&free)?;
    Ok(Residual { free, norm })
}

/// Damped Newton iteration for `Au = f(u)`, i.e. `R(u) = Ku − M f(u) = 0`.
pub fn stationary_solve(
    op: &DiffractionOperator,
    term: &ReactionTerm,
    initial_guess: Option<&[f64]>,
    options: NewtonOptions,
) -> Result<StationaryState> {
    let mut u = match initial_guess {
        Some(g) => op.field(g.to_vec())?,
        None => vec![0.0; op.node_count()],
    };
    let free = op.mesh().free_range();
    let k = op.stiffness();
    let m = op.mass();

    let mut r = residual(op, term, &u)?;
    let mut history = vec![r.norm];
    for iteration in 0..=options.max_iterations {
        if r.norm < options.tolerance {
            return Ok(StationaryState { state: u, iterations: iteration, residual: r.norm, history });
        }
        if iteration == options.max_iterations || !r.norm.is_finite() {
            break;
        }

        // J = K − M diag(f′(u)), restricted to the free block
        let slope: Vec<f64> = u.iter().map(|&x| term.derivative_f(x)).collect();
        let idx: Vec<usize> = free.clone().collect();
        let n = idx.len();
        let mut diag = vec![0.0; n];
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut upper = vec![0.0; n.saturating_sub(1)];
        for (a, &i) in idx.iter().enumerate() {
            diag[a] = k.get(i, i) - m.get(i, i) * slope[i];
            if a + 1 < n {
                let j = idx[a + 1];
                upper[a] = k.get(i, j) - m.get(i, j) * slope[j];
                lower[a] = k.get(j, i) - m.get(j, i) * slope[i];
            }
        }
        let rhs: Vec<f64> = r.free.iter().map(|v| -v).collect();
        let delta = op.embed_free(&solve_tridiagonal(&lower, &diag, &upper, &rhs)?);

        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + damping * d).collect();
            let rt = residual(op, term, &trial)?;
            if rt.norm < r.norm || damping <= options.min_damping {
                u = trial;
                r = rt;
                break;
            }
            damping *= 0.5;
        }
        history.push(r.norm);
    }
    Err(Error::NoConvergence { iterations: options.max_iterations, residual: r.norm })
}
