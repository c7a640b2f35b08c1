use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::operators::DiffractionOperator;
use crate::reactions::ReactionTerm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityAudit {
    pub admissibility: f64,
    pub samples: usize,
    pub seed: u64,
    /// `max (u, f(u))_H` over the samples.
    pub max_inner: f64,
    /// `max ‖f(u)‖_H` over the samples.
    pub max_norm: f64,
    pub pass: bool,
}

/// Checks the certified `K` against random nodal fields uniform in `[−2c0, 2c0]`.
pub fn admissibility_audit(
    op: &DiffractionOperator,
    term: &ReactionTerm,
    samples: usize,
    seed: u64,
) -> Result<AdmissibilityAudit> {
    let k = term.certify_admissibility(op.mesh().geometry())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = term.c0();
    let (mut max_inner, mut max_norm) = (f64::NEG_INFINITY, 0.0_f64);
    for _ in 0..samples {
        let u: Vec<f64> = (0..op.node_count()).map(|_| rng.random_range(-2.0 * c0..=2.0 * c0)).collect();
        let f = term.apply_f(&u);
        max_inner = max_inner.max(op.mass().quad(&u, &f));
        max_norm = max_norm.max(op.mass().quad(&f, &f).max(0.0).sqrt());
    }
    Ok(AdmissibilityAudit {
        admissibility: k,
        samples,
        seed,
        max_inner,
        max_norm,
        pass: max_inner <= k && max_norm <= k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzAudit {
    pub lipschitz: f64,
    pub samples: usize,
    /// Largest observed difference quotient `|g(v) − g(w)| / |v − w|`.
    pub max_quotient: f64,
    pub pass: bool,
}

/// Difference quotients of `g` at random pairs in `[−c0, 3c0]`.
pub fn lipschitz_audit(term: &ReactionTerm, samples: usize, seed: u64) -> Result<LipschitzAudit> {
    let l = term.certify_lipschitz()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = term.c0();
    let mut max_quotient = 0.0_f64;
    for _ in 0..samples {
        let v: f64 = rng.random_range(-c0..=3.0 * c0);
        let w: f64 = rng.random_range(-c0..=3.0 * c0);
        if v != w {
            max_quotient = max_quotient.max((term.evaluate_g(v) - term.evaluate_g(w)).abs() / (v - w).abs());
        }
    }
    // rounding in the quotient itself
    let pass = max_quotient <= l * (1.0 + 1e-9) + 1e-12;
    Ok(LipschitzAudit { lipschitz: l, samples, max_quotient, pass })
}
