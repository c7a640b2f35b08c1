//! Bounded consumption kinetics and their admissibility certificates.
//!
//! The state variable `u` is the transformed concentration; the oxygen
//! concentration is `v = c0 − u` and the source term is `f(u) = g(c0 − u)`
//! for a consumption rate `g` that is bounded, non-negative and zero for
//! non-positive concentrations. `f` acts nodewise on discrete fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CoreShellGeometry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Consumption {
    Zero,
    /// State-independent source `f ≡ s`. Only valid for linear test problems:
    /// it does not satisfy the admissibility bound unless `s = 0`.
    ConstantSource {
        s: f64,
    },
    /// `g(v) = v_max v / (k_m + v)`.
    MichaelisMenten {
        v_max: f64,
        k_m: f64,
    },
    /// Haldane kinetics `g(v) = v_max v k_m / (k_m² + v²)`; peaks at `v = k_m`.
    SubstrateInhibition {
        v_max: f64,
        k_m: f64,
    },
    /// Piecewise-linear `g` through `(0, 0)` and the given `(v, g)` points,
    /// held constant beyond the last point.
    Tabulated {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        lipschitz: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionTerm {
    #[serde(flatten)]
    consumption: Consumption,
    c0: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidReaction(format!("{name} must be positive, got {x}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidReaction(format!("{name} must be non-negative, got {x}")))
    }
}

impl ReactionTerm {
    pub fn new(consumption: Consumption, c0: f64) -> Result<Self> {
        positive("c0", c0)?;
        match &consumption {
            Consumption::Zero => {}
            Consumption::ConstantSource { s } => {
                if !s.is_finite() {
                    return Err(Error::InvalidReaction(format!("source must be finite, got {s}")));
                }
            }
            Consumption::MichaelisMenten { v_max, k_m } | Consumption::SubstrateInhibition { v_max, k_m } => {
                non_negative("v_max", *v_max)?;
                positive("k_m", *k_m)?;
            }
            Consumption::Tabulated { points, lipschitz } => {
                if points.is_empty() {
                    return Err(Error::InvalidReaction("table needs at least one point".into()));
                }
                let mut prev = 0.0;
                for &[v, g] in points {
                    if !(v > prev) || !v.is_finite() {
                        return Err(Error::InvalidReaction(
                            "table concentrations must be positive and strictly increasing".into(),
                        ));
                    }
                    non_negative("tabulated consumption", g)?;
                    prev = v;
                }
                if let Some(l) = lipschitz {
                    non_negative("lipschitz", *l)?;
                    let slope = table_slope(points);
                    if *l < slope * (1.0 - 1e-12) {
                        return Err(Error::InvalidReaction(format!(
                            "declared Lipschitz constant {l} is below the table's steepest slope {slope}"
                        )));
                    }
                }
            }
        }
        Ok(Self { consumption, c0 })
    }

    pub fn zero() -> Self {
        Self { consumption: Consumption::Zero, c0: 1.0 }
    }

    pub fn constant_source(s: f64) -> Result<Self> {
        Self::new(Consumption::ConstantSource { s }, 1.0)
    }

    pub fn michaelis_menten(v_max: f64, k_m: f64, c0: f64) -> Result<Self> {
        Self::new(Consumption::MichaelisMenten { v_max, k_m }, c0)
    }

    pub fn substrate_inhibition(v_max: f64, k_m: f64, c0: f64) -> Result<Self> {
        Self::new(Consumption::SubstrateInhibition { v_max, k_m }, c0)
    }

    pub fn consumption(&self) -> &Consumption {
        &self.consumption
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.consumption, Consumption::Zero | Consumption::ConstantSource { s: 0.0 })
    }

    /// Linear test-only terms that are exempt from the admissibility bound.
    pub fn is_test_only(&self) -> bool {
        matches!(self.consumption, Consumption::ConstantSource { s } if s != 0.0)
    }

    /// Upper bound on `g`.
    pub fn v_max(&self) -> f64 {
        match &self.consumption {
            Consumption::Zero => 0.0,
            Consumption::ConstantSource { s } => s.abs(),
            Consumption::MichaelisMenten { v_max, .. } | Consumption::SubstrateInhibition { v_max, .. } => *v_max,
            Consumption::Tabulated { points, .. } => points.iter().map(|p| p[1]).fold(0.0, f64::max),
        }
    }

    /// Pointwise consumption rate `g(v)`.
    pub fn evaluate_g(&self, v: f64) -> f64 {
        if let Consumption::ConstantSource { s } = self.consumption {
            return s;
        }
        if !(v > 0.0) {
            return 0.0;
        }
        match &self.consumption {
            Consumption::Zero | Consumption::ConstantSource { .. } => 0.0,
            Consumption::MichaelisMenten { v_max, k_m } => v_max * v / (k_m + v),
            Consumption::SubstrateInhibition { v_max, k_m } => v_max * v * k_m / (k_m * k_m + v * v),
            Consumption::Tabulated { points, .. } => {
                let mut prev = [0.0, 0.0];
                for &p in points {
                    if v <= p[0] {
                        let t = (v - prev[0]) / (p[0] - prev[0]);
                        return prev[1] + t * (p[1] - prev[1]);
                    }
                    prev = p;
                }
                prev[1]
            }
        }
    }

    /// `g′(v)`, taking the value 0 at and below the kink at `v = 0`.
    pub fn derivative_g(&self, v: f64) -> f64 {
        if !(v > 0.0) {
            return 0.0;
        }
        match &self.consumption {
            Consumption::Zero | Consumption::ConstantSource { .. } => 0.0,
            Consumption::MichaelisMenten { v_max, k_m } => v_max * k_m / ((k_m + v) * (k_m + v)),
            Consumption::SubstrateInhibition { v_max, k_m } => {
                let d = k_m * k_m + v * v;
                v_max * k_m * (k_m * k_m - v * v) / (d * d)
            }
            Consumption::Tabulated { points, .. } => {
                let mut prev = [0.0, 0.0];
                for &p in points {
                    if v < p[0] {
                        return (p[1] - prev[1]) / (p[0] - prev[0]);
                    }
                    prev = p;
                }
                0.0
            }
        }
    }

    /// `f(u) = g(c0 − u)`.
    pub fn evaluate_f(&self, u: f64) -> f64 {
        self.evaluate_g(self.c0 - u)
    }

    /// `df/du = −g′(c0 − u)`.
    pub fn derivative_f(&self, u: f64) -> f64 {
        -self.derivative_g(self.c0 - u)
    }

    pub fn apply_f(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| self.evaluate_f(x)).collect()
    }

    pub(crate) fn apply_f_into(&self, u: &[f64], out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(u) {
            *o = self.evaluate_f(x);
        }
    }

    /// Constant `K` with `(u, f(u))_H ≤ K` and `‖f(u)‖_H ≤ K` for all `u`.
    ///
    /// `g(c0 − u)` vanishes unless `u < c0`, so `u·f(u) ≤ c0·v_max`
    /// pointwise; `|f| ≤ v_max` gives the norm bound.
    pub fn certify_admissibility(&self, geometry: &CoreShellGeometry) -> Result<f64> {
        if let Consumption::ConstantSource { s } = self.consumption {
            if s != 0.0 {
                return Err(Error::Inadmissible(format!("constant source s = {s}: (u, s) is unbounded over u")));
            }
        }
        let v_max = self.v_max();
        if v_max == 0.0 {
            return Ok(f64::MIN_POSITIVE);
        }
        let measure = geometry.measure();
        Ok((self.c0 * v_max * measure).max(v_max * measure.sqrt()))
    }

    /// Pointwise Lipschitz constant of `g` (and hence of `f` on `H`).
    pub fn certify_lipschitz(&self) -> Result<f64> {
        match &self.consumption {
            Consumption::Zero | Consumption::ConstantSource { .. } => Ok(0.0),
            // both maximize |g′| at v = 0⁺
            Consumption::MichaelisMenten { v_max, k_m } | Consumption::SubstrateInhibition { v_max, k_m } => {
                Ok(v_max / k_m)
            }
            Consumption::Tabulated { lipschitz, .. } => lipschitz.ok_or_else(|| {
                Error::InvalidReaction("tabulated consumption requires a declared Lipschitz constant".into())
            }),
        }
    }
}

fn table_slope(points: &[[f64; 2]]) -> f64 {
    let mut prev = [0.0, 0.0];
    let mut slope = 0.0_f64;
    for &p in points {
        slope = slope.max(((p[1] - prev[1]) / (p[0] - prev[0])).abs());
        prev = p;
    }
    slope
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<ReactionTerm> {
        vec![
            ReactionTerm::zero(),
            ReactionTerm::michaelis_menten(1.0, 0.5, 1.0).unwrap(),
            ReactionTerm::substrate_inhibition(2.0, 0.3, 1.0).unwrap(),
            ReactionTerm::new(
                Consumption::Tabulated { points: vec![[0.5, 1.0], [1.0, 0.2]], lipschitz: Some(2.0) },
                1.0,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn michaelis_menten_values() {
        let t = ReactionTerm::michaelis_menten(1.0, 1.0, 1.0).unwrap();
        assert_eq!(t.evaluate_g(1.0), 0.5);
        assert_eq!(t.evaluate_g(-5.0), 0.0);
        assert_eq!(t.apply_f(&[0.0, 1.0, 2.0]), vec![0.5, 0.0, 0.0]);
    }

    #[test]
    fn substrate_inhibition_is_not_monotone() {
        let t = ReactionTerm::substrate_inhibition(1.0, 1.0, 1.0).unwrap();
        assert_eq!(t.evaluate_g(1.0), 0.5);
        assert!((t.evaluate_g(3.0) - 0.3).abs() < 1e-15);
        for i in 0..1000 {
            assert!(t.evaluate_g(i as f64 * 0.01) <= 0.5);
        }
    }

    #[test]
    fn bounds_on_dense_grid() {
        for t in all_kinds() {
            for i in -2000..=2000 {
                let v = i as f64 * 0.005;
                let g = t.evaluate_g(v);
                if v <= 0.0 {
                    assert_eq!(g, 0.0);
                }
                assert!((0.0..=t.v_max()).contains(&g), "{t:?} at {v}: {g}");
            }
        }
    }

    #[test]
    fn tabulated_interpolation() {
        let t = &all_kinds()[3];
        assert_eq!(t.evaluate_g(0.25), 0.5);
        assert!((t.evaluate_g(0.75) - 0.6).abs() < 1e-15);
        assert_eq!(t.evaluate_g(10.0), 0.2);
        assert_eq!(t.derivative_g(0.25), 2.0);
        assert_eq!(t.certify_lipschitz().unwrap(), 2.0);
        let undeclared =
            ReactionTerm::new(Consumption::Tabulated { points: vec![[1.0, 1.0]], lipschitz: None }, 1.0).unwrap();
        assert!(undeclared.certify_lipschitz().is_err());
        let understated =
            ReactionTerm::new(Consumption::Tabulated { points: vec![[1.0, 1.0]], lipschitz: Some(0.5) }, 1.0);
        assert!(understated.is_err());
    }

    #[test]
    fn certificates() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let mm = ReactionTerm::michaelis_menten(1.0, 1.0, 1.0).unwrap();
        assert_eq!(mm.certify_admissibility(&g).unwrap(), 1.0);
        assert_eq!(ReactionTerm::michaelis_menten(1.0, 0.5, 1.0).unwrap().certify_lipschitz().unwrap(), 2.0);
        assert_eq!(ReactionTerm::zero().certify_lipschitz().unwrap(), 0.0);
        let k0 = ReactionTerm::zero().certify_admissibility(&g).unwrap();
        assert!(k0 > 0.0 && k0 < 1e-300);
        assert!(matches!(
            ReactionTerm::constant_source(1.0).unwrap().certify_admissibility(&g),
            Err(Error::Inadmissible(_))
        ));
        // shell sphere: |Ω| = 1/3
        let r = CoreShellGeometry::radial(3, 0.5, 1.0).unwrap();
        let k = mm.certify_admissibility(&r).unwrap();
        assert!((k - (1.0_f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for t in all_kinds().into_iter().take(3) {
            for i in 1..200 {
                let v = i as f64 * 0.013;
                let h = 1e-6;
                let fd = (t.evaluate_g(v + h) - t.evaluate_g(v - h)) / (2.0 * h);
                assert!((fd - t.derivative_g(v)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ReactionTerm::michaelis_menten(1.0, 0.0, 1.0).is_err());
        assert!(ReactionTerm::michaelis_menten(-1.0, 1.0, 1.0).is_err());
        assert!(ReactionTerm::michaelis_menten(1.0, 1.0, 0.0).is_err());
        assert!(ReactionTerm::new(Consumption::Tabulated { points: vec![[0.0, 1.0]], lipschitz: None }, 1.0).is_err());
        assert!(ReactionTerm::new(
            Consumption::Tabulated { points: vec![[1.0, 1.0], [0.5, 1.0]], lipschitz: None },
            1.0
        )
        .is_err());
    }
}
