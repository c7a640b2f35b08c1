use coreshell::analysis::{dependence_check, flux_jump};
use coreshell::{
    Consumption, CoreShellGeometry, DiffractionOperator, DiffusionField, Mesh, NormKind, ReactionTerm, SolveConfig,
};
use proptest::prelude::*;

const NODES: usize = 33;

fn op(b1: f64, b2: f64) -> DiffractionOperator {
    let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
    let mesh = Mesh::with_elements(&g, NODES - 1).unwrap();
    DiffractionOperator::assemble(&mesh, &DiffusionField::new(b1, b2).unwrap()).unwrap()
}

fn field() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0_f64, NODES).prop_map(|mut v| {
        v[0] = 0.0;
        v[NODES - 1] = 0.0;
        v
    })
}

fn nonzero_field() -> impl Strategy<Value = Vec<f64>> {
    field().prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn coefficient() -> impl Strategy<Value = f64> {
    0.1..10.0_f64
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bilinear_form_is_symmetric(b1 in coefficient(), b2 in coefficient(), u in field(), v in field()) {
        let op = op(b1, b2);
        let uv = op.bilinear_form(&u, &v).unwrap();
        let vu = op.bilinear_form(&v, &u).unwrap();
        prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv.abs()));
    }

    #[test]
    fn coercivity_and_continuity(b1 in coefficient(), b2 in coefficient(), u in field()) {
        let op = op(b1, b2);
        let a = op.bilinear_form(&u, &u).unwrap();
        let grad = op.norm(&u, NormKind::VSemi).unwrap().powi(2);
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        prop_assert!(a >= lo * grad * (1.0 - 1e-12));
        prop_assert!(a <= hi * grad * (1.0 + 1e-12));
    }

    #[test]
    fn rayleigh_quotient_bounds(b1 in coefficient(), b2 in coefficient(), u in nonzero_field()) {
        let op = op(b1, b2);
        let basis = op.full_eigenbasis().unwrap();
        let q = op.bilinear_form(&u, &u).unwrap() / op.norm(&u, NormKind::H).unwrap().powi(2);
        let ev = basis.eigenvalues();
        prop_assert!(q >= ev[0] * (1.0 - 1e-10));
        prop_assert!(q <= ev[ev.len() - 1] * (1.0 + 1e-10));
    }

    #[test]
    fn projection_is_idempotent_and_contractive(u in field(), n in 1usize..NODES - 2) {
        let op = op(4.0, 1.0);
        let basis = op.eigenbasis(n).unwrap();
        let p = basis.project_field(&u, n).unwrap();
        let pp = basis.project_field(&p, n).unwrap();
        let d: Vec<f64> = p.iter().zip(&pp).map(|(a, b)| a - b).collect();
        let norm_u = op.norm(&u, NormKind::H).unwrap();
        prop_assert!(op.norm(&d, NormKind::H).unwrap() <= 1e-12 * (1.0 + norm_u));
        prop_assert!(op.norm(&p, NormKind::H).unwrap() <= norm_u * (1.0 + 1e-12) + 1e-15);
        // complement is orthogonal to the retained modes
        let q = basis.complement(&u, n).unwrap();
        prop_assert!(op.inner(&q, &p).unwrap().abs() <= 1e-12 * (1.0 + norm_u * norm_u));
    }

    #[test]
    fn eigenvalues_scale_with_coefficient(b1 in coefficient(), b2 in coefficient(), s in 0.1..10.0_f64) {
        let a = op(b1, b2).eigenbasis(4).unwrap();
        let b = op(s * b1, s * b2).eigenbasis(4).unwrap();
        for j in 0..4 {
            prop_assert!(close(b.eigenvalue(j), s * a.eigenvalue(j), 1e-9));
        }
    }

    #[test]
    fn flux_jump_is_linear(b1 in coefficient(), b2 in coefficient(), u in field(), v in field(), s in -3.0..3.0_f64) {
        let op = op(b1, b2);
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + s * b).collect();
        let lhs = flux_jump(&op, &w).unwrap();
        let rhs = flux_jump(&op, &u).unwrap() + s * flux_jump(&op, &v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn certified_constant_dominates(
        v_max in 0.0..5.0_f64,
        k_m in 0.05..3.0_f64,
        c0 in 0.1..3.0_f64,
        inhibition in any::<bool>(),
        u in prop::collection::vec(-6.0..6.0_f64, NODES),
    ) {
        let term = if inhibition {
            ReactionTerm::substrate_inhibition(v_max, k_m, c0).unwrap()
        } else {
            ReactionTerm::michaelis_menten(v_max, k_m, c0).unwrap()
        };
        let op = op(4.0, 1.0);
        let k = term.certify_admissibility(op.mesh().geometry()).unwrap();
        let f = term.apply_f(&u);
        prop_assert!(f.iter().all(|x| *x >= 0.0 && *x <= v_max * (1.0 + 1e-15)));
        prop_assert!(op.inner(&u, &f).unwrap() <= k);
        prop_assert!(op.norm(&f, NormKind::H).unwrap() <= k);
    }

    #[test]
    fn lipschitz_certificate_bounds_difference_quotients(
        v_max in 0.0..5.0_f64,
        k_m in 0.05..3.0_f64,
        a in -2.0..5.0_f64,
        b in -2.0..5.0_f64,
    ) {
        prop_assume!(a != b);
        for term in [
            ReactionTerm::michaelis_menten(v_max, k_m, 1.0).unwrap(),
            ReactionTerm::substrate_inhibition(v_max, k_m, 1.0).unwrap(),
        ] {
            let l = term.certify_lipschitz().unwrap();
            let q = (term.evaluate_g(a) - term.evaluate_g(b)).abs() / (a - b).abs();
            prop_assert!(q <= l * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn tabulated_kinetics_are_bounded(
        g in prop::collection::vec(0.0..2.0_f64, 1..6),
        v in -1.0..10.0_f64,
    ) {
        let points: Vec<[f64; 2]> = g.iter().enumerate().map(|(i, &y)| [(i + 1) as f64, y]).collect();
        let term = ReactionTerm::new(Consumption::Tabulated { points: points.clone(), lipschitz: None }, 1.0).unwrap();
        let gv = term.evaluate_g(v);
        let top = g.iter().copied().fold(0.0, f64::max);
        prop_assert!(gv >= 0.0 && gv <= top + 1e-15);
        if v <= 0.0 {
            prop_assert_eq!(gv, 0.0);
        }
        if v >= points.len() as f64 {
            prop_assert_eq!(gv, *g.last().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_dependence_ratios_are_scale_invariant(u in field(), v in field(), s in 0.1..10.0_f64) {
        prop_assume!(u != v);
        let op = op(4.0, 1.0);
        let cfg = SolveConfig::new(0.05, 5e-3, 1);
        let zero = ReactionTerm::zero();
        let base = dependence_check(&op, &zero, &u, &v, &cfg).unwrap();
        let us: Vec<f64> = u.iter().map(|x| s * x).collect();
        let vs: Vec<f64> = v.iter().map(|x| s * x).collect();
        let scaled = dependence_check(&op, &zero, &us, &vs, &cfg).unwrap();
        prop_assert!(base.pass && scaled.pass);
        prop_assert!(close(base.worst_h_ratio, scaled.worst_h_ratio, 1e-9));
        prop_assert!(close(base.worst_v_ratio, scaled.worst_v_ratio, 1e-9));
        // f ≡ 0 has L = 0: the H-distance never grows
        prop_assert!(base.samples.windows(2).all(|w| w[1].diff_h <= w[0].diff_h * (1.0 + 1e-12)));
    }
}
