//! Independent oracles shared by the integration tests. Nothing here calls
//! into the finite-element code paths it is used to check.
#![allow(dead_code)]

/// One RK4 sweep of `u″ = −(λ/b) u` over `[a, b_end]` with `steps` steps.
fn rk4(mut u: f64, mut du: f64, a: f64, b_end: f64, coeff: f64, steps: usize) -> (f64, f64) {
    let h = (b_end - a) / steps as f64;
    for _ in 0..steps {
        let f = |u: f64, du: f64| (du, -coeff * u);
        let (k1u, k1d) = f(u, du);
        let (k2u, k2d) = f(u + 0.5 * h * k1u, du + 0.5 * h * k1d);
        let (k3u, k3d) = f(u + 0.5 * h * k2u, du + 0.5 * h * k2d);
        let (k4u, k4d) = f(u + h * k3u, du + h * k3d);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    (u, du)
}

/// `u(R)` for the shooting problem on the interval `(0, R)` with `u(0) = 0`,
/// `u′(0) = 1`, continuity of `u` and of `b u′` at the interface.
pub fn shoot(lambda: f64, b1: f64, b2: f64, interface: f64, outer: f64) -> f64 {
    let (u, du) = rk4(0.0, 1.0, 0.0, interface, lambda / b1, 4000);
    let (u, _) = rk4(u, b1 * du / b2, interface, outer, lambda / b2, 4000);
    u
}

/// Smallest root of `shoot(λ) = 0`, bracketed by a scan and refined by bisection.
pub fn principal_eigenvalue(b1: f64, b2: f64, interface: f64, outer: f64) -> f64 {
    let f = |l: f64| shoot(l, b1, b2, interface, outer);
    let mut lo = 1e-6;
    let f_lo = f(lo);
    let mut hi = lo;
    loop {
        hi += 0.5;
        if f(hi).signum() != f_lo.signum() {
            break;
        }
        lo = hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form Poisson solution for `−u″ = 1` on `(0, 1)` with zero ends.
pub fn poisson_unit(x: f64) -> f64 {
    x * (1.0 - x) / 2.0
}
