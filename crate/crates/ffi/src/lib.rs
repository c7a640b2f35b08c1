//! C interface to `coreshell`.
//!
//! All objects are opaque heap handles created by a `cs_*_new` style call and
//! released with the matching `cs_*_free`. Every fallible function returns a
//! [`CsStatus`]; on failure a message is kept per thread and can be copied out
//! with [`cs_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use coreshell::analysis::{flux_jump, EnergyReport};
use coreshell::solvers::NewtonOptions;
use coreshell::{
    fem_solve, galerkin_solve, stationary_solve, CoreShellGeometry, DiffractionOperator, DiffusionField, EigenBasis,
    Error, GeometryKind, InitialCondition, Mesh, NormKind, ReactionTerm, SolveConfig, Trajectory,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsGeometry {
    Interval = 0,
    Radial = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsNorm {
    H = 0,
    V = 1,
    VSemi = 2,
    DA = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsSolver {
    Galerkin = 0,
    Fem = 1,
}

/// Squared norms of the state at one time level.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsNormRecord {
    pub t: f64,
    pub h_norm_sq: f64,
    pub grad_norm_sq: f64,
    pub v_norm_sq: f64,
    pub da_norm_sq: f64,
    pub u_f_inner: f64,
}

/// Scalar outcome of the energy-estimate audit. Margins are bound minus
/// observed value; `pass` is 1 when every margin is within tolerance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsEnergySummary {
    pub admissibility: f64,
    pub gamma: f64,
    pub tolerance: f64,
    pub worst_weak_margin: f64,
    pub sup_margin: f64,
    pub integral_margin: f64,
    pub strong_margin: f64,
    pub admissibility_margin: f64,
    pub pass: i32,
}

/// Assembled operator on a mesh, with an eigenbasis computed on demand.
pub struct CsProblem {
    op: DiffractionOperator,
    basis: Option<EigenBasis>,
}

impl CsProblem {
    fn basis(&mut self, n: usize) -> coreshell::Result<&EigenBasis> {
        if self.basis.as_ref().is_none_or(|b| b.len() < n) {
            self.basis = Some(self.op.eigenbasis(n)?);
        }
        Ok(self.basis.as_ref().unwrap())
    }
}

pub struct CsReaction {
    term: ReactionTerm,
}

pub struct CsTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> CsStatus {
    match err {
        Error::Inadmissible(_) => CsStatus::Inadmissible,
        Error::InvalidGeometry(_)
        | Error::InvalidMesh(_)
        | Error::InvalidDiffusion(_)
        | Error::InvalidReaction(_)
        | Error::InvalidConfig(_)
        | Error::DimensionMismatch { .. }
        | Error::TooManyModes { .. } => CsStatus::InvalidArgument,
        _ => CsStatus::Numerical,
    }
}

struct Fail(CsStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn fail(status: CsStatus, msg: &str) -> Fail {
    set_error(msg);
    Fail(status)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsStatus::Ok
        }
        Ok(Err(Fail(s))) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(CsStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(CsStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(fail(CsStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(fail(CsStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn need(len: usize, required: usize, what: &str) -> Result<(), Fail> {
    if len < required {
        return Err(fail(CsStatus::BufferTooSmall, &format!("{what}: need {required} entries, got {len}")));
    }
    Ok(())
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(CsStatus::NullPointer, &format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to fit) into `buf` and returns the full length including the terminator.
/// Returns 0 when there is no error. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the geometry, a uniform-per-region mesh with `elements` elements and
/// the assembled operator. `epsilon > 0` smooths the coefficient jump over a
/// ramp of that width.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cs_problem_new(
    kind: CsGeometry,
    dimension: u32,
    interface: f64,
    outer_extent: f64,
    elements: usize,
    b1: f64,
    b2: f64,
    epsilon: f64,
    out: *mut *mut CsProblem,
) -> CsStatus {
    guard(|| {
        let kind = match kind {
            CsGeometry::Interval => GeometryKind::Interval,
            CsGeometry::Radial => GeometryKind::Radial,
        };
        let g = CoreShellGeometry::new(kind, dimension, interface, outer_extent)?;
        let mesh = Mesh::with_elements(&g, elements)?;
        let op = DiffractionOperator::assemble(&mesh, &DiffusionField::regularized(b1, b2, epsilon)?)?;
        put(out, Box::into_raw(Box::new(CsProblem { op, basis: None })), "out")
    })
}

/// # Safety
/// `problem` must be null or a handle from [`cs_problem_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_free(problem: *mut CsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_node_count(problem: *const CsProblem, out: *mut usize) -> CsStatus {
    guard(|| put(out, deref(problem, "problem")?.op.node_count(), "out"))
}

/// Copies node coordinates into `buf` (length at least the node count).
///
/// # Safety
/// `problem` must be a live handle; `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_nodes(problem: *const CsProblem, buf: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let nodes = deref(problem, "problem")?.op.mesh().nodes();
        need(len, nodes.len(), "buf")?;
        slice_mut(buf, len, "buf")?[..nodes.len()].copy_from_slice(nodes);
        Ok(())
    })
}

/// Writes the `n` smallest eigenvalues in ascending order.
///
/// # Safety
/// `problem` must be a live handle; `out` valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_eigenvalues(problem: *mut CsProblem, n: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let p = deref_mut(problem, "problem")?;
        let out = slice_mut(out, n, "out")?;
        out.copy_from_slice(&p.basis(n)?.eigenvalues()[..n]);
        Ok(())
    })
}

/// Writes eigenvector `j` (zero-based, H-normalized) as nodal values.
///
/// # Safety
/// `problem` must be a live handle; `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_eigenvector(
    problem: *mut CsProblem,
    j: usize,
    buf: *mut f64,
    len: usize,
) -> CsStatus {
    guard(|| {
        let p = deref_mut(problem, "problem")?;
        let count = p.op.node_count();
        need(len, count, "buf")?;
        let out = slice_mut(buf, len, "buf")?;
        out[..count].copy_from_slice(p.basis(j + 1)?.vector(j));
        Ok(())
    })
}

/// # Safety
/// `problem` must be a live handle; `u` valid for `len` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_norm(
    problem: *const CsProblem,
    kind: CsNorm,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let p = deref(problem, "problem")?;
        let kind = match kind {
            CsNorm::H => NormKind::H,
            CsNorm::V => NormKind::V,
            CsNorm::VSemi => NormKind::VSemi,
            CsNorm::DA => NormKind::DA,
        };
        let value = p.op.norm(slice(u, len, "u")?, kind)?;
        put(out, value, "out")
    })
}

/// Discrete interface flux jump `b₁u′(Γ⁻) − b₂u′(Γ⁺)`.
///
/// # Safety
/// `problem` must be a live handle; `u` valid for `len` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cs_problem_flux_jump(
    problem: *const CsProblem,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let p = deref(problem, "problem")?;
        put(out, flux_jump(&p.op, slice(u, len, "u")?)?, "out")
    })
}

fn reaction(term: coreshell::Result<ReactionTerm>, out: *mut *mut CsReaction) -> CsStatus {
    guard(|| {
        let term = term?;
        // SAFETY: the caller guarantees `out` is valid for writes
        unsafe { put(out, Box::into_raw(Box::new(CsReaction { term })), "out") }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_zero(out: *mut *mut CsReaction) -> CsStatus {
    reaction(Ok(ReactionTerm::zero()), out)
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_michaelis_menten(
    v_max: f64,
    k_m: f64,
    c0: f64,
    out: *mut *mut CsReaction,
) -> CsStatus {
    reaction(ReactionTerm::michaelis_menten(v_max, k_m, c0), out)
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_substrate_inhibition(
    v_max: f64,
    k_m: f64,
    c0: f64,
    out: *mut *mut CsReaction,
) -> CsStatus {
    reaction(ReactionTerm::substrate_inhibition(v_max, k_m, c0), out)
}

/// Constant source `f ≡ s`, for linear test problems only.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_constant_source(s: f64, out: *mut *mut CsReaction) -> CsStatus {
    reaction(ReactionTerm::constant_source(s), out)
}

/// # Safety
/// `reaction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_free(reaction: *mut CsReaction) {
    if !reaction.is_null() {
        drop(Box::from_raw(reaction));
    }
}

/// `f(u) = g(c0 − u)` at one point.
///
/// # Safety
/// `reaction` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_evaluate(reaction: *const CsReaction, u: f64, out: *mut f64) -> CsStatus {
    guard(|| put(out, deref(reaction, "reaction")?.term.evaluate_f(u), "out"))
}

/// Admissibility constant `K` on the problem's domain and Lipschitz constant `L`.
///
/// # Safety
/// Handles must be live; `k` and `l` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_reaction_certify(
    reaction: *const CsReaction,
    problem: *const CsProblem,
    k: *mut f64,
    l: *mut f64,
) -> CsStatus {
    guard(|| {
        let term = &deref(reaction, "reaction")?.term;
        let p = deref(problem, "problem")?;
        let kv = term.certify_admissibility(p.op.mesh().geometry())?;
        let lv = term.certify_lipschitz()?;
        put(k, kv, "k")?;
        put(l, lv, "l")
    })
}

/// Integrates to `t_final` with step `dt` from `u0` (nodal values, or null for
/// zero). `modes` is ignored by the nodal solver.
///
/// # Safety
/// Handles must be live; `u0` null or valid for `len` reads; `out` valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cs_solve(
    problem: *mut CsProblem,
    reaction: *const CsReaction,
    solver: CsSolver,
    modes: usize,
    t_final: f64,
    dt: f64,
    u0: *const f64,
    len: usize,
    out: *mut *mut CsTrajectory,
) -> CsStatus {
    guard(|| {
        let p = deref_mut(problem, "problem")?;
        let term = &deref(reaction, "reaction")?.term;
        let mut config = SolveConfig::new(t_final, dt, modes.max(1));
        if !u0.is_null() {
            config = config.with_initial(InitialCondition::Table { values: slice(u0, len, "u0")?.to_vec() });
        }
        let inner = match solver {
            CsSolver::Galerkin => {
                config.validate()?;
                let basis = p.basis(modes.max(1))?.clone();
                galerkin_solve(&basis, &p.op, term, &config)?
            }
            CsSolver::Fem => fem_solve(&p.op, term, &config)?,
        };
        put(out, Box::into_raw(Box::new(CsTrajectory { inner })), "out")
    })
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_free(trajectory: *mut CsTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Number of recorded time levels, including `t = 0`.
///
/// # Safety
/// `trajectory` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_len(trajectory: *const CsTrajectory, out: *mut usize) -> CsStatus {
    guard(|| put(out, deref(trajectory, "trajectory")?.inner.len(), "out"))
}

/// # Safety
/// `trajectory` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_record(
    trajectory: *const CsTrajectory,
    i: usize,
    out: *mut CsNormRecord,
) -> CsStatus {
    guard(|| {
        let tr = &deref(trajectory, "trajectory")?.inner;
        if i >= tr.len() {
            return Err(fail(CsStatus::InvalidArgument, &format!("record {i} out of range (len {})", tr.len())));
        }
        let r = &tr.records[i];
        put(
            out,
            CsNormRecord {
                t: tr.times[i],
                h_norm_sq: r.h_norm_sq,
                grad_norm_sq: r.grad_norm_sq,
                v_norm_sq: r.v_norm_sq,
                da_norm_sq: r.da_norm_sq,
                u_f_inner: r.u_f_inner,
            },
            "out",
        )
    })
}

/// # Safety
/// `trajectory` must be a live handle; `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_final_state(
    trajectory: *const CsTrajectory,
    buf: *mut f64,
    len: usize,
) -> CsStatus {
    guard(|| {
        let u = deref(trajectory, "trajectory")?.inner.final_state();
        need(len, u.len(), "buf")?;
        slice_mut(buf, len, "buf")?[..u.len()].copy_from_slice(u);
        Ok(())
    })
}

/// Audits the a priori energy estimates along `trajectory`, which must have
/// been computed on `problem`.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_energy_audit(
    trajectory: *const CsTrajectory,
    problem: *const CsProblem,
    reaction: *const CsReaction,
    out: *mut CsEnergySummary,
) -> CsStatus {
    guard(|| {
        let tr = &deref(trajectory, "trajectory")?.inner;
        let p = deref(problem, "problem")?;
        let term = &deref(reaction, "reaction")?.term;
        if tr.final_state().len() != p.op.node_count() {
            return Err(fail(CsStatus::InvalidArgument, "trajectory was computed on a different mesh"));
        }
        let r = EnergyReport::compute(tr, term, &p.op)?;
        put(
            out,
            CsEnergySummary {
                admissibility: r.admissibility,
                gamma: r.gamma,
                tolerance: r.tolerance,
                worst_weak_margin: r.worst_weak_margin,
                sup_margin: r.sup_margin,
                integral_margin: r.integral_margin,
                strong_margin: r.strong_margin,
                admissibility_margin: r.admissibility_margin,
                pass: i32::from(r.pass),
            },
            "out",
        )
    })
}

/// Steady state by damped Newton from a zero guess; writes the nodal state.
///
/// # Safety
/// Handles must be live; `state` valid for `len` writes; `iterations` and
/// `residual` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_stationary(
    problem: *const CsProblem,
    reaction: *const CsReaction,
    state: *mut f64,
    len: usize,
    iterations: *mut usize,
    residual: *mut f64,
) -> CsStatus {
    guard(|| {
        let p = deref(problem, "problem")?;
        let term = &deref(reaction, "reaction")?.term;
        need(len, p.op.node_count(), "state")?;
        let buf = slice_mut(state, len, "state")?;
        let s = stationary_solve(&p.op, term, None, NewtonOptions::default())?;
        buf[..s.state.len()].copy_from_slice(&s.state);
        if !iterations.is_null() {
            iterations.write(s.iterations);
        }
        if !residual.is_null() {
            residual.write(s.residual);
        }
        Ok(())
    })
}
