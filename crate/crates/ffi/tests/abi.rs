use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use coreshell_ffi::*;

fn problem(b1: f64, b2: f64, elements: usize) -> *mut CsProblem {
    let mut p = ptr::null_mut();
    let s = unsafe { cs_problem_new(CsGeometry::Interval, 1, 0.5, 1.0, elements, b1, b2, 0.0, &mut p) };
    assert_eq!(s, CsStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    let n = unsafe { cs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn spectrum_and_eigenvectors() {
    let p = problem(1.0, 1.0, 256);
    let mut ev = [0.0; 4];
    assert_eq!(unsafe { cs_problem_eigenvalues(p, 4, ev.as_mut_ptr()) }, CsStatus::Ok);
    for (j, l) in ev.iter().enumerate() {
        let exact = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
        assert!((l - exact).abs() / exact < 1e-3);
    }
    let mut n = 0;
    assert_eq!(unsafe { cs_problem_node_count(p, &mut n) }, CsStatus::Ok);
    assert_eq!(n, 257);
    let mut w = vec![0.0; n];
    assert_eq!(unsafe { cs_problem_eigenvector(p, 0, w.as_mut_ptr(), n) }, CsStatus::Ok);
    let mut h = 0.0;
    assert_eq!(unsafe { cs_problem_norm(p, CsNorm::H, w.as_ptr(), n, &mut h) }, CsStatus::Ok);
    assert!((h - 1.0).abs() < 1e-12);
    let mut da = 0.0;
    assert_eq!(unsafe { cs_problem_norm(p, CsNorm::DA, w.as_ptr(), n, &mut da) }, CsStatus::Ok);
    assert!((da - ev[0]).abs() < 1e-8 * ev[0]);
    unsafe { cs_problem_free(p) };
}

#[test]
fn solve_audit_and_stationary() {
    let p = problem(4.0, 1.0, 128);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cs_reaction_michaelis_menten(1.0, 0.5, 1.0, &mut r) }, CsStatus::Ok);
    let (mut k, mut l) = (0.0, 0.0);
    assert_eq!(unsafe { cs_reaction_certify(r, p, &mut k, &mut l) }, CsStatus::Ok);
    assert_eq!((k, l), (1.0, 2.0));

    for solver in [CsSolver::Galerkin, CsSolver::Fem] {
        let mut t = ptr::null_mut();
        let s = unsafe { cs_solve(p, r, solver, 32, 0.2, 1e-3, ptr::null(), 0, &mut t) };
        assert_eq!(s, CsStatus::Ok, "{}", last_error());
        let mut len = 0;
        assert_eq!(unsafe { cs_trajectory_len(t, &mut len) }, CsStatus::Ok);
        assert_eq!(len, 201);
        let mut rec = CsNormRecord::default();
        assert_eq!(unsafe { cs_trajectory_record(t, len - 1, &mut rec) }, CsStatus::Ok);
        assert!((rec.t - 0.2).abs() < 1e-15 && rec.h_norm_sq > 0.0);
        assert_eq!(unsafe { cs_trajectory_record(t, len, &mut rec) }, CsStatus::InvalidArgument);
        let mut e = CsEnergySummary::default();
        assert_eq!(unsafe { cs_energy_audit(t, p, r, &mut e) }, CsStatus::Ok);
        assert_eq!(e.pass, 1);
        assert!(e.worst_weak_margin >= -e.tolerance);
        unsafe { cs_trajectory_free(t) };
    }

    let mut state = vec![0.0; 129];
    let (mut it, mut res) = (0usize, 0.0);
    assert_eq!(unsafe { cs_stationary(p, r, state.as_mut_ptr(), state.len(), &mut it, &mut res) }, CsStatus::Ok);
    assert!(res < 1e-10 && it <= 50);
    let mut jump = 0.0;
    assert_eq!(unsafe { cs_problem_flux_jump(p, state.as_ptr(), state.len(), &mut jump) }, CsStatus::Ok);
    assert!(jump.abs() < 0.01);

    unsafe {
        cs_reaction_free(r);
        cs_problem_free(p);
    }
}

#[test]
fn errors_are_codes_with_messages() {
    let mut p = ptr::null_mut();
    let s = unsafe { cs_problem_new(CsGeometry::Interval, 1, 1.5, 1.0, 16, 1.0, 1.0, 0.0, &mut p) };
    assert_eq!(s, CsStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("interface"));

    let mut n = 0;
    assert_eq!(unsafe { cs_problem_node_count(ptr::null(), &mut n) }, CsStatus::NullPointer);
    assert!(last_error().contains("problem"));

    let p = problem(1.0, 1.0, 8);
    let mut ev = [0.0; 9];
    assert_eq!(unsafe { cs_problem_eigenvalues(p, 9, ev.as_mut_ptr()) }, CsStatus::InvalidArgument);
    let mut short = [0.0; 3];
    assert_eq!(unsafe { cs_problem_nodes(p, short.as_mut_ptr(), 3) }, CsStatus::BufferTooSmall);

    let mut src = ptr::null_mut();
    assert_eq!(unsafe { cs_reaction_constant_source(1.0, &mut src) }, CsStatus::Ok);
    let (mut k, mut l) = (0.0, 0.0);
    assert_eq!(unsafe { cs_reaction_certify(src, p, &mut k, &mut l) }, CsStatus::Inadmissible);

    // success clears the message
    assert_eq!(unsafe { cs_problem_node_count(p, &mut n) }, CsStatus::Ok);
    assert_eq!(unsafe { cs_last_error_message(ptr::null_mut(), 0) }, 0);

    // truncation keeps the terminator
    let _ = unsafe { cs_problem_node_count(ptr::null(), &mut n) };
    let mut tiny = [1 as std::ffi::c_char; 4];
    let full = unsafe { cs_last_error_message(tiny.as_mut_ptr(), tiny.len()) };
    assert!(full > tiny.len());
    assert_eq!(tiny[3], 0);

    unsafe {
        cs_reaction_free(src);
        cs_problem_free(p);
        cs_problem_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/coreshell.h")
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Wextra", "-x", lang])
            .arg(header())
            .output()
            .unwrap_or_else(|e| panic!("{compiler}: {e}"));
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcoreshell_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let tmp = std::env::temp_dir().join(format!("coreshell-ffi-smoke-{}", std::process::id()));
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let out = Command::new("cc")
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-o"])
        .arg(&tmp)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-lrt", "-lutil", "-lgcc_s", "-lc"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&tmp).output().unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
