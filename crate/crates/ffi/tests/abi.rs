use std::f64::consts::{FRAC_PI_2, PI};
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use revgeo_ffi::*;

fn unit() -> *mut RevgeoSurface {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { revgeo_surface_new(2.0, 1.0, &mut s) }, RevgeoStatus::Ok);
    assert!(!s.is_null());
    s
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    let n = unsafe { revgeo_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(n, msg.len());
    msg
}

#[test]
fn surface_queries() {
    let s = unit();
    let mut family = RevgeoFamily::Sphere;
    assert_eq!(unsafe { revgeo_surface_family(s, &mut family) }, RevgeoStatus::Ok);
    assert_eq!(family, RevgeoFamily::Ring);
    let mut p = RevgeoProfile::default();
    assert_eq!(unsafe { revgeo_surface_profile(s, PI, &mut p) }, RevgeoStatus::Ok);
    assert!((p.radius - 1.0).abs() < 1e-15);
    let mut k = 0.0;
    assert_eq!(unsafe { revgeo_gaussian_curvature(s, 0.0, &mut k) }, RevgeoStatus::Ok);
    assert!((k - 1.0 / 3.0).abs() < 1e-14);
    let mut u = 0.0;
    assert_eq!(unsafe { revgeo_effective_potential(s, 1.0, PI, &mut u) }, RevgeoStatus::Ok);
    assert!((u - 0.5).abs() < 1e-15);
    let mut c = RevgeoCriticalAngles::default();
    assert_eq!(unsafe { revgeo_critical_angles(s, &mut c) }, RevgeoStatus::Ok);
    assert!((c.beta_crit - (1.0f64 / 3.0).asin()).abs() < 1e-14);
    assert!((c.beta_polar - (2.0f64 / 3.0).asin()).abs() < 1e-14);
    let mut tp = RevgeoTurningPoint::default();
    assert_eq!(unsafe { revgeo_turning_point(s, 0.1, &mut tp) }, RevgeoStatus::Ok);
    assert!(tp.chi_max.is_nan());
    assert_eq!(unsafe { revgeo_turning_point(s, 1.0, &mut tp) }, RevgeoStatus::Ok);
    assert!(tp.chi_max > 0.0 && tp.chi_max < PI);
    let mut f = 0.0;
    assert_eq!(unsafe { revgeo_theta_frequency(s, FRAC_PI_2 - 1e-4, &mut f) }, RevgeoStatus::Ok);
    assert!((f - 3f64.sqrt()).abs() < 1e-3);
    unsafe { revgeo_surface_free(s) };
}

#[test]
fn closed_geodesic_and_trace() {
    let s = unit();
    let mut cg = RevgeoClosed::default();
    assert_eq!(unsafe { revgeo_find_closed(s, 3, 2, 0, &mut cg) }, RevgeoStatus::Ok);
    assert!((cg.beta0 - 0.71666353390152).abs() < 1e-9);
    assert!(cg.chi_max.is_finite());
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { revgeo_integrate(s, 0.0, 0.0, cg.beta0, cg.period_length, 1e-12, &mut t) }, RevgeoStatus::Ok);
    let n = unsafe { revgeo_trace_len(t) };
    assert!(n > 10);
    let mut last = RevgeoState::default();
    assert_eq!(unsafe { revgeo_trace_state(t, n - 1, &mut last) }, RevgeoStatus::Ok);
    assert!((last.lambda - cg.period_length).abs() < 1e-9);
    assert!(last.r.abs() < 1e-6);
    let mut mid = RevgeoState::default();
    assert_eq!(unsafe { revgeo_trace_state_at(t, 0.5 * cg.period_length, &mut mid) }, RevgeoStatus::Ok);
    assert_eq!(unsafe { revgeo_trace_state(t, n, &mut last) }, RevgeoStatus::Domain);
    let mut d = RevgeoDrift::default();
    assert_eq!(unsafe { revgeo_trace_drift(t, &mut d) }, RevgeoStatus::Ok);
    assert!(d.energy < 1e-9 && d.ell < 1e-9 && d.clairaut < 1e-9);
    unsafe { revgeo_trace_free(t) };
    unsafe { revgeo_surface_free(s) };
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { revgeo_surface_new(1.0, -1.0, &mut s) }, RevgeoStatus::Domain);
    assert!(s.is_null());
    assert!(last_error().contains("b must be positive"));
    assert_eq!(unsafe { revgeo_surface_new(2.0, 1.0, ptr::null_mut()) }, RevgeoStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { revgeo_gaussian_curvature(ptr::null(), 0.0, &mut x) }, RevgeoStatus::NullPointer);
    let s = unit();
    assert_eq!(unsafe { revgeo_surface_family(s, ptr::null_mut()) }, RevgeoStatus::NullPointer);
    let mut cg = RevgeoClosed::default();
    assert_eq!(unsafe { revgeo_find_closed(s, 2, 1, 0, &mut cg) }, RevgeoStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { revgeo_flat_length(2, 3, &mut x) }, RevgeoStatus::Ok);
    assert_eq!(unsafe { revgeo_last_error_message(ptr::null_mut(), 0) }, 0);
    assert_eq!(unsafe { revgeo_flat_length(0, 0, &mut x) }, RevgeoStatus::Domain);
    assert_eq!(unsafe { revgeo_trace_len(ptr::null()) }, 0);
    unsafe {
        revgeo_trace_free(ptr::null_mut());
        revgeo_surface_free(ptr::null_mut());
        revgeo_surface_free(s);
    }
}

#[test]
fn flat_and_kepler() {
    let mut x = 0.0;
    assert_eq!(unsafe { revgeo_flat_length(2, 3, &mut x) }, RevgeoStatus::Ok);
    assert_eq!(x, 13f64.sqrt());
    let mut a = RevgeoApsides::default();
    assert_eq!(unsafe { revgeo_kepler_apsides(1.0, 0.0, 1.0, -0.25, &mut a) }, RevgeoStatus::Ok);
    assert!((a.apsidal_angle - PI).abs() < 1e-8);
    assert!((a.pericenter - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    assert_eq!(unsafe { revgeo_kepler_apsides(1.0, 0.0, 1.0, 0.5, &mut a) }, RevgeoStatus::Domain);
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/revgeo.h")).unwrap();
    for name in [
        "typedef struct RevgeoSurface RevgeoSurface;",
        "typedef struct RevgeoTrace RevgeoTrace;",
        "REVGEO_STATUS_NUMERICAL = 3",
        "revgeo_surface_new",
        "revgeo_find_closed",
        "revgeo_integrate",
        "revgeo_trace_state_at",
        "revgeo_last_error_message",
        "revgeo_kepler_apsides",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("librevgeo_ffi.a");
    lib.exists().then_some(lib)
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok_and(|o| o.status.success())
}

/// Compiles and runs a C program against the generated header and static library.
#[test]
fn c_program_links_and_runs() {
    let (Some(lib), true) = (static_lib(), have("cc")) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = crate_dir().join("tests/c/smoke.c");
    let include = crate_dir().join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("0.716664"), "{text}");
}
