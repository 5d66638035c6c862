use casimir_sat_ffi::*;
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        cs_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn drude() -> *mut CsMaterial {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { cs_material_drude(1.37e16, 5.32e13, &mut m) }, CsStatus::Ok);
    m
}

#[test]
fn ideal_plates_through_the_abi() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(cs_material_perfect(&mut m), CsStatus::Ok);
        let mut e = CsEvaluation::default();
        let st = cs_plate_energy(m, m, 1e-6, 0.0, CsRoute::ZeroTemperature, ptr::null(), ptr::null(), &mut e);
        assert_eq!(st, CsStatus::Ok);
        assert!((e.total / cs_ideal_energy(1e-6) - 1.0).abs() < 1e-6);
        cs_material_free(m);
    }
}

#[test]
fn gold_with_saturation_and_parts() {
    let m = drude();
    let sat = CsSaturation {
        kind: CsSaturationKind::Shifted,
        parameter: 0.1,
        scope: CsScope::TeEvanescent,
    };
    let q = cs_quadrature_default();
    let mut plain = CsEvaluation::default();
    let mut damped = CsEvaluation::default();
    unsafe {
        assert_eq!(cs_plate_energy(m, m, 1e-6, 300.0, CsRoute::Hybrid, ptr::null(), &q, &mut plain), CsStatus::Ok);
        assert_eq!(cs_plate_energy(m, m, 1e-6, 300.0, CsRoute::Hybrid, &sat, &q, &mut damped), CsStatus::Ok);
        cs_material_free(m);
    }
    assert_eq!(damped.has_parts, 1);
    // the TE-evanescent thermal part is repulsive (positive energy); saturation shrinks it
    assert!(damped.te_evanescent > 0.0 && damped.te_evanescent < plain.te_evanescent);
    assert!(damped.total.abs() > plain.total.abs());
}

#[test]
fn errors_are_reported_with_status_and_message() {
    let m = drude();
    let mut e = CsEvaluation::default();
    unsafe {
        let st = cs_plate_energy(m, m, -1.0, 300.0, CsRoute::Matsubara, ptr::null(), ptr::null(), &mut e);
        assert_eq!(st, CsStatus::Validation);
        assert!(cs_last_error_length() > 0);
        assert!(last_error().contains("separation"), "{}", last_error());
        let st = cs_plate_energy(ptr::null(), m, 1e-6, 300.0, CsRoute::Matsubara, ptr::null(), ptr::null(), &mut e);
        assert_eq!(st, CsStatus::NullPointer);
        let mut q = cs_quadrature_default();
        q.rel_tol = 1e-15;
        q.max_subdivisions = 10;
        let st = cs_plate_energy(m, m, 1e-6, 300.0, CsRoute::Matsubara, ptr::null(), &q, &mut e);
        assert_eq!(st, CsStatus::Convergence, "{}", last_error());
        let mut out = ptr::null_mut();
        assert_eq!(cs_material_drude(-1.0, 1.0, &mut out), CsStatus::Validation);
        assert!(out.is_null());
        cs_material_free(m);
        cs_material_free(ptr::null_mut());
        // success clears the message
        let mut v = 0.0;
        let p = drude();
        assert_eq!(cs_material_eps_imag(p, 1e14, &mut v), CsStatus::Ok);
        assert_eq!(cs_last_error_length(), 0);
        cs_material_free(p);
    }
}

#[test]
fn atom_wall_through_the_abi() {
    let strengths = [0.829, 1.98];
    let resonances = [2.034e16, 1.32e14];
    let dampings = [0.0, 0.0];
    let mut wall = ptr::null_mut();
    let atom = CsAtom {
        static_polarizability: 4.73e-29,
        resonance: 2.4e15,
    };
    let trap = CsTrap {
        amplitude: 2.5e-6,
        thomas_fermi_radius: 2.69e-6,
        mass: 1.443e-25,
        trap_frequency: 1438.85,
    };
    unsafe {
        let st = cs_material_oscillators(2, strengths.as_ptr(), resonances.as_ptr(), dampings.as_ptr(), 0.0, &mut wall);
        assert_eq!(st, CsStatus::Ok);
        let (mut v, mut f, mut g) = (0.0, 0.0, 0.0);
        assert_eq!(cs_atom_potential(wall, atom, 5e-6, 310.0, ptr::null(), ptr::null(), &mut v), CsStatus::Ok);
        assert_eq!(cs_atom_force(wall, atom, 5e-6, 310.0, ptr::null(), ptr::null(), &mut f), CsStatus::Ok);
        assert_eq!(cs_gamma_x(wall, atom, &trap, 7e-6, 310.0, ptr::null(), ptr::null(), &mut g), CsStatus::Ok);
        assert!(v < 0.0 && f < 0.0 && g > 0.0);
        assert_eq!(cs_gamma_x(wall, atom, &trap, 5e-6, 310.0, ptr::null(), ptr::null(), &mut g), CsStatus::Validation);
        assert_eq!(cs_gamma_x(wall, atom, ptr::null(), 7e-6, 310.0, ptr::null(), ptr::null(), &mut g), CsStatus::NullPointer);
        cs_material_free(wall);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/casimir_sat.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct CsMaterial CsMaterial;",
        "cs_material_drude",
        "cs_material_oscillators",
        "cs_material_free",
        "cs_plate_energy",
        "cs_plate_pressure",
        "cs_atom_potential",
        "cs_gamma_x",
        "cs_last_error_message",
        "CS_STATUS_CONVERGENCE = 3",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "casimir_sat.h"
int main(void) {
    CsMaterial *m = NULL;
    if (cs_material_perfect(&m) != CS_STATUS_OK) return 1;
    CsEvaluation e;
    if (cs_plate_energy(m, m, 1e-6, 0.0, CS_ROUTE_ZERO_TEMPERATURE, NULL, NULL, &e) != CS_STATUS_OK) return 2;
    double r = e.total / cs_ideal_energy(1e-6);
    cs_material_free(m);
    if (cs_plate_energy(NULL, NULL, 1e-6, 0.0, CS_ROUTE_ZERO_TEMPERATURE, NULL, NULL, &e) != CS_STATUS_NULL_POINTER) return 3;
    char buf[128];
    cs_last_error_message(buf, sizeof buf);
    printf("%.9f %s\n", r, buf);
    return 0;
}
"#;

/// Compiles and runs a C client against the static library when a C compiler is present.
#[test]
fn c_client_links_and_runs() {
    let Some(lib_dir) = std::env::current_exe().ok().and_then(|p| p.parent()?.parent().map(Path::to_path_buf)) else {
        return;
    };
    let lib = lib_dir.join("libcasimir_sat_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = dir.path().join("client");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(text.starts_with("1.000000000 null pointer"), "{text}");
}
