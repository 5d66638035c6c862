//! C ABI over the casimir-sat library.
//!
//! Materials are opaque handles created by `cs_material_*` and released with
//! `cs_material_free`. Every fallible call returns a `CsStatus`; on failure the
//! message is kept per thread and read with `cs_last_error_message`.

use casimir_sat::atomwall::{self, AtomModel, TrapConfig};
use casimir_sat::dielectric::{Composite, DielectricModel, Oscillator};
use casimir_sat::error::{Error, EXIT_CONVERGENCE};
use casimir_sat::lifshitz::{self, EvaluationRoute, QuadratureSpec, ThermalState};
use casimir_sat::modecond::HalfSpacePair;
use casimir_sat::saturation::{SaturationModel, Scope};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Convergence = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsRoute {
    ZeroTemperature = 0,
    Matsubara = 1,
    RealAxis = 2,
    Hybrid = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsSaturationKind {
    None = 0,
    /// Shifted Bose distribution, parameter D.
    Shifted = 1,
    /// Occupation cap, parameter M.
    Cutoff = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsScope {
    AllModes = 0,
    TeEvanescent = 1,
    ZeroTerm = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsSaturation {
    pub kind: CsSaturationKind,
    pub parameter: f64,
    pub scope: CsScope,
}

/// Mirrors the library quadrature settings; see `cs_quadrature_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsQuadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub matsubara_rel_tol: f64,
    pub max_matsubara_terms: usize,
    pub k_cutoff_multiplier: f64,
    pub omega_cutoff_multiplier: f64,
}

/// Energy (J/m^2) or pressure (Pa) with its split; parts are valid when has_parts != 0.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsEvaluation {
    pub total: f64,
    pub tm: f64,
    pub te: f64,
    pub has_parts: i32,
    pub tm_propagating: f64,
    pub tm_evanescent: f64,
    pub te_propagating: f64,
    pub te_evanescent: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsAtom {
    /// m^3 (Gaussian).
    pub static_polarizability: f64,
    /// rad/s.
    pub resonance: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsTrap {
    pub amplitude: f64,
    pub thomas_fermi_radius: f64,
    pub mass: f64,
    pub trap_frequency: f64,
}

/// Opaque dielectric model.
pub struct CsMaterial(DielectricModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CsStatus {
    if e.exit_code() == EXIT_CONVERGENCE {
        CsStatus::Convergence
    } else {
        CsStatus::Validation
    }
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), CsStatusError>) -> CsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(CsStatusError::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(CsStatusError::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CsStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CsStatus::Panic
        }
    }
}

enum CsStatusError {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for CsStatusError {
    fn from(e: Error) -> Self {
        CsStatusError::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, CsStatusError> {
    p.as_ref().ok_or(CsStatusError::Null(what))
}

unsafe fn store<T>(out: *mut T, v: T, what: &'static str) -> Result<(), CsStatusError> {
    if out.is_null() {
        return Err(CsStatusError::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn new_material(out: *mut *mut CsMaterial, m: DielectricModel) -> Result<(), CsStatusError> {
    if out.is_null() {
        return Err(CsStatusError::Null("out"));
    }
    m.validate()?;
    out.write(Box::into_raw(Box::new(CsMaterial(m))));
    Ok(())
}

fn saturation(s: Option<&CsSaturation>) -> Result<SaturationModel, Error> {
    let Some(s) = s else {
        return Ok(SaturationModel::NONE);
    };
    let scope = match s.scope {
        CsScope::AllModes => Scope::AllModes,
        CsScope::TeEvanescent => Scope::TeEvanescentOnly,
        CsScope::ZeroTerm => Scope::ZeroTermOnly,
    };
    match s.kind {
        CsSaturationKind::None => Ok(SaturationModel::NONE),
        CsSaturationKind::Shifted => SaturationModel::shifted(s.parameter, scope),
        CsSaturationKind::Cutoff => SaturationModel::cutoff(s.parameter, scope),
    }
}

fn quadrature(q: Option<&CsQuadrature>) -> QuadratureSpec {
    q.map(|q| QuadratureSpec {
        rel_tol: q.rel_tol,
        abs_tol: q.abs_tol,
        max_subdivisions: q.max_subdivisions,
        matsubara_rel_tol: q.matsubara_rel_tol,
        max_matsubara_terms: q.max_matsubara_terms,
        k_cutoff_multiplier: q.k_cutoff_multiplier,
        omega_cutoff_multiplier: q.omega_cutoff_multiplier,
    })
    .unwrap_or_default()
}

fn route(r: CsRoute) -> EvaluationRoute {
    match r {
        CsRoute::ZeroTemperature => EvaluationRoute::ZeroTemperature,
        CsRoute::Matsubara => EvaluationRoute::Matsubara,
        CsRoute::RealAxis => EvaluationRoute::RealAxis,
        CsRoute::Hybrid => EvaluationRoute::Hybrid,
    }
}

/// Library defaults for the quadrature settings.
#[no_mangle]
pub extern "C" fn cs_quadrature_default() -> CsQuadrature {
    let q = QuadratureSpec::default();
    CsQuadrature {
        rel_tol: q.rel_tol,
        abs_tol: q.abs_tol,
        max_subdivisions: q.max_subdivisions,
        matsubara_rel_tol: q.matsubara_rel_tol,
        max_matsubara_terms: q.max_matsubara_terms,
        k_cutoff_multiplier: q.k_cutoff_multiplier,
        omega_cutoff_multiplier: q.omega_cutoff_multiplier,
    }
}

/// Drude metal; frequencies in rad/s.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cs_material_drude(plasma_frequency: f64, relaxation_rate: f64, out: *mut *mut CsMaterial) -> CsStatus {
    guard(|| {
        new_material(
            out,
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            },
        )
    })
}

/// Lossless plasma metal; frequency in rad/s.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cs_material_plasma(plasma_frequency: f64, out: *mut *mut CsMaterial) -> CsStatus {
    guard(|| new_material(out, DielectricModel::Plasma { plasma_frequency }))
}

/// Ideal reflector.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cs_material_perfect(out: *mut *mut CsMaterial) -> CsStatus {
    guard(|| new_material(out, DielectricModel::PerfectReflector))
}

/// Lorentz oscillators plus an optional conductivity (s^-1, Gaussian; 0 for none).
///
/// # Safety
/// The three arrays must hold `count` values each (they may be null when `count` is 0);
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cs_material_oscillators(
    count: usize,
    strengths: *const f64,
    resonances: *const f64,
    dampings: *const f64,
    conductivity: f64,
    out: *mut *mut CsMaterial,
) -> CsStatus {
    guard(|| {
        let mut osc = Vec::with_capacity(count);
        if count > 0 {
            if strengths.is_null() || resonances.is_null() || dampings.is_null() {
                return Err(CsStatusError::Null("oscillator arrays"));
            }
            let s = std::slice::from_raw_parts(strengths, count);
            let r = std::slice::from_raw_parts(resonances, count);
            let g = std::slice::from_raw_parts(dampings, count);
            for i in 0..count {
                osc.push(Oscillator {
                    strength: s[i],
                    resonance: r[i],
                    damping: g[i],
                });
            }
        }
        let base = DielectricModel::OscillatorSet(osc);
        let m = if conductivity == 0.0 {
            base
        } else {
            DielectricModel::Composite(Box::new(Composite {
                base,
                carriers: None,
                conductivity,
            }))
        };
        new_material(out, m)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `m` must come from a `cs_material_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_material_free(m: *mut CsMaterial) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// eps(i xi) for xi > 0 (rad/s).
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_material_eps_imag(m: *const CsMaterial, xi: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let m = deref(m, "material")?;
        store(out, m.0.eps_imag(xi)?, "out")
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn plate(
    pressure: bool,
    m1: *const CsMaterial,
    m2: *const CsMaterial,
    d: f64,
    temperature: f64,
    r: CsRoute,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut CsEvaluation,
) -> CsStatus {
    guard(|| {
        let a = deref(m1, "medium 1")?;
        let b = deref(m2, "medium 2")?;
        let pair = HalfSpacePair::new(a.0.clone(), b.0.clone(), d)?;
        let t = ThermalState::new(temperature)?;
        let s = saturation(sat.as_ref())?;
        let q = quadrature(quad.as_ref());
        let e = if pressure {
            lifshitz::pressure(&pair, &t, &s, route(r), &q)?
        } else {
            lifshitz::energy(&pair, &t, &s, route(r), &q)?
        };
        let p = e.parts.unwrap_or_default();
        let v = CsEvaluation {
            total: e.total,
            tm: e.tm,
            te: e.te,
            has_parts: e.parts.is_some() as i32,
            tm_propagating: p.tm_propagating,
            tm_evanescent: p.tm_evanescent,
            te_propagating: p.te_propagating,
            te_evanescent: p.te_evanescent,
        };
        store(out, v, "out")
    })
}

/// Plate-plate energy per unit area (J/m^2) at separation d (m) and temperature (K).
/// `sat` and `quad` may be null for no saturation and default quadrature.
///
/// # Safety
/// Handles must be live; non-null pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_plate_energy(
    m1: *const CsMaterial,
    m2: *const CsMaterial,
    d: f64,
    temperature: f64,
    route: CsRoute,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut CsEvaluation,
) -> CsStatus {
    plate(false, m1, m2, d, temperature, route, sat, quad, out)
}

/// Plate-plate pressure (Pa, positive = attraction); arguments as `cs_plate_energy`.
///
/// # Safety
/// As `cs_plate_energy`.
#[no_mangle]
pub unsafe extern "C" fn cs_plate_pressure(
    m1: *const CsMaterial,
    m2: *const CsMaterial,
    d: f64,
    temperature: f64,
    route: CsRoute,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut CsEvaluation,
) -> CsStatus {
    plate(true, m1, m2, d, temperature, route, sat, quad, out)
}

#[derive(Clone, Copy)]
enum AtomQuantity {
    Potential,
    Force,
    GammaX,
}

#[allow(clippy::too_many_arguments)]
unsafe fn atom_call(
    which: AtomQuantity,
    wall: *const CsMaterial,
    atom: CsAtom,
    trap: *const CsTrap,
    d: f64,
    temperature: f64,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let w = &deref(wall, "wall")?.0;
        let a = AtomModel::new(atom.static_polarizability, atom.resonance)?;
        let t = ThermalState::new(temperature)?;
        let s = saturation(sat.as_ref())?;
        let q = quadrature(quad.as_ref());
        let v = match which {
            AtomQuantity::Potential => atomwall::potential(d, w, &a, &t, &s, &q)?,
            AtomQuantity::Force => atomwall::force(d, w, &a, &t, &s, &q)?,
            AtomQuantity::GammaX => {
                let tr = deref(trap, "trap")?;
                let tr = TrapConfig {
                    amplitude: tr.amplitude,
                    thomas_fermi_radius: tr.thomas_fermi_radius,
                    mass: tr.mass,
                    trap_frequency: tr.trap_frequency,
                };
                atomwall::gamma_x(d, w, &a, &tr, &t, &s, &q)?
            }
        };
        store(out, v, "out")
    })
}

/// Atom-wall potential, J (negative = attraction).
///
/// # Safety
/// `wall` must be live; `sat`/`quad` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_atom_potential(
    wall: *const CsMaterial,
    atom: CsAtom,
    d: f64,
    temperature: f64,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut f64,
) -> CsStatus {
    atom_call(AtomQuantity::Potential, wall, atom, std::ptr::null(), d, temperature, sat, quad, out)
}

/// Atom-wall force -dV/dd, N (negative = toward the wall).
///
/// # Safety
/// As `cs_atom_potential`.
#[no_mangle]
pub unsafe extern "C" fn cs_atom_force(
    wall: *const CsMaterial,
    atom: CsAtom,
    d: f64,
    temperature: f64,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut f64,
) -> CsStatus {
    atom_call(AtomQuantity::Force, wall, atom, std::ptr::null(), d, temperature, sat, quad, out)
}

/// Fractional trap-frequency shift (dimensionless).
///
/// # Safety
/// As `cs_atom_potential`; `trap` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_gamma_x(
    wall: *const CsMaterial,
    atom: CsAtom,
    trap: *const CsTrap,
    d: f64,
    temperature: f64,
    sat: *const CsSaturation,
    quad: *const CsQuadrature,
    out: *mut f64,
) -> CsStatus {
    atom_call(AtomQuantity::GammaX, wall, atom, trap, d, temperature, sat, quad, out)
}

/// Ideal-plate zero-temperature energy -pi^2 hbar c / (720 d^3), J/m^2.
#[no_mangle]
pub extern "C" fn cs_ideal_energy(d: f64) -> f64 {
    lifshitz::ideal_energy(d)
}

/// Length in bytes of the calling thread's last error message (0 if none).
#[no_mangle]
pub extern "C" fn cs_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copies the last error message, NUL-terminated and truncated to `len - 1` bytes.
/// Returns the full message length; pass a null buffer to query it.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |c| c.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}

/// Library version, static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
