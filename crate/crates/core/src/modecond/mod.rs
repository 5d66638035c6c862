//! Gamma functions, Fresnel coefficients and the two-plate mode condition.
//!
//! Index 0 is the vacuum gap, 1 and 2 the two half-spaces. Coefficients follow
//!   r_ij^TM = (eps_j g_i - eps_i g_j) / (eps_j g_i + eps_i g_j),
//!   r_ij^TE = (g_i - g_j) / (g_i + g_j),
//! so r_01^TM -> +1 and r_01^TE -> -1 for a perfect reflector, and at normal
//! incidence (k = 0) r^TM = -r^TE. Only products r_01 r_02 enter observables.
//!
//! Real-axis square roots take the principal branch (Re >= 0); on the cut
//! Re = 0 the root with Im <= 0 is chosen, so e^{-g0 d} is outgoing.

mod dispersion;

pub use dispersion::{dispersion_csv, dispersion_solve, DispersionOptions, DispersionRoot};

use crate::constants::C;
use crate::dielectric::{DielectricModel, StaticResponse};
use crate::error::{validation, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    TM,
    TE,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TM, Polarization::TE];

    pub fn as_str(&self) -> &'static str {
        match self {
            Polarization::TM => "TM",
            Polarization::TE => "TE",
        }
    }
}

/// Mode class relative to the vacuum light line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeClass {
    /// k < w/c.
    Propagating,
    /// k > w/c.
    Evanescent,
}

impl ModeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeClass::Propagating => "propagating",
            ModeClass::Evanescent => "evanescent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrequencyPoint {
    /// w = i xi, xi > 0.
    Imaginary(f64),
    /// Real w > 0.
    Real(f64),
}

/// Two half-spaces separated by a vacuum gap of width `separation` (m).
#[derive(Clone, Debug)]
pub struct HalfSpacePair {
    pub medium1: DielectricModel,
    pub medium2: DielectricModel,
    pub separation: f64,
}

impl HalfSpacePair {
    pub fn new(medium1: DielectricModel, medium2: DielectricModel, separation: f64) -> Result<Self> {
        if !(separation > 0.0 && separation.is_finite()) {
            return Err(validation(format!("separation must be > 0, got {separation}")));
        }
        medium1.validate()?;
        medium2.validate()?;
        Ok(Self {
            medium1,
            medium2,
            separation,
        })
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.medium1.clone(), self.medium2.clone(), separation)
    }
}

/// Square root with Re >= 0, ties broken toward Im <= 0.
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.re == 0.0 && s.im > 0.0 {
        Complex64::new(0.0, -s.im)
    } else if s.re < 0.0 {
        -s
    } else {
        s
    }
}

/// g = sqrt(k^2 - eps w^2/c^2); on the imaginary axis sqrt(k^2 + eps xi^2/c^2).
pub fn gamma(k: f64, point: FrequencyPoint, eps: Complex64) -> Complex64 {
    match point {
        FrequencyPoint::Imaginary(xi) => {
            let x = xi / C;
            branch_sqrt(k * k + eps * x * x)
        }
        FrequencyPoint::Real(w) => {
            let x = w / C;
            branch_sqrt(k * k - eps * x * x)
        }
    }
}

fn is_perfect(eps: Complex64) -> bool {
    eps.re.is_infinite() || eps.im.is_infinite()
}

fn ratio(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::SingularCoefficient(format!("{what}: vanishing denominator")));
    }
    Ok(num / den)
}

/// Fresnel amplitude coefficient r_ij between media with permittivities eps_i and eps_j.
pub fn fresnel(pol: Polarization, k: f64, point: FrequencyPoint, eps_i: Complex64, eps_j: Complex64) -> Result<Complex64> {
    match (is_perfect(eps_i), is_perfect(eps_j)) {
        (true, true) => return Ok(Complex64::new(0.0, 0.0)),
        (false, true) => {
            return Ok(match pol {
                Polarization::TM => Complex64::new(1.0, 0.0),
                Polarization::TE => Complex64::new(-1.0, 0.0),
            })
        }
        (true, false) => {
            return Ok(match pol {
                Polarization::TM => Complex64::new(-1.0, 0.0),
                Polarization::TE => Complex64::new(1.0, 0.0),
            })
        }
        _ => {}
    }
    if eps_i == eps_j {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gi = gamma(k, point, eps_i);
    let gj = gamma(k, point, eps_j);
    match pol {
        Polarization::TM => ratio(eps_j * gi - eps_i * gj, eps_j * gi + eps_i * gj, "TM"),
        Polarization::TE => ratio(gi - gj, gi + gj, "TE"),
    }
}

/// r_01 on the imaginary axis in terms of q = g0 (m^-1), real and in [-1, 1].
pub fn reflection_imag(pol: Polarization, q: f64, xi: f64, eps: f64) -> f64 {
    if eps.is_infinite() {
        return match pol {
            Polarization::TM => 1.0,
            Polarization::TE => -1.0,
        };
    }
    let x = xi / C;
    let g1 = (q * q + (eps - 1.0) * x * x).sqrt();
    match pol {
        Polarization::TM => (eps * q - g1) / (eps * q + g1),
        // (q - g1)/(q + g1) written without cancellation
        Polarization::TE => -(eps - 1.0) * x * x / ((q + g1) * (q + g1)),
    }
}

/// Reflection on the imaginary axis from a free-standing slab of thickness t (m)
/// and permittivity eps, in the same sign convention as [`reflection_imag`].
pub fn slab_reflection_imag(pol: Polarization, q: f64, xi: f64, eps: f64, t: f64) -> f64 {
    let r = reflection_imag(pol, q, xi, eps);
    if eps.is_infinite() {
        return r;
    }
    let x = xi / C;
    let g1 = (q * q + (eps - 1.0) * x * x).sqrt();
    let e = (-2.0 * g1 * t).exp();
    r * (1.0 - e) / (1.0 - r * r * e)
}

/// r_01 on the real axis given g0 (passed directly to avoid light-line cancellation).
pub fn reflection_real(pol: Polarization, g0: Complex64, w: f64, eps: Complex64) -> Result<Complex64> {
    reflection_complex(pol, g0, Complex64::new(w, 0.0), eps)
}

/// r_01 at complex frequency w in the upper half plane, g0 with Re g0 >= 0.
pub fn reflection_complex(pol: Polarization, g0: Complex64, w: Complex64, eps: Complex64) -> Result<Complex64> {
    if is_perfect(eps) {
        return Ok(match pol {
            Polarization::TM => Complex64::new(1.0, 0.0),
            Polarization::TE => Complex64::new(-1.0, 0.0),
        });
    }
    let x = w / C;
    let de = (eps - 1.0) * x * x;
    let g1 = branch_sqrt(g0 * g0 - de);
    match pol {
        Polarization::TM => ratio(eps * g0 - g1, eps * g0 + g1, "TM"),
        Polarization::TE => {
            let s = g0 + g1;
            ratio(de, s * s, "TE")
        }
    }
}

/// Analytic xi -> 0+ limit of r_01 at in-plane wavevector k > 0.
pub fn reflection_static(pol: Polarization, k: f64, response: StaticResponse) -> f64 {
    match (pol, response) {
        (Polarization::TM, StaticResponse::Dielectric(e0)) => (e0 - 1.0) / (e0 + 1.0),
        (Polarization::TM, _) => 1.0,
        (Polarization::TE, StaticResponse::Dielectric(_) | StaticResponse::Conducting) => 0.0,
        (Polarization::TE, StaticResponse::Plasma { plasma_frequency_sq }) => {
            let p2 = plasma_frequency_sq / (C * C);
            let g1 = (k * k + p2).sqrt();
            -p2 / ((k + g1) * (k + g1))
        }
        (Polarization::TE, StaticResponse::Perfect) => -1.0,
    }
}

fn eps_at(model: &DielectricModel, point: FrequencyPoint) -> Result<Complex64> {
    match point {
        FrequencyPoint::Imaginary(xi) => Ok(Complex64::new(model.eps_imag(xi)?, 0.0)),
        FrequencyPoint::Real(w) => model.eps_real(w),
    }
}

/// f = 1 - r_01 r_02 e^{-2 g0 d}.
pub fn mode_condition(pol: Polarization, pair: &HalfSpacePair, k: f64, point: FrequencyPoint) -> Result<Complex64> {
    let e1 = eps_at(&pair.medium1, point)?;
    let e2 = eps_at(&pair.medium2, point)?;
    let one = Complex64::new(1.0, 0.0);
    let g0 = gamma(k, point, one);
    let r1 = fresnel(pol, k, point, one, e1)?;
    let r2 = fresnel(pol, k, point, one, e2)?;
    Ok(one - r1 * r2 * (-2.0 * g0 * pair.separation).exp())
}

/// Mode condition in the xi -> 0+ limit.
pub fn mode_condition_static(pol: Polarization, pair: &HalfSpacePair, k: f64) -> Result<f64> {
    let r1 = reflection_static(pol, k, pair.medium1.static_response()?);
    let r2 = reflection_static(pol, k, pair.medium2.static_response()?);
    Ok(1.0 - r1 * r2 * (-2.0 * k * pair.separation).exp())
}
