//! Atom-wall interaction in the dilute-layer limit, the atom-wall force and
//! the relative shift of a trapped condensate's oscillation frequency.
//!
//! Sign conventions: the potential is negative for attraction; the force is
//! -dV/dd, so negative values point toward the wall.

use crate::constants::{C, HBAR, K_B};
use crate::dielectric::{DielectricModel, StaticResponse};
use crate::error::{validation, Error, Result};
use crate::lifshitz::{matsubara_sum, QuadratureSpec, ThermalState};
use crate::modecond::{reflection_imag, reflection_static, Polarization};
use crate::quad::{integrate_exp_decay, integrate_points, integrate_to_infinity};
use crate::saturation::{apply_scope, smeared_term, Route, SaturationModel, Slot, SlotPolicy};
use crate::special::{bessel_i1e, g_kernel_scaled};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Single-oscillator polarizability alpha(i xi) = alpha0 / (1 + xi^2/w_a^2), m^3 (Gaussian).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomModel {
    /// alpha0, m^3.
    pub static_polarizability: f64,
    /// w_a, rad/s.
    pub resonance: f64,
}

impl AtomModel {
    pub fn new(static_polarizability: f64, resonance: f64) -> Result<Self> {
        let a = Self {
            static_polarizability,
            resonance,
        };
        a.validate()?;
        Ok(a)
    }

    /// Ground-state rubidium: 319 atomic units, D-line resonance.
    pub fn rubidium() -> Self {
        Self {
            static_polarizability: 4.73e-29,
            resonance: 2.4e15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.static_polarizability >= 0.0 && self.static_polarizability.is_finite()) {
            return Err(validation("static polarizability must be >= 0"));
        }
        if !(self.resonance > 0.0 && self.resonance.is_finite()) {
            return Err(validation("atomic resonance must be > 0"));
        }
        Ok(())
    }

    pub fn polarizability(&self, xi: f64) -> f64 {
        let r = xi / self.resonance;
        self.static_polarizability / (1.0 + r * r)
    }
}

/// Harmonic trap and condensate parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    /// Oscillation amplitude a, m.
    pub amplitude: f64,
    /// Thomas-Fermi radius R_x, m.
    pub thomas_fermi_radius: f64,
    /// Atom mass, kg.
    pub mass: f64,
    /// Unperturbed trap angular frequency w0, rad/s.
    pub trap_frequency: f64,
}

impl TrapConfig {
    /// Rubidium condensate with the amplitude and radius of the published trap.
    pub fn rubidium() -> Self {
        Self {
            amplitude: 2.5e-6,
            thomas_fermi_radius: 2.69e-6,
            mass: 1.443e-25,
            trap_frequency: 2.0 * PI * 229.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.amplitude, self.thomas_fermi_radius, self.mass, self.trap_frequency];
        if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(validation("trap amplitude, radius, mass and frequency must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum Observable {
    Potential,
    Force,
    Trap(TrapConfig),
}

fn static_or_eps(wall: &DielectricModel, statics: StaticResponse, xi: f64) -> Result<Option<f64>> {
    if xi == 0.0 {
        return Ok(None);
    }
    let e = wall.eps_imag(xi)?;
    Ok((e.is_finite() || statics == StaticResponse::Perfect).then_some(e))
}

fn reflections(wall: StaticResponse, eps: Option<f64>, q: f64, xi: f64) -> (f64, f64) {
    match eps {
        Some(e) => (
            reflection_imag(Polarization::TE, q, xi, e),
            reflection_imag(Polarization::TM, q, xi, e),
        ),
        None => (0.0, reflection_static(Polarization::TM, q, wall)),
    }
}

/// Omega ln f for the TE modes at in-plane k (1/m) and imaginary frequency xi, m^2.
pub fn log_f_te(k: f64, xi: f64, wall: &DielectricModel, atom: &AtomModel, d: f64) -> Result<f64> {
    let statics = wall.static_response()?;
    let eps = static_or_eps(wall, statics, xi)?;
    let x = xi / C;
    let g0 = (k * k + x * x).sqrt();
    let (r_te, _) = reflections(statics, eps, g0, xi);
    Ok(atom.polarizability(xi) * (-2.0 * g0 * d).exp() * r_te * 2.0 * PI * x * x / g0)
}

/// Omega ln f for the TM modes at in-plane k (1/m) and imaginary frequency xi >= 0, m^2.
pub fn log_f_tm(k: f64, xi: f64, wall: &DielectricModel, atom: &AtomModel, d: f64) -> Result<f64> {
    let statics = wall.static_response()?;
    let eps = static_or_eps(wall, statics, xi)?;
    let x = xi / C;
    let g0 = (k * k + x * x).sqrt();
    let (_, r_tm) = reflections(statics, eps, g0, xi);
    Ok(-atom.polarizability(xi) * (-2.0 * g0 * d).exp() * r_tm * 2.0 * PI * (2.0 * k * k + x * x) / g0)
}

struct Problem<'a> {
    wall: &'a DielectricModel,
    statics: StaticResponse,
    atom: &'a AtomModel,
    observable: Observable,
    /// Decay length: d, or d - a - R_x for the trap average.
    length: f64,
}

impl Problem<'_> {
    fn new<'a>(
        d: f64,
        wall: &'a DielectricModel,
        atom: &'a AtomModel,
        observable: Observable,
    ) -> Result<Problem<'a>> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(validation(format!("separation must be > 0, got {d}")));
        }
        atom.validate()?;
        wall.validate()?;
        let length = match observable {
            Observable::Trap(t) => {
                t.validate()?;
                let l = d - t.amplitude - t.thomas_fermi_radius;
                if !(l > 0.0) {
                    return Err(validation(format!(
                        "trap average needs d > a + R_x; d = {d:e} m, a + R_x = {:e} m",
                        t.amplitude + t.thomas_fermi_radius
                    )));
                }
                l
            }
            _ => d,
        };
        Ok(Problem {
            wall,
            statics: wall.static_response()?,
            atom,
            observable,
            length,
        })
    }

    /// k-integrated summand at reduced frequency x = xi L / c, as [TE, TM].
    fn summand(&self, x: f64, quad: &QuadratureSpec) -> Result<[f64; 2]> {
        let l = self.length;
        let xi = x * C / l;
        let eps = static_or_eps(self.wall, self.statics, xi)?;
        let alpha = self.atom.polarizability(xi);
        // y = 2 g0 L >= 2x; k dk = y dy / (4 L^2)
        let h = |t: f64| -> Result<[f64; 2]> {
            let y = 2.0 * x + t;
            let g0 = 0.5 * y / l;
            let w = match self.observable {
                Observable::Potential => 1.0,
                Observable::Force => y / l,
                Observable::Trap(tr) => {
                    (y / l) * bessel_i1e(y * tr.amplitude / l) * g_kernel_scaled(y * tr.thomas_fermi_radius / l)
                }
            };
            let (r_te, r_tm) = reflections(self.statics, eps, g0, xi);
            let f = PI * w * (-y).exp();
            Ok([f * r_te * x * x, -f * r_tm * (0.5 * y * y - x * x)])
        };
        let v = integrate_exp_decay(h, &quad.inner())
            .map_err(|e| e.context(format!("xi = {xi:e} rad/s")))?;
        let s = alpha / l.powi(3);
        Ok([s * v[0], s * v[1]])
    }

    fn zero_temperature(&self, quad: &QuadratureSpec) -> Result<[f64; 2]> {
        let tol = quad.outer();
        let split: f64 = 0.5;
        let lo = integrate_points(
            |u| {
                let x = u.exp();
                let v = self.summand(x, quad)?;
                Ok([x * v[0], x * v[1]])
            },
            &[split.ln() - 36.0, split.ln() - 12.0, split.ln()],
            &tol,
        )?;
        let hi = integrate_to_infinity(|x| self.summand(x, quad), split, &tol)?;
        let s = HBAR * C / (4.0 * PI * PI * self.length);
        Ok([s * (lo.value[0] + hi.value[0]), s * (lo.value[1] + hi.value[1])])
    }

    fn matsubara(&self, thermal: &ThermalState, sat: &SaturationModel, quad: &QuadratureSpec) -> Result<[f64; 2]> {
        let beta = thermal
            .beta()
            .ok_or_else(|| validation("the Matsubara sum needs T > 0"))?;
        let tau = HBAR * C * beta / self.length;
        let (sum, _) = matsubara_sum(
            |n| {
                let xn = 2.0 * PI * n as f64 / tau;
                let r = match apply_scope(sat, Slot::MatsubaraTerm(n), Route::Matsubara)? {
                    SlotPolicy::SmearedTerm { damping } if damping > 0.0 => {
                        smeared_term(xn, damping / tau, |xp| self.summand(xp, quad), &quad.outer())
                    }
                    _ => self.summand(xn, quad),
                };
                r.map_err(|e| e.context(format!("n = {n}")))
            },
            quad,
        )?;
        let s = 1.0 / (2.0 * PI * beta);
        Ok([s * sum[0], s * sum[1]])
    }

    fn evaluate(&self, thermal: &ThermalState, sat: &SaturationModel, quad: &QuadratureSpec) -> Result<[f64; 2]> {
        quad.validate()?;
        sat.check_route(Route::Matsubara)?;
        if thermal.beta().is_some() {
            self.matsubara(thermal, sat, quad)
        } else if sat.is_none() {
            self.zero_temperature(quad)
        } else {
            Err(validation("saturation needs T > 0"))
        }
    }
}

/// Atom-wall potential as [TE, TM] parts, J.
pub fn potential_parts(
    d: f64,
    wall: &DielectricModel,
    atom: &AtomModel,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<[f64; 2]> {
    Problem::new(d, wall, atom, Observable::Potential)?
        .evaluate(thermal, sat, quad)
        .map_err(|e| with_d(e, d))
}

/// Atom-wall potential, J.
pub fn potential(
    d: f64,
    wall: &DielectricModel,
    atom: &AtomModel,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    potential_parts(d, wall, atom, thermal, sat, quad).map(|v| v[0] + v[1])
}

/// Atom-wall force -dV/dd from the differentiated summand, N.
pub fn force(
    d: f64,
    wall: &DielectricModel,
    atom: &AtomModel,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Problem::new(d, wall, atom, Observable::Force)?
        .evaluate(thermal, sat, quad)
        .map(|v| v[0] + v[1])
        .map_err(|e| with_d(e, d))
}

/// Relative trap-frequency shift |Phi|/(m a w0^2), with the force summand
/// averaged over the oscillation and the condensate profile.
pub fn gamma_x(
    d: f64,
    wall: &DielectricModel,
    atom: &AtomModel,
    trap: &TrapConfig,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let phi = Problem::new(d, wall, atom, Observable::Trap(*trap))?
        .evaluate(thermal, sat, quad)
        .map(|v| v[0] + v[1])
        .map_err(|e| with_d(e, d))?;
    Ok(phi.abs() / (trap.mass * trap.amplitude * trap.trap_frequency * trap.trap_frequency))
}

/// T = 0 potential of a perfectly reflecting wall, -3 hbar c alpha0 / (8 pi d^4), J.
pub fn ideal_wall_potential(d: f64, static_polarizability: f64) -> f64 {
    -3.0 * HBAR * C * static_polarizability / (8.0 * PI * d.powi(4))
}

/// Classical limit of the n = 0 TM term for a perfect wall: -k_B T alpha0 / (4 d^3), J.
pub fn ideal_wall_zero_term(d: f64, static_polarizability: f64, temperature: f64) -> f64 {
    -K_B * temperature * static_polarizability / (4.0 * d.powi(3))
}

fn with_d(e: Error, d: f64) -> Error {
    e.context(format!("d = {d:e} m"))
}
