//! Real-frequency route with the n + 1/2 weight, split at the light line.
//!
//! For each kappa the frequency integral runs over three pieces: the
//! evanescent band near the light line in the variable q = sqrt(kappa^2 - x^2),
//! the low-frequency evanescent band in ln x, and the propagating band in
//! q = sqrt(x^2 - kappa^2) with g0 d = -iq. Passing q directly keeps g0
//! accurate at the light line.
//!
//! The zero-point band of analytic media has no frequency cutoff: its
//! propagating part is taken along the ray q = t e^{i pi/4}, which avoids the
//! cavity resonances on the real line. Individual mode parts of the zero-point
//! band grow with ln of the wavevector cutoff; only their sum converges.

use super::{imag, Diagnostics, Evaluation, Kernel, ModeParts, QuadratureSpec, ThermalState};
use crate::constants::{C, HBAR};
use crate::error::Result;
use crate::modecond::{reflection_complex, reflection_real, HalfSpacePair, ModeClass, Polarization};
use crate::quad::{integrate, integrate_points, Tolerance};
use crate::saturation::{apply_scope, occupation, Route, SaturationModel, Slot, SlotPolicy};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

/// Thermal weights below e^{-THERMAL_SPAN} are dropped.
const THERMAL_SPAN: f64 = 50.0;

enum Weighting {
    ZeroPoint,
    Thermal { beta: f64, policies: [SlotPolicy; 4] },
}

fn slot_index(pol: Polarization, class: ModeClass) -> usize {
    match (pol, class) {
        (Polarization::TM, ModeClass::Propagating) => 0,
        (Polarization::TM, ModeClass::Evanescent) => 1,
        (Polarization::TE, ModeClass::Propagating) => 2,
        (Polarization::TE, ModeClass::Evanescent) => 3,
    }
}

fn ln_one_minus(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        -(z + z2 * 0.5 + z2 * z / 3.0 + z2 * z2 * 0.25)
    } else {
        (Complex64::new(1.0, 0.0) - z).ln()
    }
}

struct Integrand<'a> {
    pair: &'a HalfSpacePair,
    d: f64,
    kernel: Kernel,
    weighting: Weighting,
    /// Zero-point band with analytic media: no frequency cutoff, propagating
    /// part along a complex ray.
    rotate: bool,
}

fn no_continuation() -> crate::error::Error {
    crate::error::Error::Validation("permittivity has no analytic continuation".into())
}


impl Integrand<'_> {
    fn weight(&self, pol: Polarization, class: ModeClass, x: f64) -> Result<f64> {
        match &self.weighting {
            Weighting::ZeroPoint => Ok(0.5),
            Weighting::Thermal { beta, policies } => {
                occupation(policies[slot_index(pol, class)], x * C / self.d, *beta)
            }
        }
    }

    /// Weighted Im K at reduced frequency x and reduced g0 = q, as [TM, TE].
    fn point(&self, x: f64, q: Complex64, class: ModeClass) -> Result<[f64; 2]> {
        let w = x * C / self.d;
        let e1 = self.pair.medium1.eps_real(w)?;
        let e2 = self.pair.medium2.eps_real(w)?;
        let g0 = q / self.d;
        let decay = (-2.0 * q).exp();
        let mut out = [0.0; 2];
        for (i, pol) in Polarization::BOTH.into_iter().enumerate() {
            let wt = self.weight(pol, class, x)?;
            if wt == 0.0 {
                continue;
            }
            let r = reflection_real(pol, g0, w, e1)? * reflection_real(pol, g0, w, e2)?;
            let big_x = r * decay;
            let k = match self.kernel {
                Kernel::Energy => ln_one_minus(big_x),
                Kernel::Pressure => 2.0 * q * big_x / (1.0 - big_x),
            };
            out[i] = wt * k.im;
        }
        Ok(out)
    }

    /// Zero-point integrand 1/2 K(q) q/x continued to complex q in the first
    /// quadrant, as [TM, TE]. There x lies in the upper half plane, where
    /// passive media have no modes.
    fn continued(&self, kappa: f64, q: Complex64) -> Result<[Complex64; 2]> {
        let x = (kappa * kappa + q * q).sqrt();
        let w = x * (C / self.d);
        let e1 = self.pair.medium1.eps_complex(w).ok_or_else(no_continuation)?;
        let e2 = self.pair.medium2.eps_complex(w).ok_or_else(no_continuation)?;
        let g0 = Complex64::new(0.0, -1.0) * q / self.d;
        let decay = (Complex64::new(0.0, 2.0) * q).exp();
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (i, pol) in Polarization::BOTH.into_iter().enumerate() {
            let big_x = reflection_complex(pol, g0, w, e1)? * reflection_complex(pol, g0, w, e2)? * decay;
            let k = match self.kernel {
                Kernel::Energy => ln_one_minus(big_x),
                Kernel::Pressure => Complex64::new(0.0, -2.0) * q * big_x / (1.0 - big_x),
            };
            out[i] = 0.5 * k * q / x;
        }
        Ok(out)
    }

    /// Frequency integral at fixed kappa, as [TMp, TMe, TEp, TEe]. With a
    /// rotation start the band runs to infinity; otherwise it stops at x_max.
    fn inner(&self, kappa: f64, x_max: f64, features: &[f64], tol: &Tolerance) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        let top = if self.rotate { kappa } else { kappa.min(x_max) };
        let half = 0.5 * kappa;
        if top > half {
            let q_top = if top >= kappa {
                0.0
            } else {
                ((kappa - top) * (kappa + top)).sqrt()
            };
            let q_half = kappa * 0.75f64.sqrt();
            let est = integrate(
                |q| {
                    let x = ((kappa - q) * (kappa + q)).sqrt();
                    let v = self.point(x, Complex64::new(q, 0.0), ModeClass::Evanescent)?;
                    let jac = q / x;
                    Ok([v[0] * jac, v[1] * jac])
                },
                q_top,
                q_half,
                tol,
            )?;
            out[1] += est.value[0];
            out[3] += est.value[1];
        }
        let xb = top.min(half);
        if xb > 0.0 {
            let est = integrate_points(
                |u| {
                    let x = u.exp();
                    let q = ((kappa - x) * (kappa + x)).sqrt();
                    let v = self.point(x, Complex64::new(q, 0.0), ModeClass::Evanescent)?;
                    Ok([x * v[0], x * v[1]])
                },
                &[xb.ln() - 34.0, xb.ln() - 10.0, xb.ln()],
                tol,
            )?;
            out[1] += est.value[0];
            out[3] += est.value[1];
        }
        if self.rotate {
            // the real q line turns onto the ray q = t e^{i pi/4}; the integrand
            // is analytic in between and e^{2iq} decays along the ray
            let ray = Complex64::from_polar(1.0, FRAC_PI_4);
            let est = integrate_points(
                |t| {
                    let g = self.continued(kappa, ray * t)?;
                    Ok([(ray * g[0]).im, (ray * g[1]).im])
                },
                &[0.0, 1.0, 4.0, 16.0, 45.0],
                tol,
            )?;
            out[0] += est.value[0];
            out[2] += est.value[1];
            return Ok(out);
        }
        if x_max <= kappa {
            return Ok(out);
        }
        let q_end = ((x_max - kappa) * (x_max + kappa)).sqrt();
        let mut pts = vec![0.0, q_end];
        for &f in features {
            if f > kappa && f < x_max {
                pts.push(((f - kappa) * (f + kappa)).sqrt());
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let est = integrate_points(
            |q| {
                let x = (kappa * kappa + q * q).sqrt();
                let v = self.point(x, Complex64::new(0.0, -q), ModeClass::Propagating)?;
                let jac = q / x;
                Ok([v[0] * jac, v[1] * jac])
            },
            &pts,
            tol,
        )?;
        out[0] += est.value[0];
        out[2] += est.value[1];
        Ok(out)
    }
}

fn prefactor(kernel: Kernel, d: f64) -> f64 {
    let s = HBAR * C / (2.0 * PI * PI * d.powi(3));
    match kernel {
        Kernel::Energy => s,
        Kernel::Pressure => s / d,
    }
}

/// Magnitude of the full result in reduced units, from a loose imaginary-axis
/// evaluation. Inner integrals near the cutoffs are tiny and oscillatory, so
/// their tolerances are set against this scale rather than their own size.
fn reduced_scale(pair: &HalfSpacePair, thermal: &ThermalState, kernel: Kernel, quad: &QuadratureSpec) -> Result<f64> {
    let loose = QuadratureSpec {
        rel_tol: quad.rel_tol.max(1e-4),
        matsubara_rel_tol: quad.matsubara_rel_tol.max(1e-6),
        ..*quad
    };
    let mut s = imag::zero_temperature(pair, kernel, &loose)?.total.abs();
    if thermal.beta().is_some() {
        s = s.max(imag::matsubara(pair, thermal, &SaturationModel::NONE, kernel, &loose)?.total.abs());
    }
    Ok(s / prefactor(kernel, pair.separation))
}

fn integral(
    pair: &HalfSpacePair,
    weighting: Weighting,
    kernel: Kernel,
    quad: &QuadratureSpec,
    scale: f64,
) -> Result<(ModeParts, Diagnostics)> {
    let d = pair.separation;
    let material = pair
        .medium1
        .characteristic_frequency()
        .max(pair.medium2.characteristic_frequency())
        * d
        / C;
    let cutoff = quad.omega_cutoff_multiplier * material.max(1.0);
    let (x_max, kappa_lo, thermal_scale) = match &weighting {
        Weighting::ZeroPoint => (cutoff, 1e-7, None),
        Weighting::Thermal { beta, .. } => {
            let tau = HBAR * C * beta / d;
            ((THERMAL_SPAN / tau).min(cutoff), 1e-7 * (1.0 / tau).min(1.0), Some(1.0 / tau))
        }
    };
    let kappa_hi = quad.k_cutoff_multiplier + x_max;
    let mut features = vec![1.0, material];
    features.extend(thermal_scale);
    let mut pts = vec![kappa_lo.ln(), kappa_hi.ln(), x_max.ln()];
    pts.extend(features.iter().filter(|f| **f > 0.0).map(|f| f.ln()));
    pts.retain(|p| *p >= kappa_lo.ln() && *p <= kappa_hi.ln());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let probe = Complex64::new(1.0, 1.0);
    let analytic = pair.medium1.eps_complex(probe).is_some() && pair.medium2.eps_complex(probe).is_some();
    let rotate = analytic && matches!(weighting, Weighting::ZeroPoint);
    let f = Integrand {
        pair,
        d,
        kernel,
        weighting,
        rotate,
    };
    let abs = quad.abs_tol.max(quad.rel_tol * scale);
    let est = integrate_points(
        |u| {
            let kappa = u.exp();
            let k2 = kappa * kappa;
            // node errors enter the outer sum weighted by kappa^2 and partly cancel
            let tol = Tolerance::new(0.1 * quad.rel_tol, 0.02 * abs / k2, quad.max_subdivisions);
            let v = f
                .inner(kappa, x_max, &features, &tol)
                .map_err(|e| e.context(format!("d = {d:e} m, k = {:e} 1/m", kappa / d)))?;
            Ok([k2 * v[0], k2 * v[1], k2 * v[2], k2 * v[3]])
        },
        &pts,
        &Tolerance::new(quad.rel_tol, abs, quad.max_subdivisions),
    )?;
    let s = prefactor(kernel, d);
    Ok((
        ModeParts::from_array(est.value).scaled(s),
        Diagnostics {
            matsubara_terms: 0,
            reduced_error: est.error,
            converged: est.converged,
        },
    ))
}

fn thermal_weighting(thermal: &ThermalState, sat: &SaturationModel) -> Result<Option<Weighting>> {
    sat.check_route(Route::RealAxis)?;
    let Some(beta) = thermal.beta() else {
        return Ok(None);
    };
    let mut policies = [SlotPolicy::Unmodified; 4];
    for pol in Polarization::BOTH {
        for class in [ModeClass::Propagating, ModeClass::Evanescent] {
            policies[slot_index(pol, class)] = apply_scope(sat, Slot::Mode { pol, class }, Route::RealAxis)?;
        }
    }
    Ok(Some(Weighting::Thermal { beta, policies }))
}

pub(super) fn thermal(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    kernel: Kernel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    match thermal_weighting(thermal, sat)? {
        None => Ok(Evaluation::from_parts(
            ModeParts::default(),
            Diagnostics {
                converged: true,
                ..Default::default()
            },
        )),
        Some(w) => {
            let scale = reduced_scale(pair, thermal, kernel, quad)?;
            let (parts, diag) = integral(pair, w, kernel, quad, scale)?;
            Ok(Evaluation::from_parts(parts, diag))
        }
    }
}

pub(super) fn full(
    pair: &HalfSpacePair,
    thermal_state: &ThermalState,
    sat: &SaturationModel,
    kernel: Kernel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    let scale = reduced_scale(pair, thermal_state, kernel, quad)?;
    let th = match thermal_weighting(thermal_state, sat)? {
        Some(w) => integral(pair, w, kernel, quad, scale)?,
        None => (ModeParts::default(), Diagnostics { converged: true, ..Default::default() }),
    };
    let (zero, diag) = integral(pair, Weighting::ZeroPoint, kernel, quad, scale)?;
    Ok(Evaluation::from_parts(zero.add(&th.0), diag.merge(&th.1)))
}
