//! Imaginary-frequency routes: the T = 0 integral and the Matsubara sum.

use super::{Diagnostics, Evaluation, Kernel, QuadratureSpec, ThermalState};
use crate::constants::{C, HBAR, K_B};
use crate::dielectric::{DielectricModel, StaticResponse};
use crate::error::{Error, Result};
use crate::modecond::{reflection_imag, reflection_static, HalfSpacePair, Polarization};
use crate::quad::{integrate_exp_decay, integrate_points, integrate_to_infinity};
use crate::saturation::{apply_scope, smeared_term, Route, SaturationModel, Slot, SlotPolicy};
use std::f64::consts::PI;

/// Reduced frequency separating the logarithmic and mapped parts of the T = 0 integral.
const SPLIT: f64 = 0.5;

pub(crate) struct Plates<'a> {
    media: [&'a DielectricModel; 2],
    statics: [StaticResponse; 2],
    d: f64,
}

impl<'a> Plates<'a> {
    pub(crate) fn new(pair: &'a HalfSpacePair) -> Result<Self> {
        Ok(Self {
            media: [&pair.medium1, &pair.medium2],
            statics: [pair.medium1.static_response()?, pair.medium2.static_response()?],
            d: pair.separation,
        })
    }

    /// Permittivities at reduced frequency x; None selects the static limit.
    fn eps(&self, x: f64) -> Result<[Option<f64>; 2]> {
        let mut out = [None; 2];
        if x > 0.0 {
            let xi = x * C / self.d;
            for (j, slot) in out.iter_mut().enumerate() {
                let e = self.media[j].eps_imag(xi)?;
                if e.is_finite() || self.statics[j] == StaticResponse::Perfect {
                    *slot = Some(e);
                }
            }
        }
        Ok(out)
    }

    fn reflection(&self, pol: Polarization, j: usize, q: f64, x: f64, eps: Option<f64>) -> f64 {
        match eps {
            Some(e) => reflection_imag(pol, q / self.d, x * C / self.d, e),
            None => reflection_static(pol, q / self.d, self.statics[j]),
        }
    }

    /// int kappa dkappa K at reduced frequency x, as [TM, TE].
    pub(crate) fn k_integral(&self, x: f64, kernel: Kernel, quad: &QuadratureSpec) -> Result<[f64; 2]> {
        let eps = self.eps(x)?;
        // kappa dkappa = q dq = y dy / 4 with y = 2q >= 2x
        let g = |t: f64| -> Result<[f64; 2]> {
            let y = 2.0 * x + t;
            let q = 0.5 * y;
            let mut out = [0.0; 2];
            for (i, pol) in Polarization::BOTH.into_iter().enumerate() {
                let rr = self.reflection(pol, 0, q, x, eps[0]) * self.reflection(pol, 1, q, x, eps[1]);
                if rr == 0.0 {
                    continue;
                }
                let big_x = rr * (-y).exp();
                let v = match kernel {
                    Kernel::Energy => (-big_x).ln_1p(),
                    Kernel::Pressure => y * big_x / (1.0 - big_x),
                };
                out[i] = 0.25 * y * v;
            }
            Ok(out)
        };
        integrate_exp_decay(g, &quad.inner())
            .map_err(|e| e.context(format!("xi = {:e} rad/s", x * C / self.d)))
    }
}

fn scale(kernel: Kernel, d: f64, base: f64) -> f64 {
    match kernel {
        Kernel::Energy => base,
        Kernel::Pressure => base / d,
    }
}

pub(super) fn zero_temperature(pair: &HalfSpacePair, kernel: Kernel, quad: &QuadratureSpec) -> Result<Evaluation> {
    let plates = Plates::new(pair)?;
    let d = pair.separation;
    let tol = quad.outer();
    let lo = integrate_points(
        |u| {
            let x = u.exp();
            let v = plates.k_integral(x, kernel, quad)?;
            Ok([x * v[0], x * v[1]])
        },
        &[SPLIT.ln() - 36.0, SPLIT.ln() - 12.0, SPLIT.ln()],
        &tol,
    )?;
    let hi = integrate_to_infinity(|x| plates.k_integral(x, kernel, quad), SPLIT, &tol)?;
    let s = scale(kernel, d, HBAR * C / (4.0 * PI * PI * d.powi(3)));
    let tm = s * (lo.value[0] + hi.value[0]);
    let te = s * (lo.value[1] + hi.value[1]);
    Ok(Evaluation {
        total: tm + te,
        tm,
        te,
        parts: None,
        diagnostics: Diagnostics {
            matsubara_terms: 0,
            reduced_error: lo.error + hi.error,
            converged: lo.converged && hi.converged,
        },
    })
}

/// Sums the Matsubara series with a geometric tail estimate.
pub(crate) fn matsubara_sum<F>(mut term: F, quad: &QuadratureSpec) -> Result<([f64; 2], usize)>
where
    F: FnMut(usize) -> Result<[f64; 2]>,
{
    let norm = |v: &[f64; 2]| v[0].abs() + v[1].abs();
    let a0 = term(0)?;
    let mut sum = [0.5 * a0[0], 0.5 * a0[1]];
    let mut prev = norm(&a0);
    let mut small = 0;
    for n in 1..quad.max_matsubara_terms {
        let a = term(n)?;
        sum[0] += a[0];
        sum[1] += a[1];
        let size = norm(&a);
        if size <= quad.matsubara_rel_tol * norm(&sum) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 3 {
            let rho = if prev > 0.0 { size / prev } else { 0.0 };
            if rho > 0.0 && rho < 1.0 {
                let f = rho / (1.0 - rho);
                sum[0] += a[0] * f;
                sum[1] += a[1] * f;
            }
            return Ok((sum, n + 1));
        }
        prev = size;
    }
    Err(Error::Truncation {
        terms: quad.max_matsubara_terms,
    })
}

pub(super) fn matsubara(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    kernel: Kernel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    sat.check_route(Route::Matsubara)?;
    let plates = Plates::new(pair)?;
    let d = pair.separation;
    let tau = thermal
        .tau(d)
        .ok_or_else(|| Error::Validation("the Matsubara route needs T > 0".into()))?;
    let smear_tol = quad.outer();
    let (sum, terms) = matsubara_sum(
        |n| {
            let xn = 2.0 * PI * n as f64 / tau;
            let r = match apply_scope(sat, Slot::MatsubaraTerm(n), Route::Matsubara)? {
                SlotPolicy::SmearedTerm { damping } if damping > 0.0 => {
                    smeared_term(xn, damping / tau, |xp| plates.k_integral(xp, kernel, quad), &smear_tol)
                }
                _ => plates.k_integral(xn, kernel, quad),
            };
            r.map_err(|e| e.context(format!("d = {d:e} m, n = {n}")))
        },
        quad,
    )?;
    let s = scale(kernel, d, K_B * thermal.temperature() / (2.0 * PI * d * d));
    let (tm, te) = (s * sum[0], s * sum[1]);
    Ok(Evaluation {
        total: tm + te,
        tm,
        te,
        parts: None,
        diagnostics: Diagnostics {
            matsubara_terms: terms,
            reduced_error: 0.0,
            converged: true,
        },
    })
}
