//! Tabulated permittivity: Kramers-Kronig transform to the imaginary axis and
//! interpolation on the real axis, with configurable tail extensions.

use super::table::{MaterialClass, OpticalColumns, OpticalDataTable};
use super::StaticResponse;
use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::quad::{integrate_points, Tolerance};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Extension of Im eps below the lowest tabulated frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LowTail {
    /// Drude form fitted through the two lowest rows; `fallback_relaxation`
    /// is used when the fit does not give a positive relaxation rate.
    FittedDrude { fallback_relaxation: f64 },
    Drude {
        plasma_frequency: f64,
        relaxation_rate: f64,
    },
    /// Im eps = 0, the static permittivity stays finite.
    ZeroLoss,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailPolicy {
    pub low: LowTail,
    /// Im eps falls as w^-p above the table.
    pub high_exponent: f64,
    /// Largest accepted relative spread between cubic and linear table integrals.
    pub sparsity_tolerance: f64,
}

impl TailPolicy {
    /// Conventional defaults for the material class.
    pub fn for_class(class: MaterialClass, fallback_relaxation: f64) -> Self {
        let low = match class {
            MaterialClass::Metal => LowTail::FittedDrude {
                fallback_relaxation,
            },
            MaterialClass::Insulator => LowTail::ZeroLoss,
        };
        Self {
            low,
            high_exponent: 3.0,
            sparsity_tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct DrudeTail {
    wp2: f64,
    gamma: f64,
}

#[derive(Debug)]
pub struct TabulatedDielectric {
    table: OpticalDataTable,
    tails: Option<TailPolicy>,
    /// Im eps against ln w.
    im: Pchip,
    /// Same on every other node, for the interpolation error estimate.
    coarse: Option<Pchip>,
    /// n and k against ln w, for optical-constant tables.
    nk: Option<(Pchip, Pchip)>,
    drude: Option<DrudeTail>,
    re_cache: OnceLock<std::result::Result<Pchip, String>>,
}

fn tol() -> Tolerance {
    Tolerance::new(1e-9, 0.0, 4000)
}

impl TabulatedDielectric {
    /// Without tails, evaluation is restricted to the measured range.
    pub fn new(table: OpticalDataTable, tails: Option<TailPolicy>) -> Result<Self> {
        let lnw: Vec<f64> = table.omega.iter().map(|w| w.ln()).collect();
        let im_vals = table.im_eps();
        if lnw.len() < 2 {
            return Err(Error::Validation("tabulated model needs at least two rows".into()));
        }
        let im = Pchip::new(lnw.clone(), im_vals.clone())?;
        let coarse = if lnw.len() >= 5 {
            let mut idx: Vec<usize> = (0..lnw.len()).step_by(2).collect();
            if idx[idx.len() - 1] != lnw.len() - 1 {
                idx.push(lnw.len() - 1);
            }
            Some(Pchip::new(
                idx.iter().map(|&i| lnw[i]).collect(),
                idx.iter().map(|&i| im_vals[i]).collect(),
            )?)
        } else {
            None
        };
        let nk = match &table.columns {
            OpticalColumns::NK { n, k } => Some((
                Pchip::new(lnw.clone(), n.clone())?,
                Pchip::new(lnw.clone(), k.clone())?,
            )),
            OpticalColumns::ImEps(_) => None,
        };
        let drude = match tails.map(|t| t.low) {
            Some(LowTail::Drude {
                plasma_frequency,
                relaxation_rate,
            }) => Some(DrudeTail {
                wp2: plasma_frequency * plasma_frequency,
                gamma: relaxation_rate,
            }),
            Some(LowTail::FittedDrude {
                fallback_relaxation,
            }) => Some(fit_drude(&table.omega, &im_vals, fallback_relaxation)?),
            _ => None,
        };
        if let Some(t) = tails {
            if !(t.high_exponent > 1.0) || !(t.sparsity_tolerance > 0.0) {
                return Err(Error::Validation(
                    "tail exponent must exceed 1 and sparsity tolerance must be positive".into(),
                ));
            }
        }
        Ok(Self {
            table,
            tails,
            im,
            coarse,
            nk,
            drude,
            re_cache: OnceLock::new(),
        })
    }

    pub fn table(&self) -> &OpticalDataTable {
        &self.table
    }

    /// Fitted or configured low-frequency Drude parameters (w_p, gamma).
    pub fn drude_tail(&self) -> Option<(f64, f64)> {
        self.drude.map(|d| (d.wp2.sqrt(), d.gamma))
    }

    pub fn describe(&self) -> String {
        let (lo, hi) = self.table.range();
        let tails = match self.tails {
            None => "none".to_string(),
            Some(t) => {
                let low = match (t.low, self.drude) {
                    (LowTail::ZeroLoss, _) => "zero-loss".to_string(),
                    (_, Some(d)) => format!("drude({:e}, {:e})", d.wp2.sqrt(), d.gamma),
                    _ => "none".to_string(),
                };
                format!("low={low}, high=w^-{}", t.high_exponent)
            }
        };
        format!(
            "tabulated(material={}, source={}, rows={}, range=[{lo:e}, {hi:e}] rad/s, tails: {tails})",
            self.table.material,
            self.table.source,
            self.table.omega.len()
        )
    }

    pub fn characteristic_frequency(&self) -> f64 {
        if let Some(d) = self.drude {
            return d.wp2.sqrt();
        }
        let im = self.table.im_eps();
        let (i, _) = im
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) });
        self.table.omega[i]
    }

    pub fn static_response(&self) -> Result<StaticResponse> {
        match (self.tails, self.drude) {
            (Some(_), Some(d)) if d.gamma > 0.0 => Ok(StaticResponse::Conducting),
            (Some(_), Some(d)) => Ok(StaticResponse::Plasma {
                plasma_frequency_sq: d.wp2,
            }),
            (Some(_), None) => Ok(StaticResponse::Dielectric(self.kk(0.0)?)),
            (None, _) => Err(Error::ZeroFrequencyLimit(
                "tabulated model without tail policy has no static limit".into(),
            )),
        }
    }

    /// Im eps at any w > 0, extended by the tails.
    fn im_at(&self, w: f64) -> f64 {
        let (lo, hi) = self.table.range();
        if w < lo {
            match self.drude {
                Some(d) => d.wp2 * d.gamma / (w * (w * w + d.gamma * d.gamma)),
                None => 0.0,
            }
        } else if w > hi {
            let p = self.tails.map_or(3.0, |t| t.high_exponent);
            self.im.y()[self.im.y().len() - 1] * (hi / w).powf(p)
        } else {
            self.im.eval(w.ln()).unwrap_or(0.0).max(0.0)
        }
    }

    pub fn eps_imag(&self, xi: f64) -> Result<f64> {
        let (lo, hi) = self.table.range();
        if self.tails.is_none() && (xi < lo || xi > hi) {
            return Err(Error::Extrapolation(format!(
                "xi = {xi:e} rad/s outside table range [{lo:e}, {hi:e}] and no tail policy"
            )));
        }
        self.kk(xi)
    }

    /// eps(i xi) = 1 + (2/pi) int_0^inf w Im eps(w) / (w^2 + xi^2) dw.
    fn kk(&self, xi: f64) -> Result<f64> {
        let lnw = self.im.x();
        let (u0, u1) = (lnw[0], lnw[lnw.len() - 1]);
        let xi2 = xi * xi;
        let kernel = |u: f64| {
            let w = u.exp();
            let w2 = w * w;
            w2 / (w2 + xi2)
        };
        let body = integrate_points(
            |u| {
                let k = kernel(u);
                Ok([
                    k * self.im.eval(u).unwrap_or(0.0).max(0.0),
                    k * match &self.coarse {
                        Some(c) => c.eval(u).unwrap_or(0.0).max(0.0),
                        None => self.im.eval_linear(u).unwrap_or(0.0),
                    },
                ])
            },
            lnw,
            &tol(),
        )?;
        let [cubic, coarse] = body.value;
        // halving the node density multiplies the cubic error by about 8
        let estimate = match self.coarse {
            Some(_) => (cubic - coarse).abs() / 7.0,
            None => (cubic - coarse).abs(),
        };
        let mut total = cubic;
        if let Some(t) = self.tails {
            if self.drude.is_some() {
                let low = integrate_points(
                    |u| Ok([kernel(u) * self.im_at(u.exp())]),
                    &[u0 - 60.0, u0 - 20.0, u0],
                    &tol(),
                )?;
                total += low.value[0];
            }
            let span = 45.0 / (t.high_exponent - 1.0);
            let high = integrate_points(
                |u| Ok([kernel(u) * self.im_at(u.exp())]),
                &[u1, u1 + 0.2 * span, u1 + span],
                &tol(),
            )?;
            total += high.value[0];
            let spread = estimate / total.abs().max(f64::MIN_POSITIVE);
            if total > 0.0 && spread > t.sparsity_tolerance {
                return Err(Error::Accuracy {
                    message: format!(
                        "optical table '{}' too sparse for requested tolerance {:e} at xi = {xi:e}",
                        self.table.material, t.sparsity_tolerance
                    ),
                    achieved: spread,
                });
            }
        }
        Ok(1.0 + 2.0 / PI * total)
    }

    /// Re eps at the nodes by subtracted principal-value KK, computed once.
    fn re_interp(&self) -> Result<&Pchip> {
        let cached = self.re_cache.get_or_init(|| {
            let lnw = self.im.x();
            let (u0, u1) = (lnw[0], lnw[lnw.len() - 1]);
            let span = 45.0 / (self.tails.map_or(3.0, |t| t.high_exponent) - 1.0);
            let mut re = Vec::with_capacity(lnw.len());
            for (&uc, &w0) in lnw.iter().zip(&self.table.omega) {
                let g0 = w0 * self.im_at(w0);
                let mut points = vec![u0 - 40.0, u0, uc, u1, u1 + span, u1 + 40.0];
                points.sort_by(f64::total_cmp);
                points.dedup();
                let est = integrate_points(
                    |u| {
                        let w = u.exp();
                        Ok([w * (w * self.im_at(w) - g0) / ((w - w0) * (w + w0))])
                    },
                    &points,
                    &Tolerance::new(1e-8, 0.0, 4000),
                )
                .map_err(|e| e.to_string())?;
                re.push(1.0 + 2.0 / PI * est.value[0]);
            }
            Pchip::new(lnw.to_vec(), re).map_err(|e| e.to_string())
        });
        cached
            .as_ref()
            .map_err(|e| Error::Accuracy {
                message: format!("real-part Kramers-Kronig failed: {e}"),
                achieved: f64::NAN,
            })
    }

    pub fn eps_real(&self, w: f64) -> Result<Complex64> {
        let (lo, hi) = self.table.range();
        let inside = |w: f64| -> Result<Complex64> {
            let u = w.ln().clamp(self.im.x()[0], self.im.x()[self.im.x().len() - 1]);
            if let Some((n, k)) = &self.nk {
                let nc = Complex64::new(n.eval(u).unwrap_or(0.0), k.eval(u).unwrap_or(0.0).max(0.0));
                let e = nc * nc;
                return Ok(Complex64::new(e.re, e.im.max(0.0)));
            }
            let re = self.re_interp()?.eval(u).unwrap_or(1.0);
            Ok(Complex64::new(re, self.im.eval(u).unwrap_or(0.0).max(0.0)))
        };
        if (lo..=hi).contains(&w) {
            return inside(w);
        }
        if self.tails.is_none() {
            return Err(Error::Extrapolation(format!(
                "w = {w:e} rad/s outside table range [{lo:e}, {hi:e}] and no tail policy"
            )));
        }
        if w < lo {
            let edge = inside(lo)?;
            match self.drude {
                Some(d) => {
                    let drude = |x: f64| -Complex64::new(d.wp2, 0.0) / Complex64::new(x * x, d.gamma * x);
                    let shift = edge.re - 1.0 - drude(lo).re;
                    let e = 1.0 + shift + drude(w);
                    Ok(Complex64::new(e.re, e.im.max(0.0)))
                }
                None => Ok(Complex64::new(edge.re, 0.0)),
            }
        } else {
            let edge = inside(hi)?;
            let p = self.tails.map_or(3.0, |t| t.high_exponent);
            let r = hi / w;
            Ok(Complex64::new(1.0 + (edge.re - 1.0) * r * r, edge.im * r.powf(p)))
        }
    }
}

fn fit_drude(omega: &[f64], im: &[f64], fallback: f64) -> Result<DrudeTail> {
    // y = w Im eps = wp^2 g / (w^2 + g^2) through the two lowest rows
    let (w1, w2) = (omega[0], omega[1]);
    let (y1, y2) = (im[0] * w1, im[1] * w2);
    if !(y1 > 0.0) {
        return Err(Error::Validation(
            "metal low-frequency tail fit needs Im eps > 0 at the lowest row".into(),
        ));
    }
    let g2 = if y1 != y2 {
        (y2 * w2 * w2 - y1 * w1 * w1) / (y1 - y2)
    } else {
        -1.0
    };
    let gamma = if g2 > 0.0 { g2.sqrt() } else { fallback };
    if !(gamma > 0.0) {
        return Err(Error::Validation("Drude tail fit failed and no fallback relaxation rate".into()));
    }
    Ok(DrudeTail {
        wp2: y1 * (w1 * w1 + gamma * gamma) / gamma,
        gamma,
    })
}
