//! Permittivity models on the imaginary and real frequency axes.
//!
//! Permittivities are dimensionless and composed in Gaussian units, so a
//! conductivity sigma (s^-1) contributes 4 pi sigma / xi on the imaginary axis.

mod kk;
mod table;

pub use kk::{LowTail, TabulatedDielectric, TailPolicy};
pub use table::{MaterialClass, OpticalColumns, OpticalDataTable};

use crate::error::{validation, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Lorentz oscillator term s w0^2 / (w0^2 - w^2 - i g w).
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

/// Free-carrier term w_p^2 / (xi (xi + g)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrudeTerm {
    pub plasma_frequency: f64,
    pub relaxation_rate: f64,
}

#[derive(Clone, Debug)]
pub struct Composite {
    pub base: DielectricModel,
    pub carriers: Option<DrudeTerm>,
    /// Gaussian conductivity, s^-1.
    pub conductivity: f64,
}

#[derive(Clone, Debug)]
pub enum DielectricModel {
    Drude {
        plasma_frequency: f64,
        relaxation_rate: f64,
    },
    Plasma {
        plasma_frequency: f64,
    },
    OscillatorSet(Vec<Oscillator>),
    Tabulated(Arc<TabulatedDielectric>),
    Composite(Box<Composite>),
    /// Ideal metal, |eps| = infinity at every frequency.
    PerfectReflector,
}

/// Behaviour of a model as xi -> 0+, which fixes the zero Matsubara term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StaticResponse {
    /// Finite static permittivity.
    Dielectric(f64),
    /// eps diverges but eps xi^2 -> 0 (dissipative carriers or conductivity).
    Conducting,
    /// eps xi^2 -> w_p^2 (lossless carriers).
    Plasma { plasma_frequency_sq: f64 },
    Perfect,
}

impl StaticResponse {
    fn rank(&self) -> u8 {
        match self {
            StaticResponse::Dielectric(_) => 0,
            StaticResponse::Conducting => 1,
            StaticResponse::Plasma { .. } => 2,
            StaticResponse::Perfect => 3,
        }
    }

    fn combine(self, other: StaticResponse) -> StaticResponse {
        use StaticResponse::*;
        match (self, other) {
            (Dielectric(a), Dielectric(b)) => Dielectric(a + b - 1.0),
            (Plasma { plasma_frequency_sq: a }, Plasma { plasma_frequency_sq: b }) => Plasma {
                plasma_frequency_sq: a + b,
            },
            (a, b) => {
                if a.rank() >= b.rank() {
                    a
                } else {
                    b
                }
            }
        }
    }
}

fn drude_imag(wp: f64, g: f64, xi: f64) -> f64 {
    wp * wp / (xi * (xi + g))
}

fn drude_real(wp: f64, g: f64, w: f64) -> Complex64 {
    -Complex64::new(wp * wp, 0.0) / Complex64::new(w * w, g * w)
}

impl DielectricModel {
    /// Vacuum, eps = 1 everywhere.
    pub fn vacuum() -> Self {
        DielectricModel::OscillatorSet(Vec::new())
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, DielectricModel::OscillatorSet(v) if v.iter().all(|o| o.strength == 0.0))
    }

    /// Checks parameter signs; called by every public evaluation entry in the run driver.
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64, what: &str| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(validation(format!("{what} must be finite and >= 0, got {v}")))
            }
        };
        match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => {
                nonneg(*plasma_frequency, "plasma frequency")?;
                nonneg(*relaxation_rate, "relaxation rate")
            }
            DielectricModel::Plasma { plasma_frequency } => nonneg(*plasma_frequency, "plasma frequency"),
            DielectricModel::OscillatorSet(osc) => {
                for o in osc {
                    nonneg(o.strength, "oscillator strength")?;
                    nonneg(o.damping, "oscillator damping")?;
                    if !(o.resonance > 0.0 && o.resonance.is_finite()) {
                        return Err(validation("oscillator resonance must be > 0"));
                    }
                }
                Ok(())
            }
            DielectricModel::Tabulated(_) | DielectricModel::PerfectReflector => Ok(()),
            DielectricModel::Composite(c) => {
                c.base.validate()?;
                if let Some(t) = c.carriers {
                    nonneg(t.plasma_frequency, "carrier plasma frequency")?;
                    nonneg(t.relaxation_rate, "carrier relaxation rate")?;
                }
                nonneg(c.conductivity, "conductivity")
            }
        }
    }

    /// eps(i xi) for xi > 0. Infinite for a perfect reflector.
    pub fn eps_imag(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0) {
            return Err(validation(format!(
                "imaginary frequency must be > 0 (got {xi}); the zero-frequency limit is separate"
            )));
        }
        Ok(match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => 1.0 + drude_imag(*plasma_frequency, *relaxation_rate, xi),
            DielectricModel::Plasma { plasma_frequency } => 1.0 + (plasma_frequency / xi).powi(2),
            DielectricModel::OscillatorSet(osc) => {
                1.0 + osc
                    .iter()
                    .map(|o| {
                        let w2 = o.resonance * o.resonance;
                        o.strength * w2 / (w2 + xi * xi + o.damping * xi)
                    })
                    .sum::<f64>()
            }
            DielectricModel::Tabulated(t) => t.eps_imag(xi)?,
            DielectricModel::Composite(c) => {
                let mut e = c.base.eps_imag(xi)?;
                if let Some(t) = c.carriers {
                    e += drude_imag(t.plasma_frequency, t.relaxation_rate, xi);
                }
                e + 4.0 * std::f64::consts::PI * c.conductivity / xi
            }
            DielectricModel::PerfectReflector => f64::INFINITY,
        })
    }

    /// eps(w) for real w > 0, with Im eps >= 0.
    pub fn eps_real(&self, w: f64) -> Result<Complex64> {
        if !(w > 0.0) {
            return Err(validation(format!("real frequency must be > 0, got {w}")));
        }
        Ok(match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => 1.0 + drude_real(*plasma_frequency, *relaxation_rate, w),
            DielectricModel::Plasma { plasma_frequency } => {
                Complex64::new(1.0 - (plasma_frequency / w).powi(2), 0.0)
            }
            DielectricModel::OscillatorSet(osc) => {
                let mut e = Complex64::new(1.0, 0.0);
                for o in osc {
                    let w2 = o.resonance * o.resonance;
                    e += o.strength * w2 / Complex64::new(w2 - w * w, -o.damping * w);
                }
                e
            }
            DielectricModel::Tabulated(t) => t.eps_real(w)?,
            DielectricModel::Composite(c) => {
                let mut e = c.base.eps_real(w)?;
                if let Some(t) = c.carriers {
                    e += drude_real(t.plasma_frequency, t.relaxation_rate, w);
                }
                e + Complex64::new(0.0, 4.0 * std::f64::consts::PI * c.conductivity / w)
            }
            DielectricModel::PerfectReflector => Complex64::new(f64::INFINITY, 0.0),
        })
    }

    /// Analytic continuation to complex w with Im w >= 0 and Re w > 0.
    /// None for tabulated data, which has no closed-form continuation.
    pub fn eps_complex(&self, w: Complex64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let drude = |wp: f64, g: f64| -wp * wp / (w * (w + i * g));
        Some(match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => one + drude(*plasma_frequency, *relaxation_rate),
            DielectricModel::Plasma { plasma_frequency } => one + drude(*plasma_frequency, 0.0),
            DielectricModel::OscillatorSet(osc) => {
                let mut e = one;
                for o in osc {
                    let w2 = o.resonance * o.resonance;
                    e += o.strength * w2 / (w2 - w * w - i * o.damping * w);
                }
                e
            }
            DielectricModel::Tabulated(_) => return None,
            DielectricModel::Composite(c) => {
                let mut e = c.base.eps_complex(w)?;
                if let Some(t) = c.carriers {
                    e += drude(t.plasma_frequency, t.relaxation_rate);
                }
                e + i * 4.0 * std::f64::consts::PI * c.conductivity / w
            }
            DielectricModel::PerfectReflector => Complex64::new(f64::INFINITY, 0.0),
        })
    }

    /// The analytic xi -> 0+ behaviour used for the zero Matsubara term.
    pub fn static_response(&self) -> Result<StaticResponse> {
        Ok(match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => {
                if *plasma_frequency == 0.0 {
                    StaticResponse::Dielectric(1.0)
                } else if *relaxation_rate > 0.0 {
                    StaticResponse::Conducting
                } else {
                    StaticResponse::Plasma {
                        plasma_frequency_sq: plasma_frequency * plasma_frequency,
                    }
                }
            }
            DielectricModel::Plasma { plasma_frequency } => {
                if *plasma_frequency == 0.0 {
                    StaticResponse::Dielectric(1.0)
                } else {
                    StaticResponse::Plasma {
                        plasma_frequency_sq: plasma_frequency * plasma_frequency,
                    }
                }
            }
            DielectricModel::OscillatorSet(osc) => {
                StaticResponse::Dielectric(1.0 + osc.iter().map(|o| o.strength).sum::<f64>())
            }
            DielectricModel::Tabulated(t) => t.static_response()?,
            DielectricModel::Composite(c) => {
                let mut s = c.base.static_response()?;
                if let Some(t) = c.carriers {
                    let carrier = DielectricModel::Drude {
                        plasma_frequency: t.plasma_frequency,
                        relaxation_rate: t.relaxation_rate,
                    };
                    s = s.combine(carrier.static_response()?);
                }
                if c.conductivity > 0.0 {
                    s = s.combine(StaticResponse::Conducting);
                }
                s
            }
            DielectricModel::PerfectReflector => StaticResponse::Perfect,
        })
    }

    /// Frequency scale of the material response, used for real-axis cutoffs.
    pub fn characteristic_frequency(&self) -> f64 {
        match self {
            DielectricModel::Drude {
                plasma_frequency, ..
            }
            | DielectricModel::Plasma { plasma_frequency } => *plasma_frequency,
            DielectricModel::OscillatorSet(osc) => {
                osc.iter().fold(0.0, |m, o| m.max(o.resonance))
            }
            DielectricModel::Tabulated(t) => t.characteristic_frequency(),
            DielectricModel::Composite(c) => {
                let base = c.base.characteristic_frequency();
                c.carriers.map_or(base, |t| base.max(t.plasma_frequency))
            }
            DielectricModel::PerfectReflector => 0.0,
        }
    }

    /// True when the model has no absorption at any real frequency.
    pub fn is_lossless(&self) -> bool {
        match self {
            DielectricModel::Drude {
                relaxation_rate, ..
            } => *relaxation_rate == 0.0,
            DielectricModel::Plasma { .. } => true,
            DielectricModel::OscillatorSet(osc) => osc.iter().all(|o| o.damping == 0.0),
            DielectricModel::Tabulated(_) => false,
            DielectricModel::Composite(c) => {
                c.base.is_lossless()
                    && c.carriers.is_none_or(|t| t.relaxation_rate == 0.0)
                    && c.conductivity == 0.0
            }
            DielectricModel::PerfectReflector => true,
        }
    }

    /// Parameter listing for result metadata.
    pub fn describe(&self) -> String {
        match self {
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_rate,
            } => format!("drude(plasma_frequency={plasma_frequency:e}, relaxation_rate={relaxation_rate:e})"),
            DielectricModel::Plasma { plasma_frequency } => {
                format!("plasma(plasma_frequency={plasma_frequency:e})")
            }
            DielectricModel::OscillatorSet(osc) => {
                let terms: Vec<String> = osc
                    .iter()
                    .map(|o| format!("({:e}, {:e}, {:e})", o.strength, o.resonance, o.damping))
                    .collect();
                format!("oscillators[{}]", terms.join(", "))
            }
            DielectricModel::Tabulated(t) => t.describe(),
            DielectricModel::Composite(c) => {
                let carriers = c.carriers.map_or("none".to_string(), |t| {
                    format!("drude({:e}, {:e})", t.plasma_frequency, t.relaxation_rate)
                });
                format!(
                    "composite(base={}, carriers={carriers}, conductivity={:e})",
                    c.base.describe(),
                    c.conductivity
                )
            }
            DielectricModel::PerfectReflector => "perfect_reflector".to_string(),
        }
    }
}

/// Returns eps(i xi) for the given model; see [`DielectricModel::eps_imag`].
pub fn eval_eps_imag_axis(model: &DielectricModel, xi: f64) -> Result<f64> {
    model.eps_imag(xi)
}

/// Returns eps(w) for the given model; see [`DielectricModel::eps_real`].
pub fn eval_eps_real_axis(model: &DielectricModel, w: f64) -> Result<Complex64> {
    model.eps_real(w)
}

/// Kramers-Kronig transform of a table to the imaginary axis.
pub fn kk_to_imag_axis(table: &OpticalDataTable, tails: TailPolicy, xi: f64) -> Result<f64> {
    TabulatedDielectric::new(table.clone(), Some(tails))?.eps_imag(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn drude() -> DielectricModel {
        DielectricModel::Drude {
            plasma_frequency: 1.0,
            relaxation_rate: 0.1,
        }
    }

    #[test]
    fn drude_closed_forms() {
        assert_relative_eq!(drude().eps_imag(0.5).unwrap(), 1.0 + 1.0 / 0.3, max_relative = 1e-15);
        let e = drude().eps_real(1.0).unwrap();
        assert_relative_eq!(e.re, 1.0 - 1.0 / 1.01, max_relative = 1e-12);
        assert_relative_eq!(e.im, 0.1 / 1.01, max_relative = 1e-12);
        assert!((e.re - 0.00990).abs() < 1e-5 && (e.im - 0.09901).abs() < 1e-5);
    }

    #[test]
    fn plasma_closed_forms() {
        let p = DielectricModel::Plasma { plasma_frequency: 2.0 };
        assert_eq!(p.eps_imag(1.0).unwrap(), 5.0);
        assert_eq!(p.eps_real(2.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oscillator_static_and_transparency() {
        let o = DielectricModel::OscillatorSet(vec![Oscillator {
            strength: 2.5,
            resonance: 1e15,
            damping: 1e13,
        }]);
        assert_relative_eq!(o.eps_real(1e10).unwrap().re, 3.5, max_relative = 1e-9);
        for m in [drude(), o.clone()] {
            assert!((m.eps_imag(1e30).unwrap() - 1.0).abs() < 1e-20);
        }
        assert_eq!(o.static_response().unwrap(), StaticResponse::Dielectric(3.5));
    }

    #[test]
    fn composite_adds_conductivity_exactly() {
        let base = DielectricModel::OscillatorSet(vec![Oscillator {
            strength: 1.0,
            resonance: 1e15,
            damping: 0.0,
        }]);
        let c = DielectricModel::Composite(Box::new(Composite {
            base: base.clone(),
            carriers: None,
            conductivity: 100.0,
        }));
        for xi in [1.0, 1e3, 1e12] {
            let expect = base.eps_imag(xi).unwrap() + 4.0 * std::f64::consts::PI * 100.0 / xi;
            assert_eq!(c.eps_imag(xi).unwrap(), expect);
        }
        assert_eq!(c.static_response().unwrap(), StaticResponse::Conducting);
    }

    #[test]
    fn static_precedence() {
        let plasma_plus_sigma = DielectricModel::Composite(Box::new(Composite {
            base: DielectricModel::Plasma { plasma_frequency: 3.0 },
            carriers: Some(DrudeTerm {
                plasma_frequency: 4.0,
                relaxation_rate: 0.0,
            }),
            conductivity: 1.0,
        }));
        assert_eq!(
            plasma_plus_sigma.static_response().unwrap(),
            StaticResponse::Plasma {
                plasma_frequency_sq: 25.0
            }
        );
        assert_eq!(drude().static_response().unwrap(), StaticResponse::Conducting);
        assert!(DielectricModel::vacuum().is_vacuum());
    }

    #[test]
    fn rejects_nonpositive_frequency() {
        assert!(drude().eps_imag(0.0).is_err());
        assert!(drude().eps_real(-1.0).is_err());
        assert!(DielectricModel::Drude {
            plasma_frequency: -1.0,
            relaxation_rate: 0.0
        }
        .validate()
        .is_err());
    }
}
