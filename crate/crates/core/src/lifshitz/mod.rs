//! Plate-plate Casimir energy and pressure by three routes: the zero-temperature
//! imaginary-frequency integral, the Matsubara sum, and the real-frequency
//! integral with its TM/TE x propagating/evanescent decomposition.
//!
//! Internally integrals run in reduced variables kappa = k d, x = w d / c,
//! q = g0 d, which keeps tolerances dimensionless. Energies are per unit area
//! (J/m^2, negative for attraction); pressures are in Pa, positive for attraction.

mod imag;
mod real;
mod results;

pub use results::{QuantityKind, ResultRow, ResultTable};
pub(crate) use imag::matsubara_sum;

use crate::constants::{C, HBAR, K_B};
use crate::error::{validation, Result};
use crate::modecond::{HalfSpacePair, ModeClass, Polarization};
use crate::quad::Tolerance;
use crate::saturation::SaturationModel;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalState {
    temperature: f64,
}

impl ThermalState {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(validation(format!("temperature must be >= 0 K, got {temperature}")));
        }
        Ok(Self { temperature })
    }

    pub fn zero() -> Self {
        Self { temperature: 0.0 }
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// 1/(k_B T), J^-1; None at T = 0.
    pub fn beta(&self) -> Option<f64> {
        (self.temperature > 0.0).then(|| 1.0 / (K_B * self.temperature))
    }

    /// w_n = 2 pi n / (hbar beta), rad/s.
    pub fn matsubara(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 * K_B * self.temperature / HBAR
    }

    /// hbar c / (d k_B T): Matsubara spacing in reduced frequency is 2 pi / tau.
    pub(crate) fn tau(&self, d: f64) -> Option<f64> {
        self.beta().map(|b| HBAR * C * b / d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Relative tolerance of outer integrals.
    pub rel_tol: f64,
    /// Absolute floor in reduced units (integrals are O(1) there).
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Relative size below which Matsubara terms count as negligible.
    pub matsubara_rel_tol: f64,
    pub max_matsubara_terms: usize,
    /// Largest k d on the real axis beyond the frequency cutoff (>= 20).
    pub k_cutoff_multiplier: f64,
    /// Real-axis cutoff as a multiple of max(c/d, material frequency) (>= 10).
    pub omega_cutoff_multiplier: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-15,
            max_subdivisions: 4000,
            matsubara_rel_tol: 1e-10,
            max_matsubara_terms: 200_000,
            k_cutoff_multiplier: 80.0,
            omega_cutoff_multiplier: 50.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.rel_tol, self.abs_tol, self.matsubara_rel_tol];
        if pos.iter().any(|v| !(*v > 0.0)) {
            return Err(validation("quadrature tolerances must be > 0"));
        }
        if self.max_subdivisions < 10 || self.max_matsubara_terms < 10 {
            return Err(validation("subdivision and Matsubara limits must be >= 10"));
        }
        if self.k_cutoff_multiplier < 20.0 || self.omega_cutoff_multiplier < 10.0 {
            return Err(validation(
                "k cutoff multiplier must be >= 20 and frequency cutoff multiplier >= 10",
            ));
        }
        Ok(())
    }

    pub(crate) fn outer(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol, self.max_subdivisions)
    }

    pub(crate) fn inner(&self) -> Tolerance {
        Tolerance::new(0.1 * self.rel_tol, 0.1 * self.abs_tol, self.max_subdivisions)
    }
}

/// Integrand selector: ln f for energies, d(ln f)/dd for pressures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Energy,
    Pressure,
}

/// Real-axis contributions split by polarization and mode class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeParts {
    pub tm_propagating: f64,
    pub tm_evanescent: f64,
    pub te_propagating: f64,
    pub te_evanescent: f64,
}

impl ModeParts {
    pub fn total(&self) -> f64 {
        self.tm_propagating + self.tm_evanescent + self.te_propagating + self.te_evanescent
    }

    pub fn tm(&self) -> f64 {
        self.tm_propagating + self.tm_evanescent
    }

    pub fn te(&self) -> f64 {
        self.te_propagating + self.te_evanescent
    }

    pub fn get(&self, pol: Polarization, class: ModeClass) -> f64 {
        match (pol, class) {
            (Polarization::TM, ModeClass::Propagating) => self.tm_propagating,
            (Polarization::TM, ModeClass::Evanescent) => self.tm_evanescent,
            (Polarization::TE, ModeClass::Propagating) => self.te_propagating,
            (Polarization::TE, ModeClass::Evanescent) => self.te_evanescent,
        }
    }

    pub(crate) fn from_array(v: [f64; 4]) -> Self {
        Self {
            tm_propagating: v[0],
            tm_evanescent: v[1],
            te_propagating: v[2],
            te_evanescent: v[3],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_array([
            self.tm_propagating * s,
            self.tm_evanescent * s,
            self.te_propagating * s,
            self.te_evanescent * s,
        ])
    }

    pub fn add(&self, o: &ModeParts) -> Self {
        Self::from_array([
            self.tm_propagating + o.tm_propagating,
            self.tm_evanescent + o.tm_evanescent,
            self.te_propagating + o.te_propagating,
            self.te_evanescent + o.te_evanescent,
        ])
    }
}

/// How the energy or pressure is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationRoute {
    /// Imaginary-frequency integral at T = 0 (temperature ignored).
    ZeroTemperature,
    /// Matsubara sum.
    Matsubara,
    /// Real-frequency integral with weight n + 1/2.
    RealAxis,
    /// Zero-temperature imaginary-axis part plus the real-axis thermal part.
    Hybrid,
}

impl EvaluationRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvaluationRoute::ZeroTemperature => "zero-temperature",
            EvaluationRoute::Matsubara => "matsubara",
            EvaluationRoute::RealAxis => "real-axis",
            EvaluationRoute::Hybrid => "hybrid",
        }
    }
}

/// A computed energy or pressure with its polarization split and diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Evaluation {
    pub total: f64,
    pub tm: f64,
    pub te: f64,
    /// Present for real-axis based routes.
    pub parts: Option<ModeParts>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Matsubara terms summed explicitly (0 for integral routes).
    pub matsubara_terms: usize,
    /// Absolute error estimate of the reduced outer integrals.
    pub reduced_error: f64,
    /// False if some quadrature stopped at its roundoff floor.
    pub converged: bool,
}

impl Diagnostics {
    pub(crate) fn merge(&self, o: &Diagnostics) -> Diagnostics {
        Diagnostics {
            matsubara_terms: self.matsubara_terms + o.matsubara_terms,
            reduced_error: self.reduced_error + o.reduced_error,
            converged: self.converged && o.converged,
        }
    }
}

impl Evaluation {
    pub(crate) fn from_parts(parts: ModeParts, diagnostics: Diagnostics) -> Self {
        Self {
            total: parts.total(),
            tm: parts.tm(),
            te: parts.te(),
            parts: Some(parts),
            diagnostics,
        }
    }
}

/// Zero-temperature energy per unit area, J/m^2.
pub fn energy_t0(pair: &HalfSpacePair, quad: &QuadratureSpec) -> Result<Evaluation> {
    quad.validate()?;
    imag::zero_temperature(pair, Kernel::Energy, quad)
}

/// Free energy per unit area from the Matsubara sum, J/m^2.
pub fn free_energy_matsubara(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    quad.validate()?;
    imag::matsubara(pair, thermal, sat, Kernel::Energy, quad)
}

/// Energy from the real-frequency integral, with the four-way decomposition.
pub fn energy_real_axis(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    quad.validate()?;
    real::full(pair, thermal, sat, Kernel::Energy, quad)
}

/// V(T) - V(0) from the occupation-weighted real-axis term, by mode type.
pub fn thermal_correction_by_mode(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    quad.validate()?;
    real::thermal(pair, thermal, sat, Kernel::Energy, quad)
}

/// Energy by the chosen route.
pub fn energy(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    route: EvaluationRoute,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    evaluate(pair, thermal, sat, route, Kernel::Energy, quad)
}

/// Pressure (Pa, positive = attraction) from the analytically differentiated integrand.
pub fn pressure(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    route: EvaluationRoute,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    evaluate(pair, thermal, sat, route, Kernel::Pressure, quad)
}

fn evaluate(
    pair: &HalfSpacePair,
    thermal: &ThermalState,
    sat: &SaturationModel,
    route: EvaluationRoute,
    kernel: Kernel,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    quad.validate()?;
    let needs_t = !matches!(route, EvaluationRoute::ZeroTemperature);
    if thermal.beta().is_none() && needs_t && !sat.is_none() {
        return Err(validation("saturation needs T > 0"));
    }
    match route {
        EvaluationRoute::ZeroTemperature => {
            if !sat.is_none() {
                return Err(validation("the zero-temperature route has no occupation to saturate"));
            }
            imag::zero_temperature(pair, kernel, quad)
        }
        EvaluationRoute::Matsubara => {
            if thermal.beta().is_none() {
                return Err(validation("the Matsubara route needs T > 0"));
            }
            imag::matsubara(pair, thermal, sat, kernel, quad)
        }
        EvaluationRoute::RealAxis => real::full(pair, thermal, sat, kernel, quad),
        EvaluationRoute::Hybrid => {
            let zero = imag::zero_temperature(pair, kernel, quad)?;
            let th = real::thermal(pair, thermal, sat, kernel, quad)?;
            let parts = th.parts.unwrap_or_default();
            Ok(Evaluation {
                total: zero.total + th.total,
                tm: zero.tm + parts.tm(),
                te: zero.te + parts.te(),
                parts: Some(parts),
                diagnostics: zero.diagnostics.merge(&th.diagnostics),
            })
        }
    }
}

/// Ideal-plate zero-temperature energy -pi^2 hbar c / (720 d^3), J/m^2.
pub fn ideal_energy(d: f64) -> f64 {
    -PI * PI * HBAR * C / (720.0 * d.powi(3))
}

/// Ideal-plate zero-temperature pressure pi^2 hbar c / (240 d^4), Pa.
pub fn ideal_pressure(d: f64) -> f64 {
    PI * PI * HBAR * C / (240.0 * d.powi(4))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionKind {
    Energy,
    Pressure,
}

/// Value divided by the ideal-plate zero-temperature result at the same d.
pub fn correction_factor(kind: CorrectionKind, value: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(validation("separation must be > 0"));
    }
    Ok(match kind {
        CorrectionKind::Energy => value / ideal_energy(d),
        CorrectionKind::Pressure => value / ideal_pressure(d),
    })
}

/// Sphere-plate force by the proximity force approximation, N, positive = attraction:
/// F = 2 pi R |V_pp| for an attractive plate energy V_pp < 0.
pub fn pfa_sphere(plate_energy: f64, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(validation(format!("sphere radius must be > 0, got {radius}")));
    }
    Ok(-2.0 * PI * radius * plate_energy)
}
