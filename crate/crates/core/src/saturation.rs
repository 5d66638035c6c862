//! Saturation-modified occupation: the shifted Bose distribution, the
//! Lorentzian-smeared Matsubara term and the hard occupation cap, together
//! with the scope rules that decide which slots they modify.

use crate::constants::HBAR;
use crate::error::{validation, Result};
use crate::modecond::{ModeClass, Polarization};
use crate::quad::{integrate_points, Tolerance};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SaturationVariant {
    None,
    /// n -> 1/(exp(hbar beta w + D) - 1).
    Shifted { damping: f64 },
    /// n -> min(n, M).
    Cutoff { max_occupation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    AllModes,
    TeEvanescentOnly,
    ZeroTermOnly,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::AllModes => "all-modes",
            Scope::TeEvanescentOnly => "te-evanescent",
            Scope::ZeroTermOnly => "zero-term",
        }
    }

    pub fn parse(s: &str) -> Result<Scope> {
        match s {
            "all-modes" => Ok(Scope::AllModes),
            "te-evanescent" => Ok(Scope::TeEvanescentOnly),
            "zero-term" => Ok(Scope::ZeroTermOnly),
            other => Err(validation(format!(
                "unknown saturation scope '{other}' (all-modes, te-evanescent, zero-term)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    Matsubara,
    RealAxis,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaturationModel {
    pub variant: SaturationVariant,
    pub scope: Scope,
    /// With zero-term scope, only n = 0 is smeared while D <= this value;
    /// above it terms n <= ceil(D) are smeared.
    pub small_damping_threshold: f64,
}

/// What a slot uses in place of the Bose factor or the plain Matsubara term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlotPolicy {
    Unmodified,
    ShiftedDistribution { damping: f64 },
    CappedDistribution { max_occupation: f64 },
    SmearedTerm { damping: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slot {
    Mode { pol: Polarization, class: ModeClass },
    MatsubaraTerm(usize),
}

impl SaturationModel {
    pub const NONE: SaturationModel = SaturationModel {
        variant: SaturationVariant::None,
        scope: Scope::AllModes,
        small_damping_threshold: 1.0,
    };

    pub fn new(variant: SaturationVariant, scope: Scope) -> Result<Self> {
        match variant {
            SaturationVariant::Shifted { damping } if !(damping >= 0.0 && damping.is_finite()) => {
                return Err(validation(format!("damping D must be >= 0, got {damping}")))
            }
            SaturationVariant::Cutoff { max_occupation } if !(max_occupation > 0.0) => {
                return Err(validation(format!("cap M must be > 0, got {max_occupation}")))
            }
            SaturationVariant::Cutoff { .. } if scope == Scope::ZeroTermOnly => {
                return Err(validation("cutoff saturation cannot use zero-term scope"))
            }
            _ => {}
        }
        Ok(Self {
            variant,
            scope,
            small_damping_threshold: 1.0,
        })
    }

    pub fn shifted(damping: f64, scope: Scope) -> Result<Self> {
        Self::new(SaturationVariant::Shifted { damping }, scope)
    }

    pub fn cutoff(max_occupation: f64, scope: Scope) -> Result<Self> {
        Self::new(SaturationVariant::Cutoff { max_occupation }, scope)
    }

    pub fn is_none(&self) -> bool {
        matches!(self.variant, SaturationVariant::None)
            || matches!(self.variant, SaturationVariant::Shifted { damping } if damping == 0.0)
    }

    /// Short identifier used as the saturation column of result tables.
    pub fn label(&self) -> String {
        match self.variant {
            SaturationVariant::None => "none".to_string(),
            SaturationVariant::Shifted { damping } => {
                format!("shifted(D={damping:e};{})", self.scope.as_str())
            }
            SaturationVariant::Cutoff { max_occupation } => {
                format!("cutoff(M={max_occupation:e};{})", self.scope.as_str())
            }
        }
    }

    /// Rejects variant/scope combinations the route cannot realize.
    pub fn check_route(&self, route: Route) -> Result<()> {
        match (self.variant, self.scope, route) {
            (SaturationVariant::Cutoff { .. }, _, Route::Matsubara) => Err(validation(
                "cutoff saturation is defined on real frequencies only; use a real-axis route",
            )),
            (SaturationVariant::Shifted { .. }, Scope::ZeroTermOnly, Route::RealAxis) => Err(validation(
                "zero-term saturation acts on Matsubara terms; use the Matsubara route",
            )),
            (SaturationVariant::Shifted { .. }, Scope::TeEvanescentOnly, Route::Matsubara) => Err(validation(
                "mode-class scopes need the real-axis route; Matsubara terms mix mode classes",
            )),
            _ => Ok(()),
        }
    }

    /// Highest Matsubara index smeared under zero-term scope.
    pub fn smeared_terms(&self, damping: f64) -> usize {
        if damping <= self.small_damping_threshold {
            0
        } else {
            damping.ceil() as usize
        }
    }
}

/// Policy for one slot of one route.
pub fn apply_scope(sat: &SaturationModel, slot: Slot, route: Route) -> Result<SlotPolicy> {
    sat.check_route(route)?;
    if sat.is_none() {
        return Ok(SlotPolicy::Unmodified);
    }
    let in_scope = |pol: Polarization, class: ModeClass| match sat.scope {
        Scope::AllModes => true,
        Scope::TeEvanescentOnly => pol == Polarization::TE && class == ModeClass::Evanescent,
        Scope::ZeroTermOnly => false,
    };
    match (route, slot) {
        (Route::RealAxis, Slot::Mode { pol, class }) => Ok(if !in_scope(pol, class) {
            SlotPolicy::Unmodified
        } else {
            match sat.variant {
                SaturationVariant::Shifted { damping } => SlotPolicy::ShiftedDistribution { damping },
                SaturationVariant::Cutoff { max_occupation } => SlotPolicy::CappedDistribution { max_occupation },
                SaturationVariant::None => SlotPolicy::Unmodified,
            }
        }),
        (Route::Matsubara, Slot::MatsubaraTerm(n)) => match sat.variant {
            SaturationVariant::Shifted { damping } => {
                let hit = match sat.scope {
                    Scope::AllModes => true,
                    Scope::ZeroTermOnly => n <= sat.smeared_terms(damping),
                    Scope::TeEvanescentOnly => false,
                };
                Ok(if hit {
                    SlotPolicy::SmearedTerm { damping }
                } else {
                    SlotPolicy::Unmodified
                })
            }
            _ => Ok(SlotPolicy::Unmodified),
        },
        _ => Err(validation("slot kind does not belong to the requested route")),
    }
}

/// Bose occupation 1/(exp(hbar beta w) - 1); beta in J^-1.
pub fn bose(omega: f64, beta: f64) -> f64 {
    1.0 / (HBAR * beta * omega).exp_m1()
}

/// Shifted occupation 1/(exp(hbar beta w + D) - 1).
pub fn shifted_distribution(omega: f64, beta: f64, damping: f64) -> Result<f64> {
    let x = HBAR * beta * omega + damping;
    if !(x > 0.0) {
        return Err(validation(format!(
            "shifted distribution diverges at hbar*beta*w + D = {x:e}; use the unmodified route"
        )));
    }
    Ok(1.0 / x.exp_m1())
}

/// min(n(w), M).
pub fn cutoff_distribution(omega: f64, beta: f64, max_occupation: f64) -> Result<f64> {
    if !(max_occupation > 0.0) {
        return Err(validation("cap M must be > 0"));
    }
    if omega <= 0.0 {
        return Ok(max_occupation);
    }
    Ok(bose(omega, beta).min(max_occupation))
}

/// Occupation for a real-axis slot policy.
pub fn occupation(policy: SlotPolicy, omega: f64, beta: f64) -> Result<f64> {
    match policy {
        SlotPolicy::Unmodified | SlotPolicy::SmearedTerm { .. } => Ok(bose(omega, beta)),
        SlotPolicy::ShiftedDistribution { damping } => shifted_distribution(omega, beta, damping),
        SlotPolicy::CappedDistribution { max_occupation } => cutoff_distribution(omega, beta, max_occupation),
    }
}

/// Lorentzian weight of half-width `width` centred at `center`.
pub fn lorentzian(omega: f64, center: f64, width: f64) -> f64 {
    width / (PI * ((omega - center).powi(2) + width * width))
}

/// Half-width D/(hbar beta) of the smeared term, rad/s.
pub fn smearing_width(damping: f64, beta: f64) -> f64 {
    damping / (HBAR * beta)
}

/// (1/pi) int L(|w'|) W / ((w' - w_n)^2 + W^2) dw' over the real line.
///
/// With w' = w_n + W tan t the weight becomes uniform in t on (-pi/2, pi/2);
/// the range is split at w' = w_n and where w' crosses zero.
pub fn smeared_term<const N: usize, F>(center: f64, width: f64, mut term: F, tol: &Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if !(width > 0.0) {
        return Err(validation("smearing width must be > 0"));
    }
    let map = |t: f64| (center + width * t.tan()).abs();
    if center == 0.0 {
        let est = integrate_points(|t| term(map(t)), &[0.0, FRAC_PI_2], tol)?;
        return Ok(est.value.map(|v| 2.0 / PI * v));
    }
    let cross = (-center / width).atan();
    let mut pts = vec![-FRAC_PI_2, cross, 0.0, FRAC_PI_2];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let est = integrate_points(|t| term(map(t)), &pts, tol)?;
    Ok(est.value.map(|v| v / PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const BETA_UNIT: f64 = 1.0;

    #[test]
    fn shifted_examples() {
        assert!((shifted_distribution(0.0, 1.0, 0.01).unwrap() - 99.5008).abs() < 1e-4);
        assert!((shifted_distribution(0.0, 1.0, 1.0).unwrap() - 0.58198).abs() < 1e-5);
        let w = 2.0 / HBAR;
        assert_eq!(shifted_distribution(w, BETA_UNIT, 0.0).unwrap(), bose(w, BETA_UNIT));
        assert!(shifted_distribution(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let w = 1e-6 / HBAR;
        assert_eq!(cutoff_distribution(w, 1.0, 100.0).unwrap(), 100.0);
        assert_eq!(cutoff_distribution(0.0, 1.0, 100.0).unwrap(), 100.0);
        let w = 30.0 / HBAR;
        assert_eq!(cutoff_distribution(w, 1.0, 100.0).unwrap(), bose(w, 1.0));
        assert!(cutoff_distribution(w, 1.0, 0.0).is_err());
    }

    #[test]
    fn scope_examples() {
        let te = SaturationModel::shifted(0.1, Scope::TeEvanescentOnly).unwrap();
        let tm_prop = Slot::Mode {
            pol: Polarization::TM,
            class: ModeClass::Propagating,
        };
        assert_eq!(apply_scope(&te, tm_prop, Route::RealAxis).unwrap(), SlotPolicy::Unmodified);
        let te_ev = Slot::Mode {
            pol: Polarization::TE,
            class: ModeClass::Evanescent,
        };
        assert_eq!(
            apply_scope(&te, te_ev, Route::RealAxis).unwrap(),
            SlotPolicy::ShiftedDistribution { damping: 0.1 }
        );
        let zt = SaturationModel::shifted(0.1, Scope::ZeroTermOnly).unwrap();
        assert_eq!(apply_scope(&zt, Slot::MatsubaraTerm(3), Route::Matsubara).unwrap(), SlotPolicy::Unmodified);
        assert_eq!(
            apply_scope(&zt, Slot::MatsubaraTerm(0), Route::Matsubara).unwrap(),
            SlotPolicy::SmearedTerm { damping: 0.1 }
        );
        let all = SaturationModel::shifted(0.1, Scope::AllModes).unwrap();
        assert_eq!(
            apply_scope(&all, tm_prop, Route::RealAxis).unwrap(),
            SlotPolicy::ShiftedDistribution { damping: 0.1 }
        );
        let big = SaturationModel::shifted(2.5, Scope::ZeroTermOnly).unwrap();
        assert_eq!(big.smeared_terms(2.5), 3);
    }

    #[test]
    fn incompatible_routes_rejected() {
        let cut = SaturationModel::cutoff(100.0, Scope::AllModes).unwrap();
        assert!(cut.check_route(Route::Matsubara).is_err());
        let zt = SaturationModel::shifted(0.1, Scope::ZeroTermOnly).unwrap();
        assert!(zt.check_route(Route::RealAxis).is_err());
        let te = SaturationModel::shifted(0.1, Scope::TeEvanescentOnly).unwrap();
        assert!(te.check_route(Route::Matsubara).is_err());
        assert!(SaturationModel::cutoff(1.0, Scope::ZeroTermOnly).is_err());
        assert!(SaturationModel::shifted(-1.0, Scope::AllModes).is_err());
    }

    #[test]
    fn smearing_is_normalized() {
        let tol = Tolerance::new(1e-12, 0.0, 1000);
        for (c, w) in [(0.0, 1.0), (5.0, 0.3), (1.0, 40.0)] {
            let v = smeared_term(c, w, |_| Ok([1.0]), &tol).unwrap();
            assert_relative_eq!(v[0], 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn smearing_of_even_function() {
        // L(x) = exp(-x) at center 0: (2/pi) int_0^inf e^{-x} W/(x^2+W^2) dx
        let tol = Tolerance::new(1e-11, 0.0, 1000);
        let w = 0.5;
        let v = smeared_term(0.0, w, |x| Ok([(-x).exp()]), &tol).unwrap()[0];
        let direct = crate::quad::integrate_to_infinity(|x: f64| Ok([2.0 * (-x).exp() * lorentzian(x, 0.0, w)]), 0.0, &tol)
            .unwrap()
            .value[0];
        assert_relative_eq!(v, direct, max_relative = 1e-9);
    }
}
