//! The atom-wall potential as the dilute limit of the two-body Lifshitz energy:
//! E(wall, slab of thickness t and density n) / (n t) -> V(d) as n, t -> 0.
//! The plate energy is integrated here with its own Gauss-Legendre rule so the
//! check does not share quadrature code with the library.

use casimir_sat::atomwall::{potential, AtomModel};
use casimir_sat::constants::{C, HBAR};
use casimir_sat::dielectric::{DielectricModel, Oscillator};
use casimir_sat::lifshitz::{QuadratureSpec, ThermalState};
use casimir_sat::modecond::{reflection_imag, slab_reflection_imag, Polarization};
use casimir_sat::saturation::SaturationModel;
use std::f64::consts::PI;

/// n-point Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

/// Composite Gauss-Legendre over consecutive breakpoints.
fn integrate(f: impl Fn(f64) -> f64, pts: &[f64], rule: &[(f64, f64)]) -> f64 {
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            rule.iter().map(|&(x, wt)| wt * f(m + h * x)).sum::<f64>() * h
        })
        .sum()
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

fn silica() -> DielectricModel {
    DielectricModel::OscillatorSet(vec![
        Oscillator {
            strength: 0.829,
            resonance: 2.034e16,
            damping: 0.0,
        },
        Oscillator {
            strength: 1.98,
            resonance: 1.32e14,
            damping: 0.0,
        },
    ])
}

/// T = 0 energy per area between the wall and the slab, J/m^2, with p = g0 d and x = xi d / c.
fn plate_energy(wall: &DielectricModel, atom: &AtomModel, density: f64, t: f64, d: f64) -> f64 {
    let rule = gauss_legendre(20);
    let inner = |x: f64| -> f64 {
        let xi = x * C / d;
        let e1 = wall.eps_imag(xi).unwrap();
        let e2 = 1.0 + 4.0 * PI * density * atom.polarizability(xi);
        let f = |u: f64| {
            let p = x + u;
            let q = p / d;
            [Polarization::TM, Polarization::TE]
                .iter()
                .map(|&pol| {
                    let r = reflection_imag(pol, q, xi, e1) * slab_reflection_imag(pol, q, xi, e2, t);
                    p * (-r * (-2.0 * p).exp()).ln_1p()
                })
                .sum::<f64>()
        };
        integrate(f, &grid(0.0, 40.0, 40), &rule)
    };
    // x in log space below 1, linear above
    let lo = integrate(|s: f64| s.exp() * inner(s.exp()), &grid(-30.0, 0.0, 30), &rule);
    let hi = integrate(inner, &grid(1.0, 41.0, 40), &rule);
    HBAR * C / (4.0 * PI * PI * d.powi(3)) * (lo + hi)
}

#[test]
fn dilute_slab_limit_reproduces_the_atom_potential() {
    let wall = silica();
    let atom = AtomModel::rubidium();
    let d = 1e-6;
    let density = 1e-6 / (4.0 * PI * atom.static_polarizability);
    let ts = [1e-9, 2e-9, 4e-9];
    let per_atom: Vec<f64> = ts
        .iter()
        .map(|&t| plate_energy(&wall, &atom, density, t, d) / (density * t))
        .collect();
    // linear extrapolation to t = 0 from the two smallest thicknesses, checked against the third
    let extrapolated = 2.0 * per_atom[0] - per_atom[1];
    let check = (4.0 * per_atom[0] - per_atom[2]) / 3.0;
    assert!((extrapolated / check - 1.0).abs() < 1e-4, "{per_atom:?}");
    let v = potential(
        d,
        &wall,
        &atom,
        &ThermalState::zero(),
        &SaturationModel::NONE,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!(v < 0.0);
    let rel = extrapolated / v - 1.0;
    eprintln!("slab {extrapolated:e} vs atom {v:e} (rel {rel:e})");
    assert!(rel.abs() < 5e-5, "slab {extrapolated:e} vs atom {v:e} (rel {rel:e})");
}

#[test]
fn potential_is_linear_in_polarizability() {
    let wall = silica();
    let q = QuadratureSpec::default();
    let t = ThermalState::new(310.0).unwrap();
    let a = AtomModel::new(1e-29, 2e15).unwrap();
    let b = AtomModel::new(3e-29, 2e15).unwrap();
    let va = potential(3e-6, &wall, &a, &t, &SaturationModel::NONE, &q).unwrap();
    let vb = potential(3e-6, &wall, &b, &t, &SaturationModel::NONE, &q).unwrap();
    assert!((vb / va - 3.0).abs() < 1e-12);
}
