//! Real normal-mode frequencies of two lossless plasma half-spaces.
//!
//! Roots are bracketed on a logarithmic grid in g0 (evanescent side) or q
//! (propagating side, g0 = -iq), merged with a logarithmic grid in w, and
//! refined by bisection. Near-degenerate root pairs are resolved by locally
//! densifying the grid wherever |h| has an interior minimum without a sign change.

use super::{ModeClass, Polarization};
use crate::constants::C;
use crate::dielectric::DielectricModel;
use crate::error::{validation, Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionOptions {
    /// Grid density; at least 1000 per decade.
    pub points_per_decade: usize,
    /// Relative bisection tolerance on w.
    pub rel_tol: f64,
    /// Decades covered below the light line and below the bulk edge.
    pub decades: f64,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        Self {
            points_per_decade: 1000,
            rel_tol: 1e-10,
            decades: 12.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionRoot {
    /// In-plane wavevector, rad/m.
    pub k: f64,
    /// Mode frequency, rad/s.
    pub omega: f64,
    pub polarization: Polarization,
    pub class: ModeClass,
}

fn plasma_frequency(m: &DielectricModel) -> Option<f64> {
    match m {
        DielectricModel::Plasma { plasma_frequency } => Some(*plasma_frequency),
        DielectricModel::Drude {
            plasma_frequency,
            relaxation_rate,
        } if *relaxation_rate == 0.0 => Some(*plasma_frequency),
        _ => None,
    }
}

/// Evaluation point: g0^2 and w for a grid parameter.
#[derive(Clone, Copy)]
struct Point {
    g0: Complex64,
    w: f64,
}

struct Problem {
    pol: Polarization,
    k: f64,
    d: f64,
    wp: [f64; 2],
    class: ModeClass,
}

impl Problem {
    /// Point from the grid parameter (g0 for evanescent, q for propagating).
    fn point(&self, s: f64) -> Point {
        match self.class {
            ModeClass::Evanescent => Point {
                g0: Complex64::new(s, 0.0),
                w: C * ((self.k - s) * (self.k + s)).sqrt(),
            },
            ModeClass::Propagating => Point {
                g0: Complex64::new(0.0, -s),
                w: C * (self.k * self.k + s * s).sqrt(),
            },
        }
    }

    fn ab(&self, p: Point, j: usize) -> (Complex64, Complex64) {
        let p2 = (self.wp[j] / C).powi(2);
        let g2 = p.g0 * p.g0 + p2;
        let b = Complex64::new(g2.re.max(0.0).sqrt(), 0.0);
        let a = match self.pol {
            Polarization::TM => p.g0 * (1.0 - (self.wp[j] / p.w).powi(2)),
            Polarization::TE => p.g0,
        };
        (a, b)
    }

    /// Real functions whose sign changes bracket roots, with an acceptance flag.
    fn branches(&self, s: f64) -> Vec<(f64, bool)> {
        let p = self.point(s);
        let (a1, b1) = self.ab(p, 0);
        let (a2, b2) = self.ab(p, 1);
        let identical = self.wp[0] == self.wp[1];
        match (self.class, identical) {
            (ModeClass::Evanescent, true) => {
                let e = (-p.g0.re * self.d).exp();
                vec![
                    ((a1 + b1 - (a1 - b1) * e).re, true),
                    ((a1 + b1 + (a1 - b1) * e).re, true),
                ]
            }
            (ModeClass::Evanescent, false) => {
                let e = (-2.0 * p.g0.re * self.d).exp();
                vec![(((a1 + b1) * (a2 + b2) - (a1 - b1) * (a2 - b2) * e).re, true)]
            }
            (ModeClass::Propagating, true) => {
                let h = (p.g0 * (0.5 * self.d)).exp();
                let sym = (a1 + b1) * h - (a1 - b1) / h;
                let anti = (a1 + b1) * h + (a1 - b1) / h;
                vec![(sym.re, true), (anti.im, true)]
            }
            (ModeClass::Propagating, false) => {
                let h = (p.g0 * self.d).exp();
                let pp = (a1 + b1) * (a2 + b2) * h;
                let qq = (a1 - b1) * (a2 - b2) / h;
                let z = qq * pp.conj();
                vec![(z.im, z.re > 0.0)]
            }
        }
    }
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = (((hi / lo).log10() * per_decade as f64).ceil() as usize).max(2);
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

/// Brackets of sign changes of branch `b`, densifying near interior minima of |h|.
fn brackets(prob: &Problem, b: usize, xs: &[f64], depth: u32, out: &mut Vec<(f64, f64)>) {
    let vals: Vec<(f64, bool)> = xs.iter().map(|&x| prob.branches(x)[b]).collect();
    for i in 0..xs.len() - 1 {
        let (v0, ok0) = vals[i];
        let (v1, ok1) = vals[i + 1];
        if v0 == 0.0 && ok0 {
            out.push((xs[i], xs[i]));
            continue;
        }
        if v0 * v1 < 0.0 && (ok0 || ok1) {
            out.push((xs[i], xs[i + 1]));
        }
    }
    if depth == 0 {
        return;
    }
    for i in 1..xs.len() - 1 {
        let (vm, _) = vals[i - 1];
        let (v, _) = vals[i];
        let (vp, _) = vals[i + 1];
        let same = vm.signum() == v.signum() && v.signum() == vp.signum();
        if same && v.abs() < vm.abs() && v.abs() < vp.abs() && v.abs() < 0.5 * vm.abs().max(vp.abs()) {
            let fine: Vec<f64> = (0..=64)
                .map(|j| xs[i - 1] + (xs[i + 1] - xs[i - 1]) * j as f64 / 64.0)
                .collect();
            brackets(prob, b, &fine, depth - 1, out);
        }
    }
}

fn bisect(prob: &Problem, b: usize, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut flo = prob.branches(lo)[b].0;
    for _ in 0..300 {
        let wl = prob.point(lo).w;
        let wh = prob.point(hi).w;
        if (wl - wh).abs() <= rel_tol * wl.max(wh) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = prob.branches(mid)[b].0;
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn solve_at(prob: &Problem, per_decade: usize, decades: f64, rel_tol: f64, w_hi: f64) -> Vec<f64> {
    let k = prob.k;
    let (top, wgrid): (f64, Vec<f64>) = match prob.class {
        ModeClass::Evanescent => {
            let top = k;
            let ws = log_grid(C * k * 10f64.powf(-decades.min(8.0)), C * k, per_decade);
            let ss = ws
                .iter()
                .map(|w| {
                    let x = w / C;
                    ((k - x) * (k + x)).max(0.0).sqrt()
                })
                .collect();
            (top, ss)
        }
        ModeClass::Propagating => {
            let top = ((w_hi / C - k) * (w_hi / C + k)).sqrt();
            let ws = log_grid(C * k, w_hi, per_decade);
            let ss = ws
                .iter()
                .map(|w| {
                    let x = w / C;
                    ((x - k) * (x + k)).max(0.0).sqrt()
                })
                .collect();
            (top, ss)
        }
    };
    let lo = top * 10f64.powf(-decades);
    let hi = top * (1.0 - 1e-12);
    let mut xs = log_grid(lo, hi, per_decade);
    xs.extend(wgrid.into_iter().filter(|s| *s > lo && *s < hi));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let nb = prob.branches(xs[0]).len();
    let mut roots = Vec::new();
    for b in 0..nb {
        let mut br = Vec::new();
        brackets(prob, b, &xs, 6, &mut br);
        br.sort_by(|x, y| x.0.total_cmp(&y.0));
        br.dedup_by(|x, y| x.0 >= y.0 && x.1 <= y.1);
        for (a, c) in br {
            let s = if a == c { a } else { bisect(prob, b, a, c, rel_tol) };
            roots.push(prob.point(s).w);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e3 * rel_tol * y.abs());
    roots
}

/// Real roots of f(k, w) = 0 for lossless plasma half-spaces, sorted by w.
pub fn dispersion_solve(
    pair: &super::HalfSpacePair,
    pol: Polarization,
    k: f64,
    opts: &DispersionOptions,
) -> Result<Vec<DispersionRoot>> {
    let (Some(w1), Some(w2)) = (plasma_frequency(&pair.medium1), plasma_frequency(&pair.medium2)) else {
        return Err(validation(
            "dispersion solver needs lossless plasma-model media (plasma, or Drude with zero relaxation)",
        ));
    };
    if !(k > 0.0) {
        return Err(validation("dispersion solver needs k > 0"));
    }
    if opts.points_per_decade < 1000 || !(opts.rel_tol > 0.0) {
        return Err(validation("dispersion grid needs >= 1000 points per decade and rel_tol > 0"));
    }
    let w_hi = ((w1.min(w2)).powi(2) + (C * k).powi(2)).sqrt();
    let mut out = Vec::new();
    for class in [ModeClass::Evanescent, ModeClass::Propagating] {
        let prob = Problem {
            pol,
            k,
            d: pair.separation,
            wp: [w1, w2],
            class,
        };
        if class == ModeClass::Propagating && w1.min(w2) == 0.0 {
            continue;
        }
        let coarse = solve_at(&prob, opts.points_per_decade, opts.decades, opts.rel_tol, w_hi);
        let fine = solve_at(&prob, 2 * opts.points_per_decade, opts.decades, opts.rel_tol, w_hi);
        if coarse.len() != fine.len() {
            return Err(Error::Refinement(format!(
                "{} {} roots at k = {k:e}: {} at base resolution, {} at double resolution",
                pol.as_str(),
                class.as_str(),
                coarse.len(),
                fine.len()
            )));
        }
        out.extend(fine.into_iter().map(|omega| DispersionRoot {
            k,
            omega,
            polarization: pol,
            class,
        }));
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok(out)
}

/// CSV with columns k, omega, polarization, class.
pub fn dispersion_csv(roots: &[DispersionRoot]) -> String {
    let mut s = String::from("k_per_m,omega_rad_per_s,polarization,class\n");
    for r in roots {
        let _ = writeln!(s, "{:e},{:e},{},{}", r.k, r.omega, r.polarization.as_str(), r.class.as_str());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modecond::{mode_condition, FrequencyPoint, HalfSpacePair};

    const WP: f64 = 1.37e16;

    fn pair() -> HalfSpacePair {
        let m = DielectricModel::Plasma { plasma_frequency: WP };
        HalfSpacePair::new(m.clone(), m, 1e-7).unwrap()
    }

    #[test]
    fn te_has_no_evanescent_roots() {
        let ws = WP / 2f64.sqrt();
        for kc in [0.3, 1.0, 3.0, 30.0] {
            let roots = dispersion_solve(&pair(), Polarization::TE, kc * ws / C, &Default::default()).unwrap();
            assert!(roots.iter().all(|r| r.class == ModeClass::Propagating));
        }
    }

    #[test]
    fn tm_surface_branches_split_and_order() {
        let ws = WP / 2f64.sqrt();
        let k = ws / C;
        let roots = dispersion_solve(&pair(), Polarization::TM, k, &Default::default()).unwrap();
        let ev: Vec<f64> = roots
            .iter()
            .filter(|r| r.class == ModeClass::Evanescent)
            .map(|r| r.omega)
            .collect();
        assert_eq!(ev.len(), 2, "{roots:?}");
        assert!(ev[0] < ev[1] && ev[1] < C * k);
        for w in ev {
            let f = mode_condition(Polarization::TM, &pair(), k, FrequencyPoint::Real(w)).unwrap();
            let g = mode_condition(Polarization::TM, &pair(), k, FrequencyPoint::Real(w * (1.0 + 1e-6))).unwrap();
            assert!(f.norm() < 1e-3 * g.norm().max(1e-12));
        }
    }

    #[test]
    fn rejects_lossy_media() {
        let m = DielectricModel::Drude {
            plasma_frequency: WP,
            relaxation_rate: 1e13,
        };
        let p = HalfSpacePair::new(m.clone(), m, 1e-7).unwrap();
        assert!(dispersion_solve(&p, Polarization::TM, 1e7, &Default::default()).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let roots = dispersion_solve(&pair(), Polarization::TM, 5e7, &Default::default()).unwrap();
        let csv = dispersion_csv(&roots);
        assert_eq!(csv.lines().count(), roots.len() + 1);
    }
}
