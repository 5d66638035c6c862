//! Adaptive Gauss-Kronrod (G10/K21) quadrature for vector-valued integrands,
//! interval maps and Gauss-Laguerre rules.

use crate::error::{Error, Result};
use std::sync::OnceLock;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Stopping rule for adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_intervals: usize) -> Self {
        Self {
            rel,
            abs,
            max_intervals,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    /// Sum over components of the absolute error estimates.
    pub error: f64,
    pub intervals: usize,
    /// False when refinement stopped at the roundoff floor before meeting the tolerance.
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
    /// Error estimate already at the roundoff floor; splitting cannot help.
    limited: bool,
}

fn rule<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut resk = [0.0; N];
    let mut resg = [0.0; N];
    let mut resabs = [0.0; N];
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    for i in 0..N {
        resk[i] = WGK[10] * fc[i];
        resabs[i] = resk[i].abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        for i in 0..N {
            resk[i] += WGK[j] * (f1[i] + f2[i]);
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                resg[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }
    let mut value = [0.0; N];
    let mut error = 0.0;
    let mut limited = true;
    for i in 0..N {
        let mean = resk[i] * 0.5;
        let mut resasc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][i] - mean).abs() + (fv2[j][i] - mean).abs());
        }
        let resasc = resasc * half.abs();
        let resabs_i = resabs[i] * half.abs();
        value[i] = resk[i] * half;
        let mut err = ((resk[i] - resg[i]) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        let round = 50.0 * f64::EPSILON * resabs_i;
        if err > round {
            limited = false;
        }
        err = err.max(round);
        if !err.is_finite() || !value[i].is_finite() {
            return Err(Error::Validation(format!(
                "non-finite integrand on [{a:e}, {b:e}]"
            )));
        }
        error += err;
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        limited,
    })
}

/// Integrates `f` over the ordered `points` (at least two), refining adaptively.
pub fn integrate_points<const N: usize, F>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if points.len() < 2 {
        return Err(Error::Validation("quadrature needs two endpoints".into()));
    }
    let mut segs: Vec<Segment<N>> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            segs.push(rule(&mut f, w[0], w[1])?);
        }
    }
    let scale = points
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(points[points.len() - 1] - points[0]);
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for s in &segs {
            for (t, v) in total.iter_mut().zip(&s.value) {
                *t += v;
            }
            err += s.error;
        }
        let norm: f64 = total.iter().map(|v| v.abs()).sum();
        let target = tol.abs.max(tol.rel * norm);
        if err <= target {
            return Ok(Estimate {
                value: total,
                error: err,
                intervals: segs.len(),
                converged: true,
            });
        }
        let pick = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.limited && (s.b - s.a) > 1e-14 * scale)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = pick else {
            return Ok(Estimate {
                value: total,
                error: err,
                intervals: segs.len(),
                converged: false,
            });
        };
        if segs.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                value: total.iter().sum(),
                error: err,
                tolerance: target,
                intervals: segs.len(),
            });
        }
        let s = segs[i];
        let mid = 0.5 * (s.a + s.b);
        segs[i] = rule(&mut f, s.a, mid)?;
        segs.push(rule(&mut f, mid, s.b)?);
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    integrate_points(f, &[a, b], tol)
}

/// Integrates `f` over `[a, inf)` with the map x = a + t/(1-t).
pub fn integrate_to_infinity<const N: usize, F>(
    mut f: F,
    a: f64,
    tol: &Tolerance,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    integrate(
        |t| {
            let s = 1.0 - t;
            let mut v = f(a + t / s)?;
            let jac = 1.0 / (s * s);
            for x in v.iter_mut() {
                *x *= jac;
            }
            Ok(v)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Scalar convenience wrapper over [`integrate`] for infallible integrands.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate<1>>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Ok([f(x)]), a, b, tol)
}

/// Gauss-Laguerre rule for integrals of the form int_0^inf e^{-x} h(x) dx.
#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Nodes by Newton iteration on L_n with the usual asymptotic starting guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n {
            if i == 0 {
                z = 3.0 / (1.0 + 2.4 * nf);
            } else if i == 1 {
                z += 15.0 / (1.0 + 2.5 * nf);
            } else {
                let ai = (i - 1) as f64;
                z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
            }
            let mut p2 = 0.0;
            let mut pp = 1.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = (nf * p1 - nf * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z {
                    break;
                }
            }
            nodes[i] = z;
            weights[i] = -1.0 / (pp * nf * p2);
        }
        Self { nodes, weights }
    }

    /// Shared 48-point rule.
    pub fn n48() -> &'static GaussLaguerre {
        static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
        RULE.get_or_init(|| GaussLaguerre::new(48))
    }

    /// Shared 64-point rule.
    pub fn n64() -> &'static GaussLaguerre {
        static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
        RULE.get_or_init(|| GaussLaguerre::new(64))
    }

    /// Sum of w_i h(x_i).
    pub fn apply<const N: usize, F>(&self, mut h: F) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> Result<[f64; N]>,
    {
        let mut acc = [0.0; N];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = h(*x)?;
            for i in 0..N {
                acc[i] += w * v[i];
            }
        }
        Ok(acc)
    }
}

/// Integrates a function decaying like e^{-t} over t in [0, inf).
///
/// `g(t)` returns the integrand itself. The 48- and 64-point Laguerre sums are
/// compared first; if they disagree beyond `tol.rel` the adaptive rule is used.
pub fn integrate_exp_decay<const N: usize, F>(mut g: F, tol: &Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let mut lag = |rule: &GaussLaguerre| {
        rule.apply(|t| {
            let mut v = g(t)?;
            let e = t.exp();
            for x in v.iter_mut() {
                *x *= e;
            }
            Ok(v)
        })
    };
    let a = lag(GaussLaguerre::n48())?;
    let b = lag(GaussLaguerre::n64())?;
    let norm: f64 = b.iter().map(|v| v.abs()).sum();
    let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    if diff <= tol.abs.max(tol.rel * norm) {
        return Ok(b);
    }
    let near = integrate(&mut g, 0.0, 1.0, tol)?;
    let mid = integrate(&mut g, 1.0, 40.0, tol)?;
    let far = integrate_to_infinity(&mut g, 40.0, tol)?;
    Ok(std::array::from_fn(|i| near.value[i] + mid.value[i] + far.value[i]))
}
