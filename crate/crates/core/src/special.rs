//! Special functions: modified Bessel I1 and the trap averaging kernel g(z).

const G_SWITCH: f64 = 1.5;
const I1_SWITCH: f64 = 20.0;

fn i1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        sum += term;
        if term <= 1e-17 * sum {
            return sum;
        }
    }
}

/// e^{-x} I1(x) from the large-argument expansion.
fn i1e_asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Modified Bessel function of the first kind, order one.
pub fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I1_SWITCH {
        i1_series(ax)
    } else {
        i1e_asymptotic(ax) * ax.exp()
    };
    v.copysign(x)
}

/// Exponentially scaled e^{-|x|} I1(x).
pub fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I1_SWITCH {
        i1_series(ax) * (-ax).exp()
    } else {
        i1e_asymptotic(ax)
    };
    v.copysign(x)
}

fn g_series(z: f64) -> f64 {
    // 15 sum_m 4(m+2)(m+1) z^{2m} / (2m+5)!
    let z2 = z * z;
    let mut fact = 120.0;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for m in 0..30 {
        let mf = m as f64;
        let term = 4.0 * (mf + 2.0) * (mf + 1.0) * pow / fact;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= z2;
        fact *= (2.0 * mf + 6.0) * (2.0 * mf + 7.0);
    }
    15.0 * sum
}

/// g(z) = 15[(3+z^2) sinh z - 3z cosh z]/z^5, with g(0) = 1.
pub fn g_kernel(z: f64) -> f64 {
    if z < G_SWITCH {
        g_series(z)
    } else {
        15.0 * ((3.0 + z * z) * z.sinh() - 3.0 * z * z.cosh()) / z.powi(5)
    }
}

/// e^{-z} g(z), finite for large z.
pub fn g_kernel_scaled(z: f64) -> f64 {
    if z < G_SWITCH {
        g_series(z) * (-z).exp()
    } else {
        let e = (-2.0 * z).exp();
        15.0 * ((3.0 + z * z) * 0.5 * (1.0 - e) - 1.5 * z * (1.0 + e)) / z.powi(5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn i1_reference_values() {
        for (x, v) in [
            (1.0, 0.565_159_103_992_485_1),
            (5.0, 24.335_642_142_450_53),
            (10.0, 2_670.988_303_701_255),
            (20.0, 4.245_497_338_512_778e7),
        ] {
            assert_relative_eq!(bessel_i1(x), v, max_relative = 1e-13);
        }
        assert_relative_eq!(bessel_i1(1e-8), 5e-9, max_relative = 1e-12);
        assert_eq!(bessel_i1(0.0), 0.0);
    }

    #[test]
    fn i1_branches_meet() {
        let lo = i1_series(I1_SWITCH) * (-I1_SWITCH).exp();
        let hi = i1e_asymptotic(I1_SWITCH);
        assert_relative_eq!(lo, hi, max_relative = 1e-13);
        assert_relative_eq!(bessel_i1e(300.0), 1.0 / (600.0 * std::f64::consts::PI).sqrt() * (1.0 - 3.0 / 2400.0), max_relative = 1e-5);
    }

    #[test]
    fn g_reference_values() {
        assert_relative_eq!(g_kernel(0.0), 1.0, max_relative = 1e-15);
        assert!((g_kernel(2.0) - 1.3195).abs() < 1e-4);
        let direct = 15.0 * ((3.0 + G_SWITCH.powi(2)) * G_SWITCH.sinh() - 3.0 * G_SWITCH * G_SWITCH.cosh())
            / G_SWITCH.powi(5);
        assert_relative_eq!(g_series(G_SWITCH), direct, max_relative = 1e-12);
        assert_relative_eq!(g_kernel_scaled(3.0), g_kernel(3.0) * (-3.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn g_monotone_on_unit_range() {
        let mut prev = g_kernel(0.0);
        for i in 1..=1000 {
            let v = g_kernel(i as f64 * 0.01);
            assert!(v > prev);
            prev = v;
        }
    }
}
