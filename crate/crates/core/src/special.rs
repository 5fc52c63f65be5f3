//! Scaled complementary error function and Gauss–Legendre rules.

use std::f64::consts::PI;

/// e^{x²} erfc(x) for x ≥ 0 without overflow.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 4.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    1.0 / (PI.sqrt() * erfc_fraction(x, 1))
}

/// x + a_k/(x + a_{k+1}/(x + …)) with a_k = k/2, the continued fraction of
/// √π e^{x²} erfc(x) when k = 1.  Modified Lentz; intended for x ≳ 2.
pub(crate) fn erfc_fraction(x: f64, k0: usize) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in k0..k0 + 1000 {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 2.0 * f64::EPSILON {
            break;
        }
    }
    f
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfcx_matches_direct_and_asymptotic() {
        for &x in &[0.0f64, 0.3, 1.0, 2.5, 3.9, 4.0, 4.1, 6.0] {
            let direct = (x * x).exp() * libm::erfc(x);
            assert!((erfcx(x) / direct - 1.0).abs() < 1e-13, "{x}");
        }
        assert!((erfcx(50.0) / 0.011_281_536_265_323_772_5 - 1.0).abs() < 1e-14);
        for &x in &[1e3f64, 1e6] {
            let s = 1.0 / (x * PI.sqrt()) * (1.0 - 0.5 / (x * x) + 0.75 / x.powi(4));
            assert!((erfcx(x) / s - 1.0).abs() < 1e-14, "{x}");
        }
        assert!((erfcx(-1.0) - 2.0 * 1f64.exp() + erfcx(1.0)).abs() < 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m - 2.0 / 31.0).abs() < 1e-14);
    }
}
