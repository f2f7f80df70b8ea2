//! Shared numerical kernels: adaptive Gauss-Kronrod quadrature, bracketed
//! bisection and small least-squares fits.
//!
//! The quadrature pair is the classic 7-point Gauss / 15-point Kronrod
//! rule; subintervals are split until the local error estimate drops below
//! the tolerance share assigned to them, so the total error stays below
//! the caller's absolute tolerance for smooth integrands.

use crate::{Error, Result};

/// Positive Kronrod abscissae of the (G7, K15) pair; the final entry is 0.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_23,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// 7-point Gauss weights; entry i pairs with `XGK[2 * i + 1]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One (G7, K15) evaluation over `[a, b]`: returns the Kronrod estimate
/// and the |K15 - G7| error proxy.
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;

    for (i, &x) in XGK.iter().enumerate().take(7) {
        let offset = half * x;
        let sum = f(center - offset) + f(center + offset);
        kronrod += WGK[i] * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }

    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

fn integrate_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gauss_kronrod_15(f, a, b);
    if err <= tol || depth >= 48 {
        value
    } else {
        let mid = 0.5 * (a + b);
        integrate_rec(f, a, mid, 0.5 * tol, depth + 1)
            + integrate_rec(f, mid, b, 0.5 * tol, depth + 1)
    }
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    integrate_rec(&f, a, b, abs_tol.max(f64::MIN_POSITIVE), 0)
}

/// Root of `f` inside `[lo, hi]` by bisection, to relative tolerance
/// `rel_tol` on the abscissa. The bracket must straddle a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::BracketFailure {
            what: "bisection bracket does not straddle a sign change".into(),
            trace: vec![(lo, f_lo), (hi, f_hi)],
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares fit of `y = prefactor * x^exponent` in log-log space.
/// Returns `(prefactor, exponent)`. All samples must be positive.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "power-law fit needs at least two samples");
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        debug_assert!(x > 0.0 && y > 0.0);
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let prefactor = ((sy - exponent * sx) / n).exp();
    (prefactor, exponent)
}

/// Least-squares prefactor of `y = prefactor * x^exponent` with the
/// exponent held fixed: the geometric mean of `y / x^exponent`. All
/// samples must be positive.
pub fn fit_power_law_prefactor(xs: &[f64], ys: &[f64], exponent: f64) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty(), "prefactor fit needs at least one sample");
    let sum: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            debug_assert!(x > 0.0 && y > 0.0);
            y.ln() - exponent * x.ln()
        })
        .sum();
    (sum / xs.len() as f64).exp()
}

/// Least-squares slope of `y = slope * x` (line through the origin).
pub fn fit_slope_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let num: f64 = xs.iter().zip(ys).map(|(&x, &y)| x * y).sum();
    let den: f64 = xs.iter().map(|&x| x * x).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_matches_gaussian_integral() {
        let value = integrate(|x| (-x * x).exp(), -12.0, 12.0, 1e-13);
        assert!((value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_handles_oscillatory_integrand() {
        let value = integrate(|x| (40.0 * x).cos(), 0.0, 1.0, 1e-13);
        assert!((value - 40.0_f64.sin() / 40.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_finds_quadratic_root() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((root - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_unbracketed_interval() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn power_law_fit_recovers_parameters() {
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.8 * x.powf(1.5)).collect();
        let (prefactor, exponent) = fit_power_law(&xs, &ys);
        assert!((prefactor - 0.8).abs() < 1e-12);
        assert!((exponent - 1.5).abs() < 1e-12);
    }

    #[test]
    fn pinned_prefactor_matches_exact_law_and_averages_noise() {
        let xs: Vec<f64> = (3..=13).step_by(2).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 10.5 * x.sqrt()).collect();
        assert!((fit_power_law_prefactor(&xs, &ys, 0.5) - 10.5).abs() < 1e-12);
        // Symmetric multiplicative noise averages out in log space.
        let noisy: Vec<f64> = ys
            .iter()
            .enumerate()
            .map(|(i, y)| if i % 2 == 0 { y * 1.05 } else { y / 1.05 })
            .collect();
        let fitted = fit_power_law_prefactor(&xs, &noisy, 0.5);
        assert!((fitted / 10.5 - 1.0).abs() < 0.01, "fitted = {fitted}");
    }

    #[test]
    fn slope_fit_recovers_line() {
        let xs = [0.5, 1.0, 1.5, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x| -3.25 * x).collect();
        assert!((fit_slope_through_origin(&xs, &ys) + 3.25).abs() < 1e-13);
    }
}
