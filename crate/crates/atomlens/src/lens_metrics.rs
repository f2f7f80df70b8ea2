//! Quality figures of a flat-superposition lens at its focal plane.
//!
//! Near the axis the integrated intensity is an almost perfect parabola
//! `I(x, 0) ~ A x^2`; an atom crossing it sees a harmonic kick, i.e. an
//! ideal thin lens. The *deviation mark* d is where the relative distance
//! to that parabola first reaches 0.74%, the *power fraction* is the share
//! of total beam power inside `[-d, d]`, and *power compensation* and
//! *Rayleigh rematching* rescale higher orders so families of lenses share
//! one focal curvature at equal power.
//!
//! Every figure except the curvature is scale covariant, so they are
//! computed in the dimensionless coordinate `xi = sqrt(2) x / w` and only
//! converted to lengths at the boundary.

use serde::Serialize;
use std::f64::consts::SQRT_2;

use crate::modes::BeamGeometry;
use crate::superposition::ModeSuperposition;
use crate::{exec, numeric, Error, Result};

/// Relative deviation from the focal parabola that delimits the useful
/// lens region.
pub const DEVIATION_TOLERANCE: f64 = 0.0074;

/// Outward scan step of the deviation-mark search, in waists.
const SCAN_STEP_WAISTS: f64 = 1.0 / 400.0;

/// Quadrature tolerance for captured-power integrals.
const POWER_ABS_TOL: f64 = 1e-12;

/// Lens figures for one superposition order, in the equal-power,
/// matched-curvature normalization used by the order-by-order table.
///
/// * `curvature`: focal parabola coefficient A at unit waist (scales as
///   the inverse cube of the waist).
/// * `deviation_mark`: useful half-width after Rayleigh rematching, in
///   units of the order-1 waist.
/// * `power_fraction`: beam power inside the useful region (scale free).
/// * `power_ratio`: total power needed to match the order-1 focal
///   curvature at equal waist.
/// * `rayleigh_scale`: factor applied to the Rayleigh ranges (the squared
///   waist factor) by the rematching.
#[derive(Debug, Clone, Serialize)]
pub struct LensMetrics {
    pub order: u32,
    pub curvature: f64,
    pub deviation_mark: f64,
    pub power_fraction: f64,
    pub power_ratio: f64,
    pub rayleigh_scale: f64,
}

/// Focal-parabola coefficient A in `I(x, 0) ~ A x^2`, in the length units
/// of `geometry`; equals `2 sqrt(2) f'(0)^2 / w^3`.
pub fn focal_curvature(s: &ModeSuperposition, geometry: &BeamGeometry) -> f64 {
    let w = geometry.waist_x();
    let slope = s.focal_amplitude_deriv(0.0);
    2.0 * SQRT_2 * slope * slope / (w * w * w)
}

/// Smallest `x > 0` where `|I(x, 0) - A x^2| / (A x^2)` reaches
/// `tolerance`, in the length units of `geometry`.
///
/// The profile is scanned outward in steps of `w/400` and the crossing is
/// bisected to 1e-10 relative. If the profile stays inside the tolerance
/// all the way to its outermost peak there is no mark to report.
pub fn deviation_mark(
    s: &ModeSuperposition,
    geometry: &BeamGeometry,
    tolerance: f64,
) -> Result<f64> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "deviation tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    let slope = s.focal_amplitude_deriv(0.0);
    if slope == 0.0 {
        return Err(Error::InvalidArgument(
            "focal slope vanishes; no parabola to deviate from".into(),
        ));
    }
    // |f(xi) / (f'(0) xi)|^2 - 1, the relative deviation in xi coordinates.
    let deviation = |xi: f64| {
        let ratio = s.focal_amplitude(xi) / (slope * xi);
        (ratio * ratio - 1.0).abs()
    };

    let xi_peak = SQRT_2 * s.outermost_peak(geometry) / geometry.waist_x();
    let step = SQRT_2 * SCAN_STEP_WAISTS;
    let mut xi = step;
    while xi < xi_peak {
        if deviation(xi) >= tolerance {
            let lo = (xi - step).max(0.25 * step);
            let root = numeric::bisect(|t| deviation(t) - tolerance, lo, xi, 1e-10)?;
            return Ok(root * geometry.waist_x() / SQRT_2);
        }
        xi += step;
    }
    Err(Error::DeviationNotReached {
        order: s.order(),
        tolerance,
    })
}

/// Fraction of the total beam power inside `[-half_width, half_width]`
/// at the focal plane; dimensionless, approaches 1 for wide windows.
pub fn power_fraction(s: &ModeSuperposition, geometry: &BeamGeometry, half_width: f64) -> f64 {
    assert!(half_width >= 0.0, "half-width must be nonnegative");
    let xi_d = SQRT_2 * half_width / geometry.waist_x();
    // Beyond the classical turning point plus ten the Gaussian falloff of
    // every mode puts the remaining tail below the quadrature tolerance.
    let span = (2.0 * f64::from(s.order()) + 1.0).sqrt() + 10.0;
    let amplitude = |xi: f64| {
        let f = s.focal_amplitude(xi);
        f * f
    };
    2.0 * numeric::integrate(amplitude, 0.0, xi_d.min(span), POWER_ABS_TOL)
}

/// Power ratio `P_{2J+1} / P_1` that restores the order-1 focal curvature
/// at equal waist; equals `A_1 / A_{2J+1}` and is scale free.
pub fn power_compensation(s: &ModeSuperposition) -> f64 {
    // f'(0) of the single-mode lens with c_1 = 1 is 2 / sqrt(2 sqrt(pi)).
    let single = 2.0 / (2.0 * std::f64::consts::PI.sqrt()).sqrt();
    let slope = s.focal_amplitude_deriv(0.0);
    (single / slope) * (single / slope)
}

/// Waist factor `sigma = (A_{2J+1} / A_1)^(1/3)` that equalizes focal
/// curvature with the order-1 lens at equal power; the Rayleigh ranges
/// shrink by `sigma^2`.
pub fn rayleigh_match(s: &ModeSuperposition) -> f64 {
    power_compensation(s).powf(-1.0 / 3.0)
}

/// Lens figures for every odd order `1, 3, ..., max_order` in the
/// equal-power, matched-curvature normalization.
pub fn table1(max_order: u32) -> Result<Vec<LensMetrics>> {
    if max_order == 0 || max_order.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "table orders must be odd and positive, got {max_order}"
        )));
    }
    let orders: Vec<u32> = (0..=(max_order - 1) / 2).map(|j| 2 * j + 1).collect();
    exec::try_map_collect(&orders, |&order| metrics_for_order(order))
}

/// Lens figures for a single odd order; see [`table1`].
pub fn metrics_for_order(order: u32) -> Result<LensMetrics> {
    let s = ModeSuperposition::for_order(order)?;
    let unit = BeamGeometry::reduced(1.0);
    let mark = deviation_mark(&s, &unit, DEVIATION_TOLERANCE)?;
    let fraction = power_fraction(&s, &unit, mark);
    let ratio = power_compensation(&s);
    let sigma = rayleigh_match(&s);
    Ok(LensMetrics {
        order,
        curvature: focal_curvature(&s, &unit),
        deviation_mark: sigma * mark,
        power_fraction: fraction,
        power_ratio: ratio,
        rayleigh_scale: sigma * sigma,
    })
}

/// Reference lens figures for the first seventeen odd orders, as commonly
/// tabulated: useful-width ratios `d/d_1`, captured power in percent, and
/// captured-power ratios against order 1.
pub mod reference {
    /// Orders `2J + 1` of the reference rows.
    pub const ORDERS: [u32; 17] = [
        1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 33,
    ];

    /// Useful-width ratios `d_{2J+1} / d_1` at matched curvature.
    pub const D_RATIO: [f64; 17] = [
        1.00, 3.24, 4.75, 5.74, 6.45, 7.00, 7.42, 7.78, 8.06, 8.32, 8.53, 8.70, 8.87, 9.01,
        9.15, 9.27, 9.36,
    ];

    /// Captured power inside the useful region, percent of total power.
    pub const EFFICIENCY_PCT: [f64; 17] = [
        0.048, 1.6, 5.1, 9.1, 13.0, 16.0, 20.0, 23.0, 25.0, 28.0, 30.0, 32.0, 33.0, 35.0,
        37.0, 38.0, 39.0,
    ];

    /// Decimal places of each printed `EFFICIENCY_PCT` entry; one unit in
    /// that last digit is the tabulation precision.
    pub const EFFICIENCY_PCT_DECIMALS: [i32; 17] =
        [3, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];

    /// Captured-power ratios against the order-1 lens.
    pub const EFFICIENCY_RATIO: [f64; 17] = [
        1.0, 34.0, 107.0, 190.0, 269.0, 344.0, 411.0, 472.0, 526.0, 576.0, 620.0, 662.0,
        699.0, 735.0, 766.0, 795.0, 825.0,
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> BeamGeometry {
        BeamGeometry::reduced(1.0)
    }

    #[test]
    fn single_mode_curvature_matches_closed_form() {
        let s = ModeSuperposition::for_order(1).unwrap();
        let expected = 4.0 * SQRT_2 / PI.sqrt();
        let value = focal_curvature(&s, &unit());
        assert!((value - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn curvature_agrees_with_finite_difference_limit() {
        let s = ModeSuperposition::for_order(7).unwrap();
        let geometry = unit();
        let a = focal_curvature(&s, &geometry);
        let h = 1e-4;
        let fd = s.integrated_intensity(h, 0.0, &geometry) / (h * h);
        assert!((fd - a).abs() / a < 1e-8, "fd = {fd}, analytic = {a}");
    }

    #[test]
    fn curvature_scales_as_inverse_cube_of_waist() {
        let s = ModeSuperposition::for_order(5).unwrap();
        let base = focal_curvature(&s, &unit());
        let doubled = focal_curvature(&s, &unit().scaled(2.0).unwrap());
        assert!((doubled - base / 8.0).abs() / base < 1e-12);
    }

    #[test]
    fn single_mode_deviation_mark_matches_closed_form() {
        // For the single mode the deviation is 1 - exp(-xi^2) exactly.
        let s = ModeSuperposition::for_order(1).unwrap();
        let expected = (-(1.0 - DEVIATION_TOLERANCE).ln()).sqrt() / SQRT_2;
        let mark = deviation_mark(&s, &unit(), DEVIATION_TOLERANCE).unwrap();
        assert!((mark - expected).abs() < 1e-9, "mark = {mark}");
    }

    #[test]
    fn deviation_mark_is_scale_invariant_in_waists() {
        let s = ModeSuperposition::for_order(9).unwrap();
        let base = deviation_mark(&s, &unit(), DEVIATION_TOLERANCE).unwrap();
        for &scale in &[0.37, 3.0, 250.0] {
            let geometry = unit().scaled(scale).unwrap();
            let mark = deviation_mark(&s, &geometry, DEVIATION_TOLERANCE).unwrap();
            let rel = (mark / geometry.waist_x() - base).abs() / base;
            assert!(rel < 1e-12, "scale {scale}: rel = {rel}");
        }
    }

    #[test]
    fn power_fraction_saturates_to_unity() {
        let s = ModeSuperposition::for_order(11).unwrap();
        let total = power_fraction(&s, &unit(), 50.0);
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_mode_power_fraction_matches_series_oracle() {
        // integral of phi_1^2 over [-a, a] = erf(a) - 2 a exp(-a^2)/sqrt(pi),
        // with erf evaluated by its Maclaurin series (a < 0.1 converges fast).
        let s = ModeSuperposition::for_order(1).unwrap();
        let mark = deviation_mark(&s, &unit(), DEVIATION_TOLERANCE).unwrap();
        let a = SQRT_2 * mark;
        let erf = {
            let mut term = a;
            let mut sum = a;
            for n in 1..24 {
                term *= -a * a / n as f64;
                sum += term / f64::from(2 * n as u32 + 1);
            }
            2.0 / PI.sqrt() * sum
        };
        let expected = erf - 2.0 * a * (-a * a).exp() / PI.sqrt();
        let value = power_fraction(&s, &unit(), mark);
        assert!(
            (value - expected).abs() < 1e-12,
            "value = {value}, oracle = {expected}"
        );
    }

    #[test]
    fn power_compensation_of_order_three_is_exact() {
        // f'(0) ratio is 4 / sqrt(55), so the power ratio is 55 / 16.
        let s = ModeSuperposition::for_order(3).unwrap();
        let value = power_compensation(&s);
        assert!((value - 55.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_match_restores_the_single_mode_curvature() {
        let one = ModeSuperposition::for_order(1).unwrap();
        let target = focal_curvature(&one, &unit());
        for order in [3u32, 9, 21] {
            let s = ModeSuperposition::for_order(order).unwrap();
            let sigma = rayleigh_match(&s);
            let matched = unit().scaled(sigma).unwrap();
            let value = focal_curvature(&s, &matched);
            assert!(
                (value - target).abs() / target < 1e-12,
                "order {order}: {value} vs {target}"
            );
        }
    }

    #[test]
    fn rescaled_deviation_marks_reproduce_ratio_rows() {
        // Recomputing the mark in the rescaled geometry must land exactly
        // on sigma times the unit-waist mark: the ratios are scale
        // covariant through the shared parabola.
        let s = ModeSuperposition::for_order(5).unwrap();
        let sigma = rayleigh_match(&s);
        let direct = deviation_mark(&s, &unit().scaled(sigma).unwrap(), DEVIATION_TOLERANCE)
            .unwrap();
        let scaled = sigma * deviation_mark(&s, &unit(), DEVIATION_TOLERANCE).unwrap();
        assert!((direct - scaled).abs() / scaled < 1e-12);
    }

    #[test]
    fn first_table_rows_match_reference() {
        let rows = table1(5).unwrap();
        assert_eq!(rows.len(), 3);
        let d1 = rows[0].deviation_mark;
        for (row, (&d_ref, &e_ref)) in rows.iter().zip(
            reference::D_RATIO
                .iter()
                .zip(reference::EFFICIENCY_RATIO.iter()),
        ) {
            let d_ratio = row.deviation_mark / d1;
            assert!(
                (d_ratio - d_ref).abs() <= 0.02,
                "order {}: d ratio {d_ratio} vs {d_ref}",
                row.order
            );
            let e_ratio = row.power_fraction / rows[0].power_fraction;
            assert!(
                (e_ratio - e_ref).abs() <= 0.01 * e_ref,
                "order {}: efficiency ratio {e_ratio} vs {e_ref}",
                row.order
            );
        }
    }

    #[test]
    fn table_rejects_even_orders() {
        assert!(table1(0).is_err());
        assert!(table1(8).is_err());
    }

    #[test]
    fn deviation_tolerance_validation() {
        let s = ModeSuperposition::for_order(3).unwrap();
        assert!(deviation_mark(&s, &unit(), 0.0).is_err());
        assert!(deviation_mark(&s, &unit(), 1.5).is_err());
    }
}
