//! Odd Hermite-Gaussian mode superpositions whose focal field is flat:
//! purely linear in the transverse coordinate through order `2J + 1`.
//!
//! The design system demands that the Taylor coefficients of
//! `sum_j c_{2j+1} phi_{2j+1}(xi)` vanish at `xi^3, xi^5, ..., xi^(2J+1)`.
//! Because each odd mode contributes one new leading power, the system has
//! a one-dimensional nullspace; it is solved in exact rational arithmetic
//! and normalized to unit power with the lowest coefficient positive.
//!
//! Off focus, mode `2j+1` accumulates Gouy phase `(2j + 3/2) arctan(z/z_R)`
//! along x. A global phase is factored out of every coherent sum, leaving
//! the relative phases `2j arctan(z/z_R)` that drive lens dephasing.

mod exact;

use num::traits::Signed;
use num::ToPrimitive;
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use crate::modes::{self, BeamGeometry};
use crate::{exec, numeric, Error, Result};

/// Default sample count for generated profile grids.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Outermost-peak position of a flat superposition of maximal mode `2J+1`
/// is close to `0.57 sqrt(2J+1)` beam waists.
pub const TURNING_POINT_SCALE: f64 = 0.57;

/// Margin applied to the outermost-peak estimate when sizing default
/// profile grids.
const GRID_MARGIN: f64 = 1.2;

/// Odd-power Taylor table of the orthonormal Hermite functions:
/// `entry(k, j)` is the coefficient of `xi^(2k+1)` in `phi_{2j+1}(xi)`.
///
/// Entries are exact rationals divided by one floating-point column norm
/// `sqrt(2^(2j+1) (2j+1)! sqrt(pi))`, accurate to about 1e-15 relative.
#[derive(Debug, Clone)]
pub struct TaylorSystem {
    j_max: usize,
    entries: Vec<f64>,
}

impl TaylorSystem {
    /// Builds the `(j_max + 1) x (j_max + 1)` table.
    pub fn new(j_max: usize) -> Self {
        let rational = exact::series_matrix(j_max);
        let scales = exact::squared_column_scales(j_max);
        let norms: Vec<f64> = scales
            .iter()
            .map(|s| (s.to_f64().expect("column scale fits in f64") * PI.sqrt()).sqrt())
            .collect();
        let mut entries = Vec::with_capacity((j_max + 1) * (j_max + 1));
        for row in &rational {
            for (j, value) in row.iter().enumerate() {
                entries.push(value.to_f64().expect("series entry fits in f64") / norms[j]);
            }
        }
        Self { j_max, entries }
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Coefficient of `xi^(2k+1)` in `phi_{2j+1}`.
    pub fn entry(&self, k: usize, j: usize) -> f64 {
        assert!(k <= self.j_max && j <= self.j_max);
        self.entries[k * (self.j_max + 1) + j]
    }

    /// Row `k`: the `xi^(2k+1)` coefficients of all columns.
    pub fn row(&self, k: usize) -> &[f64] {
        assert!(k <= self.j_max);
        &self.entries[k * (self.j_max + 1)..(k + 1) * (self.j_max + 1)]
    }

    /// Taylor coefficients of `sum_j coefficients[j] phi_{2j+1}` at the
    /// powers `xi^1, xi^3, ..., xi^(2 j_max + 1)`.
    pub fn expand(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.j_max + 1);
        (0..=self.j_max)
            .map(|k| {
                self.row(k)
                    .iter()
                    .zip(coefficients)
                    .map(|(t, c)| t * c)
                    .sum()
            })
            .collect()
    }
}

/// Convenience constructor for [`TaylorSystem`].
pub fn taylor_matrix(j_max: usize) -> TaylorSystem {
    TaylorSystem::new(j_max)
}

/// A normalized superposition `sum_{j=0..=J} c_{2j+1} psi_{2j+1,0}` of odd
/// modes: `sum c^2 = 1` and `c_1 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSuperposition {
    coefficients: Vec<f64>,
}

impl ModeSuperposition {
    /// Solves the flatness system for maximal mode `2 j_max + 1`.
    pub fn solve(j_max: usize) -> Result<Self> {
        let scaled = exact::solve_scaled(j_max)?;
        let squares = exact::squared_column_scales(j_max);

        // Exact squared amplitudes a_j^2 = 2^(2j+1) (2j+1)! b_j^2 and their
        // exact total keep the final normalization at one rounding each.
        let q: Vec<num::rational::BigRational> = scaled
            .iter()
            .zip(&squares)
            .map(|(b, s)| b * b * num::rational::BigRational::from(s.clone()))
            .collect();
        let total: num::rational::BigRational = q.iter().cloned().sum();

        let coefficients: Vec<f64> = q
            .iter()
            .zip(&scaled)
            .map(|(qj, bj)| {
                let magnitude = (qj / &total)
                    .to_f64()
                    .expect("normalized coefficient fits in f64")
                    .sqrt();
                if bj.is_negative() {
                    -magnitude
                } else {
                    magnitude
                }
            })
            .collect();
        Ok(Self { coefficients })
    }

    /// Solves for the superposition whose maximal mode is `order = 2J + 1`.
    pub fn for_order(order: u32) -> Result<Self> {
        if order == 0 || order.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "superposition order must be odd and positive, got {order}"
            )));
        }
        Self::solve((order as usize - 1) / 2)
    }

    /// Wraps explicit coefficients `c_1, c_3, ...`, normalizing the power
    /// to 1 and the sign so `c_1 > 0`.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "superposition needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "superposition coefficients must be finite".into(),
            ));
        }
        if coefficients[0] == 0.0 {
            return Err(Error::InvalidArgument(
                "the lowest coefficient c_1 must be nonzero".into(),
            ));
        }
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "superposition coefficients must have a finite nonzero norm".into(),
            ));
        }
        let sign = coefficients[0].signum();
        Ok(Self {
            coefficients: coefficients.iter().map(|c| sign * c / norm).collect(),
        })
    }

    /// Highest mode index is `2 j_max + 1`.
    pub fn j_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The maximal mode number `2J + 1`, which names the superposition.
    pub fn order(&self) -> u32 {
        2 * self.j_max() as u32 + 1
    }

    /// Coefficients `c_1, c_3, ..., c_{2J+1}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Focal transverse amplitude `f(xi) = sum_j c_{2j+1} phi_{2j+1}(xi)`
    /// in the dimensionless coordinate `xi = sqrt(2) x / w_x`.
    pub fn focal_amplitude(&self, xi: f64) -> f64 {
        let ladder = modes::hermite_ladder(self.order(), xi);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * ladder[2 * j + 1])
            .sum()
    }

    /// Derivative `f'(xi)` of the focal transverse amplitude.
    pub fn focal_amplitude_deriv(&self, xi: f64) -> f64 {
        let ladder = modes::hermite_ladder(self.order(), xi);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let m = 2 * j + 1;
                c * ((2.0 * m as f64).sqrt() * ladder[m - 1] - xi * ladder[m])
            })
            .sum()
    }

    /// Complex field of the superposition at `(x, y, z)`.
    pub fn field_at(&self, x: f64, y: f64, z: f64, geometry: &BeamGeometry) -> Complex64 {
        let k = geometry.wave_number();
        let w = geometry.radius_x(z);
        let xi = SQRT_2 * x / w;
        let gouy = geometry.gouy_x(z);
        let ladder = modes::hermite_ladder(self.order(), xi);

        // Common x-axis factor exp(i k x^2 / (2 R_x)) exp(-i phi_x / 2);
        // mode m then contributes exp(-i m phi_x).
        let mut sum = Complex64::new(0.0, 0.0);
        let step = Complex64::cis(-2.0 * gouy);
        let mut rotor = Complex64::cis(-gouy);
        for (j, c) in self.coefficients.iter().enumerate() {
            sum += c * ladder[2 * j + 1] * rotor;
            rotor *= step;
        }
        let common_phase =
            Complex64::cis(0.5 * k * x * x * geometry.curvature_x(z) - 0.5 * gouy);
        let x_amplitude = (SQRT_2 / w).sqrt();
        let y_factor = y_ground_factor(y, z, geometry, k);
        x_amplitude * sum * common_phase * y_factor
    }

    /// Field along the transverse axis (`y = 0`) at height `z`, one value
    /// per grid point. Purely real at `z = 0`.
    pub fn field_profile(
        &self,
        xs: &[f64],
        z: f64,
        geometry: &BeamGeometry,
    ) -> Vec<Complex64> {
        exec::map_collect(xs, |&x| self.field_at(x, 0.0, z, geometry))
    }

    /// Integrated intensity `I(x, z) = integral |Psi|^2 dy` in reduced
    /// units (total cross-sectional power 1, field-strength prefactor 1).
    ///
    /// Only relative Gouy phases `2 j arctan(z / z_Rx)` survive the
    /// modulus; curvature and y-axis factors integrate away exactly.
    pub fn integrated_intensity(&self, x: f64, z: f64, geometry: &BeamGeometry) -> f64 {
        let w = geometry.radius_x(z);
        let xi = SQRT_2 * x / w;
        let gouy = geometry.gouy_x(z);
        let ladder = modes::hermite_ladder(self.order(), xi);

        let step = Complex64::cis(-2.0 * gouy);
        let mut rotor = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, c) in self.coefficients.iter().enumerate() {
            sum += c * ladder[2 * j + 1] * rotor;
            rotor *= step;
        }
        SQRT_2 / w * sum.norm_sqr()
    }

    /// Integrated intensity over a transverse grid at height `z`.
    pub fn intensity_profile(&self, xs: &[f64], z: f64, geometry: &BeamGeometry) -> Vec<f64> {
        exec::map_collect(xs, |&x| self.integrated_intensity(x, z, geometry))
    }

    /// Position `x > 0` of the outermost focal-intensity maximum, in the
    /// length units of `geometry`.
    ///
    /// The last zero of `f'` is bracketed by an outward scan; beyond it the
    /// profile decays monotonically.
    pub fn outermost_peak(&self, geometry: &BeamGeometry) -> f64 {
        let span = (2.0 * f64::from(self.order()) + 1.0).sqrt() + 2.0;
        let steps = 4000;
        let h = span / steps as f64;
        let mut bracket = None;
        let mut prev = self.focal_amplitude_deriv(0.0);
        for i in 1..=steps {
            let xi = h * i as f64;
            let cur = self.focal_amplitude_deriv(xi);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                bracket = Some((xi - h, xi));
            }
            prev = cur;
        }
        let (lo, hi) = bracket.expect("flat superpositions peak before their span");
        let xi_peak = numeric::bisect(|xi| self.focal_amplitude_deriv(xi), lo, hi, 1e-12)
            .expect("sign change was established by the scan");
        xi_peak * geometry.waist_x() / SQRT_2
    }

    /// Half-width used for default profile grids: the outermost-peak
    /// estimate `0.57 sqrt(2J+1) w_0x` plus a margin.
    pub fn default_half_width(&self, geometry: &BeamGeometry) -> f64 {
        GRID_MARGIN * TURNING_POINT_SCALE * f64::from(self.order()).sqrt() * geometry.waist_x()
    }
}

/// Ground-mode y-axis factor shared by every member of the superposition.
fn y_ground_factor(y: f64, z: f64, geometry: &BeamGeometry, k: f64) -> Complex64 {
    let w = geometry.radius_y(z);
    let xi = SQRT_2 * y / w;
    let amplitude = (SQRT_2 / w).sqrt() * modes::hermite_fn(0, xi);
    let phase = 0.5 * k * y * y * geometry.curvature_y(z) - 0.5 * geometry.gouy_y(z);
    amplitude * Complex64::cis(phase)
}

/// Symmetric uniform grid of `points` samples over `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && half_width > 0.0);
    let step = 2.0 * half_width / (points - 1) as f64;
    (0..points).map(|i| -half_width + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    fn phi_direct(m: u32, xi: f64) -> f64 {
        // Explicit low odd orders, independent of the recurrence.
        let h = match m {
            1 => 2.0 * xi,
            3 => 8.0 * xi.powi(3) - 12.0 * xi,
            5 => 32.0 * xi.powi(5) - 160.0 * xi.powi(3) + 120.0 * xi,
            _ => unreachable!(),
        };
        let norm = match m {
            1 => 2.0,
            3 => 48.0,
            5 => 3840.0,
            _ => unreachable!(),
        };
        h * (-0.5 * xi * xi).exp() / (norm * PI.sqrt()).sqrt()
    }

    #[test]
    fn taylor_entries_match_frozen_values() {
        let t = taylor_matrix(2);
        let check = |k: usize, j: usize, expected: f64| {
            let entry = t.entry(k, j);
            assert!(
                (entry - expected).abs() <= 1e-13 * expected.abs(),
                "entry({k}, {j}) = {entry}, expected {expected}"
            );
        };
        check(0, 0, 2.0 / (2.0 * PI.sqrt()).sqrt());
        check(1, 0, -1.0 / (2.0 * PI.sqrt()).sqrt());
        check(0, 1, -12.0 / (48.0 * PI.sqrt()).sqrt());
        check(1, 1, 14.0 / (48.0 * PI.sqrt()).sqrt());
        check(0, 2, 120.0 / (3840.0 * PI.sqrt()).sqrt());
        check(1, 2, -220.0 / (3840.0 * PI.sqrt()).sqrt());
        check(2, 2, 127.0 / (3840.0 * PI.sqrt()).sqrt());
    }

    #[test]
    fn taylor_columns_have_expected_support() {
        let t = taylor_matrix(4);
        for j in 0..=4 {
            for k in 0..=4 {
                // Hermite part caps the pure-polynomial support at k = j,
                // but the Gaussian series populates every higher row too.
                assert!(t.entry(k, j) != 0.0, "entry({k}, {j}) vanished");
            }
        }
    }

    #[test]
    fn lowest_order_ratio_is_sqrt6_over_7() {
        let s = ModeSuperposition::solve(1).unwrap();
        let ratio = s.coefficients()[1] / s.coefficients()[0];
        assert!((ratio - 6.0f64.sqrt() / 7.0).abs() < 1e-14);
    }

    #[test]
    fn second_order_ratios_are_exact() {
        let s = ModeSuperposition::solve(2).unwrap();
        let c = s.coefficients();
        let r3 = 18.0 * 6.0f64.sqrt() / 71.0;
        let r5 = 2.0 * 30.0f64.sqrt() / 71.0;
        assert!((c[1] / c[0] - r3).abs() / r3 < 1e-14);
        assert!((c[2] / c[0] - r5).abs() / r5 < 1e-14);
    }

    #[test]
    fn coefficients_are_normalized_and_positive_through_order_55() {
        for j_max in 0..=27 {
            let s = ModeSuperposition::solve(j_max).unwrap();
            let norm: f64 = s.coefficients().iter().map(|c| c * c).sum();
            assert!((norm - 1.0).abs() < 1e-13, "j_max = {j_max}: norm = {norm}");
            assert!(
                s.coefficients().iter().all(|&c| c > 0.0),
                "j_max = {j_max} produced a nonpositive coefficient"
            );
        }
    }

    #[test]
    fn taylor_residuals_vanish_after_cancellation() {
        for j_max in [1usize, 2, 5, 12, 27] {
            let s = ModeSuperposition::solve(j_max).unwrap();
            let t = taylor_matrix(j_max);
            let expansion = t.expand(s.coefficients());
            let linear = expansion[0].abs();
            for (k, value) in expansion.iter().enumerate().skip(1) {
                assert!(
                    value.abs() <= 1e-10 * linear,
                    "j_max = {j_max}, row {k}: residual {value} vs linear {linear}"
                );
            }
        }
    }

    #[test]
    fn rejects_invalid_orders_and_coefficients() {
        assert!(ModeSuperposition::for_order(0).is_err());
        assert!(ModeSuperposition::for_order(4).is_err());
        assert!(ModeSuperposition::from_coefficients(vec![]).is_err());
        assert!(ModeSuperposition::from_coefficients(vec![0.0, 1.0]).is_err());
        assert!(ModeSuperposition::from_coefficients(vec![f64::NAN]).is_err());
    }

    #[test]
    fn from_coefficients_normalizes_and_fixes_sign() {
        let s = ModeSuperposition::from_coefficients(vec![-2.0, 1.0]).unwrap();
        assert!(s.coefficients()[0] > 0.0);
        let norm: f64 = s.coefficients().iter().map(|c| c * c).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intensity_matches_term_by_term_oracle_at_focus() {
        let s = ModeSuperposition::for_order(5).unwrap();
        let geometry = BeamGeometry::reduced(1.0);
        let x: f64 = 0.3;
        let xi = SQRT_2 * x;
        let c = s.coefficients();
        let direct =
            c[0] * phi_direct(1, xi) + c[1] * phi_direct(3, xi) + c[2] * phi_direct(5, xi);
        let expected = SQRT_2 * direct * direct;
        let value = s.integrated_intensity(x, 0.0, &geometry);
        assert!((value - expected).abs() / expected < 1e-13);
    }

    #[test]
    fn intensity_normalization_is_conserved_off_focus() {
        let s = ModeSuperposition::for_order(7).unwrap();
        let geometry = BeamGeometry::reduced(2.0);
        for &z in &[0.0, 1.4, 6.0] {
            let half = geometry.radius_x(z) * ((2.0 * 7.0 + 1.0f64).sqrt() + 6.0) / SQRT_2;
            let total = integrate(
                |x| s.integrated_intensity(x, z, &geometry),
                -half,
                half,
                1e-13,
            );
            assert!((total - 1.0).abs() < 1e-10, "z = {z}: total = {total}");
        }
    }

    #[test]
    fn intensity_is_even_in_x_and_z() {
        let s = ModeSuperposition::for_order(9).unwrap();
        let geometry = BeamGeometry::reduced(3.0);
        for &(x, z) in &[(0.4, 0.9), (1.3, 2.2), (0.05, 4.0)] {
            let base = s.integrated_intensity(x, z, &geometry);
            assert_eq!(s.integrated_intensity(-x, z, &geometry), base);
            let flipped = s.integrated_intensity(x, -z, &geometry);
            assert!((flipped - base).abs() <= 1e-15 * base.abs());
        }
    }

    #[test]
    fn focal_profile_is_real_and_odd() {
        let s = ModeSuperposition::for_order(5).unwrap();
        let geometry = BeamGeometry::reduced(1.0);
        let xs = symmetric_grid(1.5, 7);
        let profile = s.field_profile(&xs, 0.0, &geometry);
        for (value, &x) in profile.iter().zip(&xs) {
            assert_eq!(value.im, 0.0, "x = {x}");
        }
        assert!((profile[0].re + profile[6].re).abs() < 1e-15);
    }

    #[test]
    fn ground_superposition_profile_increases_to_its_peak() {
        let s = ModeSuperposition::for_order(1).unwrap();
        let geometry = BeamGeometry::reduced(1.0);
        let peak = geometry.waist_x() / SQRT_2;
        let xs = symmetric_grid(peak, 401);
        let profile = s.field_profile(&xs, 0.0, &geometry);
        let positive: Vec<f64> = profile
            .iter()
            .zip(&xs)
            .filter(|(_, &x)| x >= 0.0)
            .map(|(v, _)| v.re)
            .collect();
        assert!(positive.windows(2).all(|w| w[1] > w[0]));
        assert!((s.outermost_peak(&geometry) - peak).abs() < 1e-9);
    }

    #[test]
    fn high_order_profile_is_linear_across_two_waists() {
        let s = ModeSuperposition::for_order(23).unwrap();
        let geometry = BeamGeometry::reduced(1.0);
        let xs: Vec<f64> = (1..=200).map(|i| 0.01 * f64::from(i)).collect();
        let values: Vec<f64> = xs
            .iter()
            .map(|&x| s.field_at(x, 0.0, 0.0, &geometry).re)
            .collect();
        let slope = numeric::fit_slope_through_origin(&xs, &values);
        for (&x, &value) in xs.iter().zip(&values) {
            assert!(
                (value - slope * x).abs() <= 0.01 * slope.abs() * x,
                "x = {x}: value {value} vs line {}",
                slope * x
            );
        }
    }

    #[test]
    fn default_grid_spans_the_outer_peak() {
        let s = ModeSuperposition::for_order(17).unwrap();
        let geometry = BeamGeometry::reduced(1.0);
        assert!(s.default_half_width(&geometry) > s.outermost_peak(&geometry));
        let grid = symmetric_grid(s.default_half_width(&geometry), DEFAULT_GRID_POINTS);
        assert_eq!(grid.len(), DEFAULT_GRID_POINTS);
        assert_eq!(grid[1000], 0.0);
    }
}
