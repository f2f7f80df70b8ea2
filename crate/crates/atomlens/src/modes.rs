//! Paraxial Hermite-Gaussian beam modes and the geometry they live in.
//!
//! Transverse shapes are expressed through the orthonormal Hermite
//! functions `phi_m`, evaluated with a normalized three-term recurrence
//! that stays bounded (|phi_m| < 0.8) for every order and argument, in
//! contrast to raw Hermite polynomials which overflow near m = 35.
//!
//! A mode is separable: each transverse axis contributes an amplitude
//! profile, a quadratic wavefront-curvature phase and a Gouy phase. The
//! wavefront is stored as curvature 1/R so the focal plane needs no
//! special casing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::{Error, Result};

/// Orthonormal Hermite function `phi_m(xi)`, the harmonic-oscillator
/// eigenfunction with unit L2 norm.
///
/// Evaluated by upward recurrence from `phi_0 = pi^(-1/4) exp(-xi^2/2)`:
/// `phi_{m+1} = xi sqrt(2/(m+1)) phi_m - sqrt(m/(m+1)) phi_{m-1}`.
pub fn hermite_fn(m: u32, xi: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, phi_zero(xi));
    for j in 0..m as usize {
        let next = recurrence_step(j, xi, cur, prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// All Hermite functions `phi_0(xi) ..= phi_{m_max}(xi)` in one sweep.
///
/// Superposition sums need the whole ladder; one recurrence pass costs the
/// same as the single highest order.
pub fn hermite_ladder(m_max: u32, xi: f64) -> Vec<f64> {
    let mut ladder = Vec::with_capacity(m_max as usize + 1);
    let (mut prev, mut cur) = (0.0, phi_zero(xi));
    ladder.push(cur);
    for j in 0..m_max as usize {
        let next = recurrence_step(j, xi, cur, prev);
        prev = cur;
        cur = next;
        ladder.push(cur);
    }
    ladder
}

/// Derivative `phi_m'(xi) = sqrt(2m) phi_{m-1}(xi) - xi phi_m(xi)`.
pub fn hermite_fn_deriv(m: u32, xi: f64) -> f64 {
    if m == 0 {
        -xi * phi_zero(xi)
    } else {
        (2.0 * f64::from(m)).sqrt() * hermite_fn(m - 1, xi) - xi * hermite_fn(m, xi)
    }
}

#[inline]
fn phi_zero(xi: f64) -> f64 {
    PI.powf(-0.25) * (-0.5 * xi * xi).exp()
}

#[inline]
fn recurrence_step(j: usize, xi: f64, cur: f64, prev: f64) -> f64 {
    let jp1 = (j + 1) as f64;
    xi * (2.0 / jp1).sqrt() * cur - (j as f64 / jp1).sqrt() * prev
}

/// Gouy phase `arctan(z / z_R)` of a beam with Rayleigh range `rayleigh`.
pub fn gouy_phase(z: f64, rayleigh: f64) -> f64 {
    debug_assert!(rayleigh > 0.0);
    (z / rayleigh).atan()
}

/// Beam radius `w(z) = w_0 sqrt(1 + (z / z_R)^2)`.
pub fn beam_radius(z: f64, waist: f64, rayleigh: f64) -> f64 {
    debug_assert!(waist > 0.0 && rayleigh > 0.0);
    let ratio = z / rayleigh;
    waist * (1.0 + ratio * ratio).sqrt()
}

/// Wavefront curvature `1/R(z) = z / (z^2 + z_R^2)`; zero at the focus.
pub fn wavefront_curvature(z: f64, rayleigh: f64) -> f64 {
    debug_assert!(rayleigh > 0.0);
    z / (z * z + rayleigh * rayleigh)
}

/// Geometry of an astigmatism-free or astigmatic Gaussian beam: vacuum
/// wavelength plus one Rayleigh range per transverse axis.
///
/// The waists are derived, `w_0 = sqrt(lambda z_R / pi)`, so the stored
/// fields can never drift out of consistency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    wavelength: f64,
    rayleigh_x: f64,
    rayleigh_y: f64,
}

impl BeamGeometry {
    /// Geometry from wavelength and per-axis Rayleigh ranges, all positive
    /// and finite.
    pub fn new(wavelength: f64, rayleigh_x: f64, rayleigh_y: f64) -> Result<Self> {
        for (name, value) in [
            ("wavelength", wavelength),
            ("rayleigh_x", rayleigh_x),
            ("rayleigh_y", rayleigh_y),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "beam geometry {name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(Self {
            wavelength,
            rayleigh_x,
            rayleigh_y,
        })
    }

    /// Geometry from wavelength and per-axis waists.
    pub fn from_waists(wavelength: f64, waist_x: f64, waist_y: f64) -> Result<Self> {
        if !(waist_x.is_finite() && waist_x > 0.0 && waist_y.is_finite() && waist_y > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beam waists must be positive and finite, got ({waist_x}, {waist_y})"
            )));
        }
        Self::new(
            wavelength,
            PI * waist_x * waist_x / wavelength,
            PI * waist_y * waist_y / wavelength,
        )
    }

    /// Reduced-unit geometry: both waists exactly 1, both Rayleigh ranges
    /// `rayleigh` (in waist units). Focal-plane profiles in these units
    /// depend on nothing else.
    pub fn reduced(rayleigh: f64) -> Self {
        Self::new(PI / rayleigh, rayleigh, rayleigh)
            .expect("reduced geometry requires a positive rayleigh range")
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn rayleigh_x(&self) -> f64 {
        self.rayleigh_x
    }

    pub fn rayleigh_y(&self) -> f64 {
        self.rayleigh_y
    }

    pub fn waist_x(&self) -> f64 {
        (self.wavelength * self.rayleigh_x / PI).sqrt()
    }

    pub fn waist_y(&self) -> f64 {
        (self.wavelength * self.rayleigh_y / PI).sqrt()
    }

    /// Beam radius along x at propagation distance `z` from the focus.
    pub fn radius_x(&self, z: f64) -> f64 {
        beam_radius(z, self.waist_x(), self.rayleigh_x)
    }

    pub fn radius_y(&self, z: f64) -> f64 {
        beam_radius(z, self.waist_y(), self.rayleigh_y)
    }

    pub fn gouy_x(&self, z: f64) -> f64 {
        gouy_phase(z, self.rayleigh_x)
    }

    pub fn gouy_y(&self, z: f64) -> f64 {
        gouy_phase(z, self.rayleigh_y)
    }

    pub fn curvature_x(&self, z: f64) -> f64 {
        wavefront_curvature(z, self.rayleigh_x)
    }

    pub fn curvature_y(&self, z: f64) -> f64 {
        wavefront_curvature(z, self.rayleigh_y)
    }

    /// Same geometry with both transverse axes rescaled by `scale` in
    /// waist (hence `scale^2` in Rayleigh range).
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "geometry scale must be positive and finite, got {scale}"
            )));
        }
        Self::new(
            self.wavelength,
            self.rayleigh_x * scale * scale,
            self.rayleigh_y * scale * scale,
        )
    }
}

/// One transverse-axis factor of a mode and, on demand, its derivative
/// along that axis.
fn axis_factor(m: u32, coord: f64, z: f64, waist: f64, rayleigh: f64, k: f64) -> Complex64 {
    let w = beam_radius(z, waist, rayleigh);
    let xi = SQRT_2 * coord / w;
    let amplitude = (SQRT_2 / w).sqrt() * hermite_fn(m, xi);
    let phase = 0.5 * k * coord * coord * wavefront_curvature(z, rayleigh)
        - (f64::from(m) + 0.5) * gouy_phase(z, rayleigh);
    amplitude * Complex64::cis(phase)
}

fn axis_factor_deriv(m: u32, coord: f64, z: f64, waist: f64, rayleigh: f64, k: f64) -> Complex64 {
    let w = beam_radius(z, waist, rayleigh);
    let xi = SQRT_2 * coord / w;
    let scale = (SQRT_2 / w).sqrt();
    let phase = 0.5 * k * coord * coord * wavefront_curvature(z, rayleigh)
        - (f64::from(m) + 0.5) * gouy_phase(z, rayleigh);
    let d_amplitude = scale * hermite_fn_deriv(m, xi) * (SQRT_2 / w);
    let d_phase = Complex64::new(0.0, k * coord * wavefront_curvature(z, rayleigh))
        * scale
        * hermite_fn(m, xi);
    (d_amplitude + d_phase) * Complex64::cis(phase)
}

/// Complex Hermite-Gaussian mode `psi_{m,n}` at point `(x, y, z)`, with
/// `z` measured from the shared focus.
///
/// Each cross-section carries unit power: `integral |psi|^2 dx dy = 1`
/// independent of `z`.
pub fn hg_mode(m: u32, n: u32, x: f64, y: f64, z: f64, geometry: &BeamGeometry) -> Complex64 {
    let k = geometry.wave_number();
    axis_factor(m, x, z, geometry.waist_x(), geometry.rayleigh_x, k)
        * axis_factor(n, y, z, geometry.waist_y(), geometry.rayleigh_y, k)
}

/// Analytic transverse derivative `d psi_{m,n} / dx`.
pub fn hg_mode_dx(m: u32, n: u32, x: f64, y: f64, z: f64, geometry: &BeamGeometry) -> Complex64 {
    let k = geometry.wave_number();
    axis_factor_deriv(m, x, z, geometry.waist_x(), geometry.rayleigh_x, k)
        * axis_factor(n, y, z, geometry.waist_y(), geometry.rayleigh_y, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    /// phi_5 from the explicit degree-5 Hermite polynomial; independent of
    /// the recurrence under test.
    fn phi5_direct(xi: f64) -> f64 {
        let h5 = 32.0 * xi.powi(5) - 160.0 * xi.powi(3) + 120.0 * xi;
        h5 * (-0.5 * xi * xi).exp() / (3840.0 * PI.sqrt()).sqrt()
    }

    #[test]
    fn phi0_at_origin_is_quarter_root_pi() {
        assert!((hermite_fn(0, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_direct_fifth_order() {
        for &xi in &[0.0, 0.3, 0.7, -0.7, 1.9, -3.4, 6.0] {
            let direct = phi5_direct(xi);
            assert!(
                (hermite_fn(5, xi) - direct).abs() <= 1e-14 * direct.abs().max(1.0),
                "xi = {xi}"
            );
        }
    }

    #[test]
    fn ladder_agrees_with_single_evaluations() {
        let ladder = hermite_ladder(41, 1.37);
        for (m, &value) in ladder.iter().enumerate() {
            assert_eq!(value, hermite_fn(m as u32, 1.37));
        }
    }

    #[test]
    fn high_orders_stay_bounded_and_finite() {
        for m in 0..=60 {
            for i in 0..400 {
                let xi = -30.0 + f64::from(i) * 0.15;
                let value = hermite_fn(m, xi);
                assert!(value.is_finite());
                assert!(value.abs() < 0.8, "phi_{m}({xi}) = {value}");
            }
        }
    }

    #[test]
    fn parity_follows_order() {
        for m in 0..=13 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for &xi in &[0.2, 1.1, 2.7] {
                let left = hermite_fn(m, -xi);
                let right = sign * hermite_fn(m, xi);
                assert!((left - right).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for m in [0, 1, 4, 11, 30] {
            for &xi in &[0.0, 0.45, -1.8, 3.3] {
                let numeric = (hermite_fn(m, xi + h) - hermite_fn(m, xi - h)) / (2.0 * h);
                let analytic = hermite_fn_deriv(m, xi);
                assert!(
                    (numeric - analytic).abs() < 1e-8 * analytic.abs().max(1.0),
                    "m = {m}, xi = {xi}"
                );
            }
        }
    }

    #[test]
    fn orthonormality_spot_checks() {
        for &(m, n) in &[(0u32, 0u32), (3, 3), (12, 12), (1, 3), (7, 9), (12, 40)] {
            let overlap = integrate(
                |xi| hermite_fn(m, xi) * hermite_fn(n, xi),
                -21.0,
                21.0,
                1e-13,
            );
            let expected = if m == n { 1.0 } else { 0.0 };
            assert!((overlap - expected).abs() < 1e-11, "({m}, {n}) -> {overlap}");
        }
    }

    #[test]
    fn gouy_phase_limits() {
        assert_eq!(gouy_phase(0.0, 2.0), 0.0);
        assert!((gouy_phase(2.0, 2.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let near_limit = gouy_phase(1e6, 1.0);
        assert!((near_limit - (0.5 * PI - 1e-6)).abs() < 1e-12);
    }

    #[test]
    fn beam_radius_and_curvature_profile() {
        let (w0, zr) = (1.5, 4.0);
        assert_eq!(beam_radius(0.0, w0, zr), w0);
        assert!((beam_radius(zr, w0, zr) - w0 * SQRT_2).abs() < 1e-15);
        assert_eq!(wavefront_curvature(0.0, zr), 0.0);
        // 1/R peaks at z = z_R where R = 2 z_R.
        assert!((wavefront_curvature(zr, zr) - 0.5 / zr).abs() < 1e-15);
        assert!(wavefront_curvature(0.9 * zr, zr) < wavefront_curvature(zr, zr));
        assert!(wavefront_curvature(1.1 * zr, zr) < wavefront_curvature(zr, zr));
    }

    #[test]
    fn geometry_waist_consistency() {
        let geometry = BeamGeometry::from_waists(589e-9, 1e-6, 1e-5).unwrap();
        assert!((geometry.waist_x() - 1e-6).abs() < 1e-21);
        assert!((geometry.waist_y() - 1e-5).abs() < 1e-20);
        let wavelength_check = PI * geometry.waist_x().powi(2) / geometry.rayleigh_x();
        assert!((wavelength_check - 589e-9).abs() / 589e-9 < 1e-14);
    }

    #[test]
    fn geometry_rejects_nonpositive_input() {
        assert!(BeamGeometry::new(0.0, 1.0, 1.0).is_err());
        assert!(BeamGeometry::new(1.0, -1.0, 1.0).is_err());
        assert!(BeamGeometry::from_waists(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn reduced_geometry_has_unit_waists() {
        let geometry = BeamGeometry::reduced(7.0);
        assert!((geometry.waist_x() - 1.0).abs() < 1e-15);
        assert!((geometry.waist_y() - 1.0).abs() < 1e-15);
        assert_eq!(geometry.rayleigh_x(), 7.0);
    }

    #[test]
    fn ground_mode_value_at_origin() {
        let geometry = BeamGeometry::from_waists(589e-9, 2e-6, 3e-6).unwrap();
        let expected = (SQRT_2 / geometry.waist_x()).sqrt()
            * (SQRT_2 / geometry.waist_y()).sqrt()
            / PI.sqrt();
        let value = hg_mode(0, 0, 0.0, 0.0, 0.0, &geometry);
        assert!((value.re - expected).abs() / expected < 1e-14);
        assert_eq!(value.im, 0.0);
    }

    #[test]
    fn mode_cross_section_stays_normalized_off_focus() {
        // Nested adaptive quadrature of |psi_{7,0}|^2 over a cross-section
        // away from the focus; accepts the mild tolerance of the nesting.
        let geometry = BeamGeometry::reduced(2.0);
        let z = 1.3 * geometry.rayleigh_x();
        let half_x = geometry.radius_x(z) * ((2.0 * 7.0 + 1.0f64).sqrt() + 6.0) / SQRT_2;
        let half_y = 6.0 * geometry.radius_y(z);
        let norm = integrate(
            |x| {
                integrate(
                    |y| hg_mode(7, 0, x, y, z, &geometry).norm_sqr(),
                    -half_y,
                    half_y,
                    1e-13,
                )
            },
            -half_x,
            half_x,
            1e-11,
        );
        assert!((norm - 1.0).abs() < 1e-10, "norm = {norm}");
    }

    #[test]
    fn mode_derivative_matches_central_difference() {
        let geometry = BeamGeometry::new(0.6, 3.0, 5.0).unwrap();
        let h = 1e-7;
        for &(m, n, x, y, z) in &[
            (1u32, 0u32, 0.3, 0.1, 0.7),
            (5, 2, -0.8, 0.4, 2.5),
            (9, 0, 1.4, -0.2, -1.1),
        ] {
            let plus = hg_mode(m, n, x + h, y, z, &geometry);
            let minus = hg_mode(m, n, x - h, y, z, &geometry);
            let numeric = (plus - minus) / Complex64::new(2.0 * h, 0.0);
            let analytic = hg_mode_dx(m, n, x, y, z, &geometry);
            let scale = analytic.norm().max(1.0);
            assert!(
                (numeric - analytic).norm() / scale < 1e-6,
                "({m},{n}) at ({x},{y},{z}): {numeric} vs {analytic}"
            );
        }
    }
}
