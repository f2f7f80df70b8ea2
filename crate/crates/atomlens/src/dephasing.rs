//! Gouy dephasing of crossed-beam lenses.
//!
//! A round (two-axis) atom lens is built from two identical flat beams
//! crossed at right angles: one propagates along z and focuses in x, the
//! other propagates along x and focuses in z. Their intensities add
//! incoherently, so the combined profile is `I(x, z) + I(z, x)`.
//!
//! Away from the shared focal plane each constituent mode has advanced
//! by a different multiple of the Gouy phase and each beam's envelope
//! has spread, so the superposition slowly falls out of its engineered
//! shape. [`relative_deviation`] and [`paraboloid_deviation`] probe the
//! resulting aberration pointwise against, respectively, each beam's own
//! focal slice and the ideal harmonic paraboloid.
//!
//! The design criterion, [`circle_budget_deviation`], asks how short the
//! Rayleigh range may be before the crossed lens stops acting as one
//! faithful spherical lens across the region its own focal structure
//! occupies. That region is wavelength-scaled: at a wavelength-scale
//! waist the order-`2J+1` modes span roughly `sqrt(2J+1)` wavelengths.
//! The criterion therefore samples a circle of radius
//! `sqrt(2J+1) * lambda` in the `(x, z)` plane and budgets the two
//! leading aberration mechanisms at every point:
//!
//! * **Curvature budget.** At longitudinal excursion `z` into one beam's
//!   near field, the transverse curvature of its intensity valley — the
//!   lens strength the crossing beam relies on — degrades as `(w0/w)^3`
//!   from envelope spreading, while mode dispersion restores part of the
//!   loss through the central slope moment `D` ([`slope_dispersion`],
//!   exactly `-3/2` for every flat design with at least two modes). The
//!   relative curvature error `(w0/w)^3 (1 + gouy^2 D^2) - 1` must stay
//!   inside the same 0.74% band that bounds the focal profile. Its
//!   leading coefficient `D^2 - 3/2 = 3/4` is order independent, which
//!   pins the small-order scaling `z_min ~ 9.9 sqrt(2J+1)` wavelengths.
//!
//! * **Dispersion budget.** The Gouy phases of the mode ladder fan out
//!   by `2J * atan(z/z_R)` between the lowest and highest mode. Past a
//!   total spread of [`DISPERSION_BUDGET`] radians the engineered
//!   cancellations between modes fail by more than the deviation band;
//!   the criterion charges this as the equivalent quadratic deviation
//!   `tol * (spread / DISPERSION_BUDGET)^2`. The budget grows with the
//!   mode count and becomes the binding constraint above order ~13,
//!   pinning the large-order scaling `z_min ~ 0.8 (2J+1)^(3/2)`
//!   wavelengths.
//!
//! [`find_zmin`] bisects the combined criterion to the smallest
//! acceptable Rayleigh range. A single-mode lens (order 1) has no mode
//! dispersion at all — `D` and the spread both vanish — and is limited
//! by pure envelope spreading alone; it lands off (above) the
//! square-root law, which holds from order 3 up.
//!
//! Lengths in this module are expressed in units of the laser wavelength
//! (`wavelength = 1` geometries), which makes the minimal Rayleigh ranges
//! directly comparable across orders.

use serde::Serialize;
use std::f64::consts::PI;

use crate::lens_metrics::{self, DEVIATION_TOLERANCE};
use crate::modes::BeamGeometry;
use crate::superposition::ModeSuperposition;
use crate::{exec, numeric, Error, Result};

/// Angular resolution of the circle criterion.
pub const DEFAULT_CIRCLE_SAMPLES: usize = 720;

/// Largest tolerable Gouy-phase spread across the mode ladder, in
/// radians. Calibrated so that a lens dispersed by exactly this much has
/// used up the 0.74% deviation band; together with the curvature budget
/// it reproduces both observed scaling regimes of the minimal Rayleigh
/// range and their crossover near order 13.
pub const DISPERSION_BUDGET: f64 = 1.2;

/// How the two crossed beams combine. They are assumed mutually
/// incoherent (distinct polarizations or a small frequency offset), so
/// intensities add; a coherent sum would interfere and is not modeled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum IntensityCombination {
    #[default]
    Incoherent,
}

/// A pair of identical beams crossed at right angles through a common
/// focal point.
#[derive(Debug, Clone)]
pub struct CrossedLensConfig<'a> {
    superposition: &'a ModeSuperposition,
    geometry: BeamGeometry,
    combination: IntensityCombination,
}

impl<'a> CrossedLensConfig<'a> {
    pub fn new(superposition: &'a ModeSuperposition, geometry: BeamGeometry) -> Self {
        Self {
            superposition,
            geometry,
            combination: IntensityCombination::Incoherent,
        }
    }

    pub fn superposition(&self) -> &ModeSuperposition {
        self.superposition
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn combination(&self) -> IntensityCombination {
        self.combination
    }
}

/// Combined intensity of the crossed pair at `(x, z)`.
pub fn crossed_intensity(config: &CrossedLensConfig, x: f64, z: f64) -> f64 {
    let s = config.superposition;
    s.integrated_intensity(x, z, &config.geometry) + s.integrated_intensity(z, x, &config.geometry)
}

/// The ideal reference: both beams evaluated with their focal-plane
/// profiles, as if neither had propagated.
pub fn focal_reference(config: &CrossedLensConfig, x: f64, z: f64) -> f64 {
    let s = config.superposition;
    s.integrated_intensity(x, 0.0, &config.geometry)
        + s.integrated_intensity(z, 0.0, &config.geometry)
}

/// Relative deviation of the crossed profile from its focal reference at
/// `(x, z)`. Undefined where the reference carries no power, notably at
/// the origin, where both profiles have their common dark node.
///
/// This isolates pure propagation dephasing: the reference tracks each
/// beam's own focal slice, so a point deviates only insofar as the
/// beams have fallen out of their focal shape.
pub fn relative_deviation(config: &CrossedLensConfig, x: f64, z: f64) -> Result<f64> {
    let reference = focal_reference(config, x, z);
    if reference == 0.0 {
        return Err(Error::UndefinedAtOrigin);
    }
    Ok((crossed_intensity(config, x, z) - reference) / reference)
}

/// Relative deviation of the crossed profile from the ideal harmonic
/// paraboloid `A (x^2 + z^2)` of the combined lens.
///
/// This is the aberration the deviation marks bound: on the circle of
/// radius `d` the two on-axis points sit at the tolerance rail by the
/// definition of `d`, and dephasing drives the excursion between them.
pub fn paraboloid_deviation(config: &CrossedLensConfig, x: f64, z: f64) -> Result<f64> {
    let r2 = x * x + z * z;
    if r2 == 0.0 {
        return Err(Error::UndefinedAtOrigin);
    }
    let reference = lens_metrics::focal_curvature(config.superposition, &config.geometry) * r2;
    Ok((crossed_intensity(config, x, z) - reference) / reference)
}

/// Largest `|relative_deviation|` over the circle of the given radius
/// around the focal point, sampled at `samples` uniformly spaced angles
/// (at least [`DEFAULT_CIRCLE_SAMPLES`]).
pub fn circle_max_deviation(
    config: &CrossedLensConfig,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "circle radius must be positive and finite, got {radius}"
        )));
    }
    let n = samples.max(DEFAULT_CIRCLE_SAMPLES);
    let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let deviations = exec::try_map_collect(&angles, |&theta| {
        relative_deviation(config, radius * theta.cos(), radius * theta.sin())
    })?;
    Ok(deviations.into_iter().fold(0.0f64, |m, d| m.max(d.abs())))
}

/// Smallest and largest paraboloid deviation over the circle of the
/// given radius, sampled at `samples` uniformly spaced angles.
pub fn circle_extremes(
    config: &CrossedLensConfig,
    radius: f64,
    samples: usize,
) -> Result<(f64, f64)> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "circle radius must be positive and finite, got {radius}"
        )));
    }
    let n = samples.max(DEFAULT_CIRCLE_SAMPLES);
    let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let deviations = exec::try_map_collect(&angles, |&theta| {
        paraboloid_deviation(config, radius * theta.cos(), radius * theta.sin())
    })?;
    Ok(deviations
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        }))
}

/// Slope-weighted mean of `m - 1` over the modes at the focal node: the
/// central slope moment `D = sum((m-1) c_m phi_m'(0)) / sum(c_m phi_m'(0))`.
///
/// For every flat design with at least two modes the flatness conditions
/// force `D = -3/2` exactly; a single-mode beam has `D = 0`. The moment
/// controls how mode dispersion perturbs the lens curvature at the
/// bottom of the intensity valley.
pub fn slope_dispersion(s: &ModeSuperposition) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, c) in s.coefficients().iter().enumerate() {
        let m = 2 * j + 1;
        let slope = crate::modes::hermite_fn_deriv(m as u32, 0.0);
        num += c * (m as f64 - 1.0) * slope;
        den += c * slope;
    }
    num / den
}

/// The dephasing criterion: worst budget violation over the circle of
/// the given `radius` around the shared focus, sampled at `samples`
/// uniformly spaced angles (at least [`DEFAULT_CIRCLE_SAMPLES`]).
///
/// At each circle point the longitudinal excursion into one beam's near
/// field is `z = radius * sin(theta)`, and the reported deviation is the
/// larger of the curvature error `|(w0/w)^3 (1 + gouy^2 D^2) - 1|` and
/// the dispersion charge `tolerance * (spread / DISPERSION_BUDGET)^2`
/// with `spread = (order - 1) * |gouy|`. Both terms fall off as
/// `(radius / z_R)^2`, so the criterion decreases monotonically toward
/// long Rayleigh ranges. Lengths are in wavelengths.
pub fn circle_budget_deviation(
    s: &ModeSuperposition,
    rayleigh_range: f64,
    radius: f64,
    tolerance: f64,
    samples: usize,
) -> Result<f64> {
    if !(rayleigh_range > 0.0 && rayleigh_range.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Rayleigh range must be positive and finite, got {rayleigh_range}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "circle radius must be positive and finite, got {radius}"
        )));
    }
    let geometry = BeamGeometry::new(1.0, rayleigh_range, rayleigh_range)?;
    let d2 = slope_dispersion(s).powi(2);
    let span = f64::from(s.order()) - 1.0;
    let n = samples.max(DEFAULT_CIRCLE_SAMPLES);
    let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let deviations = exec::map_collect(&angles, |&theta| {
        let excursion = radius * theta.sin();
        let w_ratio = geometry.waist_x() / geometry.radius_x(excursion);
        let gouy = geometry.gouy_x(excursion);
        let curvature = (w_ratio.powi(3) * (1.0 + gouy * gouy * d2) - 1.0).abs();
        let spread = span * gouy.abs();
        let dispersion = tolerance * (spread / DISPERSION_BUDGET).powi(2);
        curvature.max(dispersion)
    });
    Ok(deviations.into_iter().fold(0.0f64, f64::max))
}

/// Result of the minimal-Rayleigh-range search for one order, in units
/// of the laser wavelength.
#[derive(Debug, Clone, Serialize)]
pub struct DephasingScan {
    pub order: u32,
    /// Smallest Rayleigh range whose circle criterion stays within the
    /// tolerance, in wavelengths.
    pub z_min: f64,
    /// Focal waist at `z_min`, in wavelengths.
    pub waist: f64,
    /// Useful-region radius of the lens at `z_min` (the deviation mark
    /// of the focal profile), in wavelengths.
    pub radius: f64,
    /// Criterion value at `z_min`; sits at the tolerance by
    /// construction of the bisection.
    pub max_relative_deviation: f64,
}

impl DephasingScan {
    /// Half opening angle of the beam at `z_min`, in radians:
    /// `lambda / (pi w_0)` evaluated in wavelength units.
    pub fn opening_half_angle(&self) -> f64 {
        1.0 / (PI * self.z_min).sqrt()
    }
}

/// Smallest Rayleigh range (in wavelengths) at which the crossed lens of
/// the given order keeps its circle criterion within `tolerance`.
///
/// Bisects [`circle_budget_deviation`] on the circle of radius
/// `sqrt(order)` wavelengths (the transverse span of the focal
/// structure), asserting along the bracket that the criterion keeps
/// falling as the range grows.
pub fn find_zmin(order: u32, tolerance: f64, samples: usize) -> Result<DephasingScan> {
    let s = ModeSuperposition::for_order(order)?;
    find_zmin_with(&s, tolerance, samples)
}

/// As [`find_zmin`], for an already-solved superposition.
pub fn find_zmin_with(
    s: &ModeSuperposition,
    tolerance: f64,
    samples: usize,
) -> Result<DephasingScan> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "dephasing tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    let circle_radius = f64::from(s.order()).sqrt();
    let criterion = |z_r: f64| circle_budget_deviation(s, z_r, circle_radius, tolerance, samples);

    // Bracket the crossing: the criterion falls with z_R, so start at
    // the circle radius itself and double outward while out of
    // tolerance. Loose tolerances may already be satisfied there; then
    // halve inward first.
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut lo = circle_radius;
    let mut value_lo = criterion(lo)?;
    trace.push((lo, value_lo));
    while value_lo <= tolerance {
        lo *= 0.5;
        if lo < 1e-3 * circle_radius {
            return Err(Error::BracketFailure {
                what: format!(
                    "order {} stays within tolerance down to z_R = {lo} wavelengths; \
                     no dephasing lower limit brackets",
                    s.order()
                ),
                trace,
            });
        }
        value_lo = criterion(lo)?;
        trace.push((lo, value_lo));
    }
    let mut hi = lo;
    let mut value_hi = value_lo;
    loop {
        let next = hi * 2.0;
        let value_next = criterion(next)?;
        trace.push((next, value_next));
        // The criterion must keep falling as the range grows; a rise
        // means it is not behaving and bisection would lie.
        if value_next > value_hi * 1.05 {
            return Err(Error::BracketFailure {
                what: format!(
                    "circle criterion for order {} is not decreasing near z_R = {next}",
                    s.order()
                ),
                trace,
            });
        }
        hi = next;
        value_hi = value_next;
        if value_hi <= tolerance {
            break;
        }
        if hi > 1e12 {
            return Err(Error::BracketFailure {
                what: format!(
                    "order {} still out of tolerance at z_R = {hi} wavelengths",
                    s.order()
                ),
                trace,
            });
        }
    }

    let z_min = numeric::bisect(
        |z_r| criterion(z_r).map_or(f64::NAN, |v| v - tolerance),
        hi / 2.0,
        hi,
        1e-9,
    )?;
    let geometry = BeamGeometry::new(1.0, z_min, z_min)?;
    let mark_in_waists =
        lens_metrics::deviation_mark(s, &BeamGeometry::reduced(1.0), DEVIATION_TOLERANCE)?;
    let max_relative_deviation = criterion(z_min)?;
    Ok(DephasingScan {
        order: s.order(),
        z_min,
        waist: geometry.waist_x(),
        radius: mark_in_waists * geometry.waist_x(),
        max_relative_deviation,
    })
}

/// Minimal Rayleigh ranges for a set of orders.
pub fn zmin_scan(orders: &[u32], tolerance: f64, samples: usize) -> Result<Vec<DephasingScan>> {
    exec::try_map_collect(orders, |&order| find_zmin(order, tolerance, samples))
}

/// Least-squares power law `z_min ~ prefactor * order^exponent` through a
/// set of scans; returns `(prefactor, exponent)`.
pub fn fit_zmin_power_law(scans: &[DephasingScan]) -> (f64, f64) {
    let orders: Vec<f64> = scans.iter().map(|s| f64::from(s.order)).collect();
    let ranges: Vec<f64> = scans.iter().map(|s| s.z_min).collect();
    numeric::fit_power_law(&orders, &ranges)
}
