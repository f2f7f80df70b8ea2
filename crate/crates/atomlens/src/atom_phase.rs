//! Atom-optical response of the light lens, in SI units throughout.
//!
//! A two-level atom crossing a far-detuned light sheet sees the
//! conservative AC-Stark (dipole) potential `U = hbar Gamma^2 I /
//! (8 delta I_S)` — repulsive for blue detuning. When the transverse
//! displacement during the crossing is negligible (the thin-grating
//! regime, `K_0 >> U`), the only effect is an accumulated phase
//! proportional to the intensity integrated along the flight direction.
//! An intensity profile that is quadratic in `x` therefore imprints the
//! phase of an ideal thin lens, and the focal length follows from the
//! focal curvature of the driving superposition.
//!
//! Flight direction is y: atoms travel along the flat axis of the sheet
//! and are focused in x.

use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::{PLANCK, REDUCED_PLANCK, SPEED_OF_LIGHT};
use crate::lens_metrics::{self, DEVIATION_TOLERANCE};
use crate::modes::BeamGeometry;
use crate::superposition::ModeSuperposition;
use crate::{exec, numeric, Error, Result};

/// Minimal kinetic-energy-to-potential ratio for the thin-grating
/// treatment to hold.
pub const DEFAULT_RAMAN_NATH_RATIO: f64 = 100.0;

/// `I/I_S` above which the first-order dipole potential is flagged.
pub const DEFAULT_SATURATION_WARN_RATIO: f64 = 0.1;

/// A two-level atom: mass, effective linewidth, and transition frequency.
#[derive(Debug, Clone, Serialize)]
pub struct AtomSpecies {
    mass: f64,
    linewidth: f64,
    transition_frequency: f64,
}

impl AtomSpecies {
    /// Frequencies in rad/s, mass in kg; all must be positive and finite.
    pub fn new(mass: f64, linewidth: f64, transition_frequency: f64) -> Result<Self> {
        for (name, value) in [
            ("mass", mass),
            ("linewidth", linewidth),
            ("transition frequency", transition_frequency),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "atom {name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(Self {
            mass,
            linewidth,
            transition_frequency,
        })
    }

    /// Species given by its transition wavelength instead of frequency.
    pub fn from_transition_wavelength(mass: f64, linewidth: f64, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "transition wavelength must be positive and finite, got {wavelength}"
            )));
        }
        Self::new(mass, linewidth, 2.0 * PI * SPEED_OF_LIGHT / wavelength)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn transition_wavelength(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.transition_frequency
    }
}

/// Saturation intensity `pi h c Gamma / (3 lambda^3)` in W/m².
pub fn saturation_intensity(species: &AtomSpecies) -> f64 {
    let lambda = species.transition_wavelength();
    PI * PLANCK * SPEED_OF_LIGHT * species.linewidth / (3.0 * lambda * lambda * lambda)
}

/// Resonant Rabi frequency `Gamma sqrt(I / (2 I_S))` in rad/s.
pub fn rabi_frequency(intensity: f64, species: &AtomSpecies) -> Result<f64> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    Ok(species.linewidth * (intensity / (2.0 * saturation_intensity(species))).sqrt())
}

/// First-order dipole potential together with the `I/I_S` bookkeeping
/// that bounds its validity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DipolePotential {
    /// Potential energy in J; sign follows the detuning.
    pub energy: f64,
    /// `I / I_S`, the expansion parameter of the first-order form.
    pub intensity_ratio: f64,
}

impl DipolePotential {
    /// True when the intensity ratio exceeds
    /// [`DEFAULT_SATURATION_WARN_RATIO`]. Far-detuned drives tolerate
    /// much larger ratios (the excited-state population carries an extra
    /// `(Gamma / 2 delta)^2`), so this is a warning, not an error.
    pub fn saturated(&self) -> bool {
        self.saturated_above(DEFAULT_SATURATION_WARN_RATIO)
    }

    pub fn saturated_above(&self, warn_ratio: f64) -> bool {
        self.intensity_ratio > warn_ratio
    }
}

/// Dipole potential `hbar Gamma^2 I / (8 delta I_S)` for intensity in
/// W/m² and detuning `delta = omega_L - omega` in rad/s.
pub fn dipole_potential(
    intensity: f64,
    species: &AtomSpecies,
    detuning: f64,
) -> Result<DipolePotential> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::ZeroDetuning);
    }
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    let ratio = intensity / saturation_intensity(species);
    let energy = REDUCED_PLANCK * species.linewidth * species.linewidth / (8.0 * detuning) * ratio;
    Ok(DipolePotential {
        energy,
        intensity_ratio: ratio,
    })
}

/// The lens-forming laser: total power, detuning from the atomic
/// transition, focusing geometry, and mode superposition.
#[derive(Debug, Clone)]
pub struct LaserDrive {
    power: f64,
    detuning: f64,
    geometry: BeamGeometry,
    superposition: ModeSuperposition,
}

impl LaserDrive {
    /// Power in W (positive), detuning in rad/s (nonzero; blue `> 0`
    /// focuses, red defocuses through the dark center).
    pub fn new(
        power: f64,
        detuning: f64,
        geometry: BeamGeometry,
        superposition: ModeSuperposition,
    ) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "laser power must be positive and finite, got {power}"
            )));
        }
        if detuning == 0.0 || !detuning.is_finite() {
            return Err(Error::ZeroDetuning);
        }
        Ok(Self {
            power,
            detuning,
            geometry,
            superposition,
        })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn superposition(&self) -> &ModeSuperposition {
        &self.superposition
    }

    /// Local intensity `P |Psi(x, y, z)|^2` in W/m².
    pub fn local_intensity(&self, x: f64, y: f64, z: f64) -> f64 {
        self.power
            * self
                .superposition
                .field_at(x, y, z, &self.geometry)
                .norm_sqr()
    }

    /// Flight-direction-integrated intensity `P Ibar(x, z)` in W/m.
    pub fn integrated_intensity(&self, x: f64, z: f64) -> f64 {
        self.power * self.superposition.integrated_intensity(x, z, &self.geometry)
    }
}

/// The atom beam crossing the lens: kinetic energy and the validity
/// threshold for the thin-grating treatment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AtomBeam {
    kinetic_energy: f64,
    raman_nath_min_ratio: f64,
}

impl AtomBeam {
    pub fn new(kinetic_energy: f64) -> Result<Self> {
        if !(kinetic_energy > 0.0 && kinetic_energy.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kinetic energy must be positive and finite, got {kinetic_energy}"
            )));
        }
        Ok(Self {
            kinetic_energy,
            raman_nath_min_ratio: DEFAULT_RAMAN_NATH_RATIO,
        })
    }

    pub fn from_velocity(mass: f64, speed: f64) -> Result<Self> {
        if !(mass > 0.0 && speed > 0.0 && mass.is_finite() && speed.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mass and speed must be positive and finite, got {mass} and {speed}"
            )));
        }
        Self::new(0.5 * mass * speed * speed)
    }

    /// Replace the thin-grating validity threshold (must be >= 1).
    pub fn with_min_ratio(mut self, ratio: f64) -> Result<Self> {
        if !(ratio >= 1.0 && ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "validity threshold must be >= 1, got {ratio}"
            )));
        }
        self.raman_nath_min_ratio = ratio;
        Ok(self)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.kinetic_energy
    }

    pub fn raman_nath_min_ratio(&self) -> f64 {
        self.raman_nath_min_ratio
    }

    /// De Broglie wavenumber `sqrt(2 M K_0) / hbar` in 1/m.
    pub fn de_broglie_wavenumber(&self, species: &AtomSpecies) -> f64 {
        (2.0 * species.mass() * self.kinetic_energy).sqrt() / REDUCED_PLANCK
    }
}

/// Phase-per-intensity constant `C` in `dphi = -C Ibar_reduced`:
/// `sqrt(2M) Gamma^2 P / (16 sqrt(K_0) I_S delta)`, in meters (the
/// reduced profile carries 1/m).
pub fn phase_prefactor(drive: &LaserDrive, beam: &AtomBeam, species: &AtomSpecies) -> f64 {
    let gamma = species.linewidth();
    (2.0 * species.mass()).sqrt() * gamma * gamma * drive.power()
        / (16.0 * beam.kinetic_energy().sqrt() * saturation_intensity(species) * drive.detuning())
}

/// Imprinted phase profile along one transverse cut.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseMask {
    pub positions: Vec<f64>,
    pub z: f64,
    /// Phase in radians at each position.
    pub values: Vec<f64>,
    /// The constant `C` relating phase to the reduced profile.
    pub prefactor: f64,
    /// `K_0 / max U` over the sampled cut.
    pub raman_nath_ratio: f64,
}

/// Largest dipole-potential magnitude over a transverse cut; the peak
/// always sits at y = 0, where the flight-axis Gaussian is tallest.
fn peak_potential_magnitude(
    drive: &LaserDrive,
    species: &AtomSpecies,
    positions: &[f64],
    z: f64,
) -> Result<f64> {
    let energies = exec::try_map_collect(positions, |&x| {
        dipole_potential(drive.local_intensity(x, 0.0, z), species, drive.detuning())
            .map(|p| p.energy.abs())
    })?;
    Ok(energies.into_iter().fold(0.0f64, f64::max))
}

fn require_thin_grating(
    drive: &LaserDrive,
    beam: &AtomBeam,
    species: &AtomSpecies,
    positions: &[f64],
    z: f64,
) -> Result<f64> {
    let peak = peak_potential_magnitude(drive, species, positions, z)?;
    let ratio = beam.kinetic_energy() / peak;
    if ratio < beam.raman_nath_min_ratio() {
        return Err(Error::RamanNathViolation {
            ratio,
            required: beam.raman_nath_min_ratio(),
        });
    }
    Ok(ratio)
}

/// Thin-grating phase mask `dphi(x) = -C Ibar(x, z)` over a position
/// grid, guarded by the kinetic-to-potential validity ratio.
pub fn phase_mask(
    drive: &LaserDrive,
    beam: &AtomBeam,
    species: &AtomSpecies,
    positions: &[f64],
    z: f64,
) -> Result<PhaseMask> {
    if positions.is_empty() {
        return Err(Error::InvalidArgument("empty phase-mask grid".into()));
    }
    let ratio = require_thin_grating(drive, beam, species, positions, z)?;
    let prefactor = phase_prefactor(drive, beam, species);
    let s = drive.superposition();
    let values = exec::map_collect(positions, |&x| {
        -prefactor * s.integrated_intensity(x, z, drive.geometry())
    });
    Ok(PhaseMask {
        positions: positions.to_vec(),
        z,
        values,
        prefactor,
        raman_nath_ratio: ratio,
    })
}

/// The imprinted phase without linearizing in the potential: the
/// flight-path integral of the local wavenumber change,
/// `kappa_0 * integral dy (sqrt(1 - U/K_0) - 1)`.
///
/// Used to cross-validate the linearized mask; agreement is expected at
/// the `U/(4 K_0)` level.
pub fn phase_shift_integral(
    drive: &LaserDrive,
    beam: &AtomBeam,
    species: &AtomSpecies,
    x: f64,
    z: f64,
) -> Result<f64> {
    let k0 = beam.kinetic_energy();
    let u_axis = dipole_potential(drive.local_intensity(x, 0.0, z), species, drive.detuning())?;
    if u_axis.energy >= k0 {
        return Err(Error::RamanNathViolation {
            ratio: k0 / u_axis.energy,
            required: 1.0,
        });
    }
    let kappa = beam.de_broglie_wavenumber(species);
    let u_scale = REDUCED_PLANCK * species.linewidth() * species.linewidth()
        / (8.0 * drive.detuning() * saturation_intensity(species));
    // sqrt(1 - u) - 1 written as -u / (sqrt(1 - u) + 1) to avoid
    // cancellation at the tiny u this regime lives in.
    let integrand = |y: f64| {
        let u = u_scale * drive.local_intensity(x, y, z) / k0;
        -kappa * u / ((1.0 - u).sqrt() + 1.0)
    };
    let span = 6.0 * drive.geometry().radius_y(z);
    let linear_estimate = phase_prefactor(drive, beam, species)
        * drive.superposition().integrated_intensity(x, z, drive.geometry());
    let tol = (linear_estimate.abs() * 1e-10).max(1e-20);
    Ok(numeric::integrate(integrand, -span, span, tol))
}

/// Thin-lens focal length read off the phase mask in two ways.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocalLength {
    /// From a least-squares parabola through the sampled mask.
    pub fitted: f64,
    /// `kappa_0 / (2 C A)` from the focal curvature directly.
    pub closed_form: f64,
    /// True for a converging lens (blue detuning); negative focal
    /// lengths come with `focusing == false`.
    pub focusing: bool,
}

/// Fits `dphi = -kappa_0 x^2 / (2 f)` over half the useful region and
/// returns it alongside the closed-form focal length.
pub fn focal_length(
    drive: &LaserDrive,
    beam: &AtomBeam,
    species: &AtomSpecies,
) -> Result<FocalLength> {
    let s = drive.superposition();
    let mark = lens_metrics::deviation_mark(s, drive.geometry(), DEVIATION_TOLERANCE)?;
    let positions = crate::superposition::symmetric_grid(0.5 * mark, 201);
    let mask = phase_mask(drive, beam, species, &positions, 0.0)?;
    let squares: Vec<f64> = positions.iter().map(|&x| x * x).collect();
    let slope = numeric::fit_slope_through_origin(&squares, &mask.values);
    if slope == 0.0 {
        return Err(Error::InvalidArgument(
            "phase mask carries no curvature".into(),
        ));
    }
    let kappa = beam.de_broglie_wavenumber(species);
    let fitted = -kappa / (2.0 * slope);
    let curvature = lens_metrics::focal_curvature(s, drive.geometry());
    let closed_form = kappa / (2.0 * phase_prefactor(drive, beam, species) * curvature);
    Ok(FocalLength {
        fitted,
        closed_form,
        focusing: closed_form > 0.0,
    })
}

/// Transverse kick `theta(x) = (1/kappa_0) d(dphi)/dx` picked up at the
/// mask plane, in radians.
pub fn kick_angle(drive: &LaserDrive, beam: &AtomBeam, species: &AtomSpecies, x: f64) -> f64 {
    let s = drive.superposition();
    let w = drive.geometry().waist_x();
    let xi = std::f64::consts::SQRT_2 * x / w;
    let profile_slope = 4.0 * s.focal_amplitude(xi) * s.focal_amplitude_deriv(xi) / (w * w);
    -phase_prefactor(drive, beam, species) * profile_slope / beam.de_broglie_wavenumber(species)
}

/// One ballistic ray through the thin lens.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Ray {
    pub launch_offset: f64,
    pub kick_angle: f64,
}

impl Ray {
    pub fn offset_at(&self, z: f64) -> f64 {
        self.launch_offset + self.kick_angle * z
    }

    /// Propagation distance at which the ray crosses the axis; infinite
    /// for the undeflected center ray.
    pub fn axis_crossing(&self) -> f64 {
        -self.launch_offset / self.kick_angle
    }
}

/// Ray bundle verdict on the thin-lens claim.
#[derive(Debug, Clone, Serialize)]
pub struct RayTrace {
    /// Closed-form focal length the bundle is checked against.
    pub focal_length: f64,
    /// Useful-region half-width of the mask.
    pub deviation_mark: f64,
    pub rays: Vec<Ray>,
    /// RMS transverse spread at `z = focal_length` for rays launched
    /// within half the useful region.
    pub rms_at_focus: f64,
}

impl RayTrace {
    /// RMS transverse offset at plane `z` over rays launched within
    /// `max_launch`.
    pub fn rms_at(&self, z: f64, max_launch: f64) -> f64 {
        let bound = max_launch * (1.0 + 1e-12);
        let mut sum = 0.0;
        let mut n = 0usize;
        for ray in &self.rays {
            if ray.launch_offset.abs() <= bound {
                let offset = ray.offset_at(z);
                sum += offset * offset;
                n += 1;
            }
        }
        assert!(n > 0, "no rays within the requested launch window");
        (sum / n as f64).sqrt()
    }

    /// Least-squares best-focus plane for rays launched within
    /// `max_launch`: the minimizer of the RMS spread.
    pub fn best_focus(&self, max_launch: f64) -> f64 {
        let bound = max_launch * (1.0 + 1e-12);
        let mut cross = 0.0;
        let mut square = 0.0;
        for ray in &self.rays {
            if ray.launch_offset.abs() <= bound {
                cross += ray.launch_offset * ray.kick_angle;
                square += ray.kick_angle * ray.kick_angle;
            }
        }
        assert!(square > 0.0, "no deflected rays within the launch window");
        -cross / square
    }
}

/// Launches `n_rays` parallel rays uniformly over the useful region
/// `|x| <= d`, kicks each at the mask, and reports the spread at the
/// closed-form focal plane.
pub fn ray_check(
    drive: &LaserDrive,
    beam: &AtomBeam,
    species: &AtomSpecies,
    n_rays: usize,
) -> Result<RayTrace> {
    if n_rays < 3 {
        return Err(Error::InvalidArgument(format!(
            "ray check needs at least 3 rays, got {n_rays}"
        )));
    }
    let s = drive.superposition();
    let mark = lens_metrics::deviation_mark(s, drive.geometry(), DEVIATION_TOLERANCE)?;
    let launches = crate::superposition::symmetric_grid(mark, n_rays);
    require_thin_grating(drive, beam, species, &launches, 0.0)?;
    let rays: Vec<Ray> = exec::map_collect(&launches, |&x| Ray {
        launch_offset: x,
        kick_angle: kick_angle(drive, beam, species, x),
    });
    let f = focal_length(drive, beam, species)?.closed_form;
    let trace = RayTrace {
        focal_length: f,
        deviation_mark: mark,
        rays,
        rms_at_focus: 0.0,
    };
    let rms = trace.rms_at(f, 0.5 * mark);
    Ok(RayTrace {
        rms_at_focus: rms,
        ..trace
    })
}
