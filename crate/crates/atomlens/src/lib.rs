//! Synthesis and analysis of wide, aberration-minimized lenses for neutral
//! atoms built from superpositions of odd Hermite-Gaussian laser modes.
//!
//! A single odd mode focuses an atom beam only across a tiny region around
//! its intensity zero. Superposing the modes `1, 3, ..., 2J+1` with
//! coefficients chosen so that the Taylor expansion of the focal field is
//! purely linear up to order `2J+3` widens that harmonic region by roughly
//! an order of magnitude. This crate solves for those coefficients exactly,
//! evaluates the resulting beam profiles, quantifies lens quality (focal
//! curvature, deviation marks, captured power), analyzes Gouy-phase
//! dephasing of crossed-beam lenses, and converts laser intensity into
//! atom-optical phase masks and focal lengths in SI units.
//!
//! Modules mirror that pipeline:
//!
//! * [`modes`] - Hermite-Gaussian mode functions and beam geometry.
//! * [`superposition`] - cancellation coefficients and beam profiles.
//! * [`lens_metrics`] - lens quality figures and the order-by-order table.
//! * [`dephasing`] - crossed-beam dephasing and Rayleigh-range bounds.
//! * [`atom_phase`] - dipole potentials, phase masks, focal lengths, rays.
//! * [`constants`] - the CODATA 2018 constants used throughout.
//!
//! Profile computations default to reduced units (unit beam waist, unit
//! total cross-sectional power); everything in [`atom_phase`] is SI.

pub mod atom_phase;
pub mod constants;
pub mod dephasing;
mod exec;
pub mod lens_metrics;
pub mod modes;
pub mod numeric;
pub mod superposition;

/// Errors reported by the toolkit.
///
/// Variants distinguish bad arguments, numerical breakdowns (singular
/// systems, failed brackets, unreachable tolerances) and physical-validity
/// violations, so callers can map them to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The cancellation system has no unique solution direction.
    #[error("cancellation system for j_max = {j_max} is singular: {detail}")]
    SingularSystem { j_max: usize, detail: String },

    /// A scan or bisection could not bracket its target; the trace holds
    /// the sampled (abscissa, value) pairs for diagnosis.
    #[error("bracketing failed for {what}")]
    BracketFailure { what: String, trace: Vec<(f64, f64)> },

    /// The profile stays within the stated tolerance of its parabola all
    /// the way to the outermost peak, so no deviation mark exists.
    #[error("order {order} profile never deviates by {tolerance} inside its outermost peak")]
    DeviationNotReached { order: u32, tolerance: f64 },

    /// Detuning must be nonzero for dipole potentials and phase masks.
    #[error("laser detuning must be nonzero")]
    ZeroDetuning,

    /// The relative crossed-beam deviation is undefined where both beams
    /// carry zero intensity.
    #[error("relative deviation is undefined at the origin")]
    UndefinedAtOrigin,

    /// Thin-grating phase imprinting requires the atom's kinetic energy to
    /// dominate the peak dipole potential.
    #[error(
        "thin-grating validity violated: kinetic energy is {ratio:.3e}x the peak \
         dipole potential, required at least {required:.0}x"
    )]
    RamanNathViolation { ratio: f64, required: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
