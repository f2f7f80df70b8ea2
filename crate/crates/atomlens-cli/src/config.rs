//! Run configuration: one TOML tree, with CLI flags layered on top.
//!
//! Reduced-unit commands (`coeffs`, `profile`, `metrics`, `table1`,
//! `zmin`) run without any configuration file; the SI commands (`phase`,
//! `raycheck`) need the species, laser, geometry and atom-beam sections.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use atomlens::atom_phase::{AtomBeam, AtomSpecies, LaserDrive};
use atomlens::modes::BeamGeometry;
use atomlens::superposition::ModeSuperposition;

use crate::artifact::Format;
use crate::{CliError, Result};

/// Top-level configuration tree.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub species: Option<SpeciesConfig>,
    pub laser: Option<LaserConfig>,
    pub geometry: Option<GeometryConfig>,
    pub beam: Option<BeamConfig>,
    /// Odd superposition orders the SI commands iterate over.
    #[serde(default)]
    pub orders: Vec<u32>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Two-level atom parameters, all SI.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    /// Atomic mass in kg.
    pub mass: f64,
    /// Natural linewidth in rad/s.
    pub linewidth: f64,
    /// Transition wavelength in m.
    pub transition_wavelength: f64,
}

/// Laser drive parameters, all SI. Exactly one detuning style.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserConfig {
    /// Total beam power in W.
    pub power: f64,
    /// Laser wavelength in m.
    pub wavelength: f64,
    /// Detuning in units of the natural linewidth (positive = blue).
    pub detuning_linewidths: Option<f64>,
    /// Detuning in rad/s (positive = blue).
    pub detuning: Option<f64>,
}

/// Focal geometry, in meters. Exactly one style: both waists, or both
/// Rayleigh ranges.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub waist_x: Option<f64>,
    pub waist_y: Option<f64>,
    pub rayleigh_x: Option<f64>,
    pub rayleigh_y: Option<f64>,
}

/// Atomic beam along the flight axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// Longitudinal speed in m/s.
    pub velocity: f64,
}

/// Output defaults; CLI flags override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid_points: Option<usize>,
    /// Profile half-width in the unit of the emitting command's x axis.
    pub half_width: Option<f64>,
}

/// Positivity check that also rejects the `nan`/`inf` floats TOML accepts.
fn positive(value: f64) -> bool {
    value.is_finite() && value > 0.0
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for &order in &self.orders {
            if order % 2 == 0 || order == 0 {
                return Err(CliError::Config(format!(
                    "orders must be odd and at least 1, got {order}"
                )));
            }
        }
        if let Some(laser) = &self.laser {
            match (laser.detuning_linewidths, laser.detuning) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config(
                        "set either laser.detuning_linewidths or laser.detuning, not both"
                            .into(),
                    ))
                }
                (None, None) => {
                    return Err(CliError::Config(
                        "laser section needs detuning_linewidths or detuning".into(),
                    ))
                }
                _ => {}
            }
            if !positive(laser.power) || !positive(laser.wavelength) {
                return Err(CliError::Config(
                    "laser power and wavelength must be positive".into(),
                ));
            }
        }
        if let Some(geometry) = &self.geometry {
            let waists = (geometry.waist_x.is_some(), geometry.waist_y.is_some());
            let ranges = (geometry.rayleigh_x.is_some(), geometry.rayleigh_y.is_some());
            let valid = matches!(
                (waists, ranges),
                ((true, true), (false, false)) | ((false, false), (true, true))
            );
            if !valid {
                return Err(CliError::Config(
                    "geometry needs exactly one style: both waist_x/waist_y or both \
                     rayleigh_x/rayleigh_y"
                        .into(),
                ));
            }
        }
        if let Some(beam) = &self.beam {
            if !positive(beam.velocity) {
                return Err(CliError::Config("beam velocity must be positive".into()));
            }
        }
        Ok(())
    }

    fn section<'a, T>(option: &'a Option<T>, name: &str) -> Result<&'a T> {
        option.as_ref().ok_or_else(|| {
            CliError::Config(format!(
                "this command needs the [{name}] configuration section (pass --config)"
            ))
        })
    }

    pub fn species(&self) -> Result<AtomSpecies> {
        let s = Self::section(&self.species, "species")?;
        Ok(AtomSpecies::from_transition_wavelength(
            s.mass,
            s.linewidth,
            s.transition_wavelength,
        )?)
    }

    pub fn si_geometry(&self) -> Result<BeamGeometry> {
        let laser = Self::section(&self.laser, "laser")?;
        let g = Self::section(&self.geometry, "geometry")?;
        let geometry = match (g.waist_x, g.waist_y, g.rayleigh_x, g.rayleigh_y) {
            (Some(wx), Some(wy), None, None) => {
                BeamGeometry::from_waists(laser.wavelength, wx, wy)?
            }
            (None, None, Some(zx), Some(zy)) => BeamGeometry::new(laser.wavelength, zx, zy)?,
            _ => unreachable!("validated"),
        };
        Ok(geometry)
    }

    pub fn detuning(&self, species: &AtomSpecies) -> Result<f64> {
        let laser = Self::section(&self.laser, "laser")?;
        Ok(match (laser.detuning_linewidths, laser.detuning) {
            (Some(gammas), None) => gammas * species.linewidth(),
            (None, Some(absolute)) => absolute,
            _ => unreachable!("validated"),
        })
    }

    /// Assembles the SI scenario for one order: species, drive and
    /// atomic beam.
    pub fn scenario(&self, order: u32) -> Result<(AtomSpecies, LaserDrive, AtomBeam)> {
        let species = self.species()?;
        let laser = Self::section(&self.laser, "laser")?;
        let beam_config = Self::section(&self.beam, "beam")?;
        let geometry = self.si_geometry()?;
        let detuning = self.detuning(&species)?;
        let superposition = ModeSuperposition::for_order(order)?;
        let drive = LaserDrive::new(laser.power, detuning, geometry, superposition)?;
        let beam = AtomBeam::from_velocity(species.mass(), beam_config.velocity)?;
        Ok((species, drive, beam))
    }

    /// Orders to iterate over: explicit CLI choice, then the config
    /// list, then the single default.
    pub fn resolve_orders(&self, flag: Option<u32>, default: &[u32]) -> Vec<u32> {
        if let Some(order) = flag {
            vec![order]
        } else if !self.orders.is_empty() {
            self.orders.clone()
        } else {
            default.to_vec()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario_toml() -> &'static str {
        r#"
orders = [1, 3, 5]

[species]
mass = 3.8175409e-26
linewidth = 6.1512212e7
transition_wavelength = 589.0e-9

[laser]
power = 0.1
wavelength = 589.0e-9
detuning_linewidths = 4.0e4

[geometry]
waist_x = 1.0e-6
waist_y = 10.0e-6

[beam]
velocity = 1000.0

[output]
format = "csv"
"#
    }

    #[test]
    fn scenario_config_parses_and_assembles() {
        let config: RunConfig = toml::from_str(scenario_toml()).unwrap();
        config.validate().unwrap();
        let (species, drive, beam) = config.scenario(3).unwrap();
        assert!((drive.detuning() / species.linewidth() - 4.0e4).abs() < 1e-9);
        assert!((drive.geometry().waist_x() - 1.0e-6).abs() < 1e-18);
        assert!(beam.kinetic_energy() > 0.0);
    }

    #[test]
    fn even_orders_are_rejected() {
        let mut config: RunConfig = toml::from_str(scenario_toml()).unwrap();
        config.orders.push(4);
        assert!(matches!(config.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn both_detuning_styles_is_rejected() {
        let text = scenario_toml().replace(
            "detuning_linewidths = 4.0e4",
            "detuning_linewidths = 4.0e4\ndetuning = 1.0e12",
        );
        let config: RunConfig = toml::from_str(&text).unwrap();
        assert!(matches!(config.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn mixed_geometry_style_is_rejected() {
        let text = scenario_toml().replace("waist_y = 10.0e-6", "rayleigh_y = 5.0e-4");
        let config: RunConfig = toml::from_str(&text).unwrap();
        assert!(matches!(config.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn si_commands_without_config_sections_fail_cleanly() {
        let config = RunConfig::default();
        assert!(matches!(config.scenario(3), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{}\nmystery = 1\n", scenario_toml());
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }
}
