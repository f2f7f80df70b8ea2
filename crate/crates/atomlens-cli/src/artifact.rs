//! Deterministic artifact types and their CSV/JSON emitters.
//!
//! Every artifact carries a metadata block naming the unit convention
//! (reduced or SI — never both in one file) and the tool version, so a
//! fixed input and version produce byte-identical output. CSV files use
//! comma separators, `.` decimals, a `name[unit]` header row, `#`-prefixed
//! metadata lines, and LF line endings. JSON files are pretty-printed and
//! round-trip into equal values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Tool version stamped into every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata key naming the unit convention of a file.
pub const CONVENTION_KEY: &str = "units";

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One grid axis of a sampled profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub label: String,
    pub unit: String,
    pub coordinates: Vec<f64>,
}

/// One sampled quantity on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueColumn {
    pub name: String,
    pub unit: String,
    pub data: Vec<f64>,
}

/// A 1-D or 2-D sampled profile with metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledProfile {
    pub name: String,
    pub metadata: BTreeMap<String, String>,
    pub axes: Vec<Axis>,
    pub columns: Vec<ValueColumn>,
}

impl SampledProfile {
    pub fn new(
        name: impl Into<String>,
        metadata: BTreeMap<String, String>,
        axes: Vec<Axis>,
        columns: Vec<ValueColumn>,
    ) -> Result<Self> {
        let profile = Self {
            name: name.into(),
            metadata,
            axes,
            columns,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Structural invariants; also applied to deserialized artifacts.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(CliError::Config(format!(
                "profile '{}' must have one or two axes, has {}",
                self.name,
                self.axes.len()
            )));
        }
        if !self.metadata.contains_key(CONVENTION_KEY) {
            return Err(CliError::Config(format!(
                "profile '{}' is missing the '{CONVENTION_KEY}' metadata entry",
                self.name
            )));
        }
        for axis in &self.axes {
            if axis.coordinates.len() < 2 {
                return Err(CliError::Config(format!(
                    "axis '{}' needs at least two points",
                    axis.label
                )));
            }
            let increasing = axis.coordinates[1] > axis.coordinates[0];
            for pair in axis.coordinates.windows(2) {
                let step_up = pair[1] > pair[0];
                if step_up != increasing || pair[1] == pair[0] {
                    return Err(CliError::Config(format!(
                        "axis '{}' coordinates are not strictly monotone",
                        axis.label
                    )));
                }
            }
        }
        let cells: usize = self.axes.iter().map(|a| a.coordinates.len()).product();
        for column in &self.columns {
            if column.data.len() != cells {
                return Err(CliError::Config(format!(
                    "column '{}' has {} values for a grid of {} cells",
                    column.name,
                    column.data.len(),
                    cells
                )));
            }
        }
        Ok(())
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        push_metadata(&mut out, &self.name, &self.metadata);
        let mut header: Vec<String> = self
            .axes
            .iter()
            .map(|a| format!("{}[{}]", a.label, a.unit))
            .collect();
        header.extend(
            self.columns
                .iter()
                .map(|c| format!("{}[{}]", c.name, c.unit)),
        );
        let _ = writeln!(out, "{}", header.join(","));
        match self.axes.len() {
            1 => {
                for (i, x) in self.axes[0].coordinates.iter().enumerate() {
                    let mut row = vec![format_float(*x)];
                    row.extend(self.columns.iter().map(|c| format_float(c.data[i])));
                    let _ = writeln!(out, "{}", row.join(","));
                }
            }
            _ => {
                // Row-major: first axis outer, second inner.
                let inner = self.axes[1].coordinates.len();
                for (i, x) in self.axes[0].coordinates.iter().enumerate() {
                    for (j, y) in self.axes[1].coordinates.iter().enumerate() {
                        let mut row = vec![format_float(*x), format_float(*y)];
                        let flat = i * inner + j;
                        row.extend(self.columns.iter().map(|c| format_float(c.data[flat])));
                        let _ = writeln!(out, "{}", row.join(","));
                    }
                }
            }
        }
        out
    }
}

/// Column description of a [`Table`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub unit: String,
}

/// A rectangular (possibly ragged via empty cells) numeric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub name: String,
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(
        name: impl Into<String>,
        metadata: BTreeMap<String, String>,
        columns: Vec<ColumnSpec>,
        rows: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        let table = Self {
            name: name.into(),
            metadata,
            columns,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.metadata.contains_key(CONVENTION_KEY) {
            return Err(CliError::Config(format!(
                "table '{}' is missing the '{CONVENTION_KEY}' metadata entry",
                self.name
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CliError::Config(format!(
                    "table '{}' row {i} has {} cells for {} columns",
                    self.name,
                    row.len(),
                    self.columns.len()
                )));
            }
        }
        Ok(())
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        push_metadata(&mut out, &self.name, &self.metadata);
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                if c.unit.is_empty() {
                    c.name.clone()
                } else {
                    format!("{}[{}]", c.name, c.unit)
                }
            })
            .collect();
        let _ = writeln!(out, "{}", header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| cell.map(format_float).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn push_metadata(out: &mut String, name: &str, metadata: &BTreeMap<String, String>) {
    let _ = writeln!(out, "# name = {name}");
    let _ = writeln!(out, "# version = {VERSION}");
    for (key, value) in metadata {
        let _ = writeln!(out, "# {key} = {value}");
    }
}

/// Shortest round-trip decimal form; integer-valued floats keep a `.0`
/// so every cell re-parses as a float.
fn format_float(v: f64) -> String {
    let s = format!("{v}");
    if s.contains(['.', 'e', 'E', 'n', 'i']) {
        s
    } else {
        format!("{s}.0")
    }
}

fn write_bytes(dir: &Path, file_name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(file_name);
    fs::write(&path, bytes).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Serializes a profile artifact under `dir` as `{stem}.{ext}`.
pub fn write_profile(
    dir: &Path,
    stem: &str,
    format: Format,
    profile: &SampledProfile,
) -> Result<PathBuf> {
    profile.validate()?;
    let body = match format {
        Format::Csv => profile.to_csv(),
        Format::Json => to_json(profile),
    };
    write_bytes(dir, &format!("{stem}.{}", format.extension()), body.as_bytes())
}

/// Serializes a table artifact under `dir` as `{stem}.{ext}`.
pub fn write_table(dir: &Path, stem: &str, format: Format, table: &Table) -> Result<PathBuf> {
    table.validate()?;
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(table),
    };
    write_bytes(dir, &format!("{stem}.{}", format.extension()), body.as_bytes())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("artifact serialization");
    body.push('\n');
    body
}

/// Standard metadata block shared by all artifacts.
pub fn base_metadata(convention: &str) -> BTreeMap<String, String> {
    let mut metadata = BTreeMap::new();
    metadata.insert(CONVENTION_KEY.to_string(), convention.to_string());
    metadata
}

/// Unit-convention string for reduced (wavelength = 1) artifacts.
pub const REDUCED_CONVENTION: &str =
    "reduced: lengths in laser wavelengths, intensities per unit total power";

/// Unit-convention string for SI artifacts.
pub const SI_CONVENTION: &str = "SI: meters, seconds, joules, watts, radians";
