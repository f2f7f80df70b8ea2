//! The CLI's commands: each computes with the library, assembles a
//! deterministic artifact, writes it, and prints a one-line summary.
//!
//! Reduced-unit commands express lengths in laser wavelengths (the
//! `profile` geometry) or in focal-waist units (`metrics`, `table1`,
//! documented per file); SI commands take their scenario from the
//! configuration file. No artifact mixes the two conventions.

use std::path::PathBuf;

use atomlens::dephasing::{self, DEFAULT_CIRCLE_SAMPLES};
use atomlens::lens_metrics::{self, reference, DEVIATION_TOLERANCE};
use atomlens::modes::BeamGeometry;
use atomlens::atom_phase;
use atomlens::superposition::{symmetric_grid, ModeSuperposition};

use crate::artifact::{
    self, base_metadata, Axis, ColumnSpec, Format, SampledProfile, Table, ValueColumn,
    REDUCED_CONVENTION, SI_CONVENTION,
};
use crate::config::RunConfig;
use crate::{CliError, Result};

/// Where and how artifacts are written.
#[derive(Debug, Clone)]
pub struct OutputTarget {
    pub directory: PathBuf,
    pub format: Format,
}

fn col(name: &str, unit: &str) -> ColumnSpec {
    ColumnSpec {
        name: name.into(),
        unit: unit.into(),
    }
}

/// Amplitude-ratio matrix of the flat designs: one row per odd order up
/// to `max_order`, entries `c_{2j+1} / c_1`.
pub fn cmd_coeffs(max_order: u32, out: &OutputTarget) -> Result<PathBuf> {
    if max_order == 0 || max_order.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "--max-order must be odd and at least 1, got {max_order}"
        )));
    }
    let j_max = (max_order - 1) / 2;
    let mut columns = vec![col("order", "")];
    columns.extend((0..=j_max).map(|j| col(&format!("c{}", 2 * j + 1), "c1")));
    let mut rows = Vec::new();
    for j in 0..=j_max {
        let order = 2 * j + 1;
        let s = ModeSuperposition::for_order(order)?;
        let c1 = s.coefficients()[0];
        let mut row: Vec<Option<f64>> = vec![Some(f64::from(order))];
        row.extend(s.coefficients().iter().map(|c| Some(c / c1)));
        row.resize(columns.len(), None);
        rows.push(row);
    }
    let mut metadata = base_metadata(REDUCED_CONVENTION);
    metadata.insert(
        "normalization".into(),
        "amplitude ratios against the fundamental mode; designs are L2-normalized internally"
            .into(),
    );
    let table = Table::new("coefficients", metadata, columns, rows)?;
    let path = artifact::write_table(&out.directory, "coeffs", out.format, &table)?;
    println!(
        "wrote {} ({} designs up to order {max_order})",
        path.display(),
        j_max + 1
    );
    Ok(path)
}

/// Lens-parameter table for the first seventeen odd orders, computed
/// values next to the commonly tabulated reference values.
pub fn cmd_table1(out: &OutputTarget) -> Result<PathBuf> {
    let metrics = lens_metrics::table1(33)?;
    let d1 = metrics[0].deviation_mark;
    let e1 = metrics[0].power_fraction;
    let columns = vec![
        col("order", ""),
        col("d_over_d1", "1"),
        col("d_over_d1_ref", "1"),
        col("d_over_d1_diff", "1"),
        col("eff", "%"),
        col("eff_ref", "%"),
        col("eff_diff", "%"),
        col("eff_over_eff1", "1"),
        col("eff_over_eff1_ref", "1"),
        col("eff_over_eff1_rel_diff", "1"),
    ];
    let mut rows = Vec::new();
    for (i, m) in metrics.iter().enumerate() {
        let d_ratio = m.deviation_mark / d1;
        let eff_pct = 100.0 * m.power_fraction;
        let eff_ratio = m.power_fraction / e1;
        rows.push(vec![
            Some(f64::from(m.order)),
            Some(d_ratio),
            Some(reference::D_RATIO[i]),
            Some(d_ratio - reference::D_RATIO[i]),
            Some(eff_pct),
            Some(reference::EFFICIENCY_PCT[i]),
            Some(eff_pct - reference::EFFICIENCY_PCT[i]),
            Some(eff_ratio),
            Some(reference::EFFICIENCY_RATIO[i]),
            Some(eff_ratio / reference::EFFICIENCY_RATIO[i] - 1.0),
        ]);
    }
    let mut metadata = base_metadata(
        "reduced: widths in matched-curvature waist units, powers as fractions of total",
    );
    metadata.insert(
        "normalization".into(),
        "equal power, focal curvature matched to the order-1 lens".into(),
    );
    let table = Table::new("lens_parameters", metadata, columns, rows)?;
    let path = artifact::write_table(&out.directory, "table1", out.format, &table)?;
    println!("wrote {} ({} orders)", path.display(), metrics.len());
    Ok(path)
}

/// Focal field and integrated intensity profiles for one order, with the
/// deviation marks and the matched parabola annotated.
pub fn cmd_profile(
    order: u32,
    z: f64,
    rayleigh: f64,
    grid_points: usize,
    half_width: Option<f64>,
    out: &OutputTarget,
) -> Result<Vec<PathBuf>> {
    if !(rayleigh > 0.0 && rayleigh.is_finite()) {
        return Err(CliError::Config(format!(
            "--rayleigh must be positive and finite, got {rayleigh}"
        )));
    }
    if grid_points < 2 {
        return Err(CliError::Config(format!(
            "--grid-points must be at least 2, got {grid_points}"
        )));
    }
    let s = ModeSuperposition::for_order(order)?;
    let geometry = BeamGeometry::new(1.0, rayleigh, rayleigh)?;
    let half = match half_width {
        Some(value) if value > 0.0 && value.is_finite() => value,
        Some(value) => {
            return Err(CliError::Config(format!(
                "--half-width must be positive and finite, got {value}"
            )))
        }
        None => s.default_half_width(&geometry),
    };
    let xs = symmetric_grid(half, grid_points);
    let mark = lens_metrics::deviation_mark(&s, &geometry, DEVIATION_TOLERANCE)?;
    let curvature = lens_metrics::focal_curvature(&s, &geometry);

    let mut metadata = base_metadata(REDUCED_CONVENTION);
    metadata.insert("order".into(), order.to_string());
    metadata.insert("rayleigh_range_lambda".into(), rayleigh.to_string());
    metadata.insert("waist_x_lambda".into(), geometry.waist_x().to_string());
    metadata.insert("deviation_mark_lambda".into(), mark.to_string());
    metadata.insert("deviation_tolerance".into(), DEVIATION_TOLERANCE.to_string());
    metadata.insert("focal_curvature".into(), curvature.to_string());

    let axis = Axis {
        label: "x".into(),
        unit: "lambda".into(),
        coordinates: xs.clone(),
    };

    let fields: Vec<_> = xs.iter().map(|&x| s.field_at(x, 0.0, 0.0, &geometry)).collect();
    let field_profile = SampledProfile::new(
        format!("focal_field_psi{order}"),
        metadata.clone(),
        vec![axis.clone()],
        vec![
            ValueColumn {
                name: "re_field".into(),
                unit: "1/lambda".into(),
                data: fields.iter().map(|f| f.re).collect(),
            },
            ValueColumn {
                name: "im_field".into(),
                unit: "1/lambda".into(),
                data: fields.iter().map(|f| f.im).collect(),
            },
        ],
    )?;

    let mut intensity_metadata = metadata;
    intensity_metadata.insert("z_lambda".into(), z.to_string());
    let intensity = s.intensity_profile(&xs, z, &geometry);
    let parabola: Vec<f64> = xs.iter().map(|&x| curvature * x * x).collect();
    let intensity_profile = SampledProfile::new(
        format!("integrated_intensity_psi{order}"),
        intensity_metadata,
        vec![axis],
        vec![
            ValueColumn {
                name: "intensity".into(),
                unit: "1/lambda".into(),
                data: intensity,
            },
            ValueColumn {
                name: "parabola".into(),
                unit: "1/lambda".into(),
                data: parabola,
            },
        ],
    )?;

    let field_path = artifact::write_profile(
        &out.directory,
        &format!("profile_field_psi{order}"),
        out.format,
        &field_profile,
    )?;
    let intensity_path = artifact::write_profile(
        &out.directory,
        &format!("profile_intensity_psi{order}"),
        out.format,
        &intensity_profile,
    )?;
    println!(
        "wrote {} and {} (order {order}, z = {z} lambda, mark at ±{mark:.4} lambda)",
        field_path.display(),
        intensity_path.display()
    );
    Ok(vec![field_path, intensity_path])
}

/// Scalar lens figures for one order.
pub fn cmd_metrics(order: u32, out: &OutputTarget) -> Result<PathBuf> {
    let m = lens_metrics::metrics_for_order(order)?;
    let s = ModeSuperposition::for_order(order)?;
    let unit_waist = BeamGeometry::reduced(1.0);
    let peak = s.outermost_peak(&unit_waist);
    let columns = vec![
        col("order", ""),
        col("deviation_mark", "w0x"),
        col("power_fraction", "1"),
        col("power_ratio", "1"),
        col("rayleigh_scale", "1"),
        col("outermost_peak", "w0x"),
        col("focal_curvature", "1/w0x^3"),
    ];
    let rows = vec![vec![
        Some(f64::from(m.order)),
        Some(m.deviation_mark),
        Some(m.power_fraction),
        Some(m.power_ratio),
        Some(m.rayleigh_scale),
        Some(peak),
        Some(m.curvature),
    ]];
    let mut metadata = base_metadata(
        "reduced: lengths in focal-waist units (deviation_mark in the matched-curvature waist)",
    );
    metadata.insert(
        "normalization".into(),
        "equal power, focal curvature matched to the order-1 lens".into(),
    );
    let table = Table::new(format!("metrics_psi{order}"), metadata, columns, rows)?;
    let path = artifact::write_table(
        &out.directory,
        &format!("metrics_psi{order}"),
        out.format,
        &table,
    )?;
    println!(
        "wrote {} (order {order}: d = {:.4} w0x, captured power {:.2}%)",
        path.display(),
        m.deviation_mark,
        100.0 * m.power_fraction
    );
    Ok(path)
}

/// Minimal Rayleigh ranges for a set of orders plus the power-law fit.
pub fn cmd_zmin(orders: &[u32], tolerance: f64, out: &OutputTarget) -> Result<PathBuf> {
    if orders.is_empty() {
        return Err(CliError::Config("zmin needs at least one order".into()));
    }
    let scans = dephasing::zmin_scan(orders, tolerance, DEFAULT_CIRCLE_SAMPLES)?;
    let columns = vec![
        col("order", ""),
        col("z_min", "lambda"),
        col("waist", "lambda"),
        col("useful_radius", "lambda"),
        col("max_deviation", "1"),
        col("opening_half_angle", "deg"),
    ];
    let rows: Vec<Vec<Option<f64>>> = scans
        .iter()
        .map(|scan| {
            vec![
                Some(f64::from(scan.order)),
                Some(scan.z_min),
                Some(scan.waist),
                Some(scan.radius),
                Some(scan.max_relative_deviation),
                Some(scan.opening_half_angle().to_degrees()),
            ]
        })
        .collect();
    let mut metadata = base_metadata(REDUCED_CONVENTION);
    metadata.insert("tolerance".into(), tolerance.to_string());
    if scans.len() >= 2 {
        let (prefactor, exponent) = dephasing::fit_zmin_power_law(&scans);
        metadata.insert("fit_prefactor_lambda".into(), prefactor.to_string());
        metadata.insert("fit_exponent".into(), exponent.to_string());
        println!(
            "z_min fit over {} orders: {:.4} lambda * order^{:.4}",
            scans.len(),
            prefactor,
            exponent
        );
    }
    let table = Table::new("zmin_scan", metadata, columns, rows)?;
    let path = artifact::write_table(&out.directory, "zmin", out.format, &table)?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Imprinted phase map for the configured SI scenario at one order.
pub fn cmd_phase(
    config: &RunConfig,
    order: u32,
    grid_points: usize,
    out: &OutputTarget,
) -> Result<PathBuf> {
    if grid_points < 2 {
        return Err(CliError::Config(format!(
            "--grid-points must be at least 2, got {grid_points}"
        )));
    }
    let (species, drive, beam) = config.scenario(order)?;
    let mark =
        lens_metrics::deviation_mark(drive.superposition(), drive.geometry(), DEVIATION_TOLERANCE)?;
    let xs = symmetric_grid(mark, grid_points);
    let mask = atom_phase::phase_mask(&drive, &beam, &species, &xs, 0.0)?;
    let focal = atom_phase::focal_length(&drive, &beam, &species)?;

    let intensity: Vec<f64> = xs.iter().map(|&x| drive.integrated_intensity(x, 0.0)).collect();
    let mut metadata = base_metadata(SI_CONVENTION);
    metadata.insert("order".into(), order.to_string());
    metadata.insert("power_w".into(), drive.power().to_string());
    metadata.insert("detuning_rad_s".into(), drive.detuning().to_string());
    metadata.insert("waist_x_m".into(), drive.geometry().waist_x().to_string());
    metadata.insert("waist_y_m".into(), drive.geometry().waist_y().to_string());
    metadata.insert("deviation_mark_m".into(), mark.to_string());
    metadata.insert("phase_prefactor".into(), mask.prefactor.to_string());
    metadata.insert("raman_nath_ratio".into(), mask.raman_nath_ratio.to_string());
    metadata.insert(
        "focal_length_fitted_m".into(),
        focal.fitted.to_string(),
    );
    metadata.insert(
        "focal_length_closed_form_m".into(),
        focal.closed_form.to_string(),
    );
    metadata.insert("focusing".into(), focal.focusing.to_string());

    let profile = SampledProfile::new(
        format!("phase_mask_psi{order}"),
        metadata,
        vec![Axis {
            label: "x".into(),
            unit: "m".into(),
            coordinates: xs.clone(),
        }],
        vec![
            ValueColumn {
                name: "phase".into(),
                unit: "rad".into(),
                data: mask.values.clone(),
            },
            ValueColumn {
                name: "integrated_intensity".into(),
                unit: "W/m".into(),
                data: intensity,
            },
        ],
    )?;
    let path = artifact::write_profile(
        &out.directory,
        &format!("phase_psi{order}"),
        out.format,
        &profile,
    )?;
    println!(
        "wrote {} (order {order}: f = {:.4} m, kinetic/potential = {:.0})",
        path.display(),
        focal.closed_form,
        mask.raman_nath_ratio
    );
    Ok(path)
}

/// Ballistic ray validation of the thin-lens claim for one order.
pub fn cmd_raycheck(
    config: &RunConfig,
    order: u32,
    rays: usize,
    out: &OutputTarget,
) -> Result<PathBuf> {
    let (species, drive, beam) = config.scenario(order)?;
    let trace = atom_phase::ray_check(&drive, &beam, &species, rays)?;
    let columns = vec![
        col("launch", "m"),
        col("kick_angle", "rad"),
        col("axis_crossing", "m"),
    ];
    let rows: Vec<Vec<Option<f64>>> = trace
        .rays
        .iter()
        .map(|ray| {
            let crossing = ray.axis_crossing();
            vec![
                Some(ray.launch_offset),
                Some(ray.kick_angle),
                crossing.is_finite().then_some(crossing),
            ]
        })
        .collect();

    // Worst focal-length error over the paraxial bundle |x| <= d/4.
    let paraxial_error = trace
        .rays
        .iter()
        .filter(|ray| {
            ray.launch_offset.abs() <= 0.25 * trace.deviation_mark && ray.kick_angle != 0.0
        })
        .map(|ray| (ray.axis_crossing() / trace.focal_length - 1.0).abs())
        .fold(0.0f64, f64::max);

    let mut metadata = base_metadata(SI_CONVENTION);
    metadata.insert("order".into(), order.to_string());
    metadata.insert("focal_length_m".into(), trace.focal_length.to_string());
    metadata.insert("deviation_mark_m".into(), trace.deviation_mark.to_string());
    metadata.insert("rms_at_focus_m".into(), trace.rms_at_focus.to_string());
    metadata.insert(
        "paraxial_max_focal_error".into(),
        paraxial_error.to_string(),
    );
    let table = Table::new(format!("ray_check_psi{order}"), metadata, columns, rows)?;
    let path = artifact::write_table(
        &out.directory,
        &format!("raycheck_psi{order}"),
        out.format,
        &table,
    )?;
    println!(
        "wrote {} (order {order}: paraxial rays focus within {:.3}% of f = {:.4} m)",
        path.display(),
        100.0 * paraxial_error,
        trace.focal_length
    );
    Ok(path)
}

/// Default orders for the zmin scan when neither flag nor config names
/// any: the square-root branch plus the start of the 3/2 branch.
pub const DEFAULT_ZMIN_ORDERS: [u32; 9] = [3, 5, 7, 9, 11, 13, 17, 21, 25];

/// Default tolerance for the zmin criterion.
pub const DEFAULT_ZMIN_TOLERANCE: f64 = DEVIATION_TOLERANCE;

/// Default grid size for phase masks.
pub const DEFAULT_PHASE_GRID: usize = 401;

/// Reduced-unit default Rayleigh range for `profile`: chosen so the
/// focal waist is exactly one wavelength and the x axis doubles as a
/// waist-unit axis.
pub const DEFAULT_PROFILE_RAYLEIGH: f64 = std::f64::consts::PI;
