//! Evaluates a sweep and writes its table.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use vmfcorr::arrays::{circular_array, correlation_matrix, linear_array, planar_grid, scf_along_path, ArrayGeometry};
use vmfcorr::nalgebra::Vector3;
use vmfcorr::oracles::{scf_montecarlo, scf_quadrature, QuadratureSpec};
use vmfcorr::radar::{decorrelation_table, kmh_to_mps, RadarScenario};
use vmfcorr::{
    acf_multicluster, direction_from_angles, scf, scf_multicluster, Complex64, Displacement, MotionState, VmfCluster,
};

use crate::config::{
    AcfCurve, ArrayBlock, ArraySpec, ClusterSpec, Format, ModeConfig, RadarTable, ScfCurve, ScfField, SweepConfig,
    Validate,
};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Distances in the spatial modes are in wavelengths.
const LAMBDA: f64 = 1.0;

/// Monte Carlo estimates more than this many standard errors off fail `validate`.
const MONTECARLO_SIGMAS: f64 = 4.0;

/// Outcome of `validate` mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationSummary {
    pub max_error: f64,
    pub tolerance: f64,
    /// Largest Monte Carlo deviation in standard errors, when requested.
    pub max_montecarlo_sigma: Option<f64>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance && self.max_montecarlo_sigma.is_none_or(|s| s < MONTECARLO_SIGMAS)
    }
}

impl fmt::Display for ValidationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max |closed form - quadrature| = {:e} (tolerance {:e})",
            self.max_error, self.tolerance
        )?;
        if let Some(s) = self.max_montecarlo_sigma {
            write!(
                f,
                ", max Monte Carlo deviation {s:.2} standard errors (limit {MONTECARLO_SIGMAS})"
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub validation: Option<ValidationSummary>,
}

/// Computes the table for a config. Rows come out in grid order whatever the
/// thread count.
pub fn run(config: &SweepConfig) -> Result<Report, CliError> {
    let name = config.mode.mode().to_string();
    let mut validation = None;
    let table = match &config.mode {
        ModeConfig::ScfCurve(c) => scf_curve(&name, c)?,
        ModeConfig::ScfField(c) => scf_field(&name, c)?,
        ModeConfig::AcfCurve(c) => acf_curve(&name, c)?,
        ModeConfig::ArrayMatrix(c) => array_matrix(&name, c)?,
        ModeConfig::ArrayPath(c) => array_path(&name, c)?,
        ModeConfig::RadarTable(c) => radar_table(&name, c, config.threshold)?,
        ModeConfig::Validate(c) => {
            let (table, summary) = validate(&name, c, config.seed)?;
            validation = Some(summary);
            table
        }
    };
    Ok(Report { table, validation })
}

/// Renders the report and writes it to `out`, or stdout when `None`.
/// A failed validation is reported after the table has been written.
pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.table.to_json(),
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        })?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                context: "writing stdout".into(),
                source,
            })?,
    }
    match report.validation {
        Some(v) if !v.passed() => Err(CliError::Validation(v.to_string())),
        _ => Ok(()),
    }
}

fn complex_cells(v: Complex64) -> [Cell; 3] {
    [v.re.into(), v.im.into(), v.norm().into()]
}

fn clusters(specs: &[ClusterSpec]) -> Result<Vec<VmfCluster>, CliError> {
    specs
        .iter()
        .map(|c| {
            Ok(VmfCluster::new(
                c.azimuth_deg.to_radians(),
                c.elevation_deg.to_radians(),
                c.kappa,
                c.power,
            )?)
        })
        .collect()
}

/// Displacement of length `r` at angle `beta` from the mean direction,
/// tilted toward increasing azimuth.
fn tilted(cluster: &VmfCluster, beta: f64, r: f64) -> Displacement {
    let [e_phi, _, mean] = cluster.frame();
    Displacement::from_vector((mean * beta.cos() + e_phi * beta.sin()) * r)
}

fn scf_curve(name: &str, c: &ScfCurve) -> Result<Table, CliError> {
    let distances = c.d_over_lambda.points();
    let mut points = Vec::new();
    for &kappa in &c.kappa {
        for &beta in &c.beta_deg {
            points.extend(distances.iter().map(|&d| (kappa, beta, d)));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(kappa, beta, d)| {
            let cluster = VmfCluster::single(c.azimuth_deg.to_radians(), c.elevation_deg.to_radians(), kappa)?;
            let v = scf(&cluster, &tilted(&cluster, beta.to_radians(), d * LAMBDA), LAMBDA)?;
            let [re, im, abs] = complex_cells(v);
            Ok(vec![kappa.into(), beta.into(), d.into(), re, im, abs])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(name, &["kappa", "beta_deg", "d_over_lambda", "re", "im", "abs"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn scf_field(name: &str, c: &ScfField) -> Result<Table, CliError> {
    let cl = clusters(&c.clusters)?;
    let ys = c.y_over_lambda.points();
    let points: Vec<(f64, f64)> = c
        .x_over_lambda
        .points()
        .into_iter()
        .flat_map(|x| ys.iter().map(move |&y| (x, y)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(x, y)| {
            let d = Displacement::new(x * LAMBDA, y * LAMBDA, c.z_over_lambda * LAMBDA);
            let [re, im, abs] = complex_cells(scf_multicluster(&cl, &d, LAMBDA)?);
            Ok(vec![x.into(), y.into(), re, im, abs])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(name, &["x_over_lambda", "y_over_lambda", "re", "im", "abs"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn acf_curve(name: &str, c: &AcfCurve) -> Result<Table, CliError> {
    let cl = clusters(&c.clusters)?;
    let motion = MotionState::new(
        c.speed_mps,
        c.motion_azimuth_deg.to_radians(),
        c.motion_elevation_deg.to_radians(),
    )?;
    let rows = c
        .dt_s
        .points()
        .par_iter()
        .map(|&dt| {
            let [re, im, abs] = complex_cells(acf_multicluster(&cl, &motion, dt, c.wavelength_m, c.monostatic)?);
            Ok(vec![dt.into(), re, im, abs])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(name, &["dt_s", "re", "im", "abs"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn geometry(spec: &ArraySpec) -> Result<ArrayGeometry, CliError> {
    Ok(match spec {
        ArraySpec::Linear {
            n,
            spacing_over_lambda,
            azimuth_deg,
            elevation_deg,
        } => {
            let axis = direction_from_angles(azimuth_deg.to_radians(), elevation_deg.to_radians())?;
            linear_array(*n, spacing_over_lambda * LAMBDA, &axis)?
        }
        ArraySpec::Circular { n, radius_over_lambda } => circular_array(*n, radius_over_lambda * LAMBDA)?,
        ArraySpec::Planar {
            nx,
            ny,
            dx_over_lambda,
            dy_over_lambda,
        } => planar_grid(*nx, *ny, dx_over_lambda * LAMBDA, dy_over_lambda * LAMBDA)?,
        ArraySpec::Positions { positions, reference } => ArrayGeometry::new(
            positions
                .iter()
                .map(|p| Vector3::new(p[0], p[1], p[2]) * LAMBDA)
                .collect(),
            *reference,
        )?,
    })
}

fn array_matrix(name: &str, c: &ArrayBlock) -> Result<Table, CliError> {
    let m = correlation_matrix(&geometry(&c.array)?, &clusters(&c.clusters)?, LAMBDA)?;
    let mut table = Table::new(name, &["row", "col", "re", "im", "abs"]);
    for i in 0..m.dim() {
        for k in 0..m.dim() {
            let [re, im, abs] = complex_cells(m.get(i, k));
            table.push(vec![i.into(), k.into(), re, im, abs]);
        }
    }
    Ok(table)
}

fn array_path(name: &str, c: &ArrayBlock) -> Result<Table, CliError> {
    let curve = scf_along_path(&geometry(&c.array)?, &clusters(&c.clusters)?, LAMBDA)?;
    let mut table = Table::new(name, &["element", "s_over_lambda", "re", "im", "abs"]);
    for (i, p) in curve.iter().enumerate() {
        let [re, im, abs] = complex_cells(p.value);
        table.push(vec![i.into(), (p.distance / LAMBDA).into(), re, im, abs]);
    }
    Ok(table)
}

fn radar_table(name: &str, c: &RadarTable, threshold: f64) -> Result<Table, CliError> {
    let base = RadarScenario {
        carrier_frequency: c.carrier_frequency_hz,
        target_elevation: c.elevation_deg.to_radians(),
        target_angular_width: c.widths_deg[0].to_radians(),
        target_speed: kmh_to_mps(c.speeds_kmh[0]),
        motion_azimuth: c.motion_azimuth_deg.to_radians(),
        monostatic: c.monostatic,
    };
    let widths: Vec<f64> = c.widths_deg.iter().map(|w| w.to_radians()).collect();
    let speeds: Vec<f64> = c.speeds_kmh.iter().map(|&s| kmh_to_mps(s)).collect();
    let entries = decorrelation_table(&widths, &speeds, &base, threshold)?;
    let mut table = Table::new(name, &["width_deg", "speed_kmh", "decorrelation_ms"]);
    let cells = c
        .widths_deg
        .iter()
        .flat_map(|&w| c.speeds_kmh.iter().map(move |&s| (w, s)));
    for ((w, s), e) in cells.zip(entries) {
        table.push(vec![w.into(), s.into(), (e.time * 1e3).into()]);
    }
    Ok(table)
}

fn validate(name: &str, c: &Validate, seed: u64) -> Result<(Table, ValidationSummary), CliError> {
    let spec = QuadratureSpec {
        abs_tol: c.quadrature_abs_tol,
        rel_tol: c.quadrature_rel_tol,
        ..QuadratureSpec::default()
    };
    let with_mc = c.montecarlo_realizations > 0;
    let distances = c.d_over_lambda.points();
    let mut points = Vec::new();
    for &kappa in &c.kappa {
        for &beta in &c.beta_deg {
            points.extend(distances.iter().map(|&d| (kappa, beta, d)));
        }
    }
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, &(kappa, beta, r))| {
            let cluster = VmfCluster::single(c.azimuth_deg.to_radians(), c.elevation_deg.to_radians(), kappa)?;
            let d = tilted(&cluster, beta.to_radians(), r * LAMBDA);
            let closed = scf(&cluster, &d, LAMBDA)?;
            let quad = scf_quadrature(&cluster, &d, LAMBDA, &spec)?.value;
            let mut row: Vec<Cell> = vec![
                kappa.into(),
                beta.into(),
                r.into(),
                closed.re.into(),
                closed.im.into(),
                quad.re.into(),
                quad.im.into(),
                (closed - quad).norm().into(),
            ];
            if with_mc {
                let point_seed = seed.wrapping_add(i as u64);
                let mc = scf_montecarlo(
                    &cluster,
                    &d,
                    LAMBDA,
                    c.montecarlo_paths,
                    c.montecarlo_realizations,
                    point_seed,
                )?;
                let sigma = if mc.std_error > 0.0 {
                    (mc.estimate - closed).norm() / mc.std_error
                } else {
                    0.0
                };
                row.extend::<[Cell; 4]>([
                    mc.estimate.re.into(),
                    mc.estimate.im.into(),
                    mc.std_error.into(),
                    sigma.into(),
                ]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut columns = vec![
        "kappa",
        "beta_deg",
        "d_over_lambda",
        "closed_re",
        "closed_im",
        "quadrature_re",
        "quadrature_im",
        "error",
    ];
    if with_mc {
        columns.extend([
            "montecarlo_re",
            "montecarlo_im",
            "montecarlo_std_error",
            "montecarlo_sigma",
        ]);
    }
    let mut table = Table::new(name, &columns);
    let max_of = |col: usize, rows: &[Vec<Cell>]| rows.iter().map(|r| r[col].as_f64()).fold(0.0, f64::max);
    let summary = ValidationSummary {
        max_error: max_of(7, &rows),
        tolerance: c.tolerance,
        max_montecarlo_sigma: with_mc.then(|| max_of(11, &rows)),
    };
    rows.into_iter().for_each(|r| table.push(r));
    Ok((table, summary))
}
