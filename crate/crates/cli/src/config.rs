//! Sweep configuration files.
//!
//! A config is one JSON object with the shared settings at the top level and
//! exactly one mode block, e.g.
//!
//! ```json
//! { "scf_curve": { "kappa": [10], "d_over_lambda": { "start": 0, "stop": 3, "count": 61 } } }
//! ```
//!
//! Angles are in degrees here and nowhere else.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use crate::error::ConfigError;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    ScfCurve,
    ScfField,
    AcfCurve,
    ArrayMatrix,
    ArrayPath,
    RadarTable,
    Validate,
}

impl Mode {
    /// Key of the mode block in a config file.
    pub fn key(self) -> &'static str {
        match self {
            Mode::ScfCurve => "scf_curve",
            Mode::ScfField => "scf_field",
            Mode::AcfCurve => "acf_curve",
            Mode::ArrayMatrix => "array_matrix",
            Mode::ArrayPath => "array_path",
            Mode::RadarTable => "radar_table",
            Mode::Validate => "validate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key().replace('_', "-"))
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Grid { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(default)]
    pub azimuth_deg: f64,
    #[serde(default)]
    pub elevation_deg: f64,
    pub kappa: f64,
    #[serde(default = "one")]
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ArraySpec {
    /// Uniform line centered on the reference element.
    Linear {
        n: usize,
        spacing_over_lambda: f64,
        #[serde(default)]
        azimuth_deg: f64,
        #[serde(default)]
        elevation_deg: f64,
    },
    /// Horizontal circle through the reference element at the origin.
    Circular { n: usize, radius_over_lambda: f64 },
    /// Horizontal rectangular grid with the reference at a corner.
    Planar {
        nx: usize,
        ny: usize,
        dx_over_lambda: f64,
        dy_over_lambda: f64,
    },
    /// Arbitrary element positions in wavelengths.
    Positions {
        positions: Vec<[f64; 3]>,
        #[serde(default)]
        reference: usize,
    },
}

/// SCF against distance for every `(kappa, beta)` pair, `beta` being the
/// angle between the displacement and the mean direction.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfCurve {
    #[serde(default)]
    pub azimuth_deg: f64,
    #[serde(default)]
    pub elevation_deg: f64,
    pub kappa: Vec<f64>,
    #[serde(default = "zero_list")]
    pub beta_deg: Vec<f64>,
    pub d_over_lambda: Grid,
}

/// SCF magnitude over a plane of displacements at height `z_over_lambda`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfField {
    pub clusters: Vec<ClusterSpec>,
    pub x_over_lambda: Grid,
    pub y_over_lambda: Grid,
    #[serde(default)]
    pub z_over_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcfCurve {
    pub clusters: Vec<ClusterSpec>,
    pub wavelength_m: f64,
    pub speed_mps: f64,
    #[serde(default)]
    pub motion_azimuth_deg: f64,
    #[serde(default)]
    pub motion_elevation_deg: f64,
    #[serde(default)]
    pub monostatic: bool,
    pub dt_s: Grid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayBlock {
    pub clusters: Vec<ClusterSpec>,
    pub array: ArraySpec,
}

/// Decorrelation time of a receding target for every `(width, speed)` pair.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarTable {
    #[serde(default = "default_carrier")]
    pub carrier_frequency_hz: f64,
    #[serde(default = "default_elevation")]
    pub elevation_deg: f64,
    #[serde(default = "default_widths")]
    pub widths_deg: Vec<f64>,
    #[serde(default = "default_speeds")]
    pub speeds_kmh: Vec<f64>,
    #[serde(default)]
    pub motion_azimuth_deg: f64,
    #[serde(default = "yes")]
    pub monostatic: bool,
}

impl Default for RadarTable {
    fn default() -> Self {
        RadarTable {
            carrier_frequency_hz: default_carrier(),
            elevation_deg: default_elevation(),
            widths_deg: default_widths(),
            speeds_kmh: default_speeds(),
            motion_azimuth_deg: 0.0,
            monostatic: true,
        }
    }
}

/// Quadrature oracle against the closed form over a `(kappa, beta, d)` grid.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Validate {
    #[serde(default = "default_validate_azimuth")]
    pub azimuth_deg: f64,
    #[serde(default = "default_validate_elevation")]
    pub elevation_deg: f64,
    #[serde(default = "default_validate_kappa")]
    pub kappa: Vec<f64>,
    #[serde(default = "default_validate_beta")]
    pub beta_deg: Vec<f64>,
    #[serde(default = "default_validate_d")]
    pub d_over_lambda: Grid,
    /// Largest accepted `|closed form − quadrature|`.
    #[serde(default = "default_agreement")]
    pub tolerance: f64,
    #[serde(default = "default_quad_abs")]
    pub quadrature_abs_tol: f64,
    #[serde(default = "default_quad_rel")]
    pub quadrature_rel_tol: f64,
    /// Also compare against Monte Carlo with this many realizations; 0 skips it.
    #[serde(default)]
    pub montecarlo_realizations: usize,
    #[serde(default = "default_mc_paths")]
    pub montecarlo_paths: usize,
}

impl Default for Validate {
    fn default() -> Self {
        Validate {
            azimuth_deg: default_validate_azimuth(),
            elevation_deg: default_validate_elevation(),
            kappa: default_validate_kappa(),
            beta_deg: default_validate_beta(),
            d_over_lambda: default_validate_d(),
            tolerance: default_agreement(),
            quadrature_abs_tol: default_quad_abs(),
            quadrature_rel_tol: default_quad_rel(),
            montecarlo_realizations: 0,
            montecarlo_paths: default_mc_paths(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeConfig {
    ScfCurve(ScfCurve),
    ScfField(ScfField),
    AcfCurve(AcfCurve),
    ArrayMatrix(ArrayBlock),
    ArrayPath(ArrayBlock),
    RadarTable(RadarTable),
    Validate(Validate),
}

impl ModeConfig {
    pub fn mode(&self) -> Mode {
        match self {
            ModeConfig::ScfCurve(_) => Mode::ScfCurve,
            ModeConfig::ScfField(_) => Mode::ScfField,
            ModeConfig::AcfCurve(_) => Mode::AcfCurve,
            ModeConfig::ArrayMatrix(_) => Mode::ArrayMatrix,
            ModeConfig::ArrayPath(_) => Mode::ArrayPath,
            ModeConfig::RadarTable(_) => Mode::RadarTable,
            ModeConfig::Validate(_) => Mode::Validate,
        }
    }

    /// Built-in scenario used when no config file is given.
    pub fn default_for(mode: Mode) -> Self {
        let single = |kappa| {
            vec![ClusterSpec {
                azimuth_deg: 45.0,
                elevation_deg: 0.0,
                kappa,
                power: 1.0,
            }]
        };
        match mode {
            Mode::ScfCurve => ModeConfig::ScfCurve(ScfCurve {
                azimuth_deg: 0.0,
                elevation_deg: 0.0,
                kappa: vec![0.0, 1.0, 10.0, 100.0],
                beta_deg: vec![0.0],
                d_over_lambda: Grid::new(0.0, 3.0, 121),
            }),
            Mode::ScfField => ModeConfig::ScfField(ScfField {
                clusters: single(10.0),
                x_over_lambda: Grid::new(-3.0, 3.0, 61),
                y_over_lambda: Grid::new(-3.0, 3.0, 61),
                z_over_lambda: 0.0,
            }),
            Mode::AcfCurve => ModeConfig::AcfCurve(AcfCurve {
                clusters: single(10.0),
                wavelength_m: 0.03,
                speed_mps: 10.0,
                motion_azimuth_deg: 0.0,
                motion_elevation_deg: 0.0,
                monostatic: false,
                dt_s: Grid::new(0.0, 0.01, 101),
            }),
            Mode::ArrayMatrix => ModeConfig::ArrayMatrix(ArrayBlock {
                clusters: single(10.0),
                array: ArraySpec::Linear {
                    n: 8,
                    spacing_over_lambda: 0.5,
                    azimuth_deg: 0.0,
                    elevation_deg: 0.0,
                },
            }),
            Mode::ArrayPath => ModeConfig::ArrayPath(ArrayBlock {
                clusters: single(10.0),
                array: ArraySpec::Circular {
                    n: 121,
                    radius_over_lambda: 3.0 / std::f64::consts::PI,
                },
            }),
            Mode::RadarTable => ModeConfig::RadarTable(RadarTable::default()),
            Mode::Validate => ModeConfig::Validate(Validate::default()),
        }
    }
}

/// A checked configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: ModeConfig,
    /// Correlation level that defines decorrelation.
    pub threshold: f64,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn defaults(mode: Mode) -> Self {
        SweepConfig {
            mode: ModeConfig::default_for(mode),
            threshold: DEFAULT_THRESHOLD,
            format: Format::Csv,
            seed: 0,
            out: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default)]
    format: Format,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out: Option<PathBuf>,
    scf_curve: Option<ScfCurve>,
    scf_field: Option<ScfField>,
    acf_curve: Option<AcfCurve>,
    array_matrix: Option<ArrayBlock>,
    array_path: Option<ArrayBlock>,
    radar_table: Option<RadarTable>,
    validate: Option<Validate>,
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: without_location(&inner),
        }
    })?;
    de.end().map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: without_location(&e),
    })?;

    let mut modes = Vec::new();
    let mut push = |key: &str, mode: Option<ModeConfig>| {
        if let Some(m) = mode {
            modes.push((key.to_string(), m));
        }
    };
    push("scf_curve", raw.scf_curve.map(ModeConfig::ScfCurve));
    push("scf_field", raw.scf_field.map(ModeConfig::ScfField));
    push("acf_curve", raw.acf_curve.map(ModeConfig::AcfCurve));
    push("array_matrix", raw.array_matrix.map(ModeConfig::ArrayMatrix));
    push("array_path", raw.array_path.map(ModeConfig::ArrayPath));
    push("radar_table", raw.radar_table.map(ModeConfig::RadarTable));
    push("validate", raw.validate.map(ModeConfig::Validate));

    let mut v = Violations::default();
    if !(raw.threshold > 0.0 && raw.threshold < 1.0) {
        v.add("threshold", "must be strictly between 0 and 1");
    }
    let mode = match modes.len() {
        1 => Some(modes.pop().unwrap().1),
        0 => {
            v.add("mode", "no mode block given");
            None
        }
        _ => {
            let keys: Vec<_> = modes.iter().map(|(k, _)| k.as_str()).collect();
            v.add(
                "mode",
                format!("exactly one mode block allowed, found {}", keys.join(", ")),
            );
            None
        }
    };
    if let Some(m) = &mode {
        check_mode(m, &mut v);
    }
    v.finish()?;
    Ok(SweepConfig {
        mode: mode.expect("checked above"),
        threshold: raw.threshold,
        format: raw.format,
        seed: raw.seed,
        out: raw.out,
    })
}

// serde_json appends " at line L column C", which ConfigError reports itself
fn without_location(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(i) if e.line() > 0 => text[..i].to_string(),
        _ => text,
    }
}

#[derive(Default)]
struct Violations(Vec<String>);

impl Violations {
    fn add(&mut self, path: impl AsRef<str>, message: impl AsRef<str>) {
        self.0.push(format!("{}: {}", path.as_ref(), message.as_ref()));
    }

    fn finite(&mut self, path: &str, x: f64) {
        if !x.is_finite() {
            self.add(path, "must be finite");
        }
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x.is_finite() && x > 0.0) {
            self.add(path, "must be positive and finite");
        }
    }

    fn grid(&mut self, path: &str, g: &Grid) {
        if g.count == 0 {
            self.add(format!("{path}.count"), "grid must be nonempty");
        }
        self.finite(&format!("{path}.start"), g.start);
        self.finite(&format!("{path}.stop"), g.stop);
    }

    fn kappa(&mut self, path: &str, kappa: f64) {
        if !(kappa.is_finite() && kappa >= 0.0) {
            self.add(path, "kappa must be finite and >= 0");
        }
    }

    fn elevation(&mut self, path: &str, deg: f64) {
        if deg.is_nan() || deg.abs() > 90.0 {
            self.add(path, "elevation must lie in [-90, 90] degrees");
        }
    }

    fn nonempty<T>(&mut self, path: &str, list: &[T]) {
        if list.is_empty() {
            self.add(path, "list must be nonempty");
        }
    }

    fn clusters(&mut self, path: &str, clusters: &[ClusterSpec]) {
        self.nonempty(path, clusters);
        for (i, c) in clusters.iter().enumerate() {
            let p = format!("{path}[{i}]");
            self.finite(&format!("{p}.azimuth_deg"), c.azimuth_deg);
            self.elevation(&format!("{p}.elevation_deg"), c.elevation_deg);
            self.kappa(&format!("{p}.kappa"), c.kappa);
            if !(c.power > 0.0 && c.power <= 1.0) {
                self.add(format!("{p}.power"), "must lie in (0, 1]");
            }
        }
        let total: f64 = clusters.iter().map(|c| c.power).sum();
        if !clusters.is_empty() && (total - 1.0).abs() > 1e-9 {
            self.add(path, format!("cluster powers sum to {total}, expected 1"));
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(self.0))
        }
    }
}

fn check_mode(mode: &ModeConfig, v: &mut Violations) {
    match mode {
        ModeConfig::ScfCurve(c) => {
            v.finite("scf_curve.azimuth_deg", c.azimuth_deg);
            v.elevation("scf_curve.elevation_deg", c.elevation_deg);
            v.nonempty("scf_curve.kappa", &c.kappa);
            for (i, &k) in c.kappa.iter().enumerate() {
                v.kappa(&format!("scf_curve.kappa[{i}]"), k);
            }
            v.nonempty("scf_curve.beta_deg", &c.beta_deg);
            for (i, &b) in c.beta_deg.iter().enumerate() {
                v.finite(&format!("scf_curve.beta_deg[{i}]"), b);
            }
            v.grid("scf_curve.d_over_lambda", &c.d_over_lambda);
        }
        ModeConfig::ScfField(c) => {
            v.clusters("scf_field.clusters", &c.clusters);
            v.grid("scf_field.x_over_lambda", &c.x_over_lambda);
            v.grid("scf_field.y_over_lambda", &c.y_over_lambda);
            v.finite("scf_field.z_over_lambda", c.z_over_lambda);
        }
        ModeConfig::AcfCurve(c) => {
            v.clusters("acf_curve.clusters", &c.clusters);
            v.positive("acf_curve.wavelength_m", c.wavelength_m);
            if !(c.speed_mps.is_finite() && c.speed_mps >= 0.0) {
                v.add("acf_curve.speed_mps", "must be finite and >= 0");
            }
            v.finite("acf_curve.motion_azimuth_deg", c.motion_azimuth_deg);
            v.elevation("acf_curve.motion_elevation_deg", c.motion_elevation_deg);
            v.grid("acf_curve.dt_s", &c.dt_s);
        }
        ModeConfig::ArrayMatrix(c) => check_array("array_matrix", c, v),
        ModeConfig::ArrayPath(c) => check_array("array_path", c, v),
        ModeConfig::RadarTable(c) => {
            v.positive("radar_table.carrier_frequency_hz", c.carrier_frequency_hz);
            v.elevation("radar_table.elevation_deg", c.elevation_deg);
            v.nonempty("radar_table.widths_deg", &c.widths_deg);
            for (i, &w) in c.widths_deg.iter().enumerate() {
                if !(w > 0.0 && w < 360.0) {
                    v.add(format!("radar_table.widths_deg[{i}]"), "must lie in (0, 360)");
                }
            }
            v.nonempty("radar_table.speeds_kmh", &c.speeds_kmh);
            for (i, &s) in c.speeds_kmh.iter().enumerate() {
                v.positive(&format!("radar_table.speeds_kmh[{i}]"), s);
            }
            v.finite("radar_table.motion_azimuth_deg", c.motion_azimuth_deg);
        }
        ModeConfig::Validate(c) => {
            v.finite("validate.azimuth_deg", c.azimuth_deg);
            v.elevation("validate.elevation_deg", c.elevation_deg);
            v.nonempty("validate.kappa", &c.kappa);
            for (i, &k) in c.kappa.iter().enumerate() {
                v.kappa(&format!("validate.kappa[{i}]"), k);
                if k > vmfcorr::oracles::quadrature::MAX_KAPPA {
                    v.add(format!("validate.kappa[{i}]"), "quadrature accepts kappa <= 1e4");
                }
            }
            v.nonempty("validate.beta_deg", &c.beta_deg);
            for (i, &b) in c.beta_deg.iter().enumerate() {
                v.finite(&format!("validate.beta_deg[{i}]"), b);
            }
            v.grid("validate.d_over_lambda", &c.d_over_lambda);
            v.positive("validate.tolerance", c.tolerance);
            v.positive("validate.quadrature_abs_tol", c.quadrature_abs_tol);
            v.positive("validate.quadrature_rel_tol", c.quadrature_rel_tol);
            if c.montecarlo_realizations > 0 {
                if c.montecarlo_realizations < vmfcorr::oracles::montecarlo::MIN_REALIZATIONS {
                    v.add("validate.montecarlo_realizations", "must be 0 or at least 100");
                }
                if c.montecarlo_paths < vmfcorr::oracles::montecarlo::MIN_PATHS {
                    v.add("validate.montecarlo_paths", "must be at least 10");
                }
            }
        }
    }
}

fn check_array(key: &str, block: &ArrayBlock, v: &mut Violations) {
    v.clusters(&format!("{key}.clusters"), &block.clusters);
    let p = format!("{key}.array");
    match &block.array {
        ArraySpec::Linear {
            n,
            spacing_over_lambda,
            azimuth_deg,
            elevation_deg,
        } => {
            if *n == 0 {
                v.add(format!("{p}.linear.n"), "must be at least 1");
            }
            v.positive(&format!("{p}.linear.spacing_over_lambda"), *spacing_over_lambda);
            v.finite(&format!("{p}.linear.azimuth_deg"), *azimuth_deg);
            v.elevation(&format!("{p}.linear.elevation_deg"), *elevation_deg);
        }
        ArraySpec::Circular { n, radius_over_lambda } => {
            if *n == 0 {
                v.add(format!("{p}.circular.n"), "must be at least 1");
            }
            v.positive(&format!("{p}.circular.radius_over_lambda"), *radius_over_lambda);
        }
        ArraySpec::Planar {
            nx,
            ny,
            dx_over_lambda,
            dy_over_lambda,
        } => {
            if *nx == 0 || *ny == 0 {
                v.add(format!("{p}.planar"), "nx and ny must be at least 1");
            }
            v.positive(&format!("{p}.planar.dx_over_lambda"), *dx_over_lambda);
            v.positive(&format!("{p}.planar.dy_over_lambda"), *dy_over_lambda);
        }
        ArraySpec::Positions { positions, reference } => {
            v.nonempty(&format!("{p}.positions.positions"), positions);
            if *reference >= positions.len() && !positions.is_empty() {
                v.add(format!("{p}.positions.reference"), "index out of range");
            }
            for (i, q) in positions.iter().enumerate() {
                if q.iter().any(|x| !x.is_finite()) {
                    v.add(format!("{p}.positions.positions[{i}]"), "coordinates must be finite");
                }
            }
        }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn zero_list() -> Vec<f64> {
    vec![0.0]
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_carrier() -> f64 {
    10e9
}
fn default_elevation() -> f64 {
    20.0
}
fn default_widths() -> Vec<f64> {
    vec![2.0, 1.0, 0.5]
}
fn default_speeds() -> Vec<f64> {
    vec![40.0, 150.0]
}
fn default_validate_azimuth() -> f64 {
    30.0
}
fn default_validate_elevation() -> f64 {
    20.0
}
fn default_validate_kappa() -> Vec<f64> {
    vec![0.0, 1.0, 10.0, 100.0]
}
fn default_validate_beta() -> Vec<f64> {
    vec![0.0, 30.0, 60.0, 90.0]
}
fn default_validate_d() -> Grid {
    Grid::new(0.0, 3.0, 13)
}
fn default_agreement() -> f64 {
    1e-8
}
fn default_quad_abs() -> f64 {
    1e-12
}
fn default_quad_rel() -> f64 {
    1e-10
}
fn default_mc_paths() -> usize {
    64
}
