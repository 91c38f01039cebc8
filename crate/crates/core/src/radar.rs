//! Fluctuation of the echo from a moving radar target.
//!
//! The target is a vMF cluster of scatterers whose concentration follows from
//! the angular width it subtends at the radar. Geometry is frozen: elevation and
//! width are taken as constant over the correlation lags of interest.
//!
//! The mean direction of arrival points from the radar towards the target, at
//! azimuth zero. The correlation only depends on the relative motion, which is
//! the radar moving with `−v` past a static target; a receding target therefore
//! has a negative mean Doppler shift.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::correlation::{acf, decorrelation_time, DecorrelationOptions, MotionState};
use crate::error::{Error, Result};
use crate::vmf::{kappa_from_angular_width, VmfCluster};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarScenario {
    /// Hz.
    pub carrier_frequency: f64,
    /// Elevation of the target seen from the radar, radians.
    pub target_elevation: f64,
    /// Angular width `Δθ` of the target seen from the radar, radians.
    pub target_angular_width: f64,
    /// m/s.
    pub target_speed: f64,
    /// Azimuth of the (horizontal) target velocity relative to the line of
    /// sight; zero is straight away from the radar.
    pub motion_azimuth: f64,
    pub monostatic: bool,
}

impl RadarScenario {
    /// Horizontal receding target observed by a monostatic radar.
    pub fn receding(
        carrier_frequency: f64,
        target_elevation: f64,
        target_angular_width: f64,
        target_speed: f64,
    ) -> Self {
        RadarScenario {
            carrier_frequency,
            target_elevation,
            target_angular_width,
            target_speed,
            motion_azimuth: 0.0,
            monostatic: true,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency.is_finite() && self.carrier_frequency > 0.0) {
            return Err(Error::domain(
                "carrier_frequency",
                self.carrier_frequency,
                "frequency > 0",
            ));
        }
        if !(self.target_angular_width > 0.0 && self.target_angular_width < PI) {
            return Err(Error::domain(
                "target_angular_width",
                self.target_angular_width,
                "0 < angular width < pi",
            ));
        }
        if !(self.target_speed.is_finite() && self.target_speed >= 0.0) {
            return Err(Error::domain("target_speed", self.target_speed, "speed >= 0"));
        }
        if !self.motion_azimuth.is_finite() {
            return Err(Error::domain("motion_azimuth", self.motion_azimuth, "finite azimuth"));
        }
        Ok(())
    }
}

/// Cluster, relative motion and wavelength describing `scenario`.
pub fn scenario_to_cluster_and_motion(scenario: &RadarScenario) -> Result<(VmfCluster, MotionState, f64)> {
    scenario.validate()?;
    let kappa = kappa_from_angular_width(scenario.target_angular_width)?;
    let cluster = VmfCluster::single(0.0, scenario.target_elevation, kappa)?;
    let motion = MotionState::new(scenario.target_speed, scenario.motion_azimuth + PI, 0.0)?;
    Ok((cluster, motion, scenario.wavelength()))
}

/// `(Δt, |ACF(Δt)|)` over a sorted, nonnegative grid of time offsets.
pub fn radar_acf_curve(scenario: &RadarScenario, dt_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = dt_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::domain("dt", bad, "finite dt >= 0"));
    }
    if dt_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("dt", f64::NAN, "sorted grid"));
    }
    let (cluster, motion, wavelength) = scenario_to_cluster_and_motion(scenario)?;
    dt_grid
        .iter()
        .map(|&dt| Ok((dt, acf(&cluster, &motion, dt, wavelength, scenario.monostatic)?.norm())))
        .collect()
}

/// Complex ACF of the scenario at one offset.
pub fn radar_acf(scenario: &RadarScenario, dt: f64) -> Result<Complex64> {
    let (cluster, motion, wavelength) = scenario_to_cluster_and_motion(scenario)?;
    acf(&cluster, &motion, dt, wavelength, scenario.monostatic)
}

/// Time for the echo of `scenario` to decorrelate to `threshold`.
pub fn radar_decorrelation_time(scenario: &RadarScenario, threshold: f64) -> Result<f64> {
    let (cluster, motion, wavelength) = scenario_to_cluster_and_motion(scenario)?;
    let options = DecorrelationOptions {
        threshold,
        ..Default::default()
    };
    decorrelation_time(&cluster, &motion, wavelength, scenario.monostatic, &options)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecorrelationEntry {
    /// radians
    pub width: f64,
    /// m/s
    pub speed: f64,
    /// seconds
    pub time: f64,
}

/// Decorrelation time for every `(width, speed)` pair, widths outermost.
pub fn decorrelation_table(
    widths: &[f64],
    speeds: &[f64],
    base: &RadarScenario,
    threshold: f64,
) -> Result<Vec<DecorrelationEntry>> {
    if widths.is_empty() || speeds.is_empty() {
        return Err(Error::domain("table", 0.0, "nonempty width and speed lists"));
    }
    let cells: Vec<(f64, f64)> = widths
        .iter()
        .flat_map(|&w| speeds.iter().map(move |&s| (w, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(width, speed)| {
            let scenario = RadarScenario {
                target_angular_width: width,
                target_speed: speed,
                ..*base
            };
            Ok(DecorrelationEntry {
                width,
                speed,
                time: radar_decorrelation_time(&scenario, threshold)?,
            })
        })
        .collect()
}
