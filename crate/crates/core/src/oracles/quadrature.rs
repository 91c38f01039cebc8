//! Adaptive Gauss-Kronrod (G7/K15) quadrature of the SCF integral
//!
//! ```text
//! R(d) = ∫∫ p(φ, ψ) exp(j k k̂(φ, ψ)·d) dφ dψ
//! ```
//!
//! nested with elevation outside and azimuth inside. For `κ > 100` the
//! integral is taken in a frame centered on the mean direction and truncated
//! where the density has fallen below `1e-18` of its peak.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::correlation::Displacement;
use crate::error::{Error, Result};
use crate::special::{ln_kappa_over_sinh, ln_kappa_over_sinh_scaled};
use crate::vmf::{ln_vmf_pdf, VmfCluster};

/// Largest concentration the quadrature oracle accepts.
pub const MAX_KAPPA: f64 = 1e4;

/// Above this concentration the integral is taken in the mean-direction frame.
const RECENTER_KAPPA: f64 = 100.0;

/// `ln 1e18`: polar angle cut-off where `exp(−κ(1 − cos θ))` drops below 1e-18.
const TRUNCATION_LOG: f64 = 41.446_531_673_892_82;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    fn check(&self) -> Result<()> {
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(Error::domain("abs_tol", self.abs_tol, "abs_tol > 0"));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::domain("rel_tol", self.rel_tol, "rel_tol > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions", 0.0, "at least one panel"));
        }
        Ok(())
    }

    /// Tolerances for an inner integral nested in an outer range of `length`,
    /// so that the inner errors summed over the outer range stay a tenth of
    /// the outer target.
    fn inner(&self, length: f64) -> Self {
        QuadratureSpec {
            abs_tol: self.abs_tol * 0.1 / length,
            rel_tol: self.rel_tol * 0.1,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub error: f64,
}

// Kronrod abscissae (descending, the last is the midpoint) and weights;
// odd indices are also the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

/// Integrand sample: value, its own error estimate, and the magnitude used
/// to scale relative tolerances (`|f|`, or `∫|f|` for a nested integral).
type Sample = (Complex64, f64, f64);

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One K15 panel. The integrand's own error estimate is folded into the
/// panel error with the Kronrod weights.
fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, ec, mc) = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut inner_err = ec * WGK[7];
    let mut magnitude = mc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, e1, m1) = f(center - dx)?;
        let (f2, e2, m2) = f(center + dx)?;
        kronrod += (f1 + f2) * WGK[j];
        inner_err += (e1 + e2) * WGK[j];
        magnitude += (m1 + m2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm() + inner_err * half.abs(),
        magnitude: magnitude * half.abs(),
    })
}

fn leaf(value: Complex64) -> Result<Sample> {
    Ok((value, 0.0, value.norm()))
}

/// Globally adaptive integration of a complex integrand over the given
/// breakpoints, always bisecting the panel with the largest error.
///
/// The relative tolerance applies to `∫|f|` rather than `|∫f|`, otherwise an
/// oscillatory integral that cancels to zero could never meet it.
fn integrate<F>(mut f: F, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<Sample>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod_panel(&mut f, w[0], w[1])?);
        }
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, m), p| {
            (v + p.value, e + p.error, m + p.magnitude)
        })
    };
    let mut panels = heap.len();
    loop {
        let (value, error, magnitude) = totals(&heap);
        let target = spec.abs_tol.max(spec.rel_tol * magnitude);
        if error <= target {
            return Ok((value, error, magnitude));
        }
        if panels >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                achieved: error,
                requested: target,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel can no longer be split in floating point
            return Err(Error::ToleranceNotMet {
                achieved: error,
                requested: target,
            });
        }
        heap.push(kronrod_panel(&mut f, worst.a, mid)?);
        heap.push(kronrod_panel(&mut f, mid, worst.b)?);
        panels += 1;
    }
}

fn check_cluster(cluster: &VmfCluster) -> Result<()> {
    if cluster.kappa() > MAX_KAPPA {
        return Err(Error::domain("kappa", cluster.kappa(), "kappa <= 1e4 for quadrature"));
    }
    Ok(())
}

/// Numerical value of the SCF from its defining double integral.
pub fn scf_quadrature(
    cluster: &VmfCluster,
    d: &Displacement,
    wavelength: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate> {
    spec.check()?;
    check_cluster(cluster)?;
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "wavelength > 0"));
    }
    let kd = d.as_vector() * (2.0 * PI / wavelength);
    if cluster.kappa() > RECENTER_KAPPA {
        centered_integral(cluster, &kd, spec)
    } else {
        angular_integral(cluster, &kd, spec)
    }
}

/// Elevation-outer, azimuth-inner integral over the whole sphere, with
/// breakpoints at the mean direction.
fn angular_integral(cluster: &VmfCluster, kd: &Vector3<f64>, spec: &QuadratureSpec) -> Result<QuadratureEstimate> {
    let kappa = cluster.kappa();
    let ln_norm = ln_kappa_over_sinh(kappa) - (4.0 * PI).ln();
    let mean = cluster.mean_direction();
    let m = *mean.as_vector();
    let (mu_phi, mu_psi) = (cluster.mu_phi(), cluster.mu_psi());
    let inner_spec = spec.inner(PI);
    let phi_breaks = [mu_phi - PI, mu_phi, mu_phi + PI];
    let outer = |psi: f64| -> Result<Sample> {
        let (sps, cps) = psi.sin_cos();
        if cps <= 0.0 {
            return leaf(Complex64::new(0.0, 0.0));
        }
        let inner = |phi: f64| {
            let (sph, cph) = phi.sin_cos();
            let k_hat = Vector3::new(cph * cps, sph * cps, sps);
            let density = (ln_norm + kappa * m.dot(&k_hat)).exp() * cps;
            leaf(Complex64::from_polar(density, kd.dot(&k_hat)))
        };
        integrate(inner, &phi_breaks, &inner_spec)
    };
    estimate(integrate(outer, &[-FRAC_PI_2, mu_psi, FRAC_PI_2], spec)?)
}

fn estimate((value, error, _): Sample) -> Result<QuadratureEstimate> {
    Ok(QuadratureEstimate { value, error })
}

/// Integral over polar angle θ from the mean direction and azimuth α around it.
fn centered_integral(cluster: &VmfCluster, kd: &Vector3<f64>, spec: &QuadratureSpec) -> Result<QuadratureEstimate> {
    let kappa = cluster.kappa();
    let ln_peak = ln_kappa_over_sinh_scaled(kappa) - (4.0 * PI).ln();
    let half_sin = (TRUNCATION_LOG / (2.0 * kappa)).sqrt();
    let theta_max = if half_sin >= 1.0 { PI } else { 2.0 * half_sin.asin() };
    // mass beyond theta_max, bounded by e^{−κ(1 − cos θ_max)} / (1 − e^{−2κ})
    let truncation = if theta_max < PI {
        (-TRUNCATION_LOG).exp() / (-(-2.0 * kappa).exp()).ln_1p().exp()
    } else {
        0.0
    };
    let [e1, e2, m] = cluster.frame();
    let inner_spec = spec.inner(theta_max);
    let outer = |theta: f64| -> Result<Sample> {
        let (st, ct) = theta.sin_cos();
        let h = (theta * 0.5).sin();
        let weight = (ln_peak - 2.0 * kappa * h * h).exp() * st;
        if weight == 0.0 {
            return leaf(Complex64::new(0.0, 0.0));
        }
        let axial = m * ct;
        let inner = |alpha: f64| {
            let (sa, ca) = alpha.sin_cos();
            let k_hat = axial + (e1 * ca + e2 * sa) * st;
            leaf(Complex64::from_polar(weight, kd.dot(&k_hat)))
        };
        integrate(inner, &[0.0, PI, 2.0 * PI], &inner_spec)
    };
    let (value, error, _) = integrate(outer, &[0.0, theta_max], spec)?;
    Ok(QuadratureEstimate {
        value,
        error: error + truncation,
    })
}

/// Total probability mass of the vMF density over the full angle domain.
pub fn pdf_mass(cluster: &VmfCluster, spec: &QuadratureSpec) -> Result<QuadratureEstimate> {
    spec.check()?;
    let (mu_phi, mu_psi) = (cluster.mu_phi(), cluster.mu_psi());
    let inner_spec = spec.inner(PI);
    let outer = |psi: f64| {
        let inner = |phi: f64| leaf(Complex64::from(ln_vmf_pdf(cluster, phi, psi)?.exp()));
        integrate(inner, &[mu_phi - PI, mu_phi, mu_phi + PI], &inner_spec)
    };
    estimate(integrate(outer, &[-FRAC_PI_2, mu_psi, FRAC_PI_2], spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        // K15 is exact through degree 22
        let f = |x: f64| leaf(Complex64::new(x.powi(20), -x.powi(3)));
        let (value, _, _) = integrate(f, &[0.0, 1.0], &QuadratureSpec::default()).unwrap();
        assert!((value - Complex64::new(1.0 / 21.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| leaf(Complex64::from((-1e4 * (x - 0.3).powi(2)).exp()));
        let (value, _, _) = integrate(f, &[0.0, 1.0], &QuadratureSpec::default()).unwrap();
        assert!((value.re - (PI / 1e4).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cancelling_integral_converges() {
        // ∫ sin over a full period is zero, so only ∫|f| can scale the target
        let spec = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_subdivisions: 200,
        };
        let f = |x: f64| leaf(Complex64::from(x.sin()));
        let (value, _, magnitude) = integrate(f, &[0.0, PI, 2.0 * PI], &spec).unwrap();
        assert!(value.norm() < 1e-13, "{value} {magnitude}");
        assert!((magnitude - 4.0).abs() < 1e-10, "{magnitude}");
    }

    #[test]
    fn tolerance_failure_reports_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 2,
            ..Default::default()
        };
        let f = |x: f64| leaf(Complex64::from((50.0 * x).sin() * (-x).exp()));
        match integrate(f, &[0.0, 20.0], &spec) {
            Err(Error::ToleranceNotMet { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let c = VmfCluster::single(0.0, 0.0, 1.0).unwrap();
        let d = Displacement::zero();
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(scf_quadrature(&c, &d, 1.0, &bad).is_err());
        let big = VmfCluster::single(0.0, 0.0, 2e4).unwrap();
        assert!(scf_quadrature(&big, &d, 1.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn isotropic_zero() {
        let c = VmfCluster::single(0.3, 0.2, 0.0).unwrap();
        let est = scf_quadrature(&c, &Displacement::new(0.0, 0.0, 0.5), 1.0, &QuadratureSpec::default()).unwrap();
        assert!(est.value.norm() < 1e-10);
    }

    #[test]
    fn zero_displacement_is_normalized() {
        for k in [0.0, 1.0, 50.0, 150.0, 5000.0, 1e4] {
            let c = VmfCluster::single(-1.0, 0.9, k).unwrap();
            let est = scf_quadrature(&c, &Displacement::zero(), 1.0, &QuadratureSpec::default()).unwrap();
            assert!(
                (est.value - Complex64::new(1.0, 0.0)).norm() < 1e-10,
                "kappa {k}: {}",
                est.value
            );
        }
    }

    #[test]
    fn frozen_reference_value() {
        let c = VmfCluster::single(0.0, 0.0, 10.0).unwrap();
        let est = scf_quadrature(&c, &Displacement::new(1.0, 0.0, 0.0), 1.0, &QuadratureSpec::default()).unwrap();
        let want = Complex64::new(0.716_956_800_324_897_8, -0.450_477_243_368_388_6);
        assert!((est.value - want).norm() < 1e-10, "{}", est.value);
    }

    #[test]
    fn both_frames_agree_at_the_switch() {
        // the literal and the re-centered integrals are independent code paths
        let c = VmfCluster::single(0.8, -0.4, 100.0).unwrap();
        let d = Displacement::new(0.3, 0.9, -0.2);
        let kd = d.as_vector() * (2.0 * PI);
        let spec = QuadratureSpec::default();
        let a = angular_integral(&c, &kd, &spec).unwrap().value;
        let b = centered_integral(&c, &kd, &spec).unwrap().value;
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn density_normalization() {
        for k in [0.0, 1.0, 10.0, 100.0, 1000.0] {
            let c = VmfCluster::single(2.0, 0.5, k).unwrap();
            let est = pdf_mass(&c, &QuadratureSpec::default()).unwrap();
            assert!((est.value.re - 1.0).abs() < 1e-9, "kappa {k}: {}", est.value.re);
        }
    }
}
