//! Von Mises-Fisher directional statistics on the unit sphere.
//!
//! Directions are parameterized by azimuth `phi` and elevation `psi` (radians),
//! mapping to the unit vector `(cos φ cos ψ, sin φ cos ψ, sin ψ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::special::ln_kappa_over_sinh_scaled;

/// Slack allowed on `|psi| ≤ π/2` so that angles recovered with `asin` pass.
const ELEVATION_SLACK: f64 = 1e-12;

fn check_elevation(name: &'static str, psi: f64) -> Result<()> {
    if psi.is_finite() && psi.abs() <= FRAC_PI_2 + ELEVATION_SLACK {
        Ok(())
    } else {
        Err(Error::domain(name, psi, "|elevation| <= pi/2"))
    }
}

/// A unit direction vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vector3<f64>);

impl Direction {
    pub fn from_angles(phi: f64, psi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::domain("phi", phi, "finite azimuth"));
        }
        check_elevation("psi", psi)?;
        let (sp, cp) = phi.sin_cos();
        let (ss, cs) = psi.sin_cos();
        Ok(Direction(Vector3::new(cp * cs, sp * cs, ss)))
    }

    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Degenerate("direction from zero or non-finite vector"));
        }
        Ok(Direction(v / n))
    }

    pub fn x() -> Self {
        Direction(Vector3::x())
    }

    pub fn y() -> Self {
        Direction(Vector3::y())
    }

    pub fn z() -> Self {
        Direction(Vector3::z())
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// `(phi, psi)` with `phi` in `(-π, π]`.
    pub fn angles(&self) -> (f64, f64) {
        let v = &self.0;
        (v.y.atan2(v.x), v.z.clamp(-1.0, 1.0).asin())
    }

    pub fn dot(&self, v: &Vector3<f64>) -> f64 {
        self.0.dot(v)
    }
}

/// Equivalent of [`Direction::from_angles`] as a free function.
pub fn direction_from_angles(phi: f64, psi: f64) -> Result<Direction> {
    Direction::from_angles(phi, psi)
}

/// One cluster of vMF-distributed scatterers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmfCluster {
    mu_phi: f64,
    mu_psi: f64,
    kappa: f64,
    power: f64,
}

impl VmfCluster {
    pub fn new(mu_phi: f64, mu_psi: f64, kappa: f64, power: f64) -> Result<Self> {
        if !mu_phi.is_finite() {
            return Err(Error::domain("mu_phi", mu_phi, "finite azimuth"));
        }
        check_elevation("mu_psi", mu_psi)?;
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::domain("kappa", kappa, "kappa >= 0"));
        }
        if !(power.is_finite() && power > 0.0 && power <= 1.0) {
            return Err(Error::domain("power", power, "0 < power <= 1"));
        }
        Ok(VmfCluster {
            mu_phi,
            mu_psi,
            kappa,
            power,
        })
    }

    /// A unit-power cluster.
    pub fn single(mu_phi: f64, mu_psi: f64, kappa: f64) -> Result<Self> {
        Self::new(mu_phi, mu_psi, kappa, 1.0)
    }

    /// A unit-power cluster centered on `mean`.
    pub fn around(mean: Direction, kappa: f64) -> Result<Self> {
        let (phi, psi) = mean.angles();
        Self::single(phi, psi, kappa)
    }

    pub fn with_power(self, power: f64) -> Result<Self> {
        Self::new(self.mu_phi, self.mu_psi, self.kappa, power)
    }

    pub fn mu_phi(&self) -> f64 {
        self.mu_phi
    }

    pub fn mu_psi(&self) -> f64 {
        self.mu_psi
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Mean direction of arrival.
    pub fn mean_direction(&self) -> Direction {
        // angles were validated on construction
        Direction::from_angles(self.mu_phi, self.mu_psi).expect("validated cluster angles")
    }

    /// Orthonormal `(e_phi, e_psi, k_mu)` frame attached to the mean direction.
    pub fn frame(&self) -> [Vector3<f64>; 3] {
        let (sp, cp) = self.mu_phi.sin_cos();
        let (ss, cs) = self.mu_psi.sin_cos();
        [
            Vector3::new(-sp, cp, 0.0),
            Vector3::new(-cp * ss, -sp * ss, cs),
            Vector3::new(cp * cs, sp * cs, ss),
        ]
    }
}

/// Natural log of the vMF density over `(φ, ψ)`, including the `cos ψ` area factor.
///
/// `-inf` at the poles, where the density vanishes.
pub fn ln_vmf_pdf(cluster: &VmfCluster, phi: f64, psi: f64) -> Result<f64> {
    let dir = Direction::from_angles(phi, psi)?;
    // κ (cos θ − 1) = −κ ‖k̂ − k̂_μ‖² / 2, without cancellation near the peak
    let gap = (dir.as_vector() - cluster.mean_direction().as_vector()).norm_squared();
    let ln_peak = ln_kappa_over_sinh_scaled(cluster.kappa) - (4.0 * PI).ln();
    Ok(ln_peak - 0.5 * cluster.kappa * gap + psi.cos().max(0.0).ln())
}

/// vMF density `κ cos ψ / (4π sinh κ) · exp(κ k̂_μ·k̂)` at `(phi, psi)`.
///
/// Integrates to one over `φ ∈ [-π, π]`, `ψ ∈ [-π/2, π/2]`.
pub fn vmf_pdf(cluster: &VmfCluster, phi: f64, psi: f64) -> Result<f64> {
    ln_vmf_pdf(cluster, phi, psi).map(f64::exp)
}

/// `A(κ) = coth κ - 1/κ`, the expected length of the vMF mean resultant in 3-D.
pub fn mean_resultant_length(kappa: f64) -> f64 {
    if kappa < 1e-3 {
        // κ/3 - κ³/45
        kappa / 3.0 - kappa.powi(3) / 45.0
    } else {
        1.0 / kappa.tanh() - 1.0 / kappa
    }
}

/// Width of the angle `Δθ` subtended by a target mapped to a concentration.
///
/// The density falls to `e^{-2}` of its peak at `Δθ/2` from the mean.
pub fn kappa_from_angular_width(delta_theta: f64) -> Result<f64> {
    if !(delta_theta > 0.0 && delta_theta < 2.0 * PI) {
        return Err(Error::domain("delta_theta", delta_theta, "0 < angular width < 2 pi"));
    }
    // 1 - cos(x) = 2 sin²(x/2), accurate for small widths
    let half = (delta_theta / 4.0).sin();
    Ok(1.0 / (half * half))
}

/// Exact vMF sampler: inverse CDF along the mean axis, uniform tangent angle.
#[derive(Debug, Clone)]
pub struct VmfSampler {
    kappa: f64,
    // expm1(-2κ), so that w = 1 + ln(1 + s·expm1(-2κ)) / κ
    expm1_neg_2k: f64,
    frame: [Vector3<f64>; 3],
}

impl VmfSampler {
    pub fn new(cluster: &VmfCluster) -> Self {
        VmfSampler {
            kappa: cluster.kappa,
            expm1_neg_2k: (-2.0 * cluster.kappa).exp_m1(),
            frame: cluster.frame(),
        }
    }

    /// Cosine of the angle to the mean direction from a uniform `s ∈ [0, 1)`.
    fn axial(&self, s: f64) -> f64 {
        let w = if self.kappa == 0.0 {
            1.0 - 2.0 * s
        } else {
            1.0 + (s * self.expm1_neg_2k).ln_1p() / self.kappa
        };
        w.clamp(-1.0, 1.0)
    }
}

impl Distribution<Direction> for VmfSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Direction {
        let w = self.axial(rng.random::<f64>());
        let alpha = 2.0 * PI * rng.random::<f64>();
        let t = (1.0 - w * w).max(0.0).sqrt();
        let (sa, ca) = alpha.sin_cos();
        let [e1, e2, mu] = &self.frame;
        let v = e1 * (t * ca) + e2 * (t * sa) + mu * w;
        // already unit up to rounding; renormalize to keep the invariant tight
        Direction(v / v.norm())
    }
}

/// `n` directions drawn from `cluster`, deterministic in `seed`.
pub fn sample_vmf(cluster: &VmfCluster, n: usize, seed: u64) -> Result<Vec<Direction>> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    let sampler = VmfSampler::new(cluster);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}

/// Mean vector of a set of directions; its norm is the mean resultant length.
pub fn resultant(dirs: &[Direction]) -> Vector3<f64> {
    let sum = dirs.iter().fold(Vector3::zeros(), |acc, d| acc + d.as_vector());
    sum / dirs.len() as f64
}
