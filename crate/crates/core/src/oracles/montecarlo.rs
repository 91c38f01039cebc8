//! Monte-Carlo ensembles of the narrowband multipath channel
//!
//! ```text
//! H(Δr) = Σ_n A_n exp(j φ_n) exp(j k k̂_n·Δr)
//! ```
//!
//! with vMF-distributed arrival directions, equal amplitudes and uniform
//! initial phases. Every random draw is addressed by `(seed, realization,
//! path)`, so a realization can be rebuilt on its own and the estimate does
//! not depend on how realizations are scheduled across threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlation::Displacement;
use crate::error::{Error, Result};
use crate::vmf::{Direction, VmfCluster, VmfSampler};

/// Fewest paths accepted by [`build_ensemble`].
pub const MIN_PATHS: usize = 10;

/// Fewest realizations accepted by [`scf_montecarlo`].
pub const MIN_REALIZATIONS: usize = 100;

// three f64 draws per path, two 32-bit words each
const WORDS_PER_PATH: u128 = 6;

/// One realization of the multipath channel.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathEnsemble {
    amplitudes: Vec<f64>,
    doas: Vec<Direction>,
    phases: Vec<f64>,
    seed: u64,
}

impl MultipathEnsemble {
    /// Assembles an ensemble from explicit paths. Amplitudes must have unit
    /// total power.
    pub fn from_parts(amplitudes: Vec<f64>, doas: Vec<Direction>, phases: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.len() != doas.len() || doas.len() != phases.len() {
            return Err(Error::domain(
                "n_paths",
                amplitudes.len() as f64,
                "matching nonempty path lists",
            ));
        }
        let power: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (power - 1.0).abs() > 1e-12 {
            return Err(Error::Normalization { sum: power });
        }
        Ok(MultipathEnsemble {
            amplitudes,
            doas,
            phases,
            seed: 0,
        })
    }

    pub fn n_paths(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn doas(&self) -> &[Direction] {
        &self.doas
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn realization(sampler: &VmfSampler, n_paths: usize, seed: u64, index: u64) -> MultipathEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let amplitude = (n_paths as f64).recip().sqrt();
    let mut doas = Vec::with_capacity(n_paths);
    let mut phases = Vec::with_capacity(n_paths);
    for path in 0..n_paths {
        rng.set_word_pos(path as u128 * WORDS_PER_PATH);
        doas.push(sampler.sample(&mut rng));
        phases.push(2.0 * PI * rng.random::<f64>());
    }
    MultipathEnsemble {
        amplitudes: vec![amplitude; n_paths],
        doas,
        phases,
        seed,
    }
}

/// Draws one channel realization with `n_paths` equal-power paths.
pub fn build_ensemble(cluster: &VmfCluster, n_paths: usize, seed: u64) -> Result<MultipathEnsemble> {
    if n_paths < MIN_PATHS {
        return Err(Error::domain("n_paths", n_paths as f64, "n_paths >= 10"));
    }
    Ok(realization(&VmfSampler::new(cluster), n_paths, seed, 0))
}

/// Channel transfer function of `ensemble` at offset `dr` from the reference point.
pub fn transfer_function(ensemble: &MultipathEnsemble, dr: &Displacement, wavelength: f64) -> Complex64 {
    let kd = dr.as_vector() * (2.0 * PI / wavelength);
    ensemble
        .amplitudes
        .iter()
        .zip(&ensemble.doas)
        .zip(&ensemble.phases)
        .map(|((&a, k_hat), &phase)| Complex64::from_polar(a, phase + k_hat.dot(&kd)))
        .sum()
}

/// Sample mean of `H*(0) H(d)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: Complex64,
    pub std_error: f64,
}

/// Estimates the SCF by averaging `H*(0) H(d)` over independent realizations.
pub fn scf_montecarlo(
    cluster: &VmfCluster,
    d: &Displacement,
    wavelength: f64,
    n_paths: usize,
    n_realizations: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n_paths < MIN_PATHS {
        return Err(Error::domain("n_paths", n_paths as f64, "n_paths >= 10"));
    }
    if n_realizations < MIN_REALIZATIONS {
        return Err(Error::domain(
            "n_realizations",
            n_realizations as f64,
            "n_realizations >= 100",
        ));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "wavelength > 0"));
    }
    let sampler = VmfSampler::new(cluster);
    let origin = Displacement::zero();
    let products: Vec<Complex64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            let ens = realization(&sampler, n_paths, seed, r);
            transfer_function(&ens, &origin, wavelength).conj() * transfer_function(&ens, d, wavelength)
        })
        .collect();
    let n = n_realizations as f64;
    let mean: Complex64 = products.iter().sum::<Complex64>() / n;
    let var = products.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_power_and_determinism() {
        let c = VmfCluster::single(0.2, 0.1, 3.0).unwrap();
        let e = build_ensemble(&c, 10, 5).unwrap();
        let p: f64 = e.amplitudes().iter().map(|a| a * a).sum();
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(e, build_ensemble(&c, 10, 5).unwrap());
        assert_ne!(e, build_ensemble(&c, 10, 6).unwrap());
        assert!(e.phases().iter().all(|&p| (0.0..2.0 * PI).contains(&p)));
        assert!(build_ensemble(&c, 9, 5).is_err());
    }

    #[test]
    fn paths_are_addressed_independently() {
        // path n of a realization does not depend on how many paths follow it
        let s = VmfSampler::new(&VmfCluster::single(0.0, 0.0, 2.0).unwrap());
        let short = realization(&s, 12, 3, 7);
        let long = realization(&s, 40, 3, 7);
        assert_eq!(short.doas(), &long.doas()[..12]);
        assert_eq!(short.phases(), &long.phases()[..12]);
    }

    #[test]
    fn transfer_at_origin_is_phasor_sum() {
        let c = VmfCluster::single(0.0, 0.0, 1.0).unwrap();
        let e = build_ensemble(&c, 16, 1).unwrap();
        let want: Complex64 = e.phases().iter().map(|&p| Complex64::from_polar(0.25, p)).sum();
        assert!((transfer_function(&e, &Displacement::zero(), 1.0) - want).norm() < 1e-15);
    }

    #[test]
    fn single_path_half_wavelength() {
        let e = MultipathEnsemble::from_parts(vec![1.0], vec![Direction::x()], vec![0.0]).unwrap();
        let h = transfer_function(&e, &Displacement::new(0.5, 0.0, 0.0), 1.0);
        assert!((h - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn from_parts_validation() {
        assert!(MultipathEnsemble::from_parts(vec![0.5], vec![Direction::x()], vec![0.0]).is_err());
        assert!(MultipathEnsemble::from_parts(vec![1.0], vec![], vec![0.0]).is_err());
    }

    #[test]
    fn estimator_arguments() {
        let c = VmfCluster::single(0.0, 0.0, 1.0).unwrap();
        let d = Displacement::zero();
        assert!(scf_montecarlo(&c, &d, 1.0, 9, 100, 0).is_err());
        assert!(scf_montecarlo(&c, &d, 1.0, 10, 99, 0).is_err());
        assert!(scf_montecarlo(&c, &d, 0.0, 10, 100, 0).is_err());
    }

    #[test]
    fn estimate_is_reproducible() {
        let c = VmfCluster::single(0.5, 0.0, 4.0).unwrap();
        let d = Displacement::new(0.2, 0.1, 0.0);
        let a = scf_montecarlo(&c, &d, 1.0, 16, 500, 11).unwrap();
        let b = scf_montecarlo(&c, &d, 1.0, 16, 500, 11).unwrap();
        assert_eq!(a, b);
    }
}
