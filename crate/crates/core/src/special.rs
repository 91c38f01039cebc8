//! Special functions used by the correlation kernels.
//!
//! The closed-form correlation is a product `(κ / sinh κ) · sinc(√w)` where both
//! factors can leave the double-precision range long before their product does.
//! Everything here is therefore available in the log domain as well.

use num_complex::Complex64;

/// Below this modulus `sinc(√w)` is summed from its Taylor series in `w`.
pub const SERIES_THRESHOLD: f64 = 0.25;

// 0.25^10 / 21! ≈ 2e-26, far below one ulp of the leading term.
const SERIES_TERMS: usize = 10;

/// Above this real part of `s = √(-w)` the subdominant exponential of
/// `sinh s` is below `e^{-40}` and the log form is used.
const LOG_FORM_THRESHOLD: f64 = 20.0;

/// `sinc(√w) = Σ (-1)^k w^k / (2k+1)!`, an entire function of `w`.
///
/// The value does not depend on which square root of `w` is taken. For very
/// large `|Im √w|` (beyond roughly 700) the true value overflows and the
/// result is infinite; use [`ln_csinc_sqrt`] there.
pub fn csinc_sqrt(w: Complex64) -> Complex64 {
    if w.norm() <= SERIES_THRESHOLD {
        return csinc_sqrt_series(w);
    }
    // sinc is even and real on the real axis, so conjugating through keeps
    // the result exactly Hermitian in w.
    if w.im < 0.0 {
        return csinc_sqrt(w.conj()).conj();
    }
    let s = (-w).sqrt();
    if s.re < LOG_FORM_THRESHOLD {
        let z = w.sqrt();
        z.sin() / z
    } else {
        ln_sinhc(s).exp()
    }
}

/// Natural log of [`csinc_sqrt`], finite wherever the function is nonzero.
pub fn ln_csinc_sqrt(w: Complex64) -> Complex64 {
    if w.norm() <= SERIES_THRESHOLD {
        return csinc_sqrt_series(w).ln();
    }
    if w.im < 0.0 {
        return ln_csinc_sqrt(w.conj()).conj();
    }
    let s = (-w).sqrt();
    if s.re < LOG_FORM_THRESHOLD {
        let z = w.sqrt();
        (z.sin() / z).ln()
    } else {
        ln_sinhc(s)
    }
}

/// Power-series branch of [`csinc_sqrt`], exposed for consistency checks.
pub fn csinc_sqrt_series(w: Complex64) -> Complex64 {
    // Horner in w: 1 - w/3! (1 - w/(4·5) (1 - w/(6·7) (...)))
    let mut acc = Complex64::new(1.0, 0.0);
    for k in (1..=SERIES_TERMS).rev() {
        let denom = ((2 * k) * (2 * k + 1)) as f64;
        acc = Complex64::new(1.0, 0.0) - w * acc / denom;
    }
    acc
}

/// `ln(sinh s / s)` for `Re s ≥ 0` with `Re s` large enough that `e^{-2s}` is tiny.
///
/// Uses `sinh s / s = e^s (1 - e^{-2s}) / (2s)`.
pub(crate) fn ln_sinhc(s: Complex64) -> Complex64 {
    debug_assert!(s.re >= 0.0);
    s + (Complex64::new(1.0, 0.0) - (-2.0 * s).exp()).ln() - (2.0 * s).ln()
}

/// `ln sinh x` for `x > 0` without overflow.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > 1.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

/// `ln(κ / sinh κ)`, the log of the normalization shared by the density and
/// the correlation. Zero at `κ = 0` by continuous extension.
pub fn ln_kappa_over_sinh(kappa: f64) -> f64 {
    if kappa == 0.0 {
        0.0
    } else if kappa < 1e-4 {
        // κ/sinh κ = 1 - κ²/6 + 7κ⁴/360 - ...
        let k2 = kappa * kappa;
        (-k2 / 6.0 + 7.0 * k2 * k2 / 360.0).ln_1p()
    } else {
        kappa.ln() - ln_sinh(kappa)
    }
}

/// `ln(κ e^κ / sinh κ) = ln(2κ / (1 − e^{−2κ}))`: the log of the vMF
/// normalization with the peak exponential folded in. Zero at `κ = 0`.
pub fn ln_kappa_over_sinh_scaled(kappa: f64) -> f64 {
    if kappa == 0.0 {
        0.0
    } else {
        (2.0 * kappa).ln() - (-(-2.0 * kappa).exp_m1()).ln()
    }
}

/// Real `sin x / x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
