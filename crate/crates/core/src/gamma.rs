//! Complex gamma-family kernels: log-gamma with pole flag, reciprocal
//! gamma, gamma, and the Pochhammer symbol.
//!
//! Gamma uses the Lanczos approximation with g = 607/128 and fifteen
//! coefficients on `Re(z) >= 0.5`; the left half-plane goes through the
//! reflection formula with an overflow-free `log(sin(pi z))`. On the
//! positive real axis `gamma`, `rgamma` and `pochhammer` use a double-double
//! Stirling sum instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::complex::{real, ComplexValue, ONE, ZERO};
use crate::dd::{self, Dd};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
/// ln(2 pi) / 2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance below which a point counts as sitting on a gamma pole.
pub const POLE_TOL: f64 = 1e-12;

/// ln Γ(z) split into modulus and phase. The phase is only meaningful
/// modulo 2π; every consumer exponentiates it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGammaValue {
    pub log_modulus: f64,
    pub phase: f64,
    pub is_pole: bool,
}

impl LogGammaValue {
    const POLE: LogGammaValue = LogGammaValue {
        log_modulus: f64::INFINITY,
        phase: 0.0,
        is_pole: true,
    };

    fn from_log(w: Complex64) -> Self {
        LogGammaValue {
            log_modulus: w.re,
            phase: w.im,
            is_pole: false,
        }
    }

    /// `log_modulus + i·phase`; infinite real part at a pole.
    pub fn as_log(&self) -> Complex64 {
        Complex64::new(self.log_modulus, self.phase)
    }

    /// Γ(z) itself (infinite at a pole).
    pub fn exp(&self) -> Complex64 {
        if self.is_pole {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            Complex64::from_polar(self.log_modulus.exp(), self.phase)
        }
    }
}

/// True when `z` is within [`POLE_TOL`] of 0, -1, -2, ...
pub fn is_pole(z: ComplexValue) -> bool {
    z.im.abs() < POLE_TOL && z.re < 0.5 && (z.re - z.re.round()).abs() < POLE_TOL
}

/// Shift `z` by an even integer so the real part lies in [-1, 1]; sin(πz)
/// is unchanged and π·z loses no digits to the large real part.
fn reduce_even(z: Complex64) -> Complex64 {
    let k = 2.0 * (z.re / 2.0).round();
    Complex64::new(z.re - k, z.im)
}

/// log(sin(πz)) without overflowing for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = reduce_even(z) * PI;
    if w.im.abs() < 1.0 {
        return w.sin().ln();
    }
    let i = Complex64::i();
    if w.im > 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) · i/2
        -i * w + Complex64::new(0.0, 0.5).ln() + (ONE - (i * w * 2.0).exp()).ln()
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + Complex64::new(0.0, -0.5).ln() + (ONE - (-i * w * 2.0).exp()).ln()
    }
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    // Γ(z) = sqrt(2π) t^{z-1/2} e^{-t} A(z),  t = z + g - 1/2
    let zm1 = z - 1.0;
    let mut sum = real(LANCZOS_COEF[0]);
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += *c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    HALF_LN_2PI + (zm1 + 0.5) * t.ln() - t + sum.ln()
}

/// ln Γ(z) for any finite complex `z`. Poles are reported through
/// `is_pole`, never as an error.
pub fn log_gamma(z: ComplexValue) -> LogGammaValue {
    if is_pole(z) {
        return LogGammaValue::POLE;
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let w = PI.ln() - ln_sin_pi(z) - lanczos_ln_gamma(ONE - z);
        LogGammaValue::from_log(w)
    } else {
        LogGammaValue::from_log(lanczos_ln_gamma(z))
    }
}

/// Γ(z); infinite at poles.
pub fn gamma(z: ComplexValue) -> ComplexValue {
    if z.im == 0.0 && z.re > 0.0 && z.re <= 20.0 && z.re.fract() == 0.0 {
        return real(factorial(z.re as usize - 1));
    }
    if z.im == 0.0 {
        if let Some(l) = dd::ln_gamma_f64(z.re) {
            return real(l.exp_f64());
        }
    }
    log_gamma(z).exp()
}

/// 1/Γ(z), an entire function: exactly zero on the poles of Γ.
pub fn rgamma(z: ComplexValue) -> ComplexValue {
    if z.im == 0.0 {
        if let Some(l) = dd::ln_gamma_f64(z.re) {
            return real((-l).exp_f64());
        }
    }
    let lg = log_gamma(z);
    if lg.is_pole {
        ZERO
    } else {
        Complex64::from_polar((-lg.log_modulus).exp(), -lg.phase)
    }
}

/// n! for small n, exact up to 22!.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Largest integer order evaluated as an explicit rising product.
pub const POCHHAMMER_PRODUCT_MAX: usize = 64;

fn as_nonneg_integer(nu: ComplexValue) -> Option<usize> {
    if nu.im == 0.0 && nu.re >= 0.0 && nu.re.fract() == 0.0 && nu.re <= usize::MAX as f64 {
        Some(nu.re as usize)
    } else {
        None
    }
}

fn as_integer(nu: ComplexValue) -> Option<i64> {
    if nu.im == 0.0 && nu.re.fract() == 0.0 && nu.re.abs() < 1e15 {
        Some(nu.re as i64)
    } else {
        None
    }
}

/// Rising product λ(λ+1)⋯(λ+n-1).
pub fn rising_product(lambda: ComplexValue, n: usize) -> ComplexValue {
    (0..n).fold(ONE, |acc, k| acc * (lambda + k as f64))
}

/// Pochhammer symbol (λ)_ν = Γ(λ+ν)/Γ(λ).
///
/// Integer orders up to [`POCHHAMMER_PRODUCT_MAX`] use the rising product;
/// everything else goes through log-gamma. When both gammas sit on poles
/// the limit `(-1)^ν Γ(1-λ)/Γ(1-λ-ν)` is returned.
pub fn pochhammer(lambda: ComplexValue, nu: ComplexValue) -> Result<ComplexValue> {
    if let Some(n) = as_nonneg_integer(nu) {
        if n <= POCHHAMMER_PRODUCT_MAX {
            return Ok(rising_product(lambda, n));
        }
    }
    if lambda.im == 0.0 && nu.im == 0.0 {
        let top = dd::ln_gamma(Dd::from(lambda.re) + nu.re);
        if let (Some(top), Some(bottom)) = (top, dd::ln_gamma_f64(lambda.re)) {
            return Ok(real((top - bottom).exp_f64()));
        }
    }
    let top = log_gamma(lambda + nu);
    let bottom = log_gamma(lambda);
    match (top.is_pole, bottom.is_pole) {
        (false, false) => Ok((top.as_log() - bottom.as_log()).exp()),
        (false, true) => Ok(ZERO),
        (true, false) => Err(Error::Pole(format!(
            "({lambda})_{nu}: Γ(λ+ν) is infinite while Γ(λ) is finite"
        ))),
        (true, true) => {
            let k = as_integer(nu).unwrap_or_else(|| nu.re.round() as i64);
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            Ok(gamma(ONE - lambda) * rgamma(ONE - lambda - nu) * sign)
        }
    }
}
