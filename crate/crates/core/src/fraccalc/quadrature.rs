//! Tanh-sinh (double exponential) quadrature on (0, 1) and (0, ∞).
//!
//! The substitution `s = 1 / (1 + exp(-π sinh t))` sends both endpoints to
//! infinity in `t`, so integrable power singularities at either end are
//! absorbed. Nodes are produced as `(s, 1 - s)` pairs computed
//! independently, which keeps factors like `(1 - s)^{λ-1}` accurate next to
//! the right endpoint.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{self, ComplexValue, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    #[serde(with = "complex::serde_pair")]
    pub value: ComplexValue,
    /// `|Q_k − Q_{k−1}|` between the last two refinement levels.
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn scaled(self, factor: ComplexValue) -> Self {
        QuadratureResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.norm(),
            evaluations: self.evaluations,
        }
    }
}

/// Level-doubling tanh-sinh rule. Level `k` uses step `2^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhSinh {
    /// Stop when `|Q_k − Q_{k−1}| <= tol·|Q_k|`.
    pub tol: f64,
    pub max_level: usize,
    /// Nodes closer than this to an endpoint are dropped.
    pub min_distance: f64,
}

const MIN_LEVEL: usize = 3;

impl TanhSinh {
    pub fn new(tol: f64) -> Self {
        TanhSinh {
            tol,
            max_level: 12,
            min_distance: 1e-200,
        }
    }

    /// Largest `t` whose node stays at least `min_distance` from the ends.
    fn t_max(&self) -> f64 {
        ((1.0 / self.min_distance).ln() / PI).asinh()
    }

    /// `∫_0^1 f(s) ds`, where the integrand receives `(s, 1 - s)`.
    pub fn unit_interval<F>(&self, f: F) -> Result<QuadratureResult>
    where
        F: Fn(f64, f64) -> ComplexValue,
    {
        let t_max = self.t_max();
        let mut evaluations = 0usize;
        let mut eval = |s: f64, r: f64| -> Result<ComplexValue> {
            evaluations += 1;
            let v = f(s, r);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!(
                    "integrand at s = {s:e} (1 - s = {r:e}) is {v}"
                )))
            }
        };

        let center = PI * 0.25 * eval(0.5, 0.5)?;

        // Node sum with step h over t = offset + j·step, j >= 0, t > 0.
        let mut sum_nodes = |start: f64, step: f64| -> Result<ComplexValue> {
            let mut acc = ZERO;
            let mut t = start;
            while t <= t_max {
                let u = PI * t.sinh();
                let e = (-u).exp();
                let small = e / (1.0 + e);
                let big = 1.0 / (1.0 + e);
                let w = PI * t.cosh() * small * big;
                acc += (eval(big, small)? + eval(small, big)?) * w;
                t += step;
            }
            Ok(acc)
        };

        let mut h = 1.0;
        let mut raw = center + sum_nodes(1.0, 1.0)?;
        let mut q = raw * h;
        let mut estimate = f64::INFINITY;
        for level in 1..=self.max_level {
            h *= 0.5;
            raw += sum_nodes(h, 2.0 * h)?;
            let next = raw * h;
            estimate = (next - q).norm();
            q = next;
            if level >= MIN_LEVEL && estimate <= self.tol * q.norm() {
                return Ok(QuadratureResult {
                    value: q,
                    abs_error_estimate: estimate,
                    evaluations,
                });
            }
        }
        Err(Error::Convergence {
            evaluations,
            estimate,
            target: self.tol * q.norm(),
        })
    }

    /// `∫_0^∞ f(x) dx` through `x = scale · s / (1 - s)`.
    pub fn half_line<F>(&self, f: F, scale: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> ComplexValue,
    {
        self.unit_interval(|s, r| f(scale * (s / r)) * (scale / (r * r)))
    }
}

/// `(1 - s)^{p}`-style complex power of a positive real.
#[inline]
pub fn real_pow(base: f64, exponent: Complex64) -> Complex64 {
    if exponent.im == 0.0 {
        return Complex64::new(base.powf(exponent.re), 0.0);
    }
    (exponent * base.ln()).exp()
}
