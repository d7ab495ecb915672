//! Riemann–Liouville fractional integrals and derivatives.
//!
//! ```text
//! (I₀₊^λ f)(x) = Γ(λ)^{-1} ∫_0^x f(t) (x − t)^{λ−1} dt
//! (I₋^λ f)(x)  = Γ(λ)^{-1} ∫_x^∞ f(t) (t − x)^{λ−1} dt
//! D₀₊^λ = (d/dx)^n̄ I₀₊^{n̄−λ},   D₋^λ = (−d/dx)^n̄ I₋^{n̄−λ},   n̄ = ⌊Re λ⌋ + 1
//! ```
//!
//! Integrals of arbitrary functions go through tanh-sinh quadrature.
//! Derivatives are exact for power series (term-wise power rules) and
//! approximate otherwise (finite differences of a quadrature).

mod quadrature;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::complex::{self, real, ComplexValue, ONE, ZERO};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::foxwright::{accumulate, SeriesOptions, SeriesResult, Term};
use crate::gamma::{gamma, pochhammer, rgamma};

pub use quadrature::real_pow;
pub use quadrature::{QuadratureResult, TanhSinh};

fn check_order(lambda: ComplexValue) -> Result<()> {
    complex::ensure_finite(lambda, "order λ")?;
    if lambda.re > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Re(λ) > 0 required, got λ = {lambda}"
        )))
    }
}

fn check_point(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x > 0 required, got {x}")))
    }
}

/// `n̄ = ⌊Re λ⌋ + 1`. An integer λ = k gives `n̄ = k + 1` and inner order 1.
pub fn derivative_count(lambda: ComplexValue) -> usize {
    lambda.re.floor() as usize + 1
}

/// `I₀₊^λ t^{δ−1} = Γ(δ)/Γ(λ+δ) · x^{λ+δ−1}`.
pub fn power_rule_left(lambda: ComplexValue, delta: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_order(lambda)?;
    check_point(x)?;
    complex::ensure_finite(delta, "δ")?;
    if delta.re <= 0.0 {
        return Err(Error::Domain(format!(
            "Re(δ) > 0 required, got δ = {delta}"
        )));
    }
    Ok(gamma(delta) * rgamma(lambda + delta) * real_pow(x, lambda + delta - 1.0))
}

/// `I₋^λ t^{−δ} = Γ(δ−λ)/Γ(δ) · x^{λ−δ}`.
pub fn power_rule_right(lambda: ComplexValue, delta: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_order(lambda)?;
    check_point(x)?;
    complex::ensure_finite(delta, "δ")?;
    if delta.re <= lambda.re {
        return Err(Error::Domain(format!(
            "Re(δ) > Re(λ) required, got δ = {delta}, λ = {lambda}"
        )));
    }
    Ok(gamma(delta - lambda) * rgamma(delta) * real_pow(x, lambda - delta))
}

/// Left integral by quadrature after `t = x s`:
/// `x^λ/Γ(λ) ∫_0^1 f(x s) (1 − s)^{λ−1} ds`.
pub fn rl_integral_left<F>(f: F, lambda: ComplexValue, x: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexValue,
{
    check_order(lambda)?;
    check_point(x)?;
    let power = lambda - 1.0;
    let r = TanhSinh::new(tol).unit_interval(|s, c| {
        let t = x * s;
        // an integrable f contributes nothing below the underflow threshold
        if t == 0.0 {
            return ZERO;
        }
        f(t) * real_pow(c, power)
    })?;
    Ok(r.scaled(real_pow(x, lambda) * rgamma(lambda)))
}

/// Samples `|f(t)| t^{Re λ}` far out; a tail that grows tenfold between
/// `10^4 x` and `10^8 x` cannot be integrable against `(t − x)^{λ−1}`.
fn check_decay<F>(f: &F, lambda: ComplexValue, x: f64) -> Result<()>
where
    F: Fn(f64) -> ComplexValue,
{
    let base = x.max(1.0);
    let g = |t: f64| f(t).norm() * t.powf(lambda.re);
    let (t1, t2) = (1e4 * base, 1e8 * base);
    let (g1, g2) = (g(t1), g(t2));
    if g2.is_nan() || g2 > 10.0 * g1 {
        return Err(Error::Decay(format!(
            "|f(t)|·t^Re(λ) is {g1:e} at t = {t1:e} but {g2:e} at t = {t2:e}"
        )));
    }
    Ok(())
}

/// Right integral by quadrature after `t = x / v`, `v = 1 − u`:
/// `x^λ/Γ(λ) ∫_0^1 f(x/v) u^{λ−1} v^{−λ−1} du`.
pub fn rl_integral_right<F>(
    f: F,
    lambda: ComplexValue,
    x: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexValue,
{
    check_order(lambda)?;
    check_point(x)?;
    check_decay(&f, lambda, x)?;
    let inner = lambda - 1.0;
    let outer = -lambda - 1.0;
    // keep v^{−λ−1} below ~1e250
    let min_distance = 10f64.powf(-250.0 / (lambda.re + 1.0)).max(1e-200);
    let rule = TanhSinh {
        min_distance,
        ..TanhSinh::new(tol)
    };
    let r = rule.unit_interval(|u, v| {
        let fv = f(x / v);
        if fv == ZERO {
            return ZERO;
        }
        fv * real_pow(u, inner) * real_pow(v, outer)
    })?;
    Ok(r.scaled(real_pow(x, lambda) * rgamma(lambda)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `f(t) = Σ a_n t^{offset + n}`
    Ascending,
    /// `f(t) = Σ a_n t^{−(offset + n)}`
    Descending,
}

type CoefficientFn = dyn Fn(usize) -> Result<ComplexValue> + Send + Sync;

/// A function given by a (generalized) power series.
#[derive(Clone)]
pub struct PowerSeriesFn {
    pub direction: Direction,
    pub exponent_offset: ComplexValue,
    coefficients: Arc<CoefficientFn>,
    /// Number of nonzero-able terms for finite sums; `None` means infinite.
    pub terms: Option<usize>,
}

impl fmt::Debug for PowerSeriesFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeriesFn")
            .field("direction", &self.direction)
            .field("exponent_offset", &self.exponent_offset)
            .field("terms", &self.terms)
            .finish_non_exhaustive()
    }
}

impl PowerSeriesFn {
    pub fn new<G>(direction: Direction, exponent_offset: ComplexValue, coefficients: G) -> Self
    where
        G: Fn(usize) -> Result<ComplexValue> + Send + Sync + 'static,
    {
        PowerSeriesFn {
            direction,
            exponent_offset,
            coefficients: Arc::new(coefficients),
            terms: None,
        }
    }

    /// `t^{offset}` (ascending) or `t^{−offset}` (descending).
    pub fn monomial(direction: Direction, exponent_offset: ComplexValue) -> Self {
        PowerSeriesFn::new(direction, exponent_offset, |_| Ok(ONE)).with_terms(1)
    }

    pub fn with_terms(mut self, terms: usize) -> Self {
        self.terms = Some(terms);
        self
    }

    pub fn coefficient(&self, n: usize) -> Result<ComplexValue> {
        match self.terms {
            Some(len) if n >= len => Ok(ZERO),
            _ => (self.coefficients)(n),
        }
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Ascending => 1.0,
            Direction::Descending => -1.0,
        }
    }

    /// Sums the series at `t > 0`.
    pub fn eval(&self, t: f64, tol: f64) -> Result<SeriesResult> {
        check_point(t)?;
        let ln_t = Dd::from(t).ln();
        let s = self.sign();
        sum_terms(
            self,
            |n, a| Ok(a * split_pow(t, ln_t, s * self.exponent_offset, s * n as f64)),
            tol,
        )
    }

    /// Term-wise `I₀₊^λ`: another ascending series with offset shifted by λ.
    pub fn integral_left(&self, lambda: ComplexValue) -> Result<PowerSeriesFn> {
        check_order(lambda)?;
        self.require(Direction::Ascending)?;
        let base = self.exponent_offset + 1.0;
        if base.re <= 0.0 {
            return Err(Error::Domain(format!(
                "Re(offset) > −1 required, got offset = {}",
                self.exponent_offset
            )));
        }
        let inner = self.clone();
        Ok(PowerSeriesFn {
            direction: Direction::Ascending,
            exponent_offset: self.exponent_offset + lambda,
            coefficients: Arc::new(move |n| {
                let a = inner.coefficient(n)?;
                if a == ZERO {
                    return Ok(ZERO);
                }
                Ok(a / pochhammer(base + n as f64, lambda)?)
            }),
            terms: self.terms,
        })
    }

    /// Term-wise `I₋^λ`: another descending series with offset lowered by λ.
    pub fn integral_right(&self, lambda: ComplexValue) -> Result<PowerSeriesFn> {
        check_order(lambda)?;
        self.require(Direction::Descending)?;
        if self.exponent_offset.re <= lambda.re {
            return Err(Error::Domain(format!(
                "Re(offset) > Re(λ) required, got offset = {}, λ = {lambda}",
                self.exponent_offset
            )));
        }
        let inner = self.clone();
        let offset = self.exponent_offset;
        Ok(PowerSeriesFn {
            direction: Direction::Descending,
            exponent_offset: self.exponent_offset - lambda,
            coefficients: Arc::new(move |n| {
                let a = inner.coefficient(n)?;
                if a == ZERO {
                    return Ok(ZERO);
                }
                Ok(a * pochhammer(offset + n as f64, -lambda)?)
            }),
            terms: self.terms,
        })
    }

    fn require(&self, direction: Direction) -> Result<()> {
        if self.direction == direction {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "operator needs {direction:?} powers, series has {:?}",
                self.direction
            )))
        }
    }
}

/// Sums `term(n, a_n)` with the shared truncation rule; finite series
/// simply contribute zeros past their length.
fn sum_terms<T>(f: &PowerSeriesFn, mut term: T, tol: f64) -> Result<SeriesResult>
where
    T: FnMut(usize, ComplexValue) -> Result<ComplexValue>,
{
    accumulate(
        |n| {
            let a = f.coefficient(n)?;
            if a == ZERO {
                return Ok(Term::Value(ZERO));
            }
            Ok(Term::Value(term(n, a)?))
        },
        &SeriesOptions::with_tol(tol),
    )
}

/// `x^{small + big}` as `x^small · x^big`, with the (integer, possibly
/// large) `big` part in double-double so that `small + big` is never rounded.
fn split_pow(x: f64, ln_x: Dd, small: ComplexValue, big: f64) -> ComplexValue {
    let whole = if big == 0.0 {
        1.0
    } else {
        (ln_x * big).exp_f64()
    };
    real_pow(x, small) * whole
}

/// `Π_{k<count} (q − k)`, the falling factorial from differentiating `x^q`.
fn falling(q: ComplexValue, count: usize) -> ComplexValue {
    (0..count).map(|k| q - k as f64).product()
}

/// `D₀₊^λ f` term by term: each `t^p` goes through `I^{n̄−λ}` and then
/// `n̄` exact differentiations.
pub fn rl_derivative_left_series(
    f: &PowerSeriesFn,
    lambda: ComplexValue,
    x: f64,
    tol: f64,
) -> Result<SeriesResult> {
    check_order(lambda)?;
    check_point(x)?;
    f.require(Direction::Ascending)?;
    if f.exponent_offset.re <= -1.0 {
        return Err(Error::Domain(format!(
            "Re(offset) > −1 required, got offset = {}",
            f.exponent_offset
        )));
    }
    let nbar = derivative_count(lambda);
    let mu = nbar as f64 - lambda;
    let ln_x = Dd::from(x).ln();
    // x^{q − n̄} with q − n̄ = (offset + μ − n̄) + n
    let small = f.exponent_offset + mu - nbar as f64;
    sum_terms(
        f,
        |n, a| {
            let delta = f.exponent_offset + n as f64 + 1.0;
            let q = mu + delta - 1.0;
            let rule = pochhammer(delta, mu)?.inv();
            Ok(a * rule * falling(q, nbar) * split_pow(x, ln_x, small, n as f64))
        },
        tol,
    )
}

/// `D₋^λ f` term by term: each `t^{−δ}` goes through `I₋^{n̄−λ}` and then
/// `(−d/dx)^n̄`.
pub fn rl_derivative_right_series(
    f: &PowerSeriesFn,
    lambda: ComplexValue,
    x: f64,
    tol: f64,
) -> Result<SeriesResult> {
    check_order(lambda)?;
    check_point(x)?;
    f.require(Direction::Descending)?;
    let nbar = derivative_count(lambda);
    let mu = nbar as f64 - lambda;
    if f.exponent_offset.re <= mu.re {
        return Err(Error::Domain(format!(
            "Re(offset) > ⌊Re λ⌋ + 1 − Re λ = {} required, got offset = {}",
            mu.re, f.exponent_offset
        )));
    }
    let sign = if nbar.is_multiple_of(2) { 1.0 } else { -1.0 };
    let ln_x = Dd::from(x).ln();
    // q − n̄ = (μ − offset − n̄) − n
    let small = mu - f.exponent_offset - nbar as f64;
    sum_terms(
        f,
        |n, a| {
            let delta = f.exponent_offset + n as f64;
            let q = mu - delta;
            let rule = pochhammer(delta, -mu)?;
            Ok(a * rule * sign * falling(q, nbar) * split_pow(x, ln_x, small, -(n as f64)))
        },
        tol,
    )
}

/// Finite-difference weights for the `order`-th derivative at `x0` on
/// arbitrary nodes (Fornberg's recursion).
pub(crate) fn fd_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

const INNER_TOL: f64 = 1e-13;

/// `D₀₊^λ f` for a black-box `f`: the inner integral `I^{n̄−λ} f` is
/// evaluated on a centred stencil and differentiated `n̄` times with
/// eighth-order finite differences. Expect roughly five correct digits.
///
/// The error estimate compares steps `h` and `1.5 h` and adds the
/// propagated quadrature error.
pub fn rl_derivative_left_numeric<F>(
    f: F,
    lambda: ComplexValue,
    x: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexValue,
{
    check_order(lambda)?;
    check_point(x)?;
    let nbar = derivative_count(lambda);
    let mu = real(nbar as f64) - lambda;
    let half = 4 + (nbar - 1) / 2;
    let frac = match nbar {
        1 => 0.05,
        2 => 0.1,
        _ => 0.12,
    };
    let h = frac * x.min(1.0);
    if h < 1e-4 || x - 1.5 * half as f64 * h <= 0.0 {
        return Err(Error::Stencil(format!(
            "x = {x} leaves no room for a {}-point stencil of step {h:e}",
            2 * half + 1
        )));
    }
    let inner_tol = INNER_TOL.min(tol);
    let mut evaluations = 0;
    let mut stencil = |step: f64| -> Result<(ComplexValue, f64)> {
        let offsets: Vec<f64> = (-(half as i64)..=half as i64)
            .map(|j| j as f64 * step)
            .collect();
        let weights = fd_weights(0.0, &offsets, nbar);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (dx, w) in offsets.iter().zip(&weights) {
            if *w == 0.0 {
                continue;
            }
            let g = rl_integral_left(&f, mu, x + dx, inner_tol)?;
            evaluations += g.evaluations;
            acc += g.value * *w;
            err += g.abs_error_estimate * w.abs();
        }
        Ok((acc, err))
    };
    let (fine, fine_err) = stencil(h)?;
    let (coarse, coarse_err) = stencil(1.5 * h)?;
    Ok(QuadratureResult {
        value: fine,
        abs_error_estimate: (fine - coarse).norm() + fine_err + coarse_err,
        evaluations,
    })
}
