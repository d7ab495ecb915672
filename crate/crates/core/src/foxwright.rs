//! Fox–Wright function ₚΨ_q as a log-domain power series.
//!
//! ```text
//! pΨq[(a_i, A_i); (b_j, B_j); z] = Σ_n Π Γ(a_i + A_i n) / Π Γ(b_j + B_j n) · z^n / n!
//! ```
//!
//! The series is entire when the margin `1 + ΣB_j − ΣA_i` is positive and
//! converges on `|z| < ∇` when it is zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{self, real, ComplexValue, ONE, ZERO};
use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::gamma::log_gamma;

/// Margins within this distance of zero are treated as exactly zero.
const MARGIN_EPS: f64 = 1e-12;

/// One `(coefficient, slope)` pair of a Fox–Wright parameter list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    #[serde(with = "complex::serde_pair")]
    pub coefficient: ComplexValue,
    pub slope: f64,
}

impl GammaFactor {
    pub fn new(coefficient: ComplexValue, slope: f64) -> Self {
        GammaFactor { coefficient, slope }
    }

    #[inline]
    fn at(&self, n: usize) -> ComplexValue {
        self.coefficient + self.slope * n as f64
    }

    /// `a + A·n` without rounding, for real `a`.
    fn at_real(&self, n: usize) -> Option<Dd> {
        (self.coefficient.im == 0.0)
            .then(|| Dd::product(self.slope, n as f64) + self.coefficient.re)
    }
}

/// `ln|z|` in double-double; `z` must be nonzero.
pub(crate) fn log_abs(z: ComplexValue) -> Dd {
    let r2 = Dd::product(z.re, z.re) + Dd::product(z.im, z.im);
    if r2.hi.is_normal() {
        r2.ln() * 0.5
    } else {
        Dd::from(z.norm().ln())
    }
}

/// Validated upper/lower parameter lists together with the convergence margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct FoxWrightParams {
    upper: Vec<GammaFactor>,
    lower: Vec<GammaFactor>,
    margin: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    upper: Vec<GammaFactor>,
    #[serde(default)]
    lower: Vec<GammaFactor>,
}

impl TryFrom<RawParams> for FoxWrightParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        FoxWrightParams::new(raw.upper, raw.lower)
    }
}

impl From<FoxWrightParams> for RawParams {
    fn from(p: FoxWrightParams) -> Self {
        RawParams {
            upper: p.upper,
            lower: p.lower,
        }
    }
}

impl FoxWrightParams {
    pub fn new(upper: Vec<GammaFactor>, lower: Vec<GammaFactor>) -> Result<Self> {
        for f in upper.iter().chain(&lower) {
            complex::ensure_finite(f.coefficient, "Fox-Wright coefficient")?;
            if !(f.slope.is_finite() && f.slope > 0.0) {
                return Err(Error::Param(format!(
                    "Fox-Wright slopes must be positive, got {}",
                    f.slope
                )));
            }
        }
        let mut margin = 1.0 + lower.iter().map(|f| f.slope).sum::<f64>()
            - upper.iter().map(|f| f.slope).sum::<f64>();
        if margin.abs() <= MARGIN_EPS {
            margin = 0.0;
        }
        if margin < 0.0 {
            return Err(Error::Param(format!(
                "convergence margin 1 + ΣB − ΣA = {margin} is negative"
            )));
        }
        Ok(FoxWrightParams {
            upper,
            lower,
            margin,
        })
    }

    pub fn upper(&self) -> &[GammaFactor] {
        &self.upper
    }

    pub fn lower(&self) -> &[GammaFactor] {
        &self.lower
    }

    /// `1 + ΣB_j − ΣA_i`, snapped to zero within 1e-12.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `+∞` for a positive margin, otherwise `∇ = Π A_i^{−A_i} · Π B_j^{B_j}`.
    pub fn convergence_radius(&self) -> f64 {
        if self.margin > 0.0 {
            return f64::INFINITY;
        }
        let log_radius = self
            .lower
            .iter()
            .map(|f| f.slope * f.slope.ln())
            .sum::<f64>()
            - self
                .upper
                .iter()
                .map(|f| f.slope * f.slope.ln())
                .sum::<f64>();
        log_radius.exp()
    }

    /// The n-th series term, computed in the log domain.
    ///
    /// Lower-gamma poles make the term exactly zero; an upper-gamma pole is
    /// an error because the term is infinite.
    pub fn term(&self, n: usize, z: ComplexValue) -> Result<ComplexValue> {
        let (log_abs_z, phasor) = if n == 0 || z == ZERO {
            (Dd::ZERO, ONE)
        } else {
            (log_abs(z), (z / z.norm()).powu(n as u32))
        };
        Ok(match self.term_parts(n, log_abs_z, phasor)? {
            Term::StructuralZero => ZERO,
            Term::Value(_) if n > 0 && z == ZERO => ZERO,
            Term::Value(v) => v,
        })
    }

    /// `exp(log c_n + n·ln|z|) · phasor`. Positive real gamma arguments go
    /// through double-double so that large cancelling logs stay exact.
    fn term_parts(&self, n: usize, log_abs_z: Dd, phasor: ComplexValue) -> Result<Term> {
        if let Some(log_c) = self.log_coefficient_real(n) {
            let log_t = if n == 0 {
                log_c
            } else {
                log_c + log_abs_z * n as f64
            };
            return Ok(Term::Value(phasor * log_t.exp_f64()));
        }
        Ok(match self.log_coefficient(n)? {
            None => Term::StructuralZero,
            Some(log_c) if n == 0 => Term::Value(log_c.exp() * phasor),
            Some(log_c) => Term::Value((log_c + log_abs_z.hi * n as f64).exp() * phasor),
        })
    }

    /// Double-double `log c_n` when every gamma argument is real and positive.
    fn log_coefficient_real(&self, n: usize) -> Option<Dd> {
        let mut acc = Dd::ZERO;
        for f in &self.upper {
            acc = acc + dd::ln_gamma(f.at_real(n)?)?;
        }
        for f in &self.lower {
            acc = acc - dd::ln_gamma(f.at_real(n)?)?;
        }
        Some(acc - dd::ln_factorial(n))
    }

    /// `log(Π Γ(a_i + A_i n) / (Π Γ(b_j + B_j n) · n!))`, or `None` when a
    /// lower gamma sits on a pole.
    pub(crate) fn log_coefficient(&self, n: usize) -> Result<Option<Complex64>> {
        let mut acc = ZERO;
        for f in &self.upper {
            let lg = log_gamma(f.at(n));
            if lg.is_pole {
                return Err(Error::Pole(format!(
                    "upper gamma Γ({}) at term {n}",
                    f.at(n)
                )));
            }
            acc += lg.as_log();
        }
        for f in &self.lower {
            let lg = log_gamma(f.at(n));
            if lg.is_pole {
                return Ok(None);
            }
            acc -= lg.as_log();
        }
        acc -= log_gamma(real(n as f64 + 1.0)).as_log();
        Ok(Some(acc))
    }
}

/// Convergence classification of a summed series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesStatus {
    Converged,
    SlowTail,
    DivergentRegion,
}

/// Series value plus the diagnostics needed to judge it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    #[serde(with = "complex::serde_pair")]
    pub value: ComplexValue,
    pub terms_used: usize,
    pub last_term_magnitude: f64,
    pub status: SeriesStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SeriesResult {
    pub fn is_converged(&self) -> bool {
        self.status == SeriesStatus::Converged
    }

    /// Multiplies the value by a constant factor, keeping diagnostics.
    pub fn scaled(mut self, factor: ComplexValue) -> Self {
        self.value *= factor;
        self.last_term_magnitude *= factor.norm();
        self
    }
}

/// Truncation control shared by every series summation in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Relative size below which a term counts as negligible.
    pub tol: f64,
    /// Number of consecutive negligible terms required to stop.
    pub window: usize,
    /// Smallest index at which stopping is allowed.
    pub min_terms: usize,
    /// Hard cap; hitting it yields [`SeriesStatus::SlowTail`].
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            tol: 1e-12,
            window: 4,
            min_terms: 8,
            max_terms: 20_000,
        }
    }
}

impl SeriesOptions {
    pub fn with_tol(tol: f64) -> Self {
        SeriesOptions {
            tol,
            ..Default::default()
        }
    }
}

/// A series term; structural zeros (reciprocal-gamma poles) do not count
/// towards the stopping window.
pub(crate) enum Term {
    Value(ComplexValue),
    StructuralZero,
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        fn step(sum: &mut f64, carry: &mut f64, v: f64) {
            let t = *sum + v;
            if sum.abs() >= v.abs() {
                *carry += (*sum - t) + v;
            } else {
                *carry += (v - t) + *sum;
            }
            *sum = t;
        }
        step(&mut self.sum.re, &mut self.carry.re, v.re);
        step(&mut self.sum.im, &mut self.carry.im, v.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

/// Sums terms produced by `next(n)` under the stopping rule of `opts`:
/// stop once `|term| <= tol·|partial|` held for `window` consecutive terms
/// and `n >= min_terms`.
pub(crate) fn accumulate<F>(mut next: F, opts: &SeriesOptions) -> Result<SeriesResult>
where
    F: FnMut(usize) -> Result<Term>,
{
    let mut sum = CompensatedSum::default();
    let mut small_run = 0usize;
    let mut last = 0.0;
    for n in 0..opts.max_terms {
        let v = match next(n)? {
            Term::StructuralZero => continue,
            Term::Value(v) => v,
        };
        sum.add(v);
        let partial = sum.value();
        if !(partial.re.is_finite() && partial.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "series partial sum overflowed at term {n}"
            )));
        }
        last = v.norm();
        if last <= opts.tol * partial.norm() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= opts.window && n >= opts.min_terms {
            return Ok(SeriesResult {
                value: partial,
                terms_used: n + 1,
                last_term_magnitude: last,
                status: SeriesStatus::Converged,
                warnings: Vec::new(),
            });
        }
    }
    Ok(SeriesResult {
        value: sum.value(),
        terms_used: opts.max_terms,
        last_term_magnitude: last,
        status: SeriesStatus::SlowTail,
        warnings: vec![format!("term cap {} reached", opts.max_terms)],
    })
}

/// Evaluates ₚΨ_q at `z` with the default window and term cap.
pub fn eval(params: &FoxWrightParams, z: ComplexValue, tol: f64) -> Result<SeriesResult> {
    eval_with(params, z, &SeriesOptions::with_tol(tol))
}

pub fn eval_with(
    params: &FoxWrightParams,
    z: ComplexValue,
    opts: &SeriesOptions,
) -> Result<SeriesResult> {
    complex::ensure_finite(z, "Fox-Wright argument")?;
    let radius = params.convergence_radius();
    let mut warnings = Vec::new();
    if radius.is_finite() {
        if z.norm() >= radius {
            return Ok(SeriesResult {
                value: Complex64::new(f64::NAN, f64::NAN),
                terms_used: 0,
                last_term_magnitude: f64::NAN,
                status: SeriesStatus::DivergentRegion,
                warnings: vec![format!("|z| = {} is outside the radius {radius}", z.norm())],
            });
        }
        if z.norm() >= 0.95 * radius {
            warnings.push(format!(
                "|z| = {} is within 5% of the radius {radius}; expect a slow tail",
                z.norm()
            ));
        }
    }
    if z == ZERO {
        let v = params.term(0, z)?;
        return Ok(SeriesResult {
            value: v,
            terms_used: 1,
            last_term_magnitude: v.norm(),
            status: SeriesStatus::Converged,
            warnings,
        });
    }

    // |z|^n goes into the log, the unit phasor is carried by multiplication
    // so that real arguments keep exactly real powers.
    let log_abs_z = log_abs(z);
    let unit = z / z.norm();
    let mut phasor = ONE;
    let mut result = accumulate(
        |n| {
            if n > 0 {
                phasor *= unit;
            }
            params.term_parts(n, log_abs_z, phasor)
        },
        opts,
    )?;
    result.warnings.splice(0..0, warnings);
    Ok(result)
}

/// Convenience for the common case where every parameter is real.
pub fn real_factors(pairs: &[(f64, f64)]) -> Vec<GammaFactor> {
    pairs
        .iter()
        .map(|&(a, s)| GammaFactor::new(real(a), s))
        .collect()
}
