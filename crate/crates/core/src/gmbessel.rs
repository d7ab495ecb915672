//! The generalized multiindex Bessel function
//!
//! ```text
//! J(z) = Σ_n c^n (γ)_{κn} / Π_j Γ(α_j n + β_j + (b+1)/2) · z^n / n!
//! ```
//!
//! evaluated either through its Fox–Wright image
//! `J(z) = Γ(γ)^{-1} · ₁Ψ_m[(γ, κ); (β_j + (b+1)/2, α_j); c z]`
//! or by direct summation of the defining series.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{self, real, ComplexValue, ONE, ZERO};
use crate::error::{Error, Result};
use crate::foxwright::{
    self, accumulate, FoxWrightParams, GammaFactor, SeriesOptions, SeriesResult, Term,
};
use crate::gamma::{pochhammer, rgamma};

/// Parameters `(α_j), (β_j), γ, κ, b, c`; `m` is the length of the lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmibParams {
    #[serde(with = "complex::serde_pair_vec")]
    pub alphas: Vec<ComplexValue>,
    #[serde(with = "complex::serde_pair_vec")]
    pub betas: Vec<ComplexValue>,
    #[serde(with = "complex::serde_pair")]
    pub gamma: ComplexValue,
    pub kappa: f64,
    #[serde(with = "complex::serde_pair")]
    pub b: ComplexValue,
    #[serde(with = "complex::serde_pair")]
    pub c: ComplexValue,
}

impl GmibParams {
    /// All-real parameters, the common case in tests and grids.
    pub fn real(alphas: &[f64], betas: &[f64], gamma: f64, kappa: f64, b: f64, c: f64) -> Self {
        GmibParams {
            alphas: alphas.iter().copied().map(real).collect(),
            betas: betas.iter().copied().map(real).collect(),
            gamma: real(gamma),
            kappa,
            b: real(b),
            c: real(c),
        }
    }

    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    /// `β_j + (b+1)/2`, the lower Fox–Wright coefficients.
    pub fn shifted_betas(&self) -> Vec<ComplexValue> {
        let shift = (self.b + 1.0) * 0.5;
        self.betas.iter().map(|beta| beta + shift).collect()
    }

    /// The `(β_j + (b+1)/2, α_j)` lower factors; slopes are `Re(α_j)`.
    pub fn lower_factors(&self) -> Result<Vec<GammaFactor>> {
        self.alphas
            .iter()
            .zip(self.shifted_betas())
            .map(|(alpha, beta)| {
                if alpha.im != 0.0 {
                    return Err(Error::Param(format!(
                        "complex α_j = {alpha} cannot be a Fox-Wright slope"
                    )));
                }
                Ok(GammaFactor::new(beta, alpha.re))
            })
            .collect()
    }

    fn check_structure(&self) -> Result<()> {
        if self.alphas.is_empty() || self.alphas.len() != self.betas.len() {
            return Err(Error::Param(format!(
                "need m >= 1 with |alphas| = |betas|, got {} and {}",
                self.alphas.len(),
                self.betas.len()
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::Param(format!(
                "κ must be a positive real, got {}",
                self.kappa
            )));
        }
        for z in self
            .alphas
            .iter()
            .chain(&self.betas)
            .chain([&self.gamma, &self.b, &self.c])
        {
            complex::ensure_finite(*z, "GMIB parameter")?;
        }
        Ok(())
    }
}

/// One failed parameter constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyOrder,
    LengthMismatch { alphas: usize, betas: usize },
    KappaNotPositive(f64),
    AlphaSum { sum: f64, bound: f64 },
    BetaRealPart { index: usize, value: ComplexValue },
    GammaRealPart(ComplexValue),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyOrder => write!(f, "m >= 1 fails"),
            Violation::LengthMismatch { alphas, betas } => {
                write!(f, "|alphas| = |betas| fails ({alphas} vs {betas})")
            }
            Violation::KappaNotPositive(k) => write!(f, "κ > 0 fails (κ = {k})"),
            Violation::AlphaSum { sum, bound } if *bound > 0.0 => {
                write!(f, "Σℜ(α_j) > ℜ(κ)−1 fails ({sum} <= {bound})")
            }
            Violation::AlphaSum { sum, .. } => write!(f, "Σℜ(α_j) > 0 fails ({sum} <= 0)"),
            Violation::BetaRealPart { index, value } => {
                write!(f, "ℜ(β_{}) > 0 fails (β = {value})", index + 1)
            }
            Violation::GammaRealPart(g) => write!(f, "ℜ(γ) > 0 fails (γ = {g})"),
        }
    }
}

/// Every violated constraint; empty means valid.
pub fn validate(params: &GmibParams) -> Vec<Violation> {
    let mut out = Vec::new();
    if params.alphas.is_empty() {
        out.push(Violation::EmptyOrder);
    }
    if params.alphas.len() != params.betas.len() {
        out.push(Violation::LengthMismatch {
            alphas: params.alphas.len(),
            betas: params.betas.len(),
        });
    }
    if !(params.kappa > 0.0) {
        out.push(Violation::KappaNotPositive(params.kappa));
    }
    let sum: f64 = params.alphas.iter().map(|a| a.re).sum();
    let bound = 0f64.max(params.kappa - 1.0);
    if !(sum > bound) {
        out.push(Violation::AlphaSum { sum, bound });
    }
    for (index, beta) in params.betas.iter().enumerate() {
        if !(beta.re > 0.0) {
            out.push(Violation::BetaRealPart {
                index,
                value: *beta,
            });
        }
    }
    if !(params.gamma.re > 0.0) {
        out.push(Violation::GammaRealPart(params.gamma));
    }
    out
}

/// `J(z) = prefactor · ₁Ψ_m[params; argument_scale · z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxWrightImage {
    pub params: FoxWrightParams,
    pub prefactor: ComplexValue,
    pub argument_scale: ComplexValue,
}

fn image_unchecked(params: &GmibParams) -> Result<FoxWrightImage> {
    params.check_structure()?;
    let upper = vec![GammaFactor::new(params.gamma, params.kappa)];
    Ok(FoxWrightImage {
        params: FoxWrightParams::new(upper, params.lower_factors()?)?,
        prefactor: rgamma(params.gamma),
        argument_scale: params.c,
    })
}

/// Fox–Wright representation; fails on parameters that violate the
/// defining constraints.
pub fn as_foxwright(params: &GmibParams) -> Result<FoxWrightImage> {
    let violations = validate(params);
    if !violations.is_empty() {
        return Err(Error::Param(join(&violations)));
    }
    image_unchecked(params)
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn with_validation_warnings(mut r: SeriesResult, params: &GmibParams) -> SeriesResult {
    let violations = validate(params);
    if !violations.is_empty() {
        r.warnings.push(format!(
            "outside the sufficient conditions: {}",
            join(&violations)
        ));
    }
    r
}

/// J(z) through the Fox–Wright image. Constraint violations are reported
/// as warnings, not errors, as long as the series itself is well formed.
pub fn eval(params: &GmibParams, z: ComplexValue, tol: f64) -> Result<SeriesResult> {
    eval_with(params, z, &SeriesOptions::with_tol(tol))
}

pub fn eval_with(
    params: &GmibParams,
    z: ComplexValue,
    opts: &SeriesOptions,
) -> Result<SeriesResult> {
    complex::ensure_finite(z, "GMIB argument")?;
    let image = image_unchecked(params)?;
    let r = foxwright::eval_with(&image.params, image.argument_scale * z, opts)?;
    Ok(with_validation_warnings(r.scaled(image.prefactor), params))
}

/// J(z) by summing the defining series term by term with Pochhammer
/// symbols and reciprocal gammas in the linear domain.
pub fn eval_direct(params: &GmibParams, z: ComplexValue, tol: f64) -> Result<SeriesResult> {
    complex::ensure_finite(z, "GMIB argument")?;
    params.check_structure()?;
    let shifted = params.shifted_betas();
    let cz = params.c * z;
    let mut power = ONE; // (cz)^n / n!
    let r = accumulate(
        |n| {
            if n > 0 {
                power *= cz / n as f64;
            }
            let mut denom = ONE;
            for (alpha, beta) in params.alphas.iter().zip(&shifted) {
                denom *= rgamma(alpha * n as f64 + beta);
            }
            if denom == ZERO {
                return Ok(Term::StructuralZero);
            }
            let rising = pochhammer(params.gamma, real(params.kappa * n as f64))?;
            Ok(Term::Value(rising * denom * power))
        },
        &SeriesOptions::with_tol(tol),
    )?;
    Ok(with_validation_warnings(r, params))
}

/// Taylor coefficient `a_n` of J, so that `J(z) = Σ a_n z^n`.
pub fn coefficient(params: &GmibParams, n: usize) -> Result<ComplexValue> {
    let image = image_unchecked(params)?;
    coefficient_of(&image, n)
}

/// `n ↦ a_n` with the Fox–Wright image built once.
pub fn coefficient_fn(
    params: &GmibParams,
) -> Result<impl Fn(usize) -> Result<ComplexValue> + Send + Sync + 'static> {
    let image = image_unchecked(params)?;
    Ok(move |n| coefficient_of(&image, n))
}

fn coefficient_of(image: &FoxWrightImage, n: usize) -> Result<ComplexValue> {
    // a_n = prefactor · c_n · scale^n is the Fox–Wright term at z = scale
    Ok(image.prefactor * image.params.term(n, image.argument_scale)?)
}

/// Truncated Taylor expansion of J, accurate for `|z| <= radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub coefficients: Vec<ComplexValue>,
    pub radius: f64,
}

impl TaylorSeries {
    /// Horner evaluation.
    pub fn eval(&self, z: ComplexValue) -> ComplexValue {
        self.coefficients
            .iter()
            .rev()
            .fold(ZERO, |acc, a| acc * z + a)
    }

    pub fn eval_real(&self, t: f64) -> ComplexValue {
        self.coefficients
            .iter()
            .rev()
            .fold(ZERO, |acc, a| acc * t + a)
    }
}

/// Builds the coefficient table once so that repeated evaluation inside a
/// quadrature costs one Horner pass. Terms are kept until
/// `|a_n| radius^n <= tol · Σ_k |a_k| radius^k` for four consecutive `n`.
pub fn taylor(params: &GmibParams, radius: f64, tol: f64) -> Result<TaylorSeries> {
    let image = image_unchecked(params)?;
    let opts = SeriesOptions::with_tol(tol);
    let mut coefficients = Vec::new();
    let mut scale = 0.0;
    let mut small_run = 0;
    let mut log_r = radius.ln();
    if radius <= 0.0 {
        log_r = f64::NEG_INFINITY;
    }
    for n in 0..opts.max_terms {
        let a = coefficient_of(&image, n)?;
        let size = if n == 0 {
            a.norm()
        } else {
            a.norm() * (log_r * n as f64).exp()
        };
        coefficients.push(a);
        scale += size;
        if size <= tol * scale {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= opts.window && n >= opts.min_terms {
            return Ok(TaylorSeries {
                coefficients,
                radius,
            });
        }
    }
    Err(Error::Convergence {
        evaluations: opts.max_terms,
        estimate: f64::NAN,
        target: tol,
    })
}

/// Sets `c = −1` and `b = 1`, which turns J into the earlier multiindex
/// Bessel function `Σ (γ)_{κn} (−z)^n / (Π Γ(α_j n + β_j + 1) n!)`.
pub fn reduce_choi_agarwal(params: &GmibParams) -> GmibParams {
    GmibParams {
        b: ONE,
        c: -ONE,
        ..params.clone()
    }
}

/// Direct summation of `Σ (γ)_{κn} (−z)^n / (Π Γ(α_j n + β_j + 1) n!)`.
pub fn choi_agarwal_series(
    alphas: &[ComplexValue],
    betas: &[ComplexValue],
    gamma: ComplexValue,
    kappa: f64,
    z: ComplexValue,
    tol: f64,
) -> Result<SeriesResult> {
    let mut power = ONE; // (−z)^n / n!
    accumulate(
        |n| {
            if n > 0 {
                power *= -z / n as f64;
            }
            let denom: Complex64 = alphas
                .iter()
                .zip(betas)
                .map(|(a, b)| rgamma(a * n as f64 + b + 1.0))
                .product();
            if denom == ZERO {
                return Ok(Term::StructuralZero);
            }
            Ok(Term::Value(
                pochhammer(gamma, real(kappa * n as f64))? * denom * power,
            ))
        },
        &SeriesOptions::with_tol(tol),
    )
}
