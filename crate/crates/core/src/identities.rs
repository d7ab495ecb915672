//! Closed forms and integrand builders for the fractional-calculus and
//! integral identities of J, plus the two classical base integrals.
//!
//! Every theorem RHS exists in two variants. `Printed` follows the stated
//! formula verbatim; `Corrected` is what term-by-term integration of J
//! actually gives. They coincide for T1–T3, T7 and T8.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{self, real, ComplexValue, ZERO};
use crate::error::{Error, Result};
use crate::foxwright::{self, FoxWrightParams, GammaFactor, SeriesResult, SeriesStatus};
use crate::fraccalc::{self, real_pow, Direction, PowerSeriesFn, TanhSinh};
use crate::gamma::{gamma, rgamma};
use crate::gmbessel::{self, GmibParams, TaylorSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    #[serde(rename = "OBER")]
    Ober,
    #[serde(rename = "LAVOIE")]
    Lavoie,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::T1,
        IdentityId::T2,
        IdentityId::T3,
        IdentityId::T4,
        IdentityId::T5,
        IdentityId::T6,
        IdentityId::T7,
        IdentityId::T8,
        IdentityId::Ober,
        IdentityId::Lavoie,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::T1 => "T1",
            IdentityId::T2 => "T2",
            IdentityId::T3 => "T3",
            IdentityId::T4 => "T4",
            IdentityId::T5 => "T5",
            IdentityId::T6 => "T6",
            IdentityId::T7 => "T7",
            IdentityId::T8 => "T8",
            IdentityId::Ober => "OBER",
            IdentityId::Lavoie => "LAVOIE",
        }
    }

    /// Free scalar symbols, in report order.
    pub fn symbols(self) -> &'static [&'static str] {
        match self {
            IdentityId::T1 | IdentityId::T2 | IdentityId::T3 | IdentityId::T4 => {
                &["lambda", "delta", "x"]
            }
            IdentityId::T5 | IdentityId::T6 => &["mu", "lambda", "a", "y"],
            IdentityId::T7 | IdentityId::T8 => &["xi", "sigma", "y"],
            IdentityId::Ober => &["mu", "lambda", "a"],
            IdentityId::Lavoie => &["alpha", "beta"],
        }
    }

    /// Whether J appears (and GMIB parameters are needed).
    pub fn uses_gmib(self) -> bool {
        !matches!(self, IdentityId::Ober | IdentityId::Lavoie)
    }

    /// Whether the LHS is computed exactly by series transport.
    pub fn series_lhs(self) -> bool {
        matches!(self, IdentityId::T3 | IdentityId::T4)
    }

    pub fn default_rtol(self) -> f64 {
        match self {
            IdentityId::T3 | IdentityId::T4 => 1e-10,
            IdentityId::Ober | IdentityId::Lavoie => 1e-9,
            _ => 1e-7,
        }
    }

    /// Quadrature tolerance used for the LHS.
    pub fn lhs_tol(self) -> f64 {
        match self {
            IdentityId::Ober | IdentityId::Lavoie => 1e-12,
            _ => 1e-10,
        }
    }

    /// Whether the two RHS variants differ as formulas.
    pub fn variants_differ(self) -> bool {
        matches!(self, IdentityId::T4 | IdentityId::T5 | IdentityId::T6)
    }

    pub fn hypothesis(self) -> &'static str {
        match self {
            IdentityId::T1 | IdentityId::T3 => "Re(λ) > 0, Re(δ) > 0, x > 0, J constraints",
            IdentityId::T2 => "Re(δ) > Re(λ) > 0, x > 0, J constraints",
            IdentityId::T4 => "Re(λ) > 0, Re(δ) > ⌊Re λ⌋ + 1 − Re(λ), x > 0, J constraints",
            IdentityId::T5 | IdentityId::T6 => "0 < Re(μ) < Re(λ), a > 0, J constraints",
            IdentityId::T7 | IdentityId::T8 => "Re(ξ+σ) > 0, Re(ξ) > 0, J constraints",
            IdentityId::Ober => "0 < Re(μ) < Re(λ), a > 0",
            IdentityId::Lavoie => "Re(α) > 0, Re(β) > 0",
        }
    }

    pub fn lhs_description(self) -> &'static str {
        match self {
            IdentityId::T1 => "(I₀₊^λ t^{δ−1} J(t))(x)",
            IdentityId::T2 => "(I₋^λ t^{−δ} J(1/t))(x)",
            IdentityId::T3 => "(D₀₊^λ t^{δ−1} J(t))(x)",
            IdentityId::T4 => "(D₋^λ t^{−δ} J(1/t))(x)",
            IdentityId::T5 => "∫_0^∞ x^{μ−1} w^{−λ} J(y/w) dx, w = x+a+√(x²+2ax)",
            IdentityId::T6 => "∫_0^∞ x^{μ−1} w^{−λ} J(xy/w) dx, w = x+a+√(x²+2ax)",
            IdentityId::T7 => {
                "∫_0^1 x^{ξ+σ−1}(1−x)^{2ξ−1}(1−x/3)^{2(ξ+σ)−1}(1−x/4)^{ξ−1} J(y(1−x/4)(1−x)²) dx"
            }
            IdentityId::T8 => {
                "∫_0^1 x^{ξ−1}(1−x)^{2(ξ+σ)−1}(1−x/3)^{2ξ−1}(1−x/4)^{ξ+σ−1} J(yx(1−x/3)²) dx"
            }
            IdentityId::Ober => "∫_0^∞ x^{μ−1}(x+a+√(x²+2ax))^{−λ} dx",
            IdentityId::Lavoie => "∫_0^1 x^{α−1}(1−x)^{2β−1}(1−x/3)^{2α−1}(1−x/4)^{β−1} dx",
        }
    }

    pub fn rhs_description(self, variant: Variant) -> &'static str {
        use Variant::*;
        match (self, variant) {
            (IdentityId::T1, _) => "x^{λ+δ−1}/Γ(γ) ₂Ψ₂[(γ,κ),(δ,1); J,(λ+δ,1); cx]",
            (IdentityId::T2, _) => "x^{λ−δ}/Γ(γ) ₂Ψ₂[(γ,κ),(δ−λ,1); J,(δ,1); c/x]",
            (IdentityId::T3, _) => "x^{δ−λ−1}/Γ(γ) ₂Ψ₂[(γ,κ),(δ,1); J,(δ−λ,1); cx]",
            (IdentityId::T4, Printed) => "x^{1−λ−δ}/Γ(γ) ₂Ψ₂[(γ,κ),(λ+δ,1); J,(δ,1); c/x]",
            (IdentityId::T4, Corrected) => "x^{−λ−δ}/Γ(γ) ₂Ψ₂[(γ,κ),(λ+δ,1); J,(δ,1); c/x]",
            (IdentityId::T5, Printed) => {
                "2^{1−μ}a^{μ−λ}Γ(2μ)/Γ(γ) ₃Ψ₃[(γ,κ),(λ+1,1),(λ−μ,1); J,(λ,1),(1+λ+μ,1); −cy/a]"
            }
            (IdentityId::T5, Corrected) => {
                "2^{1−μ}a^{μ−λ}Γ(2μ)/Γ(γ) ₃Ψ₃[(γ,κ),(λ+1,1),(λ−μ,1); J,(λ,1),(1+λ+μ,1); cy/a]"
            }
            (IdentityId::T6, Printed) => {
                "2^{1−μ}a^{μ−λ}Γ(2μ)/Γ(γ) ₃Ψ₃[(γ,κ),(λ+1,1),(2μ,2); J,(λ,1),(1+λ+μ,2); −cy/a]"
            }
            (IdentityId::T6, Corrected) => {
                "2^{1−μ}a^{μ−λ}Γ(λ−μ)/Γ(γ) ₃Ψ₃[(γ,κ),(λ+1,1),(2μ,2); J,(λ,1),(1+λ+μ,2); cy/2]"
            }
            (IdentityId::T7, _) => "Γ(ξ+σ)(2/3)^{2(ξ+σ)}/Γ(γ) ₂Ψ₂[(γ,κ),(ξ,1); J,(2ξ+σ,1); cy]",
            (IdentityId::T8, _) => "Γ(ξ+σ)(2/3)^{2ξ}/Γ(γ) ₂Ψ₂[(γ,κ),(ξ,1); J,(2ξ+σ,1); 4cy/9]",
            (IdentityId::Ober, _) => "2λa^{−λ}(a/2)^μ Γ(2μ)Γ(λ−μ)/Γ(1+λ+μ)",
            (IdentityId::Lavoie, _) => "(2/3)^{2α}Γ(α)Γ(β)/Γ(α+β)",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// The formula as stated.
    Printed,
    /// The formula obtained by integrating the defining series term by term.
    Corrected,
}

/// Serializable registry entry.
#[derive(Debug, Clone, Serialize)]
pub struct IdentitySpec {
    pub id: IdentityId,
    pub symbols: Vec<&'static str>,
    pub uses_gmib: bool,
    pub hypothesis: &'static str,
    pub lhs: &'static str,
    pub rhs_printed: &'static str,
    pub rhs_corrected: &'static str,
    pub default_rtol: f64,
}

pub fn registry() -> Vec<IdentitySpec> {
    IdentityId::ALL
        .into_iter()
        .map(|id| IdentitySpec {
            id,
            symbols: id.symbols().to_vec(),
            uses_gmib: id.uses_gmib(),
            hypothesis: id.hypothesis(),
            lhs: id.lhs_description(),
            rhs_printed: id.rhs_description(Variant::Printed),
            rhs_corrected: id.rhs_description(Variant::Corrected),
            default_rtol: id.default_rtol(),
        })
        .collect()
}

/// GMIB parameters (when J appears) plus named scalar symbols.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityArgs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GmibParams>,
    #[serde(default)]
    pub symbols: BTreeMap<String, ComplexValue>,
}

impl IdentityArgs {
    pub fn new(params: Option<GmibParams>) -> Self {
        IdentityArgs {
            params,
            symbols: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.symbols.insert(name.to_string(), real(value));
        self
    }

    pub fn with_complex(mut self, name: &str, value: ComplexValue) -> Self {
        self.symbols.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Result<ComplexValue> {
        self.symbols
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingSymbol(name.to_string()))
    }

    /// A symbol that must be a positive real (x, a).
    pub fn positive(&self, name: &str) -> Result<f64> {
        let v = self.get(name)?;
        if v.im != 0.0 || !(v.re > 0.0) || !v.re.is_finite() {
            return Err(Error::Param(format!(
                "{name} must be a positive real, got {v}"
            )));
        }
        Ok(v.re)
    }

    fn gmib(&self) -> Result<&GmibParams> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::Param("GMIB parameters are required".to_string()))
    }
}

/// Every violated hypothesis of `id` at `args`; empty means valid.
///
/// Conditions stated for every summation index `n` are checked at `n = 0`,
/// the strongest instance.
pub fn violations(id: IdentityId, args: &IdentityArgs) -> Vec<String> {
    let mut out = Vec::new();
    for name in id.symbols() {
        match args.get(name) {
            Ok(v) if !(v.re.is_finite() && v.im.is_finite()) => {
                out.push(format!("{name} is not finite"))
            }
            Ok(_) => {}
            Err(e) => out.push(e.to_string()),
        }
    }
    if !out.is_empty() {
        return out;
    }
    if id.uses_gmib() {
        match &args.params {
            None => out.push("GMIB parameters are required".to_string()),
            Some(p) => {
                out.extend(gmbessel::validate(p).iter().map(ToString::to_string));
                if p.alphas.iter().any(|a| a.im != 0.0) {
                    out.push("α_j must be real to form Fox–Wright slopes".to_string());
                }
            }
        }
    }
    let sym = |name: &str| args.get(name).unwrap_or(ZERO);
    let mut require = |ok: bool, what: &str| {
        if !ok {
            out.push(format!("{what} fails"));
        }
    };
    match id {
        IdentityId::T1 | IdentityId::T3 => {
            require(sym("lambda").re > 0.0, "Re(λ) > 0");
            require(sym("delta").re > 0.0, "Re(δ) > 0");
        }
        IdentityId::T2 => {
            require(sym("lambda").re > 0.0, "Re(λ) > 0");
            require(sym("delta").re > sym("lambda").re, "Re(δ) > Re(λ)");
        }
        IdentityId::T4 => {
            let lambda = sym("lambda");
            require(lambda.re > 0.0, "Re(λ) > 0");
            require(
                sym("delta").re > lambda.re.floor() + 1.0 - lambda.re,
                "Re(δ) > ⌊Re λ⌋ + 1 − Re(λ)",
            );
        }
        IdentityId::T5 | IdentityId::T6 | IdentityId::Ober => {
            require(sym("mu").re > 0.0, "Re(μ) > 0");
            require(sym("mu").re < sym("lambda").re, "Re(μ) < Re(λ)");
        }
        IdentityId::T7 | IdentityId::T8 => {
            require((sym("xi") + sym("sigma")).re > 0.0, "Re(ξ+σ) > 0");
            require(sym("xi").re > 0.0, "Re(ξ) > 0");
        }
        IdentityId::Lavoie => {
            require(sym("alpha").re > 0.0, "Re(α) > 0");
            require(sym("beta").re > 0.0, "Re(β) > 0");
        }
    }
    for name in ["x", "a"] {
        if id.symbols().contains(&name) {
            if let Err(e) = args.positive(name) {
                out.push(e.to_string());
            }
        }
    }
    out
}

pub fn check(id: IdentityId, args: &IdentityArgs) -> Result<()> {
    let v = violations(id, args);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Param(format!("{id}: {}", v.join("; "))))
    }
}

/// `2λ a^{−λ} (a/2)^μ Γ(2μ) Γ(λ−μ) / Γ(1+λ+μ)`.
pub fn base_oberhettinger(mu: ComplexValue, lambda: ComplexValue, a: f64) -> Result<ComplexValue> {
    if !(mu.re > 0.0 && mu.re < lambda.re) {
        return Err(Error::Domain(format!(
            "0 < Re(μ) < Re(λ) required, got μ = {mu}, λ = {lambda}"
        )));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a > 0 required, got {a}")));
    }
    Ok(2.0
        * lambda
        * real_pow(a, -lambda)
        * real_pow(a / 2.0, mu)
        * gamma(2.0 * mu)
        * gamma(lambda - mu)
        * rgamma(1.0 + lambda + mu))
}

/// `(2/3)^{2α} Γ(α) Γ(β) / Γ(α+β)`.
pub fn base_lavoie(alpha: ComplexValue, beta: ComplexValue) -> Result<ComplexValue> {
    if !(alpha.re > 0.0 && beta.re > 0.0) {
        return Err(Error::Domain(format!(
            "Re(α), Re(β) > 0 required, got α = {alpha}, β = {beta}"
        )));
    }
    Ok(real_pow(2.0 / 3.0, 2.0 * alpha) * gamma(alpha) * gamma(beta) * rgamma(alpha + beta))
}

fn closed_form(value: ComplexValue) -> SeriesResult {
    SeriesResult {
        value,
        terms_used: 0,
        last_term_magnitude: 0.0,
        status: SeriesStatus::Converged,
        warnings: Vec::new(),
    }
}

/// `prefactor/Γ(γ) · Ψ[(γ,κ), upper; J, lower; z]`.
fn fox_wright_rhs(
    p: &GmibParams,
    upper: &[(ComplexValue, f64)],
    lower: &[(ComplexValue, f64)],
    prefactor: ComplexValue,
    z: ComplexValue,
    tol: f64,
) -> Result<SeriesResult> {
    let mut up = vec![GammaFactor::new(p.gamma, p.kappa)];
    up.extend(upper.iter().map(|&(c, s)| GammaFactor::new(c, s)));
    let mut low = p.lower_factors()?;
    low.extend(lower.iter().map(|&(c, s)| GammaFactor::new(c, s)));
    let params = FoxWrightParams::new(up, low)?;
    Ok(foxwright::eval(&params, z, tol)?.scaled(prefactor * rgamma(p.gamma)))
}

/// Right-hand side of `id` in the requested variant.
pub fn rhs(
    id: IdentityId,
    args: &IdentityArgs,
    variant: Variant,
    tol: f64,
) -> Result<SeriesResult> {
    check(id, args)?;
    let corrected = variant == Variant::Corrected;
    match id {
        IdentityId::Ober => {
            return Ok(closed_form(base_oberhettinger(
                args.get("mu")?,
                args.get("lambda")?,
                args.positive("a")?,
            )?))
        }
        IdentityId::Lavoie => {
            return Ok(closed_form(base_lavoie(
                args.get("alpha")?,
                args.get("beta")?,
            )?))
        }
        _ => {}
    }
    let p = args.gmib()?;
    let c = p.c;
    let one = 1.0;
    match id {
        IdentityId::T1 => {
            let (lambda, delta, x) = (args.get("lambda")?, args.get("delta")?, args.positive("x")?);
            fox_wright_rhs(
                p,
                &[(delta, one)],
                &[(lambda + delta, one)],
                real_pow(x, lambda + delta - 1.0),
                c * x,
                tol,
            )
        }
        IdentityId::T2 => {
            let (lambda, delta, x) = (args.get("lambda")?, args.get("delta")?, args.positive("x")?);
            fox_wright_rhs(
                p,
                &[(delta - lambda, one)],
                &[(delta, one)],
                real_pow(x, lambda - delta),
                c / x,
                tol,
            )
        }
        IdentityId::T3 => {
            let (lambda, delta, x) = (args.get("lambda")?, args.get("delta")?, args.positive("x")?);
            fox_wright_rhs(
                p,
                &[(delta, one)],
                &[(delta - lambda, one)],
                real_pow(x, delta - lambda - 1.0),
                c * x,
                tol,
            )
        }
        IdentityId::T4 => {
            let (lambda, delta, x) = (args.get("lambda")?, args.get("delta")?, args.positive("x")?);
            let power = if corrected {
                -lambda - delta
            } else {
                1.0 - lambda - delta
            };
            fox_wright_rhs(
                p,
                &[(lambda + delta, one)],
                &[(delta, one)],
                real_pow(x, power),
                c / x,
                tol,
            )
        }
        IdentityId::T5 => {
            let (mu, lambda, a, y) = (
                args.get("mu")?,
                args.get("lambda")?,
                args.positive("a")?,
                args.get("y")?,
            );
            let pre = real_pow(2.0, 1.0 - mu) * real_pow(a, mu - lambda) * gamma(2.0 * mu);
            let z = if corrected { c * y / a } else { -c * y / a };
            fox_wright_rhs(
                p,
                &[(lambda + 1.0, one), (lambda - mu, one)],
                &[(lambda, one), (1.0 + lambda + mu, one)],
                pre,
                z,
                tol,
            )
        }
        IdentityId::T6 => {
            let (mu, lambda, a, y) = (
                args.get("mu")?,
                args.get("lambda")?,
                args.positive("a")?,
                args.get("y")?,
            );
            let base = real_pow(2.0, 1.0 - mu) * real_pow(a, mu - lambda);
            let (pre, z) = if corrected {
                (base * gamma(lambda - mu), c * y / 2.0)
            } else {
                (base * gamma(2.0 * mu), -c * y / a)
            };
            fox_wright_rhs(
                p,
                &[(lambda + 1.0, one), (2.0 * mu, 2.0)],
                &[(lambda, one), (1.0 + lambda + mu, 2.0)],
                pre,
                z,
                tol,
            )
        }
        IdentityId::T7 | IdentityId::T8 => {
            let (xi, sigma, y) = (args.get("xi")?, args.get("sigma")?, args.get("y")?);
            let (power, z) = if id == IdentityId::T7 {
                (2.0 * (xi + sigma), c * y)
            } else {
                (2.0 * xi, c * y * (4.0 / 9.0))
            };
            let pre = gamma(xi + sigma) * real_pow(2.0 / 3.0, power);
            fox_wright_rhs(p, &[(xi, one)], &[(2.0 * xi + sigma, one)], pre, z, tol)
        }
        IdentityId::Ober | IdentityId::Lavoie => unreachable!(),
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> ComplexValue + Send + Sync>;
/// Integrand on (0, 1) receiving `(s, 1 − s)`.
pub type PairFn = Arc<dyn Fn(f64, f64) -> ComplexValue + Send + Sync>;

/// What the left-hand side computes.
#[derive(Clone)]
pub enum Lhs {
    LeftIntegral {
        f: RealFn,
        lambda: ComplexValue,
        x: f64,
    },
    RightIntegral {
        f: RealFn,
        lambda: ComplexValue,
        x: f64,
    },
    LeftDerivative {
        f: PowerSeriesFn,
        lambda: ComplexValue,
        x: f64,
    },
    RightDerivative {
        f: PowerSeriesFn,
        lambda: ComplexValue,
        x: f64,
    },
    /// `∫_0^∞ f`, with `scale` the natural length of the integrand.
    HalfLine {
        f: RealFn,
        scale: f64,
    },
    UnitInterval {
        f: PairFn,
    },
}

impl fmt::Debug for Lhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lhs::LeftIntegral { lambda, x, .. } => write!(f, "LeftIntegral(λ = {lambda}, x = {x})"),
            Lhs::RightIntegral { lambda, x, .. } => {
                write!(f, "RightIntegral(λ = {lambda}, x = {x})")
            }
            Lhs::LeftDerivative { lambda, x, .. } => {
                write!(f, "LeftDerivative(λ = {lambda}, x = {x})")
            }
            Lhs::RightDerivative { lambda, x, .. } => {
                write!(f, "RightDerivative(λ = {lambda}, x = {x})")
            }
            Lhs::HalfLine { scale, .. } => write!(f, "HalfLine(scale = {scale})"),
            Lhs::UnitInterval { .. } => write!(f, "UnitInterval"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LhsMethod {
    Quadrature,
    SeriesTransport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsResult {
    #[serde(with = "complex::serde_pair")]
    pub value: ComplexValue,
    pub abs_error_estimate: f64,
    /// Integrand evaluations or series terms.
    pub evaluations: usize,
    pub method: LhsMethod,
}

impl Lhs {
    pub fn evaluate(&self, tol: f64) -> Result<LhsResult> {
        let quad = |r: fraccalc::QuadratureResult| LhsResult {
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
            evaluations: r.evaluations,
            method: LhsMethod::Quadrature,
        };
        let series = |r: SeriesResult| -> Result<LhsResult> {
            if !r.is_converged() {
                return Err(Error::Convergence {
                    evaluations: r.terms_used,
                    estimate: r.last_term_magnitude,
                    target: tol * r.value.norm(),
                });
            }
            Ok(LhsResult {
                value: r.value,
                abs_error_estimate: r.last_term_magnitude,
                evaluations: r.terms_used,
                method: LhsMethod::SeriesTransport,
            })
        };
        match self {
            Lhs::LeftIntegral { f, lambda, x } => {
                fraccalc::rl_integral_left(f.as_ref(), *lambda, *x, tol).map(quad)
            }
            Lhs::RightIntegral { f, lambda, x } => {
                fraccalc::rl_integral_right(f.as_ref(), *lambda, *x, tol).map(quad)
            }
            Lhs::LeftDerivative { f, lambda, x } => {
                series(fraccalc::rl_derivative_left_series(f, *lambda, *x, tol)?)
            }
            Lhs::RightDerivative { f, lambda, x } => {
                series(fraccalc::rl_derivative_right_series(f, *lambda, *x, tol)?)
            }
            Lhs::HalfLine { f, scale } => {
                let rule = TanhSinh {
                    min_distance: 1e-100,
                    ..TanhSinh::new(tol)
                };
                rule.half_line(f.as_ref(), *scale).map(quad)
            }
            Lhs::UnitInterval { f } => TanhSinh::new(tol).unit_interval(f.as_ref()).map(quad),
        }
    }
}

/// Taylor cache of J valid for arguments up to `radius`.
fn j_cache(p: &GmibParams, radius: f64) -> Result<Arc<TaylorSeries>> {
    Ok(Arc::new(gmbessel::taylor(p, radius, 1e-17)?))
}

/// `x + a + √(x² + 2ax)`.
fn ober_kernel(x: f64, a: f64) -> f64 {
    x + a + (x * (x + 2.0 * a)).sqrt()
}

/// Builds the LHS integrand (or operator) of `id`.
pub fn lhs_integrand(id: IdentityId, args: &IdentityArgs) -> Result<Lhs> {
    check(id, args)?;
    match id {
        IdentityId::Ober => {
            let (mu, lambda, a) = (args.get("mu")?, args.get("lambda")?, args.positive("a")?);
            let f = move |x: f64| real_pow(x, mu - 1.0) * real_pow(ober_kernel(x, a), -lambda);
            return Ok(Lhs::HalfLine {
                f: Arc::new(f),
                scale: a,
            });
        }
        IdentityId::Lavoie => {
            let (alpha, beta) = (args.get("alpha")?, args.get("beta")?);
            let f = move |s: f64, r: f64| {
                real_pow(s, alpha - 1.0)
                    * real_pow(r, 2.0 * beta - 1.0)
                    * real_pow(1.0 - s / 3.0, 2.0 * alpha - 1.0)
                    * real_pow(1.0 - s / 4.0, beta - 1.0)
            };
            return Ok(Lhs::UnitInterval { f: Arc::new(f) });
        }
        _ => {}
    }
    let p = args.gmib()?;
    Ok(match id {
        IdentityId::T1 | IdentityId::T2 | IdentityId::T3 | IdentityId::T4 => {
            let (lambda, delta, x) = (args.get("lambda")?, args.get("delta")?, args.positive("x")?);
            match id {
                IdentityId::T1 => {
                    let j = j_cache(p, x)?;
                    let f = move |t: f64| real_pow(t, delta - 1.0) * j.eval_real(t);
                    Lhs::LeftIntegral {
                        f: Arc::new(f),
                        lambda,
                        x,
                    }
                }
                IdentityId::T2 => {
                    let j = j_cache(p, 1.0 / x)?;
                    let f = move |t: f64| real_pow(t, -delta) * j.eval_real(1.0 / t);
                    Lhs::RightIntegral {
                        f: Arc::new(f),
                        lambda,
                        x,
                    }
                }
                IdentityId::T3 => Lhs::LeftDerivative {
                    f: PowerSeriesFn::new(
                        Direction::Ascending,
                        delta - 1.0,
                        gmbessel::coefficient_fn(p)?,
                    ),
                    lambda,
                    x,
                },
                _ => Lhs::RightDerivative {
                    f: PowerSeriesFn::new(
                        Direction::Descending,
                        delta,
                        gmbessel::coefficient_fn(p)?,
                    ),
                    lambda,
                    x,
                },
            }
        }
        IdentityId::T5 | IdentityId::T6 => {
            let (mu, lambda, a, y) = (
                args.get("mu")?,
                args.get("lambda")?,
                args.positive("a")?,
                args.get("y")?,
            );
            let outer = id == IdentityId::T6;
            let j = j_cache(p, if outer { y.norm() / 2.0 } else { y.norm() / a })?;
            let f = move |x: f64| {
                let w = ober_kernel(x, a);
                let arg = if outer { y * (x / w) } else { y / w };
                real_pow(x, mu - 1.0) * real_pow(w, -lambda) * j.eval(arg)
            };
            Lhs::HalfLine {
                f: Arc::new(f),
                scale: a,
            }
        }
        IdentityId::T7 | IdentityId::T8 => {
            let (xi, sigma, y) = (args.get("xi")?, args.get("sigma")?, args.get("y")?);
            let first = id == IdentityId::T7;
            let j = j_cache(
                p,
                if first {
                    y.norm()
                } else {
                    y.norm() * 4.0 / 9.0
                },
            )?;
            let f = move |s: f64, r: f64| {
                let third = 1.0 - s / 3.0;
                let quarter = 1.0 - s / 4.0;
                if first {
                    real_pow(s, xi + sigma - 1.0)
                        * real_pow(r, 2.0 * xi - 1.0)
                        * real_pow(third, 2.0 * (xi + sigma) - 1.0)
                        * real_pow(quarter, xi - 1.0)
                        * j.eval(y * (quarter * r * r))
                } else {
                    real_pow(s, xi - 1.0)
                        * real_pow(r, 2.0 * (xi + sigma) - 1.0)
                        * real_pow(third, 2.0 * xi - 1.0)
                        * real_pow(quarter, xi + sigma - 1.0)
                        * j.eval(y * (s * third * third))
                }
            };
            Lhs::UnitInterval { f: Arc::new(f) }
        }
        IdentityId::Ober | IdentityId::Lavoie => unreachable!(),
    })
}

/// Evaluates the LHS of `id` at its default tolerance.
pub fn lhs(id: IdentityId, args: &IdentityArgs) -> Result<LhsResult> {
    lhs_integrand(id, args)?.evaluate(id.lhs_tol())
}
