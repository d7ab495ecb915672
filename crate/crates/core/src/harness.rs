//! Grid sweeps that compare each identity's LHS with both RHS variants.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::error::{Error, Result};
use crate::foxwright::SeriesStatus;
use crate::gmbessel::GmibParams;
use crate::identities::{self, IdentityArgs, IdentityId, Variant};

/// Large enough that the default grids run in full.
pub const DEFAULT_POINTS_CAP: usize = 50_000;
pub const DEFAULT_ATOL: f64 = 1e-15;
const RHS_TOL: f64 = 1e-15;

/// Explicit values or `count` evenly spaced values in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolRange {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

impl SymbolRange {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SymbolRange::List(v) => v.clone(),
            SymbolRange::Range { min, max, count } => match count {
                0 => Vec::new(),
                1 => vec![*min],
                n => (0..*n)
                    .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

/// Values for the J parameters; every combination is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GmibGrid {
    pub m: Vec<usize>,
    pub alpha: SymbolRange,
    pub beta: SymbolRange,
    pub b: SymbolRange,
    pub c: SymbolRange,
    pub gamma: SymbolRange,
    pub kappa: SymbolRange,
}

impl Default for GmibGrid {
    fn default() -> Self {
        GmibGrid {
            m: vec![1, 2],
            alpha: SymbolRange::List(vec![0.5, 1.0, 2.0]),
            beta: SymbolRange::List(vec![0.5, 1.0]),
            b: SymbolRange::List(vec![0.0, 1.0]),
            c: SymbolRange::List(vec![-1.0, 0.5, 1.0]),
            gamma: SymbolRange::List(vec![1.0, 2.0]),
            kappa: SymbolRange::List(vec![0.5, 1.0]),
        }
    }
}

impl GmibGrid {
    fn params(&self) -> Vec<GmibParams> {
        let (alpha, beta) = (self.alpha.values(), self.beta.values());
        let mut shapes = Vec::new();
        for &m in &self.m {
            for alphas in tuples(&alpha, m) {
                for betas in tuples(&beta, m) {
                    shapes.push((alphas.clone(), betas));
                }
            }
        }
        let mut out = Vec::new();
        for (alphas, betas) in &shapes {
            for &gamma in &self.gamma.values() {
                for &kappa in &self.kappa.values() {
                    for &b in &self.b.values() {
                        for &c in &self.c.values() {
                            out.push(GmibParams::real(alphas, betas, gamma, kappa, b, c));
                        }
                    }
                }
            }
        }
        out
    }
}

/// All length-`m` sequences over `values`, lexicographic.
fn tuples(values: &[f64], m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

pub fn default_symbol_values(name: &str) -> Vec<f64> {
    match name {
        "x" | "a" => vec![0.5, 1.0, 2.0],
        "y" => vec![0.25, 1.0],
        _ => vec![0.3, 0.7, 1.5],
    }
}

/// Parameter grid for a sweep. Omitted fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Per-symbol overrides; symbols not listed use the default values.
    pub symbols: BTreeMap<String, SymbolRange>,
    pub gmib: GmibGrid,
    pub seed: u64,
    /// Valid points beyond this many are subsampled with `seed`.
    pub points_cap: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            symbols: BTreeMap::new(),
            gmib: GmibGrid::default(),
            seed: 0,
            points_cap: DEFAULT_POINTS_CAP,
        }
    }
}

impl GridSpec {
    pub fn values(&self, name: &str) -> Vec<f64> {
        self.symbols
            .get(name)
            .map(SymbolRange::values)
            .unwrap_or_else(|| default_symbol_values(name))
    }
}

/// Points of a grid that satisfy the identity's hypotheses.
#[derive(Debug, Clone)]
pub struct GeneratedGrid {
    pub points: Vec<IdentityArgs>,
    pub generated: usize,
    pub valid: usize,
}

/// Enumerates the cartesian grid, filters by validity and subsamples down to
/// `points_cap` (indices drawn with ChaCha8 seeded by `seed`, kept in order).
pub fn generate(id: IdentityId, grid: &GridSpec) -> Result<GeneratedGrid> {
    let params: Vec<Option<GmibParams>> = if id.uses_gmib() {
        grid.gmib.params().into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let symbol_values: Vec<(&str, Vec<f64>)> =
        id.symbols().iter().map(|&s| (s, grid.values(s))).collect();
    let mut generated = 0usize;
    let mut valid = Vec::new();
    for p in &params {
        for combo in cartesian(&symbol_values) {
            generated += 1;
            let mut args = IdentityArgs::new(p.clone());
            for (name, v) in symbol_values.iter().map(|(n, _)| *n).zip(combo) {
                args = args.with(name, v);
            }
            if identities::violations(id, &args).is_empty() {
                valid.push(args);
            }
        }
    }
    if valid.is_empty() {
        return Err(Error::EmptyGrid { generated });
    }
    let total = valid.len();
    let points = if total > grid.points_cap {
        let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
        let mut picked = index::sample(&mut rng, total, grid.points_cap).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| valid[i].clone()).collect()
    } else {
        valid
    };
    Ok(GeneratedGrid {
        points,
        generated,
        valid: total,
    })
}

fn cartesian(lists: &[(&str, Vec<f64>)]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for (_, values) in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TolOverrides {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which RHS variant the sweep supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResolvedVariant {
    Printed,
    Corrected,
    /// Both variants pass (they coincide, or the grid cannot tell them apart).
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub symbols: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GmibParams>,
    #[serde(with = "opt_pair")]
    pub lhs: Option<ComplexValue>,
    pub lhs_error_estimate: Option<f64>,
    pub lhs_evaluations: Option<usize>,
    #[serde(with = "opt_pair")]
    pub rhs_printed: Option<ComplexValue>,
    #[serde(with = "opt_pair")]
    pub rhs_corrected: Option<ComplexValue>,
    pub rhs_terms_used: Option<usize>,
    pub rhs_status: Option<SeriesStatus>,
    pub rel_err_printed: Option<f64>,
    pub rel_err_corrected: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl PointReport {
    pub fn passes(&self, variant: Variant, rtol: f64) -> bool {
        let err = match variant {
            Variant::Printed => self.rel_err_printed,
            Variant::Corrected => self.rel_err_corrected,
        };
        err.is_some_and(|e| e <= rtol)
    }

    /// The better-matching RHS and its error.
    pub fn best(&self) -> (Option<ComplexValue>, Option<f64>) {
        match (self.rel_err_printed, self.rel_err_corrected) {
            (Some(p), Some(c)) if p < c => (self.rhs_printed, Some(p)),
            (Some(p), None) => (self.rhs_printed, Some(p)),
            (_, c) => (self.rhs_corrected, c),
        }
    }
}

mod opt_pair {
    use super::ComplexValue;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Option<ComplexValue>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ComplexValue>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| ComplexValue::new(re, im)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub generated: usize,
    pub valid: usize,
    /// Fraction of generated points rejected by the hypotheses.
    pub filter_rate: f64,
    pub evaluated: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub pass_printed: usize,
    pub pass_corrected: usize,
    pub both_failed: usize,
    pub max_rel_err_printed: Option<f64>,
    pub max_rel_err_corrected: Option<f64>,
    pub resolved_variant: ResolvedVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub rtol: f64,
    pub atol: f64,
    pub seed: u64,
    pub points: Vec<PointReport>,
    pub summary: Summary,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// `|lhs − rhs| / max(|rhs|, atol/rtol)`, so `≤ rtol` means
/// `|lhs − rhs| ≤ max(atol, rtol·|rhs|)`.
pub fn scaled_error(lhs: ComplexValue, rhs: ComplexValue, rtol: f64, atol: f64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(atol / rtol)
}

fn evaluate_point(
    id: IdentityId,
    index: usize,
    args: &IdentityArgs,
    rtol: f64,
    atol: f64,
) -> PointReport {
    let mut errors = Vec::new();
    let lhs = identities::lhs(id, args)
        .map_err(|e| errors.push(format!("lhs: {e}")))
        .ok();
    let mut rhs = |variant| {
        identities::rhs(id, args, variant, RHS_TOL)
            .map_err(|e| errors.push(format!("rhs {variant:?}: {e}")))
            .ok()
    };
    let printed = rhs(Variant::Printed);
    let corrected = rhs(Variant::Corrected);
    for (name, r) in [("printed", &printed), ("corrected", &corrected)] {
        if let Some(r) = r {
            if !r.is_converged() {
                errors.push(format!("rhs {name}: series status {:?}", r.status));
            }
        }
    }
    let err = |r: &Option<crate::foxwright::SeriesResult>| match (&lhs, r) {
        (Some(l), Some(r)) if r.is_converged() => Some(scaled_error(l.value, r.value, rtol, atol)),
        _ => None,
    };
    let rel_err_printed = err(&printed);
    let rel_err_corrected = err(&corrected);
    let best = match (rel_err_printed, rel_err_corrected) {
        (Some(p), Some(c)) => Some(p.min(c)),
        (p, c) => p.or(c),
    };
    let verdict = if best.is_some_and(|e| e <= rtol) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    PointReport {
        index,
        symbols: args
            .symbols
            .iter()
            .map(|(k, v)| (k.clone(), v.re))
            .collect(),
        params: args.params.clone(),
        lhs: lhs.as_ref().map(|l| l.value),
        lhs_error_estimate: lhs.as_ref().map(|l| l.abs_error_estimate),
        lhs_evaluations: lhs.as_ref().map(|l| l.evaluations),
        rhs_printed: printed.as_ref().map(|r| r.value),
        rhs_corrected: corrected.as_ref().map(|r| r.value),
        rhs_terms_used: corrected.as_ref().map(|r| r.terms_used),
        rhs_status: corrected.as_ref().map(|r| r.status),
        rel_err_printed,
        rel_err_corrected,
        verdict,
        errors,
    }
}

/// Share of points a variant must pass to be credited.
const RESOLVE_SHARE: f64 = 0.95;

fn summarize(points: &[PointReport], rtol: f64, generated: usize, valid: usize) -> Summary {
    let count = |f: &dyn Fn(&PointReport) -> bool| points.iter().filter(|p| f(p)).count();
    let passed = count(&|p| p.verdict == Verdict::Pass);
    let pass_printed = count(&|p| p.passes(Variant::Printed, rtol));
    let pass_corrected = count(&|p| p.passes(Variant::Corrected, rtol));
    let both_failed =
        count(&|p| !p.passes(Variant::Printed, rtol) && !p.passes(Variant::Corrected, rtol));
    let max =
        |f: &dyn Fn(&PointReport) -> Option<f64>| points.iter().filter_map(f).reduce(f64::max);
    let n = points.len() as f64;
    let credited = |k: usize| k as f64 >= RESOLVE_SHARE * n;
    let resolved_variant = match (credited(pass_printed), credited(pass_corrected)) {
        (true, true) => ResolvedVariant::Both,
        (true, false) => ResolvedVariant::Printed,
        (false, true) => ResolvedVariant::Corrected,
        (false, false) => ResolvedVariant::Neither,
    };
    Summary {
        generated,
        valid,
        filter_rate: 1.0 - valid as f64 / generated as f64,
        evaluated: points.len(),
        passed,
        failed: points.len() - passed,
        errors: count(&|p| !p.errors.is_empty()),
        pass_printed,
        pass_corrected,
        both_failed,
        max_rel_err_printed: max(&|p| p.rel_err_printed),
        max_rel_err_corrected: max(&|p| p.rel_err_corrected),
        resolved_variant,
    }
}

/// Thread pool capped by `GMIB_THREADS` when set.
fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("GMIB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            builder = builder.num_threads(n);
        }
    }
    builder
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))
}

/// Sweeps `grid` for `id`. Per-point failures are recorded, never raised.
pub fn verify(id: IdentityId, grid: &GridSpec, tol: TolOverrides) -> Result<IdentityReport> {
    let rtol = tol.rtol.unwrap_or(id.default_rtol());
    let atol = tol.atol.unwrap_or(DEFAULT_ATOL);
    if !(rtol > 0.0 && atol >= 0.0) {
        return Err(Error::Param(format!(
            "need rtol > 0 and atol >= 0, got {rtol}, {atol}"
        )));
    }
    let grid_points = generate(id, grid)?;
    let points: Vec<PointReport> = pool()?.install(|| {
        grid_points
            .points
            .par_iter()
            .enumerate()
            .map(|(i, args)| evaluate_point(id, i, args, rtol, atol))
            .collect()
    });
    let summary = summarize(&points, rtol, grid_points.generated, grid_points.valid);
    Ok(IdentityReport {
        id,
        rtol,
        atol,
        seed: grid.seed,
        points,
        summary,
    })
}

/// Every identity on the same grid.
pub fn report(grid: &GridSpec, tol: TolOverrides) -> Result<Vec<IdentityReport>> {
    IdentityId::ALL
        .into_iter()
        .map(|id| verify(id, grid, tol))
        .collect()
}

fn format_number(v: f64) -> String {
    format!("{v}")
}

fn format_list(v: &[ComplexValue]) -> String {
    v.iter()
        .map(|z| format_complex(*z))
        .collect::<Vec<_>>()
        .join("|")
}

fn format_complex(z: ComplexValue) -> String {
    if z.im == 0.0 {
        format_number(z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// `name=value;...` with GMIB parameters first.
pub fn symbol_string(point: &PointReport) -> String {
    let mut parts = Vec::new();
    if let Some(p) = &point.params {
        parts.push(format!("alphas={}", format_list(&p.alphas)));
        parts.push(format!("betas={}", format_list(&p.betas)));
        parts.push(format!("gamma={}", format_complex(p.gamma)));
        parts.push(format!("kappa={}", format_number(p.kappa)));
        parts.push(format!("b={}", format_complex(p.b)));
        parts.push(format!("c={}", format_complex(p.c)));
    }
    parts.extend(
        point
            .symbols
            .iter()
            .map(|(k, v)| format!("{k}={}", format_number(*v))),
    );
    parts.join(";")
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    point_index: usize,
    symbols: String,
    lhs_re: Option<f64>,
    lhs_im: Option<f64>,
    rhs_re: Option<f64>,
    rhs_im: Option<f64>,
    rel_err: Option<f64>,
    verdict: Verdict,
}

/// One row per point; the RHS columns hold the better-matching variant.
pub fn write_csv<W: Write>(reports: &[IdentityReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        for p in &r.points {
            let (rhs, rel_err) = p.best();
            w.serialize(CsvRow {
                id: r.id.name(),
                point_index: p.index,
                symbols: symbol_string(p),
                lhs_re: p.lhs.map(|z| z.re),
                lhs_im: p.lhs.map(|z| z.im),
                rhs_re: rhs.map(|z| z.re),
                rhs_im: rhs.map(|z| z.im),
                rel_err,
                verdict: p.verdict,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_expand() {
        assert_eq!(
            SymbolRange::Range {
                min: 0.0,
                max: 1.0,
                count: 3
            }
            .values(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            SymbolRange::Range {
                min: 2.0,
                max: 5.0,
                count: 1
            }
            .values(),
            vec![2.0]
        );
        let parsed: SymbolRange = serde_json::from_str("[0.3, 0.7]").unwrap();
        assert_eq!(parsed, SymbolRange::List(vec![0.3, 0.7]));
        let parsed: SymbolRange = serde_json::from_str(r#"{"min":1,"max":2,"count":2}"#).unwrap();
        assert_eq!(parsed.values(), vec![1.0, 2.0]);
    }

    #[test]
    fn default_gmib_grid_size() {
        // m=1: 3·2 shapes, m=2: 9·4 shapes; times γ, κ, b, c
        assert_eq!(GmibGrid::default().params().len(), (6 + 36) * 2 * 2 * 2 * 3);
    }

    #[test]
    fn partial_grid_json_keeps_defaults() {
        let g: GridSpec = serde_json::from_str(r#"{"seed": 7, "gmib": {"c": [0]}}"#).unwrap();
        assert_eq!(g.seed, 7);
        assert_eq!(g.points_cap, DEFAULT_POINTS_CAP);
        assert_eq!(g.gmib.m, vec![1, 2]);
        assert_eq!(g.gmib.c.values(), vec![0.0]);
        assert_eq!(g.values("lambda"), vec![0.3, 0.7, 1.5]);
    }

    #[test]
    fn generation_filters_and_caps() {
        let grid = GridSpec {
            points_cap: 400,
            ..GridSpec::default()
        };
        let g = generate(IdentityId::Ober, &grid).unwrap();
        assert_eq!(g.generated, 27);
        assert_eq!(g.valid, 9); // three (μ, λ) pairs with μ < λ, three a
        let g = generate(IdentityId::T1, &grid).unwrap();
        assert_eq!(g.points.len(), 400);
        assert_eq!(g.valid, 1008 * 27);
        let again = generate(IdentityId::T1, &grid).unwrap();
        assert_eq!(g.points, again.points);
        let other = generate(IdentityId::T1, &GridSpec { seed: 1, ..grid }).unwrap();
        assert_ne!(g.points, other.points);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let mut grid = GridSpec::default();
        grid.symbols
            .insert("mu".into(), SymbolRange::List(vec![2.0]));
        grid.symbols
            .insert("lambda".into(), SymbolRange::List(vec![1.0]));
        assert!(matches!(
            generate(IdentityId::Ober, &grid),
            Err(Error::EmptyGrid { generated: 3 })
        ));
    }

    #[test]
    fn scaled_error_uses_atol_floor() {
        let e = scaled_error(
            ComplexValue::new(1e-20, 0.0),
            ComplexValue::new(0.0, 0.0),
            1e-7,
            1e-15,
        );
        assert!(e <= 1e-7);
        let e = scaled_error(
            ComplexValue::new(1.1, 0.0),
            ComplexValue::new(1.0, 0.0),
            1e-7,
            1e-15,
        );
        assert!((e - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ober_sweep_passes() {
        let r = verify(
            IdentityId::Ober,
            &GridSpec::default(),
            TolOverrides::default(),
        )
        .unwrap();
        assert!(r.all_pass(), "{:?}", r.summary);
        assert_eq!(r.summary.resolved_variant, ResolvedVariant::Both);
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "id,point_index,symbols,lhs_re,lhs_im,rhs_re,rhs_im,rel_err,verdict"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("OBER,0,a=0.5;lambda=0.7;mu=0.3,"));
    }
}
