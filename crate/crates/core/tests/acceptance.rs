//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::f64::consts::{E, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gmib::complex::{real, rel_err, ZERO};
use gmib::foxwright::{self, real_factors, FoxWrightParams, GammaFactor, SeriesStatus};
use gmib::fraccalc::{power_rule_left, power_rule_right, rl_integral_left, rl_integral_right};
use gmib::gamma::{gamma, is_pole};
use gmib::gmbessel::{self, GmibParams};
use gmib::harness::{self, GridSpec, ResolvedVariant, TolOverrides};
use gmib::identities::{self, IdentityArgs, IdentityId, Variant};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Check {
    ensure(
        elapsed < limit,
        format!(
            "{detail}; {:.2}s (limit {}s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn gamma_kernel() -> Check {
    let start = Instant::now();
    let (mut recurrence, mut reflection): (f64, f64) = (0.0, 0.0);
    for i in 0..=80 {
        for j in 0..=40 {
            let z = Complex64::new(-10.0 + 0.25 * i as f64 + 0.013, -10.0 + 0.5 * j as f64);
            if !is_pole(z) && !is_pole(z + 1.0) {
                recurrence = recurrence.max(rel_err(gamma(z + 1.0), z * gamma(z)));
            }
            let v = gamma(z) * gamma(real(1.0) - z) * (z * PI).sin() / PI;
            reflection = reflection.max((v - 1.0).norm());
        }
    }
    let half = rel_err(gamma(real(0.5)), real(PI.sqrt()));
    let detail =
        format!("recurrence {recurrence:.1e}, reflection {reflection:.1e}, Γ(1/2) {half:.1e}");
    ensure(
        recurrence <= 1e-11 && reflection <= 1e-11 && half <= 1e-13,
        detail.clone(),
    )?;
    within(start.elapsed(), Duration::from_secs(1), detail)
}

fn fox_wright_anchors() -> Check {
    let geometric =
        FoxWrightParams::new(real_factors(&[(1.0, 1.0)]), vec![]).map_err(|e| e.to_string())?;
    let exponential =
        FoxWrightParams::new(real_factors(&[(1.0, 1.0)]), real_factors(&[(1.0, 1.0)]))
            .map_err(|e| e.to_string())?;
    let g = foxwright::eval(&geometric, real(0.5), 1e-15)
        .map_err(|e| e.to_string())?
        .value;
    let x = foxwright::eval(&exponential, real(1.0), 1e-15)
        .map_err(|e| e.to_string())?
        .value;
    let (eg, ex) = (rel_err(g, real(2.0)), rel_err(x, real(E)));

    // upper (γ, κ), lower (β+1, α), (λ+δ, 1) with κ = α = 1
    let entire = FoxWrightParams::new(
        vec![GammaFactor::new(real(1.3), 1.0)],
        real_factors(&[(1.7, 1.0), (2.2, 1.0)]),
    )
    .map_err(|e| e.to_string())?;
    let quarter = FoxWrightParams::new(real_factors(&[(1.0, 2.0)]), real_factors(&[(1.0, 1.0)]))
        .map_err(|e| e.to_string())?;
    let radii = [
        geometric.convergence_radius(),
        entire.convergence_radius(),
        quarter.convergence_radius(),
    ];
    let radii_ok = (radii[0] - 1.0).abs() <= 1e-15
        && radii[1].is_infinite()
        && (radii[2] - 0.25).abs() <= 1e-15;
    ensure(
        eg <= 1e-12 && ex <= 1e-12 && radii_ok,
        format!("geometric {eg:.1e}, exponential {ex:.1e}, radii {radii:?}"),
    )
}

fn harness_range_params(rng: &mut ChaCha8Rng) -> GmibParams {
    let m = rng.gen_range(1..=2);
    let alphas: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    let betas: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..1.0)).collect();
    GmibParams::real(
        &alphas,
        &betas,
        rng.gen_range(1.0..2.0),
        rng.gen_range(0.5..1.0),
        rng.gen_range(0.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

fn dual_path() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    while points < 250 {
        let p = harness_range_params(&mut rng);
        if !gmbessel::validate(&p).is_empty() {
            continue;
        }
        let z = Complex64::from_polar(rng.gen_range(0.0..5.0), rng.gen_range(-PI..PI));
        let a = gmbessel::eval(&p, z, 1e-15).map_err(|e| e.to_string())?;
        let b = gmbessel::eval_direct(&p, z, 1e-15).map_err(|e| e.to_string())?;
        if a.status != SeriesStatus::Converged {
            return Err(format!("{p:?} at {z}: {:?}", a.status));
        }
        worst = worst.max(rel_err(a.value, b.value));
        points += 1;
    }
    let collapse = GmibParams::real(&[1.0], &[0.0], 1.0, 1.0, 1.0, 1.0);
    let mut collapse_err: f64 = 0.0;
    for z in [real(1.0), real(-2.5), Complex64::new(0.5, 3.0)] {
        let v = gmbessel::eval(&collapse, z, 1e-15)
            .map_err(|e| e.to_string())?
            .value;
        collapse_err = collapse_err.max(rel_err(v, z.exp()));
    }
    let detail = format!("{points} points, worst {worst:.1e}; e^z collapse {collapse_err:.1e}");
    ensure(worst <= 1e-11 && collapse_err <= 1e-12, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(10), detail)
}

fn power_rules() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for lambda in [0.3, 0.7, 1.0, 1.5, 2.2] {
        for d in [0.3, 0.7, 1.0, 1.5, 2.5] {
            for x in [0.5, 1.0, 2.0] {
                let l = real(lambda);
                let left = rl_integral_left(|t| real(t.powf(d - 1.0)), l, x, 1e-12)
                    .map_err(|e| e.to_string())?;
                let expected = power_rule_left(l, real(d), x).map_err(|e| e.to_string())?;
                worst = worst.max(rel_err(left.value, expected));
                // the right integral of t^{−δ} needs δ > λ
                let delta = lambda + d;
                let right = rl_integral_right(|t| real(t.powf(-delta)), l, x, 1e-12)
                    .map_err(|e| e.to_string())?;
                let expected = power_rule_right(l, real(delta), x).map_err(|e| e.to_string())?;
                worst = worst.max(rel_err(right.value, expected));
                count += 2;
            }
        }
    }
    let detail = format!("{count} integrals, worst {worst:.1e}");
    ensure(worst <= 1e-9, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(30), detail)
}

fn base_integrals() -> Check {
    let ober_args = IdentityArgs::new(None)
        .with("mu", 1.0)
        .with("lambda", 2.0)
        .with("a", 1.0);
    let ober_quad = identities::lhs(IdentityId::Ober, &ober_args)
        .map_err(|e| e.to_string())?
        .value;
    let ober_closed =
        identities::base_oberhettinger(real(1.0), real(2.0), 1.0).map_err(|e| e.to_string())?;
    let lavoie_args = IdentityArgs::new(None).with("alpha", 1.0).with("beta", 1.0);
    let lavoie_quad = identities::lhs(IdentityId::Lavoie, &lavoie_args)
        .map_err(|e| e.to_string())?
        .value;
    let lavoie_closed = identities::base_lavoie(real(1.0), real(1.0)).map_err(|e| e.to_string())?;
    let errs = [
        rel_err(ober_quad, real(1.0 / 3.0)),
        rel_err(ober_closed, real(1.0 / 3.0)),
        rel_err(lavoie_quad, real(4.0 / 9.0)),
        rel_err(lavoie_closed, real(4.0 / 9.0)),
    ];
    ensure(
        errs.iter().all(|&e| e <= 1e-9),
        format!(
            "OBER quadrature {:.1e}, closed {:.1e}; LAVOIE quadrature {:.1e}, closed {:.1e}",
            errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

fn identity_sweep() -> Check {
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for id in IdentityId::ALL {
        let r = harness::verify(id, &grid, TolOverrides::default()).map_err(|e| e.to_string())?;
        let s = &r.summary;
        let share = s.passed as f64 / s.evaluated as f64;
        let good = match id {
            IdentityId::T1 | IdentityId::T2 | IdentityId::T7 | IdentityId::T8 => {
                r.rtol <= 1e-7 && share >= 0.95 && s.both_failed == 0
            }
            IdentityId::T3 | IdentityId::T4 => r.rtol <= 1e-10 && share >= 0.95,
            IdentityId::T5 | IdentityId::T6 => {
                let tag = s.resolved_variant;
                let single = matches!(tag, ResolvedVariant::Printed | ResolvedVariant::Corrected);
                let stable = [1u64, 2, 3].into_iter().all(|seed| {
                    let sub = GridSpec {
                        seed,
                        points_cap: 300,
                        ..GridSpec::default()
                    };
                    harness::verify(id, &sub, TolOverrides::default())
                        .map(|r| r.summary.resolved_variant == tag)
                        .unwrap_or(false)
                });
                single && stable && share >= 0.95
            }
            IdentityId::Ober | IdentityId::Lavoie => share == 1.0,
        };
        ok &= good;
        lines.push(format!(
            "{id} {}/{} (both fail {}, {:?})",
            s.passed, s.evaluated, s.both_failed, s.resolved_variant
        ));
    }
    let detail = lines.join(", ");
    ensure(ok, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(300), detail)
}

fn reductions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut choi: f64 = 0.0;
    for _ in 0..50 {
        let p = gmbessel::reduce_choi_agarwal(&harness_range_params(&mut rng));
        let z = Complex64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(-PI..PI));
        let reduced = gmbessel::eval(&p, z, 1e-16)
            .map_err(|e| e.to_string())?
            .value;
        let direct = gmbessel::choi_agarwal_series(&p.alphas, &p.betas, p.gamma, p.kappa, z, 1e-16)
            .map_err(|e| e.to_string())?
            .value;
        choi = choi.max(rel_err(reduced, direct));
    }

    let mut at_zero: f64 = 0.0;
    for _ in 0..10 {
        let p = harness_range_params(&mut rng);
        let j0 = gmbessel::eval(&p, ZERO, 1e-15)
            .map_err(|e| e.to_string())?
            .value;
        let (mu, lambda, a) = (
            rng.gen_range(0.2..1.0),
            rng.gen_range(1.1..2.0),
            rng.gen_range(0.5..2.0),
        );
        let ober = identities::base_oberhettinger(real(mu), real(lambda), a)
            .map_err(|e| e.to_string())?
            * j0;
        let (xi, sigma) = (rng.gen_range(0.3..1.5), rng.gen_range(0.3..1.5));
        for id in [IdentityId::T5, IdentityId::T6] {
            let args = IdentityArgs::new(Some(p.clone()))
                .with("mu", mu)
                .with("lambda", lambda)
                .with("a", a)
                .with("y", 0.0);
            let v = identities::rhs(id, &args, Variant::Corrected, 1e-15)
                .map_err(|e| e.to_string())?
                .value;
            at_zero = at_zero.max(rel_err(v, ober));
        }
        for id in [IdentityId::T7, IdentityId::T8] {
            let (alpha, beta) = if id == IdentityId::T7 {
                (xi + sigma, xi)
            } else {
                (xi, xi + sigma)
            };
            let lavoie =
                identities::base_lavoie(real(alpha), real(beta)).map_err(|e| e.to_string())? * j0;
            let args = IdentityArgs::new(Some(p.clone()))
                .with("xi", xi)
                .with("sigma", sigma)
                .with("y", 0.0);
            let v = identities::rhs(id, &args, Variant::Corrected, 1e-15)
                .map_err(|e| e.to_string())?
                .value;
            at_zero = at_zero.max(rel_err(v, lavoie));
        }
    }
    ensure(
        choi <= 1e-13 && at_zero <= 1e-9,
        format!(
            "Choi-Agarwal worst {choi:.1e} over 50 points; y = 0 reductions worst {at_zero:.1e}"
        ),
    )
}

fn determinism() -> Check {
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_gmib"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() == Some(2) {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let mut compared = 0;
    for (id, format) in [("T2", "json"), ("T6", "csv"), ("LAVOIE", "json")] {
        let args = [
            "verify",
            id,
            "--seed",
            "17",
            "--points-cap",
            "200",
            "--format",
            format,
        ];
        let first = run(&args)?;
        if first.is_empty() || first != run(&args)? {
            return Err(format!("{id} {format} output differs between runs"));
        }
        compared += first.len();
    }
    Ok(format!("3 repeated runs byte-identical ({compared} bytes)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("gamma kernel", gamma_kernel),
        ("Fox-Wright anchors", fox_wright_anchors),
        ("dual-path agreement", dual_path),
        ("power rules by quadrature", power_rules),
        ("base integrals", base_integrals),
        ("identity sweep", identity_sweep),
        ("reductions", reductions),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
