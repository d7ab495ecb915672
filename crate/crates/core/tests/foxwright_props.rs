use gmib::complex::{real, rel_err};
use gmib::foxwright::{
    self, real_factors, FoxWrightParams, GammaFactor, SeriesOptions, SeriesStatus,
};
use gmib::gamma::gamma;
use num_complex::Complex64;
use proptest::prelude::*;

fn factor() -> impl Strategy<Value = GammaFactor> {
    (0.2f64..3.0, -1.0f64..1.0, 0.3f64..2.0)
        .prop_map(|(re, im, s)| GammaFactor::new(Complex64::new(re, im), s))
}

/// Upper and lower lists with a positive margin.
fn entire_params() -> impl Strategy<Value = FoxWrightParams> {
    (
        prop::collection::vec(factor(), 1..3),
        prop::collection::vec(factor(), 1..3),
    )
        .prop_filter_map("margin must be positive", |(upper, lower)| {
            FoxWrightParams::new(upper, lower)
                .ok()
                .filter(|p| p.margin() > 0.1)
        })
}

fn arg(max: f64) -> impl Strategy<Value = Complex64> {
    (0.01f64..max, -3.1f64..3.1).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn term_matches_gamma_products(p in entire_params(), z in arg(4.0), n in 0usize..25) {
        let mut expected = z.powu(n as u32) * gamma(real(n as f64 + 1.0)).inv();
        for f in p.upper() {
            expected *= gamma(f.coefficient + f.slope * n as f64);
        }
        for f in p.lower() {
            expected /= gamma(f.coefficient + f.slope * n as f64);
        }
        let t = p.term(n, z).unwrap();
        prop_assert!(rel_err(t, expected) <= 1e-10, "{:e}", rel_err(t, expected));
    }

    #[test]
    fn unit_slope_term_ratio(a in 0.2f64..4.0, b in 0.2f64..4.0, c in 0.2f64..4.0, z in arg(2.0), n in 0usize..60) {
        // ₁Ψ₁ with unit slopes: t_{n+1}/t_n = (a+n)·z / ((b+n)(n+1)); second factor pins the lower side
        let p = FoxWrightParams::new(real_factors(&[(a, 1.0), (c, 1.0)]), real_factors(&[(b, 1.0), (c, 1.0)])).unwrap();
        // fdiv: the plain complex quotient squares a ~1e-160 denominator into subnormals
        let ratio = p.term(n + 1, z).unwrap().fdiv(p.term(n, z).unwrap());
        let k = n as f64;
        let expected = z * (a + k) / ((b + k) * (k + 1.0));
        prop_assert!(rel_err(ratio, expected) <= 1e-11, "{:e}", rel_err(ratio, expected));
    }

    #[test]
    fn conjugation_symmetry(
        pairs in prop::collection::vec((0.2f64..3.0, 0.3f64..2.0), 1..3),
        lower in prop::collection::vec((0.2f64..3.0, 0.3f64..2.0), 1..3),
        z in arg(5.0),
    ) {
        let Ok(p) = FoxWrightParams::new(real_factors(&pairs), real_factors(&lower)) else {
            return Ok(());
        };
        // tiny positive margins grow past f64 before converging
        prop_assume!(p.margin() == 0.0 || p.margin() > 0.3);
        prop_assume!(z.norm() < 0.8 * p.convergence_radius());
        let v = foxwright::eval(&p, z, 1e-14).unwrap();
        let w = foxwright::eval(&p, z.conj(), 1e-14).unwrap();
        prop_assert_eq!(v.status, SeriesStatus::Converged);
        prop_assert!(rel_err(w.value, v.value.conj()) <= 1e-13);
    }

    #[test]
    fn converged_geometric_is_accurate(r in 0.0f64..0.9, t in -3.1f64..3.1) {
        // ₁Ψ₀[(a,1); ; z] = Γ(a)(1−z)^{−a}
        let a = 1.7;
        let z = Complex64::from_polar(r, t);
        let p = FoxWrightParams::new(real_factors(&[(a, 1.0)]), vec![]).unwrap();
        let v = foxwright::eval(&p, z, 1e-15).unwrap();
        prop_assert_eq!(v.status, SeriesStatus::Converged);
        let exact = gamma(real(a)) * (real(1.0) - z).powf(-a);
        prop_assert!(rel_err(v.value, exact) <= 1e-12, "{:e}", rel_err(v.value, exact));
    }
}

#[test]
fn truncation_is_reported() {
    let p = FoxWrightParams::new(real_factors(&[(1.0, 1.0)]), vec![]).unwrap();
    let opts = SeriesOptions {
        max_terms: 200,
        ..SeriesOptions::with_tol(1e-15)
    };
    let r = foxwright::eval_with(&p, real(0.999), &opts).unwrap();
    assert_eq!(r.status, SeriesStatus::SlowTail);
    assert!(!r.warnings.is_empty());
    assert!(
        (r.value.re - 1000.0).abs() > 1.0,
        "a truncated sum must not look exact"
    );

    let out = foxwright::eval(&p, real(1.0), 1e-12).unwrap();
    assert_eq!(out.status, SeriesStatus::DivergentRegion);
    assert!(out.value.re.is_nan());

    let near = foxwright::eval(&p, real(0.96), 1e-12).unwrap();
    assert_eq!(near.status, SeriesStatus::Converged);
    assert!(near.warnings.iter().any(|w| w.contains("radius")));
}

#[test]
fn converged_status_means_tail_is_small() {
    // e^z = ₁Ψ₁[(1,1);(1,1);z]; compare against the closed form at large |z|
    let p = FoxWrightParams::new(real_factors(&[(1.0, 1.0)]), real_factors(&[(1.0, 1.0)])).unwrap();
    for z in [
        real(10.0),
        Complex64::new(0.0, 20.0),
        real(-5.0),
        Complex64::new(30.0, -4.0),
    ] {
        let r = foxwright::eval(&p, z, 1e-15).unwrap();
        assert_eq!(r.status, SeriesStatus::Converged);
        let err = (r.value - z.exp()).norm();
        let scale = z.norm().exp();
        assert!(err <= 1e-14 * scale, "z = {z}: {err:e}");
    }
}
