use gmib::complex::real;
use gmib::foxwright::SeriesStatus;
use gmib::gmbessel::{self, GmibParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Random parameters strictly inside the constraints, with κ <= Σα_j so
/// the Fox–Wright margin is at least one.
pub fn random_params(rng: &mut ChaCha8Rng) -> GmibParams {
    let m = rng.gen_range(1..=3);
    let alphas: Vec<Complex64> = (0..m).map(|_| real(rng.gen_range(0.3..2.5))).collect();
    let betas = (0..m)
        .map(|_| Complex64::new(rng.gen_range(0.1..3.0), rng.gen_range(-0.5..0.5)))
        .collect();
    let sum: f64 = alphas.iter().map(|a| a.re).sum();
    GmibParams {
        alphas,
        betas,
        gamma: Complex64::new(rng.gen_range(0.2..3.0), rng.gen_range(-1.0..1.0)),
        kappa: rng.gen_range(0.1..sum.min(2.5)),
        b: Complex64::new(rng.gen_range(-0.5..2.0), rng.gen_range(-0.5..0.5)),
        c: Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(-PI..PI)),
    }
}

fn random_z(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max), rng.gen_range(-PI..PI))
}

/// Real parameters drawn from the ranges the identity grids use.
pub fn harness_range_params(rng: &mut ChaCha8Rng) -> GmibParams {
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

#[test]
fn dual_path_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..400 {
        let p = harness_range_params(&mut rng);
        assert!(gmbessel::validate(&p).is_empty());
        let z = random_z(&mut rng, 5.0);
        let a = gmbessel::eval(&p, z, 1e-15).unwrap();
        let b = gmbessel::eval_direct(&p, z, 1e-15).unwrap();
        assert_eq!(a.status, SeriesStatus::Converged);
        worst = worst.max((a.value - b.value).norm() / b.value.norm());
    }
    println!("worst dual-path error {worst:e}");
    assert!(worst <= 1e-11);
}

fn abs_sum(p: &GmibParams, z: Complex64) -> f64 {
    let img = gmbessel::as_foxwright(p).unwrap();
    let w = img.argument_scale * z;
    let mut total = 0.0;
    for n in 0..2000 {
        let t = img.params.term(n, w).unwrap().norm() * img.prefactor.norm();
        total += t;
        if n > 10 && t < 1e-18 * total {
            break;
        }
    }
    total
}

/// Over complex parameters the two paths can only agree up to the
/// cancellation in the series, so the bound scales with Σ|t_n|.
#[test]
fn dual_path_agreement_complex_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..400 {
        let p = random_params(&mut rng);
        assert!(gmbessel::validate(&p).is_empty());
        let z = random_z(&mut rng, 5.0);
        let a = gmbessel::eval(&p, z, 1e-15).unwrap().value;
        let b = gmbessel::eval_direct(&p, z, 1e-15).unwrap().value;
        worst = worst.max((a - b).norm() / abs_sum(&p, z));
    }
    println!("worst scaled dual-path error {worst:e}");
    assert!(worst <= 1e-14);
}

#[test]
fn entire_regime_converges_far_out() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let img = gmbessel::as_foxwright(&p).unwrap();
        assert!(img.params.convergence_radius().is_infinite());
        let z = Complex64::from_polar(50.0, rng.gen_range(-PI..PI));
        let r = gmbessel::eval(&p, z, 1e-12).unwrap();
        assert_eq!(r.status, SeriesStatus::Converged, "{p:?}");
    }
}

#[test]
fn argument_scale_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let z = random_z(&mut rng, 3.0);
        let with_c = gmbessel::eval(&p, z, 1e-15).unwrap().value;
        let unit = GmibParams {
            c: real(1.0),
            ..p.clone()
        };
        let moved = gmbessel::eval(&unit, p.c * z, 1e-15).unwrap().value;
        worst = worst.max((with_c - moved).norm() / moved.norm());
    }
    println!("worst c-scaling error {worst:e}");
    assert!(worst <= 1e-13);
}

#[test]
fn choi_agarwal_matches_reduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = gmbessel::reduce_choi_agarwal(&random_params(&mut rng));
        let z = random_z(&mut rng, 2.0);
        let reduced = gmbessel::eval(&p, z, 1e-16).unwrap().value;
        let direct = gmbessel::choi_agarwal_series(&p.alphas, &p.betas, p.gamma, p.kappa, z, 1e-16)
            .unwrap()
            .value;
        worst = worst.max((reduced - direct).norm() / direct.norm());
    }
    println!("worst Choi-Agarwal error {worst:e}");
    assert!(worst <= 1e-13);
}
