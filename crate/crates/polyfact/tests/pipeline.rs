//! Cross-module pipeline properties on randomized instances.

use nalgebra::DMatrix;
use polyfact::factorizer::{factorize, FactorizationOptions};
use polyfact::sampling::{random_gram_instance, trial_rng};
use polyfact::MatPoly;

fn default_report(q: &MatPoly) -> polyfact::FactorizationReport {
    factorize(q, &FactorizationOptions::default())
        .unwrap_or_else(|e| panic!("factorize failed at stage {}: {e}", e.stage()))
}

#[test]
fn round_trip_on_random_gram_instances() {
    // Paper-style experiment at small scale: factor Q = G^T G and compare
    // the Gram square of the output against Q entry-wise.
    let mut worst: f64 = 0.0;
    for trial in 0..24u64 {
        let mut rng = trial_rng(42, trial);
        let n = 2 + (trial % 4) as usize; // 2..=5
        let m = 2 + ((trial / 4) % 4) as usize; // 2..=5
        let (_, q) = random_gram_instance(n, m, &mut rng);
        let report = default_report(&q);
        worst = worst.max(report.residual);
    }
    assert!(worst <= 1e-5, "worst residual {worst:.3e}");
}

#[test]
fn determinant_invariance() {
    // det Q(x) = det G(x)^2 at sample points.
    let mut rng = trial_rng(7, 0);
    let (_, q) = random_gram_instance(3, 3, &mut rng);
    let report = default_report(&q);
    for k in 0..20 {
        let x = -2.0 + 4.0 * (k as f64) / 19.0;
        let dq = q.det_at(x);
        let dg = report.g.det_at(x);
        let denom = dq.abs().max(dg * dg).max(1e-12);
        assert!(
            (dq - dg * dg).abs() / denom <= 1e-6,
            "x = {x}: det Q = {dq}, det G^2 = {}",
            dg * dg
        );
    }
}

#[test]
fn gram_is_gauge_invariant() {
    // gram(U G) = gram(G) for orthogonal U.
    let mut rng = trial_rng(11, 3);
    let (g, q) = random_gram_instance(3, 2, &mut rng);
    // a fixed rotation in the (0,1) plane
    let mut u = DMatrix::<f64>::identity(3, 3);
    let (c, s) = (0.6, 0.8);
    u[(0, 0)] = c;
    u[(0, 1)] = -s;
    u[(1, 0)] = s;
    u[(1, 1)] = c;
    let rotated = MatPoly::new(g.coeffs().iter().map(|ci| &u * ci).collect()).unwrap();
    assert!(rotated.gram().max_coeff_diff(&q) <= 1e-12 * (1.0 + q.max_coeff_abs()));
}

#[test]
fn pipeline_is_deterministic() {
    let mut rng = trial_rng(3, 5);
    let (_, q) = random_gram_instance(4, 3, &mut rng);
    let a = default_report(&q);
    let b = default_report(&q);
    assert_eq!(a.x, b.x, "X must be bit-identical across runs");
    assert_eq!(a.fx, b.fx);
    assert!(a.g.max_coeff_diff(&b.g) == 0.0);
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());
}

#[test]
fn verify_after_factor_on_grid() {
    let mut rng = trial_rng(19, 2);
    let (_, q) = random_gram_instance(3, 4, &mut rng);
    let report = default_report(&q);
    let gram = report.g.gram();
    for k in 0..41 {
        let x = -5.0 + 10.0 * (k as f64) / 40.0;
        let diff = (q.eval(x) - gram.eval(x)).amax();
        let scale = 1.0 + q.eval(x).amax();
        assert!(diff <= 1e-4 * scale, "grid point {x}: {diff:.3e}");
    }
}
