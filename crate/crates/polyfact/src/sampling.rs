//! Seeded random instances for the trial harness and benchmarks.
//!
//! Reproducibility contract: the generator is ChaCha8 keyed by a user seed,
//! with one independent stream per trial index (`set_stream`). Serial and
//! parallel runs over the same seed therefore draw identical instances.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matpoly::MatPoly;

/// The per-trial generator: ChaCha8 seeded by `seed` on stream `trial_index`.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Random degree-`m` factor with `G_0 = I` and the entries of `G_1..G_m`
/// drawn i.i.d. uniform on `[-1, 1]`, row-major draw order.
pub fn random_factor(n: usize, m: usize, rng: &mut impl Rng) -> MatPoly {
    let mut coeffs = vec![DMatrix::<f64>::identity(n, n)];
    for _ in 0..m {
        let mut c = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] = rng.random_range(-1.0..=1.0);
            }
        }
        coeffs.push(c);
    }
    MatPoly::new(coeffs).expect("square coefficients")
}

/// Random Gram instance: the factor `G` and its square `Q = G^T G`.
pub fn random_gram_instance(n: usize, m: usize, rng: &mut impl Rng) -> (MatPoly, MatPoly) {
    let g = random_factor(n, m, rng);
    let q = g.gram();
    (g, q)
}
