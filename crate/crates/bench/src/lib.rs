//! Deterministic fixtures shared by the pipeline benchmarks.

use couplestress::{MaterialParams, PolyVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed material draw so every benchmark run measures the same problem.
pub fn params() -> MaterialParams {
    MaterialParams::new(1.0, 0.5, 1.0, 2.0 / 3.0).expect("valid parameters")
}

/// Seeded random polynomial field of the given total degree.
pub fn field(seed: u64, degree: usize) -> PolyVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolyVector::random(degree, &mut rng).expect("degree within cap")
}
