//! Deterministic inputs shared by the benchmarks.

use isotoda::{Complex64, PeriodicJacobi};

/// Periodic matrix with entries drawn from a fixed quasi-random sequence;
/// every `b_i` has modulus in `[0.5, 1.5)`.
pub fn sample_matrix(n: usize, seed: u64) -> PeriodicJacobi {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let a = (0..n).map(|_| 2.0 * next() - 1.0).collect();
    let b = (0..n)
        .map(|_| Complex64::from_polar(0.5 + next(), std::f64::consts::TAU * next()))
        .collect();
    PeriodicJacobi::new(a, b).expect("sample sizes are at least 3")
}
