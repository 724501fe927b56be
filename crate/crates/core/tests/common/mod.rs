//! Shared helpers for the integration tests.
#![allow(dead_code)]

use iscap_core::{ChannelSnapshot, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Randomized scenario around the reference preset.
pub fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let mut p = SystemParams::table1();
    p.distance_m = rng.gen_range(5.0..100.0);
    p.frequency_hz = rng.gen_range(100e9..450e9);
    p.total_time_s = rng.gen_range(10.0..200.0);
    p.l0_m = rng.gen_range(0.1..2.0);
    p.alpha_per_s = rng.gen_range(0.01..0.5);
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest value of `f` over `rho0 = k / n`, `k < n`.
pub fn max_over_rho0(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..n)
        .map(|k| f(k as f64 / n as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Thresholds at a fraction `u` of the best reachable rate and energy.
pub fn thresholds(s: &ChannelSnapshot, u: f64) -> (f64, f64) {
    let r_max = max_over_rho0(100, |x| s.rate(x, 0.0));
    let e_max = max_over_rho0(100, |x| s.energy(x, 1.0));
    (u * r_max, u * e_max)
}

/// Number of sign changes in successive differences, ignoring exact ties.
pub fn difference_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        if last != 0.0 && (d > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = d;
    }
    changes
}

/// Central difference with step `h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
