//! Solver invariants on randomized scenarios.

use crate::optimizer::{
    feasible_interval_p1, feasible_interval_p2, grid_oracle, sanity_check_assumptions, solve,
    CONSTRAINT_SLACK,
};
use crate::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Randomized scenario around the reference preset.
fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let mut p = SystemParams::table1();
    p.distance_m = rng.gen_range(5.0..100.0);
    p.frequency_hz = rng.gen_range(100e9..450e9);
    p.total_time_s = rng.gen_range(10.0..200.0);
    p.l0_m = rng.gen_range(0.1..2.0);
    p.alpha_per_s = rng.gen_range(0.01..0.5);
    p
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest value of `f` over `rho0 = k / n`, `k < n`.
fn max_over_rho0(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..n)
        .map(|k| f(k as f64 / n as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Thresholds at a fraction `u` of the best reachable rate and energy.
fn thresholds(s: &ChannelSnapshot, u: f64) -> (f64, f64) {
    let r_max = max_over_rho0(100, |x| s.rate(x, 0.0));
    let e_max = max_over_rho0(100, |x| s.energy(x, 1.0));
    (u * r_max, u * e_max)
}

/// Central difference with step `h`.
fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn scenarios(seed: u64, n: usize) -> Vec<(ChannelSnapshot, f64)> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let p = random_params(&mut rng);
            let u = rng.gen_range(0.3..0.95);
            (ChannelSnapshot::new(&p, 0.0).unwrap(), u)
        })
        .collect()
}

#[test]
fn constraint_is_active_at_the_optimum() {
    let cfg = SolverConfig::default();
    for (s, u) in scenarios(11, 50) {
        let (r_eps, e_eps) = thresholds(&s, u);
        let p1 = solve(&s, Problem::MaxEnergy { r_eps }, &cfg);
        if p1.is_feasible() {
            let r = s.rate(p1.rho0_star, p1.rho1_star);
            assert!(r >= r_eps - CONSTRAINT_SLACK, "R {r} < {r_eps}");
            if p1.status == SolverStatus::Optimal && p1.rho1_star < 1.0 {
                assert!(
                    (r - r_eps).abs() <= 1e-6 * r_eps.max(1.0),
                    "R {r} vs {r_eps}"
                );
            }
        }
        let p2 = solve(&s, Problem::MaxRate { e_eps }, &cfg);
        if p2.is_feasible() {
            let e = s.energy(p2.rho0_star, p2.rho1_star);
            assert!(e >= e_eps - CONSTRAINT_SLACK, "E {e} < {e_eps}");
            if p2.status == SolverStatus::Optimal && p2.rho1_star > 0.0 {
                assert!((e - e_eps).abs() <= 2.0 * CONSTRAINT_SLACK + 1e-9 * e_eps);
            }
        }
    }
}

#[test]
fn solver_uses_fewer_evaluations_than_oracle() {
    let cfg = SolverConfig::default();
    let log_term = 3.0 * (1.0 / cfg.bisection_tol).log2();
    for (s, u) in scenarios(12, 20) {
        let (r_eps, e_eps) = thresholds(&s, u);
        for problem in [Problem::MaxEnergy { r_eps }, Problem::MaxRate { e_eps }] {
            if !sanity_check_assumptions(&s).holds() {
                continue;
            }
            let a = solve(&s, problem, &cfg);
            let b = grid_oracle(&s, problem, cfg.grid_step);
            assert!(a.evaluations < b.evaluations);
            let bound = log_term + a.interval.width() / cfg.grid_step + 20.0;
            assert!(
                (a.evaluations as f64) <= bound,
                "{} evaluations > bound {bound}",
                a.evaluations
            );
        }
    }
}

#[test]
fn intervals_shrink_as_thresholds_rise() {
    let cfg = SolverConfig::default();
    for (s, _) in scenarios(13, 15) {
        let (r_max, e_max) = thresholds(&s, 1.0);
        let mut prev1 = feasible_interval_p1(&s, 0.0, &cfg);
        let mut prev2 = feasible_interval_p2(&s, 0.0, &cfg);
        for k in 1..=10 {
            let u = k as f64 / 10.0;
            let i1 = feasible_interval_p1(&s, u * r_max, &cfg);
            let i2 = feasible_interval_p2(&s, u * e_max, &cfg);
            for (prev, cur) in [(&prev1, &i1), (&prev2, &i2)] {
                if !cur.empty {
                    assert!(!prev.empty);
                    // Bisection end points carry up to one tolerance of slop.
                    assert!(cur.lo >= prev.lo - 2e-6 && cur.hi <= prev.hi + 2e-6);
                }
            }
            prev1 = i1;
            prev2 = i2;
        }
    }
}

#[test]
fn identical_inputs_give_bitwise_identical_outcomes() {
    let cfg = SolverConfig::default();
    let p = SystemParams::table1();
    let bits = |o: &OptimizationOutcome| {
        [
            o.objective_value.to_bits(),
            o.rho0_star.to_bits(),
            o.rho1_star.to_bits(),
            o.interval.lo.to_bits(),
            o.interval.hi.to_bits(),
            o.interval.peak.to_bits(),
            o.evaluations as u64,
        ]
    };
    for problem in [
        Problem::MaxEnergy { r_eps: 1500.0 },
        Problem::MaxRate { e_eps: 0.1 },
    ] {
        let a = solve(&ChannelSnapshot::new(&p, 0.0).unwrap(), problem, &cfg);
        let b = solve(&ChannelSnapshot::new(&p, 0.0).unwrap(), problem, &cfg);
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.status, b.status);
    }
}

#[test]
fn monte_carlo_mode_agrees_with_oracle() {
    let cfg = SolverConfig::default();
    let mut p = SystemParams::table1();
    p.fading = FadingModel::monte_carlo(1.0, 200, 7);
    let s = ChannelSnapshot::new(&p, 0.0).unwrap();
    for problem in [
        Problem::MaxEnergy { r_eps: 1200.0 },
        Problem::MaxRate { e_eps: 0.1 },
    ] {
        let a = solve(&s, problem, &cfg);
        let b = grid_oracle(&s, problem, cfg.grid_step);
        assert_eq!(a.status, SolverStatus::Optimal);
        assert!((a.rho0_star - b.rho0_star).abs() <= 0.01 + 1e-9);
        assert!(a.objective_value >= b.objective_value * (1.0 - 0.005));
    }
}

#[test]
fn gradients_match_finite_differences_on_random_scenarios() {
    let mut rng = rng(14);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = ChannelSnapshot::new(&p, 0.0).unwrap();
        let (r0, r1) = (rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98));
        let h = 1e-6;
        let e = s.energy(r0, r1);
        let r = s.rate(r0, r1);
        let cases = [
            (
                s.de_drho0(r0, r1),
                central_diff(|x| s.energy(x, r1), r0, h),
                e,
            ),
            (
                s.de_drho1(r0, r1),
                central_diff(|x| s.energy(r0, x), r1, h),
                e,
            ),
            (
                s.dr_drho0(r0, r1),
                central_diff(|x| s.rate(x, r1), r0, h),
                r,
            ),
            (
                s.dr_drho1(r0, r1),
                central_diff(|x| s.rate(r0, x), r1, h),
                r,
            ),
        ];
        for (a, fd, f) in cases {
            let scale = a.abs().max(fd.abs()).max(1e-6 * f.abs());
            if scale == 0.0 {
                continue;
            }
            assert!((a - fd).abs() / scale <= 1e-4, "{a} vs {fd} (f = {f})");
        }
    }
}

#[test]
fn linear_harvester_optimum_matches_oracle() {
    let cfg = SolverConfig::default();
    let mut p = SystemParams::table1();
    p.eh_model = EnergyHarvestModel::Linear { eta: 0.5 };
    let s = ChannelSnapshot::new(&p, 0.0).unwrap();
    let e_max = max_over_rho0(100, |x| s.energy(x, 1.0));
    let problem = Problem::MaxRate { e_eps: 0.6 * e_max };
    let a = solve(&s, problem, &cfg);
    let b = grid_oracle(&s, problem, cfg.grid_step);
    assert!((a.rho0_star - b.rho0_star).abs() <= 0.01 + 1e-9);
    assert!(a.objective_value >= b.objective_value * (1.0 - 0.005));
}
