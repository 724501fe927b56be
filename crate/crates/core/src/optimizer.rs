//! Constrained maximization over the allocation `(rho0, rho1)`.
//!
//! Two problems are solved on a fixed [`ChannelSnapshot`]:
//!
//! * [`Problem::MaxEnergy`]: maximize `E` subject to `R >= r_eps`.
//! * [`Problem::MaxRate`]: maximize `R` subject to `E >= e_eps`.
//!
//! For fixed `rho0`, `E` increases and `R` decreases in `rho1`, so in both
//! cases the optimal `rho1` sits on the constraint boundary. What remains is a
//! one-dimensional search over `rho0`:
//!
//! 1. The feasibility margin of the constraint (evaluated at the most
//!    favourable `rho1`) is unimodal in `rho0`. Its peak is located by
//!    golden-section search, and the two zero crossings on either side by
//!    bisection, giving the feasible interval `[lo, hi]`.
//! 2. Every grid point `rho0 = k * step` inside the interval is paired with
//!    its boundary `rho1` and the objective is evaluated; the best point wins,
//!    with ties going to the smaller `rho0`.
//!
//! If the sign assumptions behind the unimodality argument do not hold for a
//! snapshot (see [`sanity_check_assumptions`]), the solvers fall back to the
//! exhaustive [`grid_oracle`].

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::link::{ChannelSnapshot, HarvestPlacement};

/// Absolute slack, in objective units, applied to `>=` constraints.
pub const CONSTRAINT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Width at which golden-section and bisection searches stop.
    pub bisection_tol: f64,
    /// Grid spacing for the `rho0` traversal and for the oracle.
    pub grid_step: f64,
    /// Iteration cap for each bracketing search.
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            bisection_tol: 1e-6,
            grid_step: 0.01,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tol > 0.0
            && self.bisection_tol < self.grid_step
            && self.grid_step < 1.0)
        {
            return Err(Error::Domain {
                name: "solver tolerances",
                value: self.bisection_tol,
                expected: "0 < bisection_tol < grid_step < 1",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain {
                name: "max_iterations",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(())
    }

    /// Largest admissible `rho0` for interval searches.
    fn rho0_end(&self) -> f64 {
        1.0 - self.bisection_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    /// Maximize harvested energy with a minimum rate `r_eps` (bits/Hz).
    MaxEnergy { r_eps: f64 },
    /// Maximize rate with a minimum harvested energy `e_eps` (W s).
    MaxRate { e_eps: f64 },
}

/// Range of `rho0` for which the constraint can be met by some `rho1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// Maximizer of the feasibility margin.
    pub peak: f64,
    pub empty: bool,
}

impl FeasibleInterval {
    fn empty(peak: f64) -> Self {
        Self {
            lo: f64::NAN,
            hi: f64::NAN,
            peak,
            empty: true,
        }
    }

    pub fn contains(&self, rho0: f64) -> bool {
        !self.empty && rho0 >= self.lo - 1e-12 && rho0 <= self.hi + 1e-12
    }

    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    /// Sign assumptions failed; the result comes from the exhaustive grid.
    FellBackToGrid,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::FellBackToGrid => "fell_back_to_grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationOutcome {
    /// `E*` in W s or `R*` in bits/Hz; NaN when infeasible.
    pub objective_value: f64,
    pub rho0_star: f64,
    pub rho1_star: f64,
    pub interval: FeasibleInterval,
    /// Objective and margin evaluations performed.
    pub evaluations: usize,
    pub status: SolverStatus,
}

impl OptimizationOutcome {
    fn infeasible(interval: FeasibleInterval, evaluations: usize) -> Self {
        Self {
            objective_value: f64::NAN,
            rho0_star: f64::NAN,
            rho1_star: f64::NAN,
            interval,
            evaluations,
            status: SolverStatus::Infeasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status != SolverStatus::Infeasible
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns the final bracket `(a, b)` with `b - a <= tol` and the sign of
/// `f(a)` equal to the sign of the original `f(lo)`.
pub fn bisect_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<(f64, f64)> {
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok((lo, lo));
    }
    if f_hi == 0.0 {
        return Ok((hi, hi));
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..max_iterations {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if (fm > 0.0) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

/// Root of `f` on `[lo, hi]` to within `tol`; requires a sign change.
pub fn bisect_root<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (a, b) = bisect_bracket(f, lo, hi, tol, 200)?;
    Ok(0.5 * (a + b))
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
/// The endpoints are also checked, so monotone functions return an endpoint.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iterations: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iterations {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (mut best_x, mut best_f) = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best_f || (fx == best_f && x < best_x) {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Grid of `rho0` values `k * step` in `[0, 1 - step]`.
fn rho0_grid(step: f64) -> impl Iterator<Item = f64> {
    let n = ((1.0 - step) / step + 1e-9).floor() as usize;
    (0..=n).map(move |k| k as f64 * step)
}

/// Grid of `rho1` values `j * step` in `[0, 1]`.
fn rho1_grid(step: f64) -> impl Iterator<Item = f64> {
    let n = (1.0 / step + 1e-9).floor() as usize;
    (0..=n).map(move |j| (j as f64 * step).min(1.0))
}

/// Share `s` of the received power the decoder needs at sensing ratio `rho0`
/// for `R >= r_eps`, i.e. the `s` with `R(rho0, 1 - s) = r_eps`. Values above
/// one mean the rate target is out of reach even with `rho1 = 0`.
pub fn required_decode_share(snap: &ChannelSnapshot, rho0: f64, r_eps: f64) -> f64 {
    if r_eps <= 0.0 {
        return 0.0;
    }
    if rho0 >= 1.0 {
        return f64::INFINITY;
    }
    let t = snap.total_time();
    let target = r_eps / ((1.0 - rho0) * t);
    if snap.is_deterministic() {
        let snr = snap.c1 * snap.alignment_factor(rho0 * t);
        let needed = (target * std::f64::consts::LN_2).exp_m1();
        return if snr > 0.0 {
            needed / snr
        } else {
            f64::INFINITY
        };
    }
    // Monte Carlo: the mean rate is increasing in s; bracket then bisect.
    let rate = |s: f64| snap.rate(rho0, 1.0 - s);
    let mut hi = 1.0;
    while rate(hi) < r_eps {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rate(mid) >= r_eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `rho1` meeting `R >= r_eps` at `rho0` (may be negative when
/// infeasible).
fn rate_margin(snap: &ChannelSnapshot, rho0: f64, r_eps: f64) -> f64 {
    1.0 - required_decode_share(snap, rho0, r_eps)
}

/// Threshold the boundary search aims for: the same `eps - CONSTRAINT_SLACK`
/// the oracle accepts, nudged up by a relative hair so rounding in the
/// objective cannot land on the wrong side.
fn relaxed(eps: f64) -> f64 {
    (eps - CONSTRAINT_SLACK + 1e-12 * eps.abs().max(CONSTRAINT_SLACK)).max(0.0)
}

/// `E(rho0, 1) - e_eps`.
fn energy_margin(snap: &ChannelSnapshot, rho0: f64, e_eps: f64) -> f64 {
    snap.total_time() * snap.harvest_margin_base(rho0) - e_eps
}

/// Smallest `rho1` meeting `E >= e_eps` at a feasible `rho0`.
pub fn min_harvest_share(snap: &ChannelSnapshot, rho0: f64, e_eps: f64) -> f64 {
    if e_eps <= 0.0 {
        return 0.0;
    }
    match snap.placement() {
        HarvestPlacement::FullPower => {
            let full = snap.total_time() * snap.harvest_margin_base(rho0);
            (e_eps / full).clamp(0.0, 1.0)
        }
        HarvestPlacement::SplitPower => {
            let (mut lo, mut hi) = (0.0, 1.0);
            if snap.energy(rho0, hi) < e_eps {
                return 1.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if snap.energy(rho0, mid) >= e_eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    }
}

/// Peak-then-bisect interval search for a unimodal margin.
fn interval_from_margin<F: FnMut(f64) -> f64>(
    mut margin: F,
    feasible_at: f64,
    cfg: &SolverConfig,
) -> FeasibleInterval {
    let end = cfg.rho0_end();
    let tol = cfg.bisection_tol;
    let (peak, peak_margin) = golden_section_max(&mut margin, 0.0, end, tol, cfg.max_iterations);
    if !(peak_margin >= feasible_at) {
        return FeasibleInterval::empty(peak);
    }
    let shifted = |m: &mut F, x: f64| m(x) - feasible_at;
    let lo = if shifted(&mut margin, 0.0) >= 0.0 {
        0.0
    } else {
        bisect_bracket(
            |x| shifted(&mut margin, x),
            0.0,
            peak,
            tol,
            cfg.max_iterations,
        )
        .map(|(_, b)| b)
        .unwrap_or(peak)
    };
    let hi = if shifted(&mut margin, end) >= 0.0 {
        end
    } else {
        bisect_bracket(
            |x| shifted(&mut margin, x),
            peak,
            end,
            tol,
            cfg.max_iterations,
        )
        .map(|(a, _)| a)
        .unwrap_or(peak)
    };
    FeasibleInterval {
        lo,
        hi,
        peak,
        empty: false,
    }
}

/// Feasible `rho0` interval for `R >= r_eps`.
pub fn feasible_interval_p1(
    snap: &ChannelSnapshot,
    r_eps: f64,
    cfg: &SolverConfig,
) -> FeasibleInterval {
    interval_from_margin(|x| rate_margin(snap, x, relaxed(r_eps)), 0.0, cfg)
}

/// Feasible `rho0` interval for `E >= e_eps` under the snapshot's harvest model.
pub fn feasible_interval_p2(
    snap: &ChannelSnapshot,
    e_eps: f64,
    cfg: &SolverConfig,
) -> FeasibleInterval {
    interval_from_margin(|x| energy_margin(snap, x, e_eps), -CONSTRAINT_SLACK, cfg)
}

/// Signs of the unimodality conditions at the ends of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    pub g0: f64,
    pub g1: f64,
    /// `dR/drho0` at `rho0 = 0`, evaluated with `rho1 = 0`.
    pub h0: f64,
    pub h1: f64,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.g0 > 0.0 && self.g1 < 0.0 && self.h0 > 0.0 && self.h1 < 0.0
    }
}

pub fn sanity_check_assumptions(snap: &ChannelSnapshot) -> AssumptionReport {
    AssumptionReport {
        g0: snap.g(0.0),
        g1: snap.g(1.0),
        h0: snap.h(0.0, 0.0),
        h1: snap.h(1.0, 0.0),
    }
}

struct Counted<'a> {
    snap: &'a ChannelSnapshot,
    count: Cell<usize>,
}

impl<'a> Counted<'a> {
    fn new(snap: &'a ChannelSnapshot) -> Self {
        Self {
            snap,
            count: Cell::new(0),
        }
    }

    fn tick(&self) {
        self.count.set(self.count.get() + 1);
    }
}

/// Maximize `E` subject to `R >= r_eps`.
pub fn maximize_energy_subject_to_rate(
    snap: &ChannelSnapshot,
    r_eps: f64,
    cfg: &SolverConfig,
) -> OptimizationOutcome {
    solve(snap, Problem::MaxEnergy { r_eps }, cfg)
}

/// Maximize `R` subject to `E >= e_eps`.
pub fn maximize_rate_subject_to_energy(
    snap: &ChannelSnapshot,
    e_eps: f64,
    cfg: &SolverConfig,
) -> OptimizationOutcome {
    solve(snap, Problem::MaxRate { e_eps }, cfg)
}

/// Solves `problem` with the interval + traversal scheme, or the grid oracle
/// when the snapshot violates the sign assumptions.
pub fn solve(snap: &ChannelSnapshot, problem: Problem, cfg: &SolverConfig) -> OptimizationOutcome {
    if !sanity_check_assumptions(snap).holds() {
        let mut out = grid_oracle(snap, problem, cfg.grid_step);
        if out.status == SolverStatus::Optimal {
            out.status = SolverStatus::FellBackToGrid;
        }
        return out;
    }

    let c = Counted::new(snap);
    let interval = match problem {
        Problem::MaxEnergy { r_eps } => interval_from_margin(
            |x| {
                c.tick();
                rate_margin(c.snap, x, relaxed(r_eps))
            },
            0.0,
            cfg,
        ),
        Problem::MaxRate { e_eps } => interval_from_margin(
            |x| {
                c.tick();
                energy_margin(c.snap, x, e_eps)
            },
            -CONSTRAINT_SLACK,
            cfg,
        ),
    };
    if interval.empty {
        return OptimizationOutcome::infeasible(interval, c.count.get());
    }

    // (rho0, rho1) on the constraint boundary and the objective there.
    let evaluate = |rho0: f64| -> (f64, f64) {
        c.tick();
        match problem {
            Problem::MaxEnergy { r_eps } => {
                let rho1 = rate_margin(snap, rho0, relaxed(r_eps)).clamp(0.0, 1.0);
                (rho1, snap.energy(rho0, rho1))
            }
            Problem::MaxRate { e_eps } => {
                let rho1 = min_harvest_share(snap, rho0, relaxed(e_eps));
                (rho1, snap.rate(rho0, rho1))
            }
        }
    };

    let mut best: Option<(f64, f64, f64)> = None;
    for rho0 in rho0_grid(cfg.grid_step).filter(|&x| interval.contains(x)) {
        let (rho1, value) = evaluate(rho0);
        if best.is_none_or(|(_, _, v)| value > v) {
            best = Some((rho0, rho1, value));
        }
    }
    // Interval narrower than a grid cell: the margin peak is the one point
    // known to be feasible.
    let (rho0, rho1, value) = best.unwrap_or_else(|| {
        let (rho1, value) = evaluate(interval.peak);
        (interval.peak, rho1, value)
    });

    OptimizationOutcome {
        objective_value: value,
        rho0_star: rho0,
        rho1_star: rho1,
        interval,
        evaluations: c.count.get(),
        status: SolverStatus::Optimal,
    }
}

/// Exhaustive search over the `(rho0, rho1)` grid with spacing `step`.
///
/// `rho0` spans `[0, 1 - step]` and `rho1` spans `[0, 1]`. The reported
/// interval covers the feasible grid `rho0` values, and its `peak` is the
/// optimal `rho0`.
pub fn grid_oracle(snap: &ChannelSnapshot, problem: Problem, step: f64) -> OptimizationOutcome {
    let mut evaluations = 0usize;
    let mut best: Option<(f64, f64, f64)> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for rho0 in rho0_grid(step) {
        for rho1 in rho1_grid(step) {
            evaluations += 2;
            let (feasible, value) = match problem {
                Problem::MaxEnergy { r_eps } => (
                    snap.rate(rho0, rho1) >= r_eps - CONSTRAINT_SLACK,
                    snap.energy(rho0, rho1),
                ),
                Problem::MaxRate { e_eps } => (
                    snap.energy(rho0, rho1) >= e_eps - CONSTRAINT_SLACK,
                    snap.rate(rho0, rho1),
                ),
            };
            if !feasible {
                continue;
            }
            lo = lo.min(rho0);
            hi = hi.max(rho0);
            if best.is_none_or(|(_, _, v)| value > v) {
                best = Some((rho0, rho1, value));
            }
        }
    }
    match best {
        None => OptimizationOutcome::infeasible(FeasibleInterval::empty(f64::NAN), evaluations),
        Some((rho0, rho1, value)) => OptimizationOutcome {
            objective_value: value,
            rho0_star: rho0,
            rho1_star: rho1,
            interval: FeasibleInterval {
                lo,
                hi,
                peak: rho0,
                empty: false,
            },
            evaluations,
            status: SolverStatus::Optimal,
        },
    }
}

/// Exhaustive search with a caller-supplied objective and constraint, for
/// checking the grid conventions on toy problems.
pub fn grid_search<F, G>(objective: F, feasible: G, step: f64) -> Option<(f64, f64, f64)>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> bool,
{
    let mut best: Option<(f64, f64, f64)> = None;
    for rho0 in rho0_grid(step) {
        for rho1 in rho1_grid(step) {
            if !feasible(rho0, rho1) {
                continue;
            }
            let v = objective(rho0, rho1);
            if best.is_none_or(|(_, _, b)| v > b) {
                best = Some((rho0, rho1, v));
            }
        }
    }
    best
}
