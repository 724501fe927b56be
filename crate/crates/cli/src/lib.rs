//! Scenario loading, parameter sweeps and optimization runs behind the
//! `iscap` binary.

pub mod config;
pub mod presets;

use std::io::Write;

use iscap_core::optimizer::{self, grid_oracle};
use iscap_core::{ChannelSnapshot, OptimizationOutcome, Problem, SolverStatus, SystemParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{load_config, Overrides, ScenarioConfig, SweepSpec, SweepVariable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    ConfigIo {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown preset `{0}` (see `iscap presets`)")]
    UnknownPreset(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] iscap_core::Error),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::ConfigIo { .. }
            | CliError::Invalid { .. }
            | CliError::UnknownPreset(_)
            | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Model(_) => EXIT_NUMERIC,
            CliError::Output(_) => 1,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// One row of sweep output. Column order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Swept value in SI units (s, -, m, Hz or m).
    pub value: f64,
    pub rho0: f64,
    pub rho1: f64,
    /// Mean received power at the user, W.
    pub p_r: f64,
    /// Mean sensing-echo power at the BS, W.
    pub p_rr: f64,
    /// Harvested energy, W s.
    pub energy: f64,
    /// Achievable rate, bits/Hz.
    pub rate: f64,
    pub h_mis: f64,
    pub region: String,
    /// `; `-separated model warnings (e.g. clamped absorption band).
    pub warnings: String,
}

/// Evaluates one sweep point.
pub fn evaluate_point(
    base: &SystemParams,
    spec: &SweepSpec,
    value: f64,
) -> Result<SweepRecord, iscap_core::Error> {
    let mut p = base.clone();
    let t_total = p.total_time_s;
    let mut rho0 = spec.rho0;
    match spec.variable {
        SweepVariable::SensingTime => rho0 = value / t_total,
        SweepVariable::Rho0 => rho0 = value,
        SweepVariable::Distance => p.distance_m = value,
        SweepVariable::Frequency => p.frequency_hz = value,
        SweepVariable::TxAperture => {
            p.bs_tx.diameter = value;
            p.bs_rx.diameter = value;
            p.user_rx.diameter = spec.rx_aperture_ratio * value;
        }
    }
    let t = rho0 * t_total;
    let s = ChannelSnapshot::new(&p, t)?;
    Ok(SweepRecord {
        value,
        rho0,
        rho1: spec.rho1,
        p_r: s.received_power_at(t),
        p_rr: s.reflected_power_at(t),
        energy: s.energy(rho0, spec.rho1),
        rate: s.rate(rho0, spec.rho1),
        h_mis: s.h_mis,
        region: s.region.class.as_str().to_string(),
        warnings: s.warnings.join("; "),
    })
}

/// Evaluates every sweep point in parallel; records come back in sweep order.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRecord>, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no [sweep] section".into()))?;
    spec.values()
        .par_iter()
        .map(|&v| evaluate_point(&cfg.params, spec, v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from)
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub problem: Problem,
    pub outcome: OptimizationOutcome,
    pub oracle: Option<OptimizationOutcome>,
    /// Best constraint value reachable at any grid `rho0` (max R with
    /// `rho1 = 0`, or max E with `rho1 = 1`).
    pub best_reachable: f64,
    pub warnings: Vec<String>,
}

impl OptimizeReport {
    pub fn is_infeasible(&self) -> bool {
        self.outcome.status == SolverStatus::Infeasible
    }
}

/// Picks the problem from flags, falling back to the config's `[optimize]`.
pub fn select_problem(
    cfg: &ScenarioConfig,
    kind: Option<config::ProblemKind>,
    r_eps: Option<f64>,
    e_eps: Option<f64>,
) -> Result<Problem, CliError> {
    use config::ProblemKind;
    let r_eps = r_eps.or(cfg.r_eps);
    let e_eps = e_eps.or(cfg.e_eps);
    let kind = kind.or(cfg.problem).or(match (r_eps, e_eps) {
        (Some(_), None) => Some(ProblemKind::P1),
        (None, Some(_)) => Some(ProblemKind::P2),
        _ => None,
    });
    let check = |name: &str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(CliError::Invalid {
                field: name.into(),
                message: format!("must be non-negative, got {v}"),
            })
        }
    };
    match kind {
        Some(ProblemKind::P1) => {
            let v = r_eps.ok_or_else(|| CliError::Usage("p1 needs --r-eps".into()))?;
            Ok(Problem::MaxEnergy {
                r_eps: check("r_eps", v)?,
            })
        }
        Some(ProblemKind::P2) => {
            let v = e_eps.ok_or_else(|| CliError::Usage("p2 needs --e-eps".into()))?;
            Ok(Problem::MaxRate {
                e_eps: check("e_eps", v)?,
            })
        }
        None => Err(CliError::Usage(
            "choose --problem p1 --r-eps <bits/Hz> or --problem p2 --e-eps <W s>".into(),
        )),
    }
}

pub fn run_optimize(
    cfg: &ScenarioConfig,
    problem: Problem,
    verify: bool,
) -> Result<OptimizeReport, CliError> {
    let s = ChannelSnapshot::new(&cfg.params, 0.0)?;
    let outcome = optimizer::solve(&s, problem, &cfg.solver);
    let oracle = verify.then(|| grid_oracle(&s, problem, cfg.solver.grid_step));
    let n = (1.0 / cfg.solver.grid_step).round() as usize;
    let best_reachable = (0..n)
        .map(|k| {
            let rho0 = k as f64 / n as f64;
            match problem {
                Problem::MaxEnergy { .. } => s.rate(rho0, 0.0),
                Problem::MaxRate { .. } => s.energy(rho0, 1.0),
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(OptimizeReport {
        problem,
        outcome,
        oracle,
        best_reachable,
        warnings: s.warnings.clone(),
    })
}

fn objective_label(problem: &Problem) -> (&'static str, &'static str) {
    match problem {
        Problem::MaxEnergy { .. } => ("E*", "W s"),
        Problem::MaxRate { .. } => ("R*", "bits/Hz"),
    }
}

pub fn format_report(r: &OptimizeReport) -> String {
    let mut out = String::new();
    let o = &r.outcome;
    let (label, unit) = objective_label(&r.problem);
    match r.problem {
        Problem::MaxEnergy { r_eps } => {
            out += &format!("problem: maximize E subject to R >= {r_eps} bits/Hz\n")
        }
        Problem::MaxRate { e_eps } => {
            out += &format!("problem: maximize R subject to E >= {e_eps} W s\n")
        }
    }
    out += &format!("status: {}\n", o.status.as_str());
    if r.is_infeasible() {
        let (what, unit) = match r.problem {
            Problem::MaxEnergy { .. } => ("rate", "bits/Hz"),
            Problem::MaxRate { .. } => ("energy", "W s"),
        };
        out += &format!(
            "diagnosis: feasible interval is empty; best reachable {what} is {} {unit}",
            r.best_reachable
        );
        if o.interval.peak.is_finite() {
            out += &format!(" (margin peaks at rho0 = {:.6})", o.interval.peak);
        }
        out += "\n";
    } else {
        out += &format!("{label}: {} {unit}\n", o.objective_value);
        out += &format!("rho0*: {}\nrho1*: {}\n", o.rho0_star, o.rho1_star);
        out += &format!(
            "interval: [{:.6}, {:.6}], peak {:.6}\n",
            o.interval.lo, o.interval.hi, o.interval.peak
        );
    }
    out += &format!("evaluations: {}\n", o.evaluations);
    if let Some(g) = &r.oracle {
        if g.is_feasible() && o.is_feasible() {
            let gap = (g.objective_value - o.objective_value) / g.objective_value.abs();
            out += &format!(
                "oracle: {label} {} at ({}, {}), {} evaluations, gap {:+.4}%\n",
                g.objective_value,
                g.rho0_star,
                g.rho1_star,
                g.evaluations,
                100.0 * gap
            );
        } else {
            out += &format!(
                "oracle: {} ({} evaluations)\n",
                g.status.as_str(),
                g.evaluations
            );
        }
    }
    for w in &r.warnings {
        out += &format!("warning: {w}\n");
    }
    out
}

/// Human-readable summary of a resolved scenario.
pub fn describe(cfg: &ScenarioConfig) -> String {
    let p = &cfg.params;
    let mut out = format!("preset: {}\n", cfg.preset);
    out += &format!("frequency: {} GHz\n", p.frequency_hz / 1e9);
    out += &format!("tx power: {} W\n", p.tx_power_w);
    out += &format!("distance: {} m\n", p.distance_m);
    out += &format!("total time: {} s\n", p.total_time_s);
    out += &format!("noise power: {:e} W\n", p.noise_power_w);
    out += &format!("l0: {} m, alpha: {} 1/s\n", p.l0_m, p.alpha_per_s);
    out += &format!(
        "apertures: bs tx {} m, bs rx {} m, user {} m\n",
        p.bs_tx.diameter, p.bs_rx.diameter, p.user_rx.diameter
    );
    out += &format!("fading: {:?}\n", p.fading);
    out += &format!("harvester: {:?} ({:?})\n", p.eh_model, p.harvest_placement);
    out += &format!("solver: {:?}\n", cfg.solver);
    if let Some(s) = &cfg.sweep {
        out += &format!(
            "sweep: {} from {} to {} in {} steps\n",
            s.variable.as_str(),
            s.from,
            s.to,
            s.steps
        );
    }
    out
}
