//! Scenario files.
//!
//! A scenario is a TOML document whose fields are all optional; anything left
//! out is taken from the named preset (`table1` unless `preset` says
//! otherwise). Units on disk are the ones engineers type: GHz for carrier
//! frequency and dBm for noise power. Everything is converted to SI on load.
//!
//! ```toml
//! preset = "table1"
//!
//! [link]
//! frequency_ghz = 300.0
//! tx_power_w = 10.0
//! distance_m = 20.0
//! total_time_T = 100.0
//! noise_dbm = -50.0
//!
//! [sweep]
//! variable = "distance"
//! from = 1.0
//! to = 100.0
//! steps = 200
//! ```

use std::path::Path;

use iscap_core::{
    dbm_to_watts, AbsorptionProvider, BandPolicy, EnergyHarvestModel, FadingModel,
    HarvestPlacement, SolverConfig, SystemParams, TableProvider,
};
use serde::Deserialize;

use crate::presets;
use crate::CliError;

/// Default sweep resolution.
pub const DEFAULT_STEPS: usize = 200;
/// Rectifier efficiency used when the linear model is chosen without one.
pub const DEFAULT_LINEAR_ETA: f64 = 0.5;
/// Monte Carlo draws when `mc` fading is requested without a count.
pub const DEFAULT_MC_SAMPLES: usize = 1000;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub antennas: AntennaSection,
    #[serde(default)]
    pub atmosphere: AtmosphereSection,
    #[serde(default)]
    pub harvest: HarvestSection,
    #[serde(default)]
    pub absorption: AbsorptionSection,
    #[serde(default)]
    pub fading: FadingSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub frequency_ghz: Option<f64>,
    pub tx_power_w: Option<f64>,
    pub distance_m: Option<f64>,
    #[serde(rename = "total_time_T")]
    pub total_time_t: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub l0_m: Option<f64>,
    pub alpha_per_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSection {
    pub bs_tx_diameter_m: Option<f64>,
    pub bs_rx_diameter_m: Option<f64>,
    pub user_rx_diameter_m: Option<f64>,
    pub efficiency: Option<f64>,
    pub beam_waist_m: Option<f64>,
    pub receiver_radius_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtmosphereSection {
    pub relative_humidity: Option<f64>,
    pub temperature_c: Option<f64>,
    pub pressure_pa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HarvestKind {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Full,
    Split,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarvestSection {
    pub model: Option<HarvestKind>,
    pub eta: Option<f64>,
    pub a0: Option<f64>,
    pub b0: Option<f64>,
    pub c0: Option<f64>,
    pub placement: Option<Placement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    LineModel,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Clamp,
    Strict,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorptionSection {
    pub provider: Option<ProviderKind>,
    /// CSV with header `frequency_hz,k_per_m`; relative to the config file.
    pub table_path: Option<String>,
    pub band_policy: Option<BandKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FadingKind {
    Mean,
    Mc,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    pub mode: Option<FadingKind>,
    pub rician_k: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub bisection_tol: Option<f64>,
    pub grid_step: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    SensingTime,
    Rho0,
    Distance,
    Frequency,
    TxAperture,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::SensingTime => "sensing_time",
            SweepVariable::Rho0 => "rho0",
            SweepVariable::Distance => "distance",
            SweepVariable::Frequency => "frequency",
            SweepVariable::TxAperture => "tx_aperture",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    /// Start of the range, in the variable's file units (s, -, m, GHz, m).
    pub from: f64,
    pub to: f64,
    pub steps: Option<usize>,
    /// Sensing ratio for distance/frequency/aperture sweeps.
    pub rho0: Option<f64>,
    pub rho1: Option<f64>,
    /// User aperture as a multiple of the BS aperture in `tx_aperture` sweeps.
    pub rx_aperture_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    P1,
    P2,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub problem: Option<ProblemKind>,
    pub r_eps: Option<f64>,
    pub e_eps: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
}

/// Resolved sweep in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub rho0: f64,
    pub rho1: f64,
    pub rx_aperture_ratio: f64,
}

impl SweepSpec {
    /// Swept values in SI units, evenly spaced and including both ends.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub preset: String,
    pub params: SystemParams,
    pub solver: SolverConfig,
    pub sweep: Option<SweepSpec>,
    pub problem: Option<ProblemKind>,
    pub r_eps: Option<f64>,
    pub e_eps: Option<f64>,
    pub output_path: Option<String>,
}

/// Command-line overrides applied after the file is merged over its preset.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub fading: Option<FadingKind>,
    pub eh: Option<HarvestKind>,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn fraction(field: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be in [0, 1], got {v}")))
    }
}

/// Parses scenario text; `origin` labels error messages.
pub fn parse(text: &str, origin: &str) -> Result<ConfigFile, CliError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        CliError::Parse {
            origin: origin.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigIo {
        path: path.display().to_string(),
        source: e,
    })?;
    let file = parse(&text, &path.display().to_string())?;
    resolve(file, path.parent(), overrides)
}

/// Merges a parsed file over its preset, applies overrides, converts units
/// and validates.
pub fn resolve(
    file: ConfigFile,
    base_dir: Option<&Path>,
    overrides: &Overrides,
) -> Result<ScenarioConfig, CliError> {
    let preset_name = overrides
        .preset
        .clone()
        .or(file.preset.clone())
        .unwrap_or_else(|| presets::DEFAULT.to_string());
    let mut p = presets::lookup(&preset_name)?;

    let l = &file.link;
    if let Some(v) = l.frequency_ghz {
        p.frequency_hz = positive("frequency_ghz", v)? * 1e9;
    }
    if let Some(v) = l.tx_power_w {
        p.tx_power_w = positive("tx_power_w", v)?;
    }
    if let Some(v) = l.distance_m {
        p.distance_m = positive("distance_m", v)?;
    }
    if let Some(v) = l.total_time_t {
        p.total_time_s = positive("total_time_T", v)?;
    }
    if let Some(v) = l.noise_dbm {
        if !v.is_finite() {
            return Err(invalid("noise_dbm", "must be finite"));
        }
        p.noise_power_w = dbm_to_watts(v);
    }
    if let Some(v) = l.l0_m {
        p.l0_m = non_negative("l0_m", v)?;
    }
    if let Some(v) = l.alpha_per_s {
        p.alpha_per_s = non_negative("alpha_per_s", v)?;
    }

    let a = &file.antennas;
    if let Some(v) = a.efficiency {
        let eta = positive("efficiency", v)?;
        if eta > 1.0 {
            return Err(invalid("efficiency", format!("must be <= 1, got {v}")));
        }
        p.bs_tx.efficiency = eta;
        p.bs_rx.efficiency = eta;
        p.user_rx.efficiency = eta;
    }
    if let Some(v) = a.bs_tx_diameter_m {
        p.bs_tx.diameter = positive("bs_tx_diameter_m", v)?;
    }
    if let Some(v) = a.bs_rx_diameter_m {
        p.bs_rx.diameter = positive("bs_rx_diameter_m", v)?;
    }
    if let Some(v) = a.user_rx_diameter_m {
        p.user_rx.diameter = positive("user_rx_diameter_m", v)?;
    }
    if let Some(v) = a.beam_waist_m {
        p.beam_waist_m = Some(positive("beam_waist_m", v)?);
    }
    if let Some(v) = a.receiver_radius_m {
        p.receiver_radius_m = Some(positive("receiver_radius_m", v)?);
    }

    let atm = &file.atmosphere;
    if let Some(v) = atm.relative_humidity {
        p.atmosphere.relative_humidity = fraction("relative_humidity", v)?;
    }
    if let Some(v) = atm.temperature_c {
        p.atmosphere.temperature_c = v;
    }
    if let Some(v) = atm.pressure_pa {
        p.atmosphere.pressure_pa = positive("pressure_pa", v)?;
    }

    let h = &file.harvest;
    let kind = overrides.eh.or(h.model);
    match kind {
        Some(HarvestKind::Linear) => {
            let eta = h.eta.unwrap_or(DEFAULT_LINEAR_ETA);
            p.eh_model = EnergyHarvestModel::Linear { eta };
        }
        Some(HarvestKind::Nonlinear) => {
            p.eh_model = nonlinear_from(h, EnergyHarvestModel::TABLE1);
        }
        None => {
            if h.a0.is_some() || h.b0.is_some() || h.c0.is_some() {
                p.eh_model = nonlinear_from(h, p.eh_model);
            }
            if let (Some(eta), EnergyHarvestModel::Linear { .. }) = (h.eta, p.eh_model) {
                p.eh_model = EnergyHarvestModel::Linear { eta };
            }
        }
    }
    p.eh_model
        .validate()
        .map_err(|e| invalid("harvest", e.to_string()))?;
    if let Some(pl) = h.placement {
        p.harvest_placement = match pl {
            Placement::Full => HarvestPlacement::FullPower,
            Placement::Split => HarvestPlacement::SplitPower,
        };
    }

    let ab = &file.absorption;
    match (ab.provider, &ab.table_path) {
        (Some(ProviderKind::Table), None) => {
            return Err(invalid("table_path", "required when provider = \"table\""));
        }
        (Some(ProviderKind::LineModel), Some(_)) => {
            return Err(invalid(
                "table_path",
                "only valid with provider = \"table\"",
            ));
        }
        (Some(ProviderKind::Table), Some(path)) | (None, Some(path)) => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => Path::new(path).to_path_buf(),
            };
            let table = TableProvider::from_csv_path(&full)
                .map_err(|e| invalid("table_path", format!("{}: {e}", full.display())))?;
            p.absorption = AbsorptionProvider::Table(table);
        }
        (Some(ProviderKind::LineModel), None) => {
            p.absorption = AbsorptionProvider::default();
        }
        (None, None) => {}
    }
    if let Some(b) = ab.band_policy {
        p.band_policy = match b {
            BandKind::Clamp => BandPolicy::Clamp,
            BandKind::Strict => BandPolicy::Strict,
        };
    }

    let f = &file.fading;
    let (preset_k, preset_samples, preset_seed, preset_mc) = match p.fading.mode {
        iscap_core::FadingMode::DeterministicMean => (p.fading.rician_k, None, None, false),
        iscap_core::FadingMode::MonteCarlo { samples, seed } => {
            (p.fading.rician_k, Some(samples), Some(seed), true)
        }
    };
    let k = non_negative("rician_k", f.rician_k.unwrap_or(preset_k))?;
    let mc = match overrides.fading.or(f.mode) {
        Some(FadingKind::Mc) => true,
        Some(FadingKind::Mean) => false,
        None => preset_mc,
    };
    p.fading = if mc {
        let samples = f.samples.or(preset_samples).unwrap_or(DEFAULT_MC_SAMPLES);
        if samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        let seed = overrides.seed.or(f.seed).or(preset_seed).unwrap_or(0);
        FadingModel::monte_carlo(k, samples, seed)
    } else {
        FadingModel::deterministic(k)
    };

    let mut solver = SolverConfig::default();
    let s = &file.solver;
    if let Some(v) = s.bisection_tol {
        solver.bisection_tol = positive("bisection_tol", v)?;
    }
    if let Some(v) = s.grid_step {
        solver.grid_step = positive("grid_step", v)?;
    }
    if let Some(v) = s.max_iterations {
        solver.max_iterations = v;
    }
    solver
        .validate()
        .map_err(|e| invalid("solver", e.to_string()))?;

    p.validate().map_err(|e| invalid("link", e.to_string()))?;

    let sweep = match file.sweep {
        Some(sw) => Some(resolve_sweep(sw, &p)?),
        None => None,
    };

    let o = &file.optimize;
    if let Some(v) = o.r_eps {
        non_negative("r_eps", v)?;
    }
    if let Some(v) = o.e_eps {
        non_negative("e_eps", v)?;
    }

    Ok(ScenarioConfig {
        preset: preset_name,
        params: p,
        solver,
        sweep,
        problem: o.problem,
        r_eps: o.r_eps,
        e_eps: o.e_eps,
        output_path: file.output.path,
    })
}

fn nonlinear_from(h: &HarvestSection, base: EnergyHarvestModel) -> EnergyHarvestModel {
    let (a0, b0, c0) = match base {
        EnergyHarvestModel::Nonlinear { a0, b0, c0 } => (a0, b0, c0),
        _ => match EnergyHarvestModel::TABLE1 {
            EnergyHarvestModel::Nonlinear { a0, b0, c0 } => (a0, b0, c0),
            _ => unreachable!(),
        },
    };
    EnergyHarvestModel::Nonlinear {
        a0: h.a0.unwrap_or(a0),
        b0: h.b0.unwrap_or(b0),
        c0: h.c0.unwrap_or(c0),
    }
}

fn resolve_sweep(sw: SweepSection, p: &SystemParams) -> Result<SweepSpec, CliError> {
    let steps = sw.steps.unwrap_or(DEFAULT_STEPS);
    if steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    if !(sw.from.is_finite() && sw.to.is_finite()) || sw.to < sw.from {
        return Err(invalid(
            "sweep",
            format!(
                "range must satisfy from <= to, got [{}, {}]",
                sw.from, sw.to
            ),
        ));
    }
    let (from, to) = match sw.variable {
        SweepVariable::SensingTime => {
            non_negative("from", sw.from)?;
            if sw.to > p.total_time_s {
                return Err(invalid(
                    "to",
                    format!(
                        "sensing time {} exceeds total_time_T {}",
                        sw.to, p.total_time_s
                    ),
                ));
            }
            (sw.from, sw.to)
        }
        SweepVariable::Rho0 => (fraction("from", sw.from)?, fraction("to", sw.to)?),
        SweepVariable::Distance | SweepVariable::TxAperture => {
            (positive("from", sw.from)?, positive("to", sw.to)?)
        }
        SweepVariable::Frequency => (
            positive("from", sw.from)? * 1e9,
            positive("to", sw.to)? * 1e9,
        ),
    };
    Ok(SweepSpec {
        variable: sw.variable,
        from,
        to,
        steps,
        rho0: fraction("rho0", sw.rho0.unwrap_or(DEFAULT_SWEEP_RHO0))?,
        rho1: fraction("rho1", sw.rho1.unwrap_or(DEFAULT_SWEEP_RHO1))?,
        rx_aperture_ratio: positive(
            "rx_aperture_ratio",
            sw.rx_aperture_ratio.unwrap_or(DEFAULT_RX_APERTURE_RATIO),
        )?,
    })
}

/// Sensing ratio held fixed while distance, frequency or aperture is swept.
pub const DEFAULT_SWEEP_RHO0: f64 = 0.28;
pub const DEFAULT_SWEEP_RHO1: f64 = 0.5;
/// User aperture relative to the BS aperture in aperture sweeps.
pub const DEFAULT_RX_APERTURE_RATIO: f64 = 2.0;
