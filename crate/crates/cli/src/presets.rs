//! Named base scenarios.

use iscap_core::{FadingModel, SystemParams};

use crate::CliError;

pub const DEFAULT: &str = "table1";

/// `(name, description)` of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "table1",
        "300 GHz, 10 W, 20 m, T = 100 s, -50 dBm noise, l0 = 0.8 m, alpha = 0.1/s, K = 1",
    ),
    (
        "table1-mc",
        "table1 with 1000 seeded Rician draws instead of the unit-mean channel",
    ),
    (
        "table1-60ghz",
        "table1 at 60 GHz (absorption clamped to the 100 GHz band edge)",
    ),
];

pub fn lookup(name: &str) -> Result<SystemParams, CliError> {
    let mut p = SystemParams::table1();
    match name {
        "table1" => {}
        "table1-mc" => p.fading = FadingModel::monte_carlo(1.0, 1000, 1),
        "table1-60ghz" => p.frequency_hz = 60e9,
        _ => return Err(CliError::UnknownPreset(name.to_string())),
    }
    Ok(p)
}
