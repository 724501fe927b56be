//! Molecular absorption in the 100-450 GHz band.
//!
//! The default [`LineModel`] is the simplified water-vapour/oxygen line model:
//! six Lorentzian-like lines at 118, 183, 325, 380, 439 and 448 GHz plus a
//! polynomial continuum term, parameterised by the water-vapour volume mixing
//! ratio. A [`TableProvider`] can replace it with measured or externally
//! computed coefficients loaded from CSV.

use std::io::Read;
use std::path::Path;

use crate::error::{ensure_fraction, ensure_non_negative, ensure_positive, Error, Result};
use crate::SPEED_OF_LIGHT;

/// Lower edge of the absorption model's validity window, Hz.
pub const BAND_LO_HZ: f64 = 100e9;
/// Upper edge of the absorption model's validity window, Hz.
pub const BAND_HI_HZ: f64 = 450e9;

/// Standard sea-level pressure, Pa.
pub const STANDARD_PRESSURE_PA: f64 = 101_325.0;

/// Ambient conditions that set the water-vapour content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atmosphere {
    /// Relative humidity as a fraction in [0, 1].
    pub relative_humidity: f64,
    /// Air temperature, degrees Celsius.
    pub temperature_c: f64,
    /// Total pressure, Pa.
    pub pressure_pa: f64,
}

impl Default for Atmosphere {
    fn default() -> Self {
        Self {
            relative_humidity: 0.5,
            temperature_c: 25.0,
            pressure_pa: STANDARD_PRESSURE_PA,
        }
    }
}

impl Atmosphere {
    pub fn validate(&self) -> Result<()> {
        ensure_fraction("relative humidity", self.relative_humidity)?;
        ensure_positive("pressure", self.pressure_pa)?;
        if !self.temperature_c.is_finite() || self.temperature_c <= -240.0 {
            return Err(Error::Domain {
                name: "temperature",
                value: self.temperature_c,
                expected: "finite and > -240 C",
            });
        }
        Ok(())
    }
}

/// Saturation vapour pressure over water (Buck), Pa.
pub fn saturation_pressure(temperature_c: f64) -> f64 {
    611.21 * (17.502 * temperature_c / (240.97 + temperature_c)).exp()
}

/// Volume mixing ratio of water vapour, `RH * p_sat(T) / p`.
pub fn mixing_ratio(atm: &Atmosphere) -> Result<f64> {
    atm.validate()?;
    Ok(atm.relative_humidity * saturation_pressure(atm.temperature_c) / atm.pressure_pa)
}

/// One absorption line: `strength(mu) / (width(mu) + (v - centre)^2)` with
/// `v` the wavenumber in cm^-1.
///
/// `strength = s0 * w * (s1 * w + s2)` and `width = (b1 * w + b2)^2`, where
/// `w` is `mu` for water lines and `1 - mu` for the oxygen line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionLine {
    pub centre_per_cm: f64,
    pub strength: [f64; 3],
    pub width: [f64; 2],
    pub oxygen: bool,
}

impl AbsorptionLine {
    fn value(&self, wavenumber: f64, mu: f64) -> f64 {
        let w = if self.oxygen { 1.0 - mu } else { mu };
        let [s0, s1, s2] = self.strength;
        let [b1, b2] = self.width;
        let strength = s0 * w * (s1 * w + s2);
        let width = (b1 * w + b2).powi(2);
        strength / (width + (wavenumber - self.centre_per_cm).powi(2))
    }
}

/// Six-line absorption model with polynomial continuum
/// `g = mu / mu_ref * (c0 + c1 * f^p)` (`f` in Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct LineModel {
    pub lines: [AbsorptionLine; 6],
    pub continuum_reference_mu: f64,
    pub continuum_offset: f64,
    pub continuum_scale: f64,
    pub continuum_exponent: f64,
}

impl Default for LineModel {
    fn default() -> Self {
        let line = |centre, strength, width, oxygen| AbsorptionLine {
            centre_per_cm: centre,
            strength,
            width,
            oxygen,
        };
        Self {
            lines: [
                line(3.96, [5.159e-5, -6.65e-5, 0.0159], [-2.09e-4, 0.05], true),
                line(6.11, [0.1925, 0.1350, 0.0318], [0.4241, 0.0998], false),
                line(10.84, [0.2251, 0.1314, 0.0297], [0.4127, 0.0932], false),
                line(12.68, [2.053, 0.1717, 0.0306], [0.5394, 0.0961], false),
                line(14.65, [0.177, 0.0832, 0.0213], [0.2615, 0.0668], false),
                line(14.94, [2.146, 0.1206, 0.0277], [0.3789, 0.0871], false),
            ],
            continuum_reference_mu: 0.0157,
            continuum_offset: 2e-4,
            continuum_scale: 0.915e-112,
            continuum_exponent: 9.42,
        }
    }
}

impl LineModel {
    /// Absorption coefficient in 1/m. No band check.
    pub fn coefficient(&self, frequency_hz: f64, mu: f64) -> f64 {
        let wavenumber = frequency_hz / (100.0 * SPEED_OF_LIGHT);
        let lines: f64 = self.lines.iter().map(|l| l.value(wavenumber, mu)).sum();
        let continuum = mu / self.continuum_reference_mu
            * (self.continuum_offset
                + self.continuum_scale * frequency_hz.powf(self.continuum_exponent));
        (lines + continuum).max(0.0)
    }
}

/// Tabulated absorption coefficients with linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TableProvider {
    frequency_hz: Vec<f64>,
    k_per_m: Vec<f64>,
}

impl TableProvider {
    pub fn new(frequency_hz: Vec<f64>, k_per_m: Vec<f64>) -> Result<Self> {
        if frequency_hz.len() != k_per_m.len() {
            return Err(Error::InvalidTable(format!(
                "{} frequencies but {} coefficients",
                frequency_hz.len(),
                k_per_m.len()
            )));
        }
        if frequency_hz.is_empty() {
            return Err(Error::InvalidTable("table is empty".into()));
        }
        if let Some(w) = frequency_hz.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable(format!(
                "frequencies must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(k) = k_per_m.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::InvalidTable(format!(
                "negative or non-finite k = {k}"
            )));
        }
        Ok(Self {
            frequency_hz,
            k_per_m,
        })
    }

    /// Uniform coefficient over the whole band.
    pub fn constant(k_per_m: f64) -> Result<Self> {
        Self::new(vec![BAND_LO_HZ, BAND_HI_HZ], vec![k_per_m, k_per_m])
    }

    /// Reads a `frequency_hz,k_per_m` CSV with a header row.
    pub fn from_csv_reader<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidTable(e.to_string()))?;
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidTable("missing header".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["frequency_hz", "k_per_m"] {
            return Err(Error::InvalidTable(format!(
                "expected header `frequency_hz,k_per_m`, found `{header}`"
            )));
        }
        let mut freqs = Vec::new();
        let mut ks = Vec::new();
        for (i, line) in lines {
            let mut fields = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.parse().ok()).ok_or_else(|| {
                    Error::InvalidTable(format!("line {}: cannot parse `{line}`", i + 1))
                })
            };
            freqs.push(parse(fields.next())?);
            ks.push(parse(fields.next())?);
            if fields.next().is_some() {
                return Err(Error::InvalidTable(format!(
                    "line {}: expected two columns",
                    i + 1
                )));
            }
        }
        Self::new(freqs, ks)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::InvalidTable(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequency_hz
    }

    /// Linear interpolation; frequencies outside the knots take the nearest
    /// end value.
    pub fn coefficient(&self, frequency_hz: f64) -> f64 {
        let f = &self.frequency_hz;
        let k = &self.k_per_m;
        let idx = f.partition_point(|&x| x <= frequency_hz);
        if idx == 0 {
            return k[0];
        }
        if idx == f.len() {
            return k[f.len() - 1];
        }
        let (f0, f1) = (f[idx - 1], f[idx]);
        let t = (frequency_hz - f0) / (f1 - f0);
        k[idx - 1] + t * (k[idx] - k[idx - 1])
    }
}

/// Source of the absorption coefficient `k(f)`.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum AbsorptionProvider {
    LineModel(LineModel),
    Table(TableProvider),
}

impl Default for AbsorptionProvider {
    fn default() -> Self {
        AbsorptionProvider::LineModel(LineModel::default())
    }
}

/// Result of a band-clamped absorption query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedCoefficient {
    pub k_per_m: f64,
    /// Frequency actually evaluated.
    pub evaluated_hz: f64,
    /// True when the requested frequency was moved to a band edge.
    pub clamped: bool,
}

fn check_band(frequency_hz: f64) -> Result<()> {
    if (BAND_LO_HZ..=BAND_HI_HZ).contains(&frequency_hz) {
        Ok(())
    } else {
        Err(Error::OutOfBand {
            frequency_hz,
            lo_hz: BAND_LO_HZ,
            hi_hz: BAND_HI_HZ,
        })
    }
}

/// Absorption coefficient `k(f)` in 1/m for an in-band frequency.
pub fn absorption_coefficient(
    frequency_hz: f64,
    mu: f64,
    provider: &AbsorptionProvider,
) -> Result<f64> {
    check_band(frequency_hz)?;
    ensure_non_negative("mixing ratio", mu)?;
    Ok(match provider {
        AbsorptionProvider::LineModel(m) => m.coefficient(frequency_hz, mu),
        AbsorptionProvider::Table(t) => t.coefficient(frequency_hz),
    })
}

/// Like [`absorption_coefficient`], but out-of-band frequencies are evaluated
/// at the nearest band edge and flagged instead of rejected.
pub fn absorption_coefficient_clamped(
    frequency_hz: f64,
    mu: f64,
    provider: &AbsorptionProvider,
) -> Result<ClampedCoefficient> {
    ensure_positive("frequency", frequency_hz)?;
    let evaluated_hz = frequency_hz.clamp(BAND_LO_HZ, BAND_HI_HZ);
    Ok(ClampedCoefficient {
        k_per_m: absorption_coefficient(evaluated_hz, mu, provider)?,
        evaluated_hz,
        clamped: evaluated_hz != frequency_hz,
    })
}

/// Beer-Lambert attenuation `exp(-k d)` for a coefficient in 1/m.
pub fn beer_lambert(k_per_m: f64, d: f64) -> f64 {
    (-k_per_m * d).exp()
}

/// Molecular absorption loss `h_abs = exp(-k(f) d)`.
pub fn molecular_loss(
    frequency_hz: f64,
    d: f64,
    mu: f64,
    provider: &AbsorptionProvider,
) -> Result<f64> {
    ensure_non_negative("distance", d)?;
    Ok(beer_lambert(
        absorption_coefficient(frequency_hz, mu, provider)?,
        d,
    ))
}
