//! Geometric and electromagnetic propagation primitives.
//!
//! Everything here is a pure function of SI inputs: aperture gain, the
//! reactive / Fresnel-zone / far-field partition around the BS transmit
//! aperture, the matching path-loss factor, Gaussian-beam geometry at the
//! receiver plane, pointing-error (misalignment) fading, beam collection
//! efficiency and Rician multipath power.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Empirical gain-reduction coefficient of the Fresnel-zone correction.
pub const GAIN_REDUCTION_COEFF: f64 = 0.06;

/// Linear gain above which the high-gain branch of the Fresnel-zone
/// correction applies (10 dB).
pub const HIGH_GAIN_THRESHOLD: f64 = 10.0;

/// Relative slack used when comparing a distance against a region boundary,
/// so that `d == 2 D^2 / lambda` is not misfiled by a rounding ulp.
const BOUNDARY_RTOL: f64 = 1e-12;

/// Circular aperture antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaSpec {
    /// Physical aperture diameter in metres.
    pub diameter: f64,
    /// Aperture efficiency in (0, 1].
    pub efficiency: f64,
}

impl AntennaSpec {
    pub fn new(diameter: f64, efficiency: f64) -> Result<Self> {
        let spec = Self {
            diameter,
            efficiency,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("aperture diameter", self.diameter)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Domain {
                name: "aperture efficiency",
                value: self.efficiency,
                expected: "in (0, 1]",
            });
        }
        Ok(())
    }

    /// Physical aperture area `pi (D/2)^2`.
    pub fn area(&self) -> f64 {
        PI * (self.diameter / 2.0).powi(2)
    }

    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }
}

/// Aperture antenna gain `eta * (pi D / lambda)^2` (linear).
pub fn antenna_gain(spec: &AntennaSpec, wavelength: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    spec.validate()?;
    Ok(spec.efficiency * (PI * spec.diameter / wavelength).powi(2))
}

/// Propagation region of a receiver at distance `d` from the transmit aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    /// `d <= d_r`: reactive near field, nothing is radiated to the receiver.
    Reactive,
    /// Radiating near field where the Friis equation is scaled by `gamma_A`.
    FresnelZone,
    /// `d >= max(1, d_R)`.
    FarField,
    /// Between the reactive boundary and `d_min`, where `gamma_A` would be
    /// negative.
    BelowGainFloor,
}

impl RegionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionClass::Reactive => "reactive",
            RegionClass::FresnelZone => "fresnel",
            RegionClass::FarField => "far_field",
            RegionClass::BelowGainFloor => "below_gain_floor",
        }
    }

    /// True when the path loss in this region is identically zero.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, RegionClass::Reactive | RegionClass::BelowGainFloor)
    }
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Region boundary distances for one `(lambda, D)` pair, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBoundaries {
    /// Reactive / radiating boundary `0.62 sqrt(D^3 / lambda)`.
    pub reactive: f64,
    /// Smallest distance with a non-negative gain-reduction factor.
    pub d_min: f64,
    /// Rayleigh distance `2 D^2 / lambda`.
    pub rayleigh: f64,
}

/// Region classification together with the boundaries it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub class: RegionClass,
    pub boundaries: RegionBoundaries,
}

/// Minimum distance of the Fresnel-zone correction for a transmit gain.
pub fn min_gain_distance(wavelength: f64, tx_gain: f64) -> f64 {
    let branch = if tx_gain >= HIGH_GAIN_THRESHOLD {
        2.0
    } else {
        4.0
    };
    branch * wavelength * GAIN_REDUCTION_COEFF.sqrt() * tx_gain / (PI * PI)
}

pub fn region_boundaries(wavelength: f64, tx: &AntennaSpec) -> Result<RegionBoundaries> {
    let gain = antenna_gain(tx, wavelength)?;
    let d = tx.diameter;
    Ok(RegionBoundaries {
        reactive: 0.62 * (d.powi(3) / wavelength).sqrt(),
        d_min: min_gain_distance(wavelength, gain),
        // Grouped so that e.g. D = 0.1, lambda = 1e-3 gives exactly 20.
        rayleigh: 2.0 * d * (d / wavelength),
    })
}

/// Classifies the receiver distance against the transmit aperture's regions.
///
/// Distances in `[d_R, 1)` (only possible for sub-metre Rayleigh distances)
/// are treated as Fresnel-zone points so the gain correction still applies.
pub fn classify_region(d: f64, wavelength: f64, tx: &AntennaSpec) -> Result<Region> {
    ensure_positive("distance", d)?;
    let boundaries = region_boundaries(wavelength, tx)?;
    let at_least = |x: f64| d >= x * (1.0 - BOUNDARY_RTOL);
    let class = if d <= boundaries.reactive {
        RegionClass::Reactive
    } else if at_least(boundaries.rayleigh.max(1.0)) {
        RegionClass::FarField
    } else if at_least(boundaries.d_min) {
        RegionClass::FresnelZone
    } else {
        RegionClass::BelowGainFloor
    };
    Ok(Region { class, boundaries })
}

/// Fresnel-zone gain reduction factor `gamma_A = 1 - (d_min / d)^2`.
pub fn gain_reduction_factor(d: f64, wavelength: f64, tx_gain: f64) -> Result<f64> {
    ensure_positive("distance", d)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("transmit gain", tx_gain)?;
    let d_min = min_gain_distance(wavelength, tx_gain);
    if d < d_min {
        return Err(Error::BelowGainFloor { distance: d, d_min });
    }
    Ok((1.0 - (d_min / d).powi(2)).clamp(0.0, 1.0))
}

/// Free-space path loss factor `lambda^2 / (4 pi d)^2`.
pub fn free_space_path_loss(d: f64, wavelength: f64) -> f64 {
    (wavelength / (4.0 * PI * d)).powi(2)
}

/// Path-loss factor (linear, <= 1) with its region tag.
///
/// Degenerate regions return a zero factor instead of an error so that
/// distance sweeps can run across all regions.
pub fn path_loss(d: f64, wavelength: f64, tx: &AntennaSpec) -> Result<(f64, Region)> {
    let region = classify_region(d, wavelength, tx)?;
    let pl = match region.class {
        RegionClass::FarField => free_space_path_loss(d, wavelength),
        RegionClass::FresnelZone => {
            let gain = antenna_gain(tx, wavelength)?;
            free_space_path_loss(d, wavelength) * gain_reduction_factor(d, wavelength, gain)?
        }
        RegionClass::Reactive | RegionClass::BelowGainFloor => 0.0,
    };
    Ok((pl, region))
}

/// Gaussian beam radius `w0 sqrt(1 + (d / d0)^2)` with Rayleigh range
/// `d0 = pi w0^2 / lambda`.
pub fn beam_radius(d: f64, waist: f64, wavelength: f64) -> Result<f64> {
    ensure_positive("beam waist", waist)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_non_negative("distance", d)?;
    let d0 = rayleigh_range(waist, wavelength);
    Ok(waist * (1.0 + (d / d0).powi(2)).sqrt())
}

pub fn rayleigh_range(waist: f64, wavelength: f64) -> f64 {
    PI * waist * waist / wavelength
}

/// Collected power fraction `S0` and equivalent beamwidth `R_ebw` for a
/// circular receiver of radius `receiver_radius` in a beam of radius `beam_radius`.
pub fn pointing_geometry(receiver_radius: f64, beam_radius: f64) -> Result<(f64, f64)> {
    ensure_positive("receiver radius", receiver_radius)?;
    ensure_positive("beam radius", beam_radius)?;
    let eps = PI.sqrt() * receiver_radius / (2f64.sqrt() * beam_radius);
    let erf = libm::erf(eps);
    let s0 = erf * erf;
    let r_ebw_sq = beam_radius * beam_radius * equivalent_width_ratio(eps, erf);
    Ok((s0, r_ebw_sq.sqrt()))
}

/// `sqrt(pi) erf(eps) / (2 eps exp(-eps^2))`, with its `eps -> 0` limit of 1.
fn equivalent_width_ratio(eps: f64, erf: f64) -> f64 {
    if eps < 1e-6 {
        // erf(e) = 2e/sqrt(pi) (1 - e^2/3 + ...), so the ratio is 1 + 2e^2/3 + O(e^4).
        1.0 + 2.0 * eps * eps / 3.0
    } else {
        PI.sqrt() * erf / (2.0 * eps * (-eps * eps).exp())
    }
}

/// Beam geometry at the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    pub waist: f64,
    pub rayleigh_range: f64,
    pub beam_radius: f64,
    pub receiver_radius: f64,
    /// Fraction of power collected under perfect alignment.
    pub collected_fraction: f64,
    pub equivalent_beamwidth: f64,
}

impl BeamGeometry {
    pub fn new(d: f64, waist: f64, wavelength: f64, receiver_radius: f64) -> Result<Self> {
        let radius = beam_radius(d, waist, wavelength)?;
        let (s0, r_ebw) = pointing_geometry(receiver_radius, radius)?;
        Ok(Self {
            waist,
            rayleigh_range: rayleigh_range(waist, wavelength),
            beam_radius: radius,
            receiver_radius,
            collected_fraction: s0,
            equivalent_beamwidth: r_ebw,
        })
    }

    /// Misalignment fading coefficient for a radial pointing error.
    pub fn misalignment_coefficient(&self, l_mis: f64) -> f64 {
        misalignment_coefficient(l_mis, self.collected_fraction, self.equivalent_beamwidth)
    }
}

/// Radial pointing error after `t` seconds of sensing-driven correction,
/// `l0 exp(-alpha t)`.
pub fn misalignment_error(t: f64, l0: f64, alpha: f64) -> f64 {
    l0 * (-alpha * t).exp()
}

/// `h_mis = S0 exp(-2 l_mis^2 / R_ebw^2)`.
pub fn misalignment_coefficient(l_mis: f64, s0: f64, r_ebw: f64) -> f64 {
    s0 * (-2.0 * l_mis * l_mis / (r_ebw * r_ebw)).exp()
}

/// Gaussian-beam collection efficiency `1 - exp(-A_tx A_rx / (lambda d)^2)`.
pub fn beam_collection_efficiency(
    area_tx: f64,
    area_rx: f64,
    wavelength: f64,
    d: f64,
) -> Result<f64> {
    ensure_positive("transmit area", area_tx)?;
    ensure_positive("receive area", area_rx)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("distance", d)?;
    Ok(-(-(area_tx * area_rx) / (wavelength * d).powi(2)).exp_m1())
}

/// How the multipath power `|h_f|^2` enters an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingMode {
    /// `|h_f|^2 = 1`, the mean of the normalised Rician power.
    DeterministicMean,
    /// Average over `samples` seeded Rician draws.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Rician multipath model normalised to unit mean power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    pub rician_k: f64,
    pub mode: FadingMode,
}

impl FadingModel {
    pub fn deterministic(rician_k: f64) -> Self {
        Self {
            rician_k,
            mode: FadingMode::DeterministicMean,
        }
    }

    pub fn monte_carlo(rician_k: f64, samples: usize, seed: u64) -> Self {
        Self {
            rician_k,
            mode: FadingMode::MonteCarlo { samples, seed },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rician_k >= 0.0) {
            return Err(Error::Domain {
                name: "rician K",
                value: self.rician_k,
                expected: ">= 0 (may be +inf)",
            });
        }
        if let FadingMode::MonteCarlo { samples: 0, .. } = self.mode {
            return Err(Error::Domain {
                name: "fading sample count",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(())
    }

    /// LoS amplitude `nu` and per-component scatter deviation `sigma`, with
    /// `nu^2 + 2 sigma^2 = 1` and `K = nu^2 / (2 sigma^2)`.
    pub fn rician_parameters(&self) -> (f64, f64) {
        let k = self.rician_k;
        if k.is_infinite() {
            return (1.0, 0.0);
        }
        let nu = (k / (k + 1.0)).sqrt();
        let sigma = (0.5 / (k + 1.0)).sqrt();
        (nu, sigma)
    }

    /// Fading power values `|h_f|^2` to average over.
    ///
    /// One value of exactly 1 in deterministic mode; `samples` reproducible
    /// draws in Monte Carlo mode.
    pub fn power_samples(&self) -> Result<Vec<f64>> {
        self.validate()?;
        match self.mode {
            FadingMode::DeterministicMean => Ok(vec![1.0]),
            FadingMode::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(self.sample_powers(&mut rng, samples))
            }
        }
    }

    pub fn sample_powers<R: rand::Rng>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let (nu, sigma) = self.rician_parameters();
        (0..n)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                let y: f64 = StandardNormal.sample(rng);
                let re = nu + sigma * x;
                let im = sigma * y;
                re * re + im * im
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, rtol: f64) {
        assert!(
            (a - b).abs() <= rtol * b.abs().max(f64::MIN_POSITIVE),
            "{a} vs {b} (rtol {rtol})"
        );
    }

    /// erf by composite Simpson quadrature of 2/sqrt(pi) exp(-t^2).
    fn erf_quadrature(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut sum = f(0.0) + f(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        2.0 / PI.sqrt() * sum * h / 3.0
    }

    #[test]
    fn gain_examples() {
        let tx = AntennaSpec::new(0.1, 0.2).unwrap();
        let g = antenna_gain(&tx, 1e-3).unwrap();
        assert_close(g, 0.2 * (PI * 100.0).powi(2), 1e-14);
        assert_close(g, 1.97392e4, 1e-5);
        assert_close(10.0 * g.log10(), 42.95, 1e-3);

        let unit = AntennaSpec::new(0.1, 1.0).unwrap();
        assert_close(antenna_gain(&unit, PI * 0.1).unwrap(), 1.0, 1e-14);

        let wide = AntennaSpec::new(0.2, 0.2).unwrap();
        assert_close(antenna_gain(&wide, 1e-3).unwrap(), 4.0 * g, 1e-14);
        assert_close(antenna_gain(&tx, 2e-3).unwrap(), g / 4.0, 1e-14);
    }

    #[test]
    fn gain_rejects_bad_inputs() {
        let tx = AntennaSpec::new(0.1, 0.2).unwrap();
        assert!(matches!(antenna_gain(&tx, 0.0), Err(Error::Domain { .. })));
        assert!(AntennaSpec::new(-0.1, 0.2).is_err());
        assert!(AntennaSpec::new(0.1, 1.2).is_err());
    }

    #[test]
    fn region_examples() {
        let tx = AntennaSpec::new(0.1, 0.2).unwrap();
        let far = classify_region(20.0, 1e-3, &tx).unwrap();
        assert_eq!(far.class, RegionClass::FarField);
        assert_close(far.boundaries.rayleigh, 20.0, 1e-12);

        let near = classify_region(0.01, 1e-3, &tx).unwrap();
        assert_eq!(near.class, RegionClass::Reactive);
        assert_close(near.boundaries.reactive, 0.62, 1e-12);

        // d_min = 2 lambda sqrt(0.06) G / pi^2 on the high-gain branch.
        assert_close(near.boundaries.d_min, 0.980, 2e-3);
        let g = antenna_gain(&tx, 1e-3).unwrap();
        assert_close(
            near.boundaries.d_min,
            2.0 * 1e-3 * 0.06f64.sqrt() * g / (PI * PI),
            1e-14,
        );

        assert_eq!(
            classify_region(10.0, 1e-3, &tx).unwrap().class,
            RegionClass::FresnelZone
        );
    }

    #[test]
    fn below_gain_floor_region() {
        // Large aperture, high gain: d_min well above d_r.
        let tx = AntennaSpec::new(0.4, 0.2).unwrap();
        let b = region_boundaries(1e-3, &tx).unwrap();
        assert!(b.reactive < b.d_min);
        let mid = 0.5 * (b.reactive + b.d_min);
        assert_eq!(
            classify_region(mid, 1e-3, &tx).unwrap().class,
            RegionClass::BelowGainFloor
        );
        let (pl, _) = path_loss(mid, 1e-3, &tx).unwrap();
        assert_eq!(pl, 0.0);
    }

    #[test]
    fn low_gain_branch_doubles_d_min() {
        let lambda = 1e-3;
        let g = 5.0;
        let high = 2.0 * lambda * 0.06f64.sqrt() * g / (PI * PI);
        assert_close(min_gain_distance(lambda, g), 2.0 * high, 1e-14);
        assert_close(
            min_gain_distance(lambda, 10.0),
            2.0 * lambda * 0.06f64.sqrt() * 10.0 / (PI * PI),
            1e-14,
        );
    }

    #[test]
    fn gamma_examples() {
        let lambda = 1e-3;
        let g = 1.97392e4;
        let d_min = min_gain_distance(lambda, g);
        assert_eq!(gain_reduction_factor(d_min, lambda, g).unwrap(), 0.0);
        assert_close(
            gain_reduction_factor(2.0 * d_min, lambda, g).unwrap(),
            0.75,
            1e-12,
        );
        assert!(gain_reduction_factor(1e12, lambda, g).unwrap() >= 1.0 - 1e-15);
        assert!(matches!(
            gain_reduction_factor(0.5 * d_min, lambda, g),
            Err(Error::BelowGainFloor { .. })
        ));
    }

    #[test]
    fn path_loss_examples() {
        let tx = AntennaSpec::new(0.1, 0.2).unwrap();
        let (pl, region) = path_loss(20.0, 1e-3, &tx).unwrap();
        assert_eq!(region.class, RegionClass::FarField);
        assert_close(pl, (1e-3 / (4.0 * PI * 20.0)).powi(2), 1e-14);
        assert_close(pl, 1.5831e-11, 1e-4);

        let (pl, region) = path_loss(0.5, 1e-3, &tx).unwrap();
        assert_eq!((pl, region.class), (0.0, RegionClass::Reactive));

        let (pl, region) = path_loss(10.0, 1e-3, &tx).unwrap();
        assert_eq!(region.class, RegionClass::FresnelZone);
        let g = antenna_gain(&tx, 1e-3).unwrap();
        let expected =
            free_space_path_loss(10.0, 1e-3) * gain_reduction_factor(10.0, 1e-3, g).unwrap();
        assert_close(pl, expected, 1e-14);
    }

    #[test]
    fn beam_radius_examples() {
        assert_eq!(beam_radius(0.0, 0.05, 1e-3).unwrap(), 0.05);
        let d0 = rayleigh_range(0.05, 1e-3);
        assert_close(d0, 7.854, 1e-4);
        assert_close(
            beam_radius(d0, 0.05, 1e-3).unwrap(),
            0.05 * 2f64.sqrt(),
            1e-14,
        );
        let rd = beam_radius(20.0, 0.05, 1e-3).unwrap();
        assert_close(rd, 0.05 * (1.0 + (20.0 / d0).powi(2)).sqrt(), 1e-14);
        assert_close(rd, 0.1367, 1e-3);
        assert!(beam_radius(1.0, 0.0, 1e-3).is_err());
    }

    #[test]
    fn pointing_geometry_examples() {
        let (s0, r_ebw) = pointing_geometry(0.1, 0.1367).unwrap();
        let eps = PI.sqrt() * 0.1 / (2f64.sqrt() * 0.1367);
        assert_close(eps, 0.9172, 1e-3);
        let erf = erf_quadrature(eps);
        assert_close(s0, erf * erf, 1e-12);
        assert_close(s0, 0.6487, 1e-3);
        assert!(r_ebw >= 0.1367);

        // Receiver much larger than the beam: S0 -> 1.
        let (s0, _) = pointing_geometry(10.0, 0.1).unwrap();
        assert!(s0 > 1.0 - 1e-12);

        // Vanishing receiver: S0 -> 0 and R_ebw^2 -> R_d^2.
        let (s0, r_ebw) = pointing_geometry(1e-9, 0.2).unwrap();
        assert!(s0 < 1e-16);
        assert_close(r_ebw * r_ebw, 0.04, 1e-9);
        let (_, r_small) = pointing_geometry(1e-4, 0.2).unwrap();
        assert_close(r_small * r_small, 0.04, 1e-6);
    }

    #[test]
    fn libm_erf_matches_quadrature() {
        for i in 1..=40 {
            let x = i as f64 * 0.1;
            assert!((libm::erf(x) - erf_quadrature(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn misalignment_examples() {
        assert_eq!(misalignment_error(0.0, 0.8, 0.1), 0.8);
        assert_close(
            misalignment_error(40.0, 0.8, 0.1),
            0.8 * (-4.0f64).exp(),
            1e-15,
        );
        assert_close(misalignment_error(40.0, 0.8, 0.1), 0.01465, 1e-3);
        assert_eq!(misalignment_error(123.0, 0.8, 0.0), 0.8);

        assert_eq!(misalignment_coefficient(0.0, 0.6, 0.2), 0.6);
        let r = 0.2;
        assert_close(
            misalignment_coefficient(r / 2f64.sqrt(), 0.6, r),
            0.6 * (-1.0f64).exp(),
            1e-14,
        );
        assert_eq!(misalignment_coefficient(1e3, 0.6, r), 0.0);
    }

    #[test]
    fn beam_collection_examples() {
        let a_tx = PI * 0.05 * 0.05;
        let a_rx = PI * 0.1 * 0.1;
        let eta = beam_collection_efficiency(a_tx, a_rx, 1e-3, 20.0).unwrap();
        assert_close(eta, 1.0 - (-0.6169f64).exp(), 1e-4);
        assert!((eta - 0.4603).abs() < 1e-4);
        assert!(beam_collection_efficiency(a_tx, a_rx, 1e-3, 1e9).unwrap() < 1e-9);
        assert_eq!(
            beam_collection_efficiency(a_tx, a_rx, 1e-9, 20.0).unwrap(),
            1.0
        );
        assert!(beam_collection_efficiency(a_tx, a_rx, 1e-3, 0.0).is_err());
    }

    #[test]
    fn fading_modes() {
        assert_eq!(
            FadingModel::deterministic(1.0).power_samples().unwrap(),
            vec![1.0]
        );

        let mc = FadingModel::monte_carlo(1.0, 1_000_000, 7);
        let s = mc.power_samples().unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
        assert!(s.iter().all(|&x| x >= 0.0));

        let los = FadingModel::monte_carlo(f64::INFINITY, 100, 1);
        assert!(los.power_samples().unwrap().iter().all(|&x| x == 1.0));

        let huge_k = FadingModel::monte_carlo(1e12, 1000, 1);
        assert!(huge_k
            .power_samples()
            .unwrap()
            .iter()
            .all(|&x| (x - 1.0).abs() < 1e-4));

        assert!(FadingModel::monte_carlo(1.0, 0, 1).validate().is_err());
        assert!(FadingModel::deterministic(-1.0).validate().is_err());
    }

    #[test]
    fn fading_is_seed_reproducible() {
        let a = FadingModel::monte_carlo(1.0, 500, 99)
            .power_samples()
            .unwrap();
        let b = FadingModel::monte_carlo(1.0, 500, 99)
            .power_samples()
            .unwrap();
        let c = FadingModel::monte_carlo(1.0, 500, 100)
            .power_samples()
            .unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(a, c);
    }
}
