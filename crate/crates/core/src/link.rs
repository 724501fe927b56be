//! End-to-end link quantities.
//!
//! A [`ChannelSnapshot`] gathers every factor that does not depend on the
//! allocation `(rho0, rho1)`: gains, path loss, absorption, beam geometry,
//! beam collection efficiency and the multipath draws. Only the pointing error
//! changes with the sensing time, through `l_mis(rho0 T)`, so with
//!
//! ```text
//! C2   = P_t G_bs-t G_r PL(d) h_abs |h_f|^2 eta_b S0^2
//! m(t) = exp(-4 l_mis(t)^2 / R_ebw^2)
//! ```
//!
//! the received power is `P_r(t) = C2 m(t)`, the harvested energy is
//! `E = (1 - rho0) T rho1 f_eta(P_r)` and the rate is
//! `R = (1 - rho0) T log2(1 + (1 - rho1) P_r / N_r)`.
//!
//! In Monte Carlo fading mode `E`, `R` and their derivatives are averages over
//! the per-draw values; the draws are fixed when the snapshot is built.

use std::f64::consts::LN_2;

use crate::absorption::{self, AbsorptionProvider, Atmosphere};
use crate::error::{ensure_fraction, ensure_positive, Error, Result};
use crate::harvest::EnergyHarvestModel;
use crate::propagation::{self, AntennaSpec, BeamGeometry, FadingModel, Region, RegionClass};
use crate::{dbm_to_watts, wavelength};

/// How out-of-band carrier frequencies are handled by the absorption model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandPolicy {
    /// Evaluate `k(f)` at the nearest band edge and record a warning.
    #[default]
    Clamp,
    /// Reject with [`Error::OutOfBand`].
    Strict,
}

/// Where the power splitter sits relative to the rectifier nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarvestPlacement {
    /// `E = (1 - rho0) T rho1 f_eta(P_r)`: the conversion curve is evaluated
    /// at the full received power and then scaled by the split ratio.
    #[default]
    FullPower,
    /// `E = (1 - rho0) T f_eta(rho1 P_r)`: the rectifier sees only its share.
    SplitPower,
}

/// Physical and scenario parameters of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub frequency_hz: f64,
    pub tx_power_w: f64,
    pub bs_tx: AntennaSpec,
    pub bs_rx: AntennaSpec,
    pub user_rx: AntennaSpec,
    pub distance_m: f64,
    pub total_time_s: f64,
    pub noise_power_w: f64,
    /// Initial radial pointing error, m.
    pub l0_m: f64,
    /// Decay rate of the pointing error during sensing, 1/s.
    pub alpha_per_s: f64,
    pub fading: FadingModel,
    pub atmosphere: Atmosphere,
    pub eh_model: EnergyHarvestModel,
    pub harvest_placement: HarvestPlacement,
    pub absorption: AbsorptionProvider,
    pub band_policy: BandPolicy,
    /// Gaussian beam waist; defaults to half the BS transmit aperture.
    pub beam_waist_m: Option<f64>,
    /// Receiver capture radius; defaults to half the user aperture.
    pub receiver_radius_m: Option<f64>,
}

impl SystemParams {
    /// Reference scenario: 300 GHz, 10 W, 20 m, 100 s frame, -50 dBm noise.
    pub fn table1() -> Self {
        let bs = AntennaSpec {
            diameter: 0.1,
            efficiency: 0.2,
        };
        Self {
            frequency_hz: 300e9,
            tx_power_w: 10.0,
            bs_tx: bs,
            bs_rx: bs,
            user_rx: AntennaSpec {
                diameter: 0.2,
                efficiency: 0.2,
            },
            distance_m: 20.0,
            total_time_s: 100.0,
            noise_power_w: dbm_to_watts(-50.0),
            l0_m: 0.8,
            alpha_per_s: 0.1,
            fading: FadingModel::deterministic(1.0),
            atmosphere: Atmosphere::default(),
            eh_model: EnergyHarvestModel::TABLE1,
            harvest_placement: HarvestPlacement::FullPower,
            absorption: AbsorptionProvider::default(),
            band_policy: BandPolicy::Clamp,
            beam_waist_m: None,
            receiver_radius_m: None,
        }
    }

    pub fn beam_waist(&self) -> f64 {
        self.beam_waist_m.unwrap_or(self.bs_tx.diameter / 2.0)
    }

    pub fn receiver_radius(&self) -> f64 {
        self.receiver_radius_m
            .unwrap_or(self.user_rx.diameter / 2.0)
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("frequency_hz", self.frequency_hz)?;
        ensure_positive("tx_power_w", self.tx_power_w)?;
        ensure_positive("distance_m", self.distance_m)?;
        ensure_positive("total_time_s", self.total_time_s)?;
        ensure_positive("noise_power_w", self.noise_power_w)?;
        crate::error::ensure_non_negative("l0_m", self.l0_m)?;
        crate::error::ensure_non_negative("alpha_per_s", self.alpha_per_s)?;
        ensure_positive("beam waist", self.beam_waist())?;
        ensure_positive("receiver radius", self.receiver_radius())?;
        self.bs_tx.validate()?;
        self.bs_rx.validate()?;
        self.user_rx.validate()?;
        self.fading.validate()?;
        self.atmosphere.validate()?;
        self.eh_model.validate()?;
        Ok(())
    }
}

/// Sensing-time ratio `rho0` and power-splitting ratio `rho1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationPoint {
    pub rho0: f64,
    pub rho1: f64,
}

impl AllocationPoint {
    pub fn new(rho0: f64, rho1: f64) -> Result<Self> {
        ensure_fraction("rho0", rho0)?;
        ensure_fraction("rho1", rho1)?;
        Ok(Self { rho0, rho1 })
    }

    /// The whole frame is spent sensing; Phase 2 has zero duration.
    pub fn is_degenerate(&self) -> bool {
        self.rho0 >= 1.0
    }
}

/// Every allocation-independent factor of the link, evaluated once.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSnapshot {
    pub frequency_hz: f64,
    pub wavelength: f64,
    pub g_bs_t: f64,
    pub g_bs_r: f64,
    pub g_r: f64,
    /// One-way path-loss factor at `d`.
    pub pl: f64,
    pub region: Region,
    /// Path-loss factor at `2 d`, used by the sensing echo.
    pub pl_round_trip: f64,
    pub region_round_trip: RegionClass,
    pub mixing_ratio: f64,
    pub k_per_m: f64,
    pub h_abs: f64,
    pub beam: BeamGeometry,
    pub eta_b: f64,
    /// Sensing time the `l_mis`, `h_mis` and `xi1` fields refer to.
    pub t_sense: f64,
    pub l_mis: f64,
    pub h_mis: f64,
    /// Mean of `hf_samples`.
    pub hf_sq: f64,
    pub hf_samples: Vec<f64>,
    /// `eta T C2`, with `eta` the conversion efficiency at `P_r(t_sense)`.
    pub xi1: f64,
    /// `C2 / N_r`.
    pub xi2: f64,
    pub c1: f64,
    pub c2: f64,
    /// `eta C2`.
    pub c3: f64,
    pub warnings: Vec<String>,

    tx_power_w: f64,
    total_time_s: f64,
    noise_power_w: f64,
    l0_m: f64,
    alpha_per_s: f64,
    eh_model: EnergyHarvestModel,
    placement: HarvestPlacement,
    /// `C2 / hf_sq`, the power scale of a unit fading draw.
    unit_power: f64,
}

impl ChannelSnapshot {
    pub fn new(params: &SystemParams, t_sense: f64) -> Result<Self> {
        params.validate()?;
        crate::error::ensure_non_negative("t_sense", t_sense)?;
        let mut warnings = Vec::new();
        let lambda = params.wavelength();
        let d = params.distance_m;

        let g_bs_t = propagation::antenna_gain(&params.bs_tx, lambda)?;
        let g_bs_r = propagation::antenna_gain(&params.bs_rx, lambda)?;
        let g_r = propagation::antenna_gain(&params.user_rx, lambda)?;
        let (pl, region) = propagation::path_loss(d, lambda, &params.bs_tx)?;
        let (pl_round_trip, region_rt) = propagation::path_loss(2.0 * d, lambda, &params.bs_tx)?;
        if region.class.is_degenerate() {
            warnings.push(format!(
                "receiver at {d} m is in the {} region; path loss set to zero",
                region.class
            ));
        }

        let mu = absorption::mixing_ratio(&params.atmosphere)?;
        let k_per_m = match params.band_policy {
            BandPolicy::Strict => {
                absorption::absorption_coefficient(params.frequency_hz, mu, &params.absorption)?
            }
            BandPolicy::Clamp => {
                let c = absorption::absorption_coefficient_clamped(
                    params.frequency_hz,
                    mu,
                    &params.absorption,
                )?;
                if c.clamped {
                    warnings.push(format!(
                        "frequency {} GHz outside absorption band; k(f) evaluated at {} GHz",
                        params.frequency_hz / 1e9,
                        c.evaluated_hz / 1e9
                    ));
                }
                c.k_per_m
            }
        };
        let h_abs = absorption::beer_lambert(k_per_m, d);

        let beam = BeamGeometry::new(d, params.beam_waist(), lambda, params.receiver_radius())?;
        let eta_b = propagation::beam_collection_efficiency(
            params.bs_tx.area(),
            params.user_rx.area(),
            lambda,
            d,
        )?;

        let hf_samples = params.fading.power_samples()?;
        let hf_sq = hf_samples.iter().sum::<f64>() / hf_samples.len() as f64;

        let s0 = beam.collected_fraction;
        let unit_power = params.tx_power_w * g_bs_t * g_r * pl * h_abs * eta_b * s0 * s0;
        let c2 = unit_power * hf_sq;
        let c1 = c2 / params.noise_power_w;

        let l_mis = propagation::misalignment_error(t_sense, params.l0_m, params.alpha_per_s);
        let h_mis = beam.misalignment_coefficient(l_mis);

        let mut snap = Self {
            frequency_hz: params.frequency_hz,
            wavelength: lambda,
            g_bs_t,
            g_bs_r,
            g_r,
            pl,
            region,
            pl_round_trip,
            region_round_trip: region_rt.class,
            mixing_ratio: mu,
            k_per_m,
            h_abs,
            beam,
            eta_b,
            t_sense,
            l_mis,
            h_mis,
            hf_sq,
            hf_samples,
            xi1: 0.0,
            xi2: c1,
            c1,
            c2,
            c3: 0.0,
            warnings,
            tx_power_w: params.tx_power_w,
            total_time_s: params.total_time_s,
            noise_power_w: params.noise_power_w,
            l0_m: params.l0_m,
            alpha_per_s: params.alpha_per_s,
            eh_model: params.eh_model,
            placement: params.harvest_placement,
            unit_power,
        };
        let p_r = snap.received_power_at(t_sense);
        let eta = match params.eh_model {
            EnergyHarvestModel::Linear { eta } => eta,
            m if p_r > 0.0 => m.output(p_r) / p_r,
            m => m.slope(0.0),
        };
        snap.xi1 = eta * params.total_time_s * c2;
        snap.c3 = eta * c2;
        Ok(snap)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time_s
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power_w
    }

    pub fn eh_model(&self) -> EnergyHarvestModel {
        self.eh_model
    }

    pub fn placement(&self) -> HarvestPlacement {
        self.placement
    }

    pub fn l0(&self) -> f64 {
        self.l0_m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_per_s
    }

    pub fn r_ebw_sq(&self) -> f64 {
        self.beam.equivalent_beamwidth.powi(2)
    }

    pub fn is_deterministic(&self) -> bool {
        self.hf_samples.len() == 1
    }

    /// `exp(-4 l_mis(t)^2 / R_ebw^2) = |h_mis(t)|^2 / S0^2`.
    pub fn alignment_factor(&self, t: f64) -> f64 {
        let l = propagation::misalignment_error(t, self.l0_m, self.alpha_per_s);
        (-4.0 * l * l / self.r_ebw_sq()).exp()
    }

    /// `d ln m / d rho0 = 8 alpha T l_mis(rho0 T)^2 / R_ebw^2`.
    fn alignment_log_slope(&self, rho0: f64) -> f64 {
        let t = self.total_time_s;
        let l = propagation::misalignment_error(rho0 * t, self.l0_m, self.alpha_per_s);
        8.0 * self.alpha_per_s * t * l * l / self.r_ebw_sq()
    }

    /// `h_mis` after `t` seconds of sensing.
    pub fn misalignment_at(&self, t: f64) -> f64 {
        let l = propagation::misalignment_error(t, self.l0_m, self.alpha_per_s);
        self.beam.misalignment_coefficient(l)
    }

    /// Per-draw received powers at sensing ratio `rho0`.
    fn powers(&self, rho0: f64) -> impl Iterator<Item = f64> + '_ {
        let scale = self.unit_power * self.alignment_factor(rho0 * self.total_time_s);
        self.hf_samples.iter().map(move |h| scale * h)
    }

    fn mean<I: Iterator<Item = f64>>(&self, it: I) -> f64 {
        it.sum::<f64>() / self.hf_samples.len() as f64
    }

    /// Mean received power `P_r` after `t` seconds of sensing.
    pub fn received_power_at(&self, t: f64) -> f64 {
        self.c2 * self.alignment_factor(t)
    }

    /// Mean sensing-echo power `P_r-r` at the BS after `t` seconds of sensing.
    pub fn reflected_power_at(&self, t: f64) -> f64 {
        let h_mis = self.misalignment_at(t);
        let hf4 = self.mean(self.hf_samples.iter().map(|h| h * h));
        self.tx_power_w
            * self.g_bs_t
            * self.g_bs_r
            * self.pl_round_trip
            * self.h_abs.powi(2)
            * h_mis.powi(4)
            * hf4
            * self.eta_b.powi(2)
    }

    fn energy_for_power(&self, p: f64, rho1: f64) -> f64 {
        match self.placement {
            HarvestPlacement::FullPower => rho1 * self.eh_model.output(p),
            HarvestPlacement::SplitPower => self.eh_model.output(rho1 * p),
        }
    }

    /// Harvested energy `E(rho0, rho1)` in W s.
    pub fn energy(&self, rho0: f64, rho1: f64) -> f64 {
        if rho0 >= 1.0 {
            return 0.0;
        }
        let phase2 = (1.0 - rho0) * self.total_time_s;
        phase2 * self.mean(self.powers(rho0).map(|p| self.energy_for_power(p, rho1)))
    }

    /// Achievable rate `R(rho0, rho1)` in bits/Hz.
    pub fn rate(&self, rho0: f64, rho1: f64) -> f64 {
        if rho0 >= 1.0 {
            return 0.0;
        }
        let phase2 = (1.0 - rho0) * self.total_time_s;
        let n = self.noise_power_w;
        phase2
            * self.mean(
                self.powers(rho0)
                    .map(|p| ((1.0 - rho1) * p / n).ln_1p() / LN_2),
            )
    }

    /// `(1 - rho0) * mean f_eta(P_r)`: the energy per unit frame time with all
    /// power routed to the rectifier.
    pub fn harvest_margin_base(&self, rho0: f64) -> f64 {
        if rho0 >= 1.0 {
            return 0.0;
        }
        (1.0 - rho0) * self.mean(self.powers(rho0).map(|p| self.eh_model.output(p)))
    }

    pub fn de_drho1(&self, rho0: f64, rho1: f64) -> f64 {
        let phase2 = (1.0 - rho0) * self.total_time_s;
        let m = self.eh_model;
        phase2
            * self.mean(self.powers(rho0).map(|p| match self.placement {
                HarvestPlacement::FullPower => m.output(p),
                HarvestPlacement::SplitPower => m.slope(rho1 * p) * p,
            }))
    }

    /// For the linear model this is
    /// `rho1 xi1 m(rho0) ((1 - rho0) 8 alpha T l0^2 e^{-2 alpha rho0 T} / R_ebw^2 - 1)`.
    pub fn de_drho0(&self, rho0: f64, rho1: f64) -> f64 {
        let t = self.total_time_s;
        let kappa = self.alignment_log_slope(rho0);
        let m = self.eh_model;
        t * self.mean(self.powers(rho0).map(|p| {
            let q = match self.placement {
                HarvestPlacement::FullPower => p,
                HarvestPlacement::SplitPower => rho1 * p,
            };
            let scale = match self.placement {
                HarvestPlacement::FullPower => rho1,
                HarvestPlacement::SplitPower => 1.0,
            };
            scale * (-m.output(q) + (1.0 - rho0) * m.slope(q) * q * kappa)
        }))
    }

    /// `-(1 - rho0) T xi2 m / ((1 + (1 - rho1) xi2 m) ln 2)`.
    pub fn dr_drho1(&self, rho0: f64, rho1: f64) -> f64 {
        let phase2 = (1.0 - rho0) * self.total_time_s;
        let n = self.noise_power_w;
        -phase2
            * self.mean(
                self.powers(rho0)
                    .map(|p| (p / n) / ((1.0 + (1.0 - rho1) * p / n) * LN_2)),
            )
    }

    /// `h(rho0)` for fixed `rho1`: the negative log term for lost Phase-2 time
    /// plus the gain from better alignment.
    pub fn dr_drho0(&self, rho0: f64, rho1: f64) -> f64 {
        let t = self.total_time_s;
        let n = self.noise_power_w;
        let kappa = self.alignment_log_slope(rho0);
        t * self.mean(self.powers(rho0).map(|p| {
            let u = (1.0 - rho1) * p / n;
            -u.ln_1p() / LN_2 + (1.0 - rho0) * u * kappa / ((1.0 + u) * LN_2)
        }))
    }

    /// `g(rho0) = (1 - rho0) 8 alpha T l0^2 e^{-2 alpha rho0 T} - R_ebw^2`,
    /// whose root is the energy-maximizing sensing ratio for the linear model.
    pub fn g(&self, rho0: f64) -> f64 {
        (1.0 - rho0) * self.alignment_log_slope(rho0) * self.r_ebw_sq() - self.r_ebw_sq()
    }

    /// `h(rho0) = dR/drho0` at fixed `rho1`.
    pub fn h(&self, rho0: f64, rho1: f64) -> f64 {
        self.dr_drho0(rho0, rho1)
    }
}

/// Shannon spectral efficiency `log2(1 + p_r / n_r)`.
pub fn capacity(p_r: f64, n_r: f64) -> Result<f64> {
    ensure_positive("noise power", n_r)?;
    crate::error::ensure_non_negative("received power", p_r)?;
    Ok((p_r / n_r).ln_1p() / LN_2)
}

pub fn snapshot(params: &SystemParams, t_sense: f64) -> Result<ChannelSnapshot> {
    ChannelSnapshot::new(params, t_sense)
}

/// Received power at the user after `t_sense` seconds of sensing.
pub fn received_power(params: &SystemParams, t_sense: f64) -> Result<f64> {
    Ok(ChannelSnapshot::new(params, t_sense)?.received_power_at(t_sense))
}

/// Sensing-echo power at the BS after `t_sense` seconds of sensing.
pub fn reflected_power(params: &SystemParams, t_sense: f64) -> Result<f64> {
    Ok(ChannelSnapshot::new(params, t_sense)?.reflected_power_at(t_sense))
}

fn snapshot_for(params: &SystemParams, alloc: &AllocationPoint) -> Result<ChannelSnapshot> {
    AllocationPoint::new(alloc.rho0, alloc.rho1)?;
    ChannelSnapshot::new(params, alloc.rho0 * params.total_time_s)
}

pub fn harvested_energy(params: &SystemParams, alloc: &AllocationPoint) -> Result<f64> {
    Ok(snapshot_for(params, alloc)?.energy(alloc.rho0, alloc.rho1))
}

pub fn achievable_rate(params: &SystemParams, alloc: &AllocationPoint) -> Result<f64> {
    Ok(snapshot_for(params, alloc)?.rate(alloc.rho0, alloc.rho1))
}

/// Partial derivatives `(dE/drho0, dE/drho1, dR/drho0, dR/drho1)`; defined
/// for `rho0 < 1` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradients {
    pub de_drho0: f64,
    pub de_drho1: f64,
    pub dr_drho0: f64,
    pub dr_drho1: f64,
}

pub fn gradients(params: &SystemParams, alloc: &AllocationPoint) -> Result<Gradients> {
    if alloc.is_degenerate() {
        return Err(Error::Domain {
            name: "rho0",
            value: alloc.rho0,
            expected: "< 1 for derivatives",
        });
    }
    let s = snapshot_for(params, alloc)?;
    let (r0, r1) = (alloc.rho0, alloc.rho1);
    Ok(Gradients {
        de_drho0: s.de_drho0(r0, r1),
        de_drho1: s.de_drho1(r0, r1),
        dr_drho0: s.dr_drho0(r0, r1),
        dr_drho1: s.dr_drho1(r0, r1),
    })
}
