//! RF-to-DC conversion.

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Rectifier model mapping input RF power to output DC power (both in W).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyHarvestModel {
    /// Fixed efficiency, `P_dc = eta * P_rf`.
    Linear { eta: f64 },
    /// Rational saturation fit `(a0 x + b0) / (x + c0) - b0 / c0`.
    Nonlinear { a0: f64, b0: f64, c0: f64 },
}

impl EnergyHarvestModel {
    /// Curve-fit constants used by the reference scenario.
    pub const TABLE1: EnergyHarvestModel = EnergyHarvestModel::Nonlinear {
        a0: 0.3929,
        b0: 0.01675,
        c0: 0.04401,
    };

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnergyHarvestModel::Linear { eta } => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(Error::Domain {
                        name: "harvest efficiency",
                        value: eta,
                        expected: "in (0, 1]",
                    });
                }
            }
            EnergyHarvestModel::Nonlinear { a0, b0, c0 } => {
                ensure_positive("c0", c0)?;
                // f'(x) = (a0 c0 - b0) / (x + c0)^2 must be positive.
                if !(a0 * c0 > b0) {
                    return Err(Error::Domain {
                        name: "a0",
                        value: a0,
                        expected: "> b0 / c0 (positive saturation level)",
                    });
                }
            }
        }
        Ok(())
    }

    /// DC output power. No input validation; `p_rf` must be `>= 0`.
    #[inline]
    pub fn output(&self, p_rf: f64) -> f64 {
        match *self {
            EnergyHarvestModel::Linear { eta } => eta * p_rf,
            EnergyHarvestModel::Nonlinear { a0, b0, c0 } => {
                // (a0 x + b0)/(x + c0) - b0/c0 == (a0 c0 - b0) x / (c0 (x + c0)),
                // which stays exact at x = 0 and avoids cancellation for small x.
                (a0 * c0 - b0) * p_rf / (c0 * (p_rf + c0))
            }
        }
    }

    /// `d P_dc / d P_rf`.
    #[inline]
    pub fn slope(&self, p_rf: f64) -> f64 {
        match *self {
            EnergyHarvestModel::Linear { eta } => eta,
            EnergyHarvestModel::Nonlinear { a0, b0, c0 } => (a0 * c0 - b0) / (p_rf + c0).powi(2),
        }
    }

    /// Output power as the input grows without bound.
    pub fn saturation_level(&self) -> f64 {
        match *self {
            EnergyHarvestModel::Linear { .. } => f64::INFINITY,
            EnergyHarvestModel::Nonlinear { a0, b0, c0 } => a0 - b0 / c0,
        }
    }
}

/// DC power delivered by the rectifier for an RF input power.
pub fn dc_output(p_rf: f64, model: &EnergyHarvestModel) -> Result<f64> {
    ensure_non_negative("RF input power", p_rf)?;
    model.validate()?;
    Ok(model.output(p_rf))
}

/// Conversion efficiency `P_dc / P_rf`.
pub fn conversion_efficiency(p_rf: f64, model: &EnergyHarvestModel) -> Result<f64> {
    ensure_positive("RF input power", p_rf)?;
    model.validate()?;
    Ok(match *model {
        EnergyHarvestModel::Linear { eta } => eta,
        _ => model.output(p_rf) / p_rf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const A0: f64 = 0.3929;
    const B0: f64 = 0.01675;
    const C0: f64 = 0.04401;

    /// Direct transcription of the rational fit, kept separate from the
    /// rearranged form used by `output`.
    fn f_eta(x: f64) -> f64 {
        (A0 * x + B0) / (x + C0) - B0 / C0
    }

    #[test]
    fn nonlinear_examples() {
        let m = EnergyHarvestModel::TABLE1;
        assert_eq!(dc_output(0.0, &m).unwrap(), 0.0);
        let sat = m.saturation_level();
        assert!((sat - 0.01230).abs() < 1e-5, "{sat}");
        let far = dc_output(1e6, &m).unwrap();
        assert!((far - sat).abs() / sat < 1e-3);
        for x in [1e-6, 1e-3, 0.04401, 0.1, 3.0, 100.0] {
            let y = dc_output(x, &m).unwrap();
            assert!((y - f_eta(x)).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn linear_examples() {
        let m = EnergyHarvestModel::Linear { eta: 0.5 };
        assert_eq!(dc_output(2.0, &m).unwrap(), 1.0);
        let m = EnergyHarvestModel::Linear { eta: 0.3 };
        assert_eq!(conversion_efficiency(1e-4, &m).unwrap(), 0.3);
        assert_eq!(conversion_efficiency(7.0, &m).unwrap(), 0.3);
    }

    #[test]
    fn efficiency_examples() {
        let m = EnergyHarvestModel::TABLE1;
        let at_c0 = conversion_efficiency(C0, &m).unwrap();
        assert!((at_c0 - f_eta(C0) / C0).abs() < 1e-14);
        assert!(conversion_efficiency(1e9, &m).unwrap() < 1e-10);
        assert!(matches!(
            conversion_efficiency(0.0, &m),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn efficiency_below_one_on_operating_range() {
        let m = EnergyHarvestModel::TABLE1;
        for i in 0..=110 {
            let x = 10f64.powf(-9.0 + i as f64 * 0.1);
            let eta = conversion_efficiency(x, &m).unwrap();
            assert!(eta > 0.0 && eta < 1.0, "x = {x}, eta = {eta}");
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let m = EnergyHarvestModel::TABLE1;
        for x in [1e-3, 0.01, 0.1, 1.0] {
            let h = 1e-6 * x;
            let fd = (m.output(x + h) - m.output(x - h)) / (2.0 * h);
            assert!((fd - m.slope(x)).abs() / m.slope(x) < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_models_and_inputs() {
        assert!(dc_output(-1.0, &EnergyHarvestModel::TABLE1).is_err());
        assert!(EnergyHarvestModel::Linear { eta: 0.0 }.validate().is_err());
        assert!(EnergyHarvestModel::Linear { eta: 1.5 }.validate().is_err());
        let bad = EnergyHarvestModel::Nonlinear {
            a0: 0.1,
            b0: 0.01,
            c0: 0.01,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn nonlinear_degenerates_to_linear() {
        // b0 = 0 and c0 -> inf with a0 = eta * c0 gives f(x) -> eta x.
        let eta = 0.4;
        let c0 = 1e9;
        let nl = EnergyHarvestModel::Nonlinear {
            a0: eta * c0,
            b0: 0.0,
            c0,
        };
        let lin = EnergyHarvestModel::Linear { eta };
        for x in [1e-6, 1e-3, 1.0, 10.0] {
            let (a, b) = (nl.output(x), lin.output(x));
            assert!((a - b).abs() / b < 1e-7, "x = {x}: {a} vs {b}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_concave_bounded(x in 0.0f64..50.0, h in 1e-4f64..1.0) {
                let m = EnergyHarvestModel::TABLE1;
                let (f0, f1, f2) = (m.output(x), m.output(x + h), m.output(x + 2.0 * h));
                prop_assert!(f0 >= 0.0);
                prop_assert!(f1 >= f0);
                prop_assert!(f2 - 2.0 * f1 + f0 <= 1e-15);
                prop_assert!(f2 <= m.saturation_level());
            }
        }
    }
}
