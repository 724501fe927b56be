use thiserror::Error;

/// Errors raised by the link model and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical quantity is outside its admissible range.
    #[error("{name} = {value} is outside its valid domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The distance sits below the minimum distance of the gain-reduction
    /// model, so the reduction factor would be negative.
    #[error("distance {distance} m is below the gain floor d_min = {d_min} m")]
    BelowGainFloor { distance: f64, d_min: f64 },

    /// Frequency outside the validity window of the absorption model.
    #[error("frequency {frequency_hz} Hz is outside the absorption band [{lo_hz}, {hi_hz}] Hz")]
    OutOfBand {
        frequency_hz: f64,
        lo_hz: f64,
        hi_hz: f64,
    },

    /// Malformed absorption table.
    #[error("invalid absorption table: {0}")]
    InvalidTable(String),

    /// A bracketing root search was given an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns a domain error unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and >= 0",
        })
    }
}

pub(crate) fn ensure_fraction(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "in [0, 1]",
        })
    }
}
