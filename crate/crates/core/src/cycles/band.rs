//! EEG frequency bands of cycle periods.

use crate::error::{Error, Result};

/// Dimensionless-to-physical time scale `a` in s^-1 (`tau = a t`).
pub const TIME_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    SubDelta,
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::SubDelta => "sub_delta",
            Band::Delta => "delta",
            Band::Theta => "theta",
            Band::Alpha => "alpha",
            Band::Beta => "beta",
            Band::Gamma => "gamma",
        }
    }

    pub fn parse(s: &str) -> Option<Band> {
        [Band::SubDelta, Band::Delta, Band::Theta, Band::Alpha, Band::Beta, Band::Gamma].into_iter().find(|b| b.as_str() == s)
    }
}

/// Band of the frequency `f` in Hz. Intervals are closed on the left:
/// `[0.5, 4)` delta, `[4, 8)` theta, `[8, 13)` alpha, `[13, 30]` beta.
pub fn band_of_frequency(f: f64) -> Band {
    if f < 0.5 {
        Band::SubDelta
    } else if f < 4.0 {
        Band::Delta
    } else if f < 8.0 {
        Band::Theta
    } else if f < 13.0 {
        Band::Alpha
    } else if f <= 30.0 {
        Band::Beta
    } else {
        Band::Gamma
    }
}

/// Band of a dimensionless period at time scale `a`; frequency is `a / T`.
pub fn classify_band(period: f64, a: f64) -> Result<Band> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("time scale must be positive, got {a}")));
    }
    Ok(band_of_frequency(a / period))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(classify_band(9.3, 100.0).unwrap(), Band::Alpha);
        assert_eq!(classify_band(50.0, 100.0).unwrap(), Band::Delta);
        assert_eq!(classify_band(20.0, 100.0).unwrap(), Band::Theta);
        assert!(classify_band(0.0, 100.0).is_err());
        assert!(classify_band(-1.0, 100.0).is_err());
    }

    #[test]
    fn boundaries_closed_on_the_left() {
        assert_eq!(band_of_frequency(0.5), Band::Delta);
        assert_eq!(band_of_frequency(4.0), Band::Theta);
        assert_eq!(band_of_frequency(8.0), Band::Alpha);
        assert_eq!(band_of_frequency(13.0), Band::Beta);
        assert_eq!(band_of_frequency(30.0), Band::Beta);
        assert_eq!(band_of_frequency(30.0001), Band::Gamma);
        assert_eq!(band_of_frequency(0.4999), Band::SubDelta);
        for b in [Band::SubDelta, Band::Delta, Band::Theta, Band::Alpha, Band::Beta, Band::Gamma] {
            assert_eq!(Band::parse(b.as_str()), Some(b));
        }
    }
}
