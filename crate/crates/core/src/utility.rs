//! Policyholder utility-of-wealth families.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Increasing, concave utility of terminal wealth (in dollars).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum UtilitySpec {
    /// `U(x) = x`. Risk neutral; makes every utility a dollar amount.
    #[default]
    Linear,
    /// `U(x) = ln(x + shift)`, defined for `x > -shift`.
    LogShifted { shift: f64 },
    /// Constant absolute risk aversion, `U(x) = -exp(-alpha x) / alpha`.
    ExponentialCara { alpha: f64 },
    /// `U(x) = x^gamma` for `x >= 0`, `0 < gamma < 1`.
    Power { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UtilityError {
    #[error("{family} utility is undefined at wealth {wealth}")]
    Domain { family: &'static str, wealth: f64 },
    #[error("invalid {family} parameter: {message}")]
    InvalidParameter {
        family: &'static str,
        message: String,
    },
    #[error("{family} utility is not increasing on [{lo}, {hi}]")]
    NotMonotone {
        family: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("{family} utility is not concave on [{lo}, {hi}]")]
    NotConcave {
        family: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("cannot parse utility `{0}` (expected linear, log:SHIFT, cara:ALPHA or power:GAMMA)")]
    Parse(String),
}

impl UtilitySpec {
    pub fn family(&self) -> &'static str {
        match self {
            UtilitySpec::Linear => "linear",
            UtilitySpec::LogShifted { .. } => "log",
            UtilitySpec::ExponentialCara { .. } => "cara",
            UtilitySpec::Power { .. } => "power",
        }
    }

    pub fn check_parameters(&self) -> Result<(), UtilityError> {
        let invalid = |message: String| UtilityError::InvalidParameter {
            family: self.family(),
            message,
        };
        match *self {
            UtilitySpec::Linear => Ok(()),
            UtilitySpec::LogShifted { shift } if !shift.is_finite() => {
                Err(invalid(format!("shift must be finite, got {shift}")))
            }
            UtilitySpec::ExponentialCara { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(invalid(format!("alpha must be > 0, got {alpha}")))
            }
            UtilitySpec::Power { gamma } if !(gamma > 0.0 && gamma < 1.0) => {
                Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    /// Utility of `wealth` dollars.
    pub fn eval(&self, wealth: f64) -> Result<f64, UtilityError> {
        let domain = || UtilityError::Domain {
            family: self.family(),
            wealth,
        };
        if !wealth.is_finite() {
            return Err(domain());
        }
        match *self {
            UtilitySpec::Linear => Ok(wealth),
            UtilitySpec::LogShifted { shift } => {
                let arg = wealth + shift;
                if arg > 0.0 {
                    Ok(arg.ln())
                } else {
                    Err(domain())
                }
            }
            UtilitySpec::ExponentialCara { alpha } => Ok(-(-alpha * wealth).exp() / alpha),
            UtilitySpec::Power { gamma } => {
                if wealth >= 0.0 {
                    Ok(wealth.powf(gamma))
                } else {
                    Err(domain())
                }
            }
        }
    }

    /// Checks by sampling that the function is defined, increasing and
    /// concave on `[lo, hi]`.
    pub fn check_shape(&self, lo: f64, hi: f64, samples: usize) -> Result<(), UtilityError> {
        self.check_parameters()?;
        let n = samples.max(2);
        let points: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let values = points
            .iter()
            .map(|&x| self.eval(x))
            .collect::<Result<Vec<_>, _>>()?;

        let family = self.family();
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(UtilityError::NotMonotone { family, lo, hi });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mid = self.eval((points[i] + points[j]) / 2.0)?;
                let chord = (values[i] + values[j]) / 2.0;
                let slack = 1e-12 * chord.abs().max(1.0);
                if mid < chord - slack {
                    return Err(UtilityError::NotConcave { family, lo, hi });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilitySpec::Linear => write!(f, "linear"),
            UtilitySpec::LogShifted { shift } => write!(f, "log:{shift}"),
            UtilitySpec::ExponentialCara { alpha } => write!(f, "cara:{alpha}"),
            UtilitySpec::Power { gamma } => write!(f, "power:{gamma}"),
        }
    }
}

impl FromStr for UtilitySpec {
    type Err = UtilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64, UtilityError> {
            a.and_then(|a| a.parse::<f64>().ok())
                .ok_or_else(|| UtilityError::Parse(s.to_string()))
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "linear" if arg.is_none() => UtilitySpec::Linear,
            "log" => UtilitySpec::LogShifted { shift: num(arg)? },
            "cara" | "exp" => UtilitySpec::ExponentialCara { alpha: num(arg)? },
            "power" => UtilitySpec::Power { gamma: num(arg)? },
            _ => return Err(UtilityError::Parse(s.to_string())),
        };
        spec.check_parameters()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILIES: [UtilitySpec; 4] = [
        UtilitySpec::Linear,
        UtilitySpec::LogShifted { shift: 0.0 },
        UtilitySpec::ExponentialCara { alpha: 1e-5 },
        UtilitySpec::Power { gamma: 0.5 },
    ];

    #[test]
    fn all_families_increasing_and_concave_on_reachable_wealth() {
        // [W - p - c - l, W - p + d] at the calibrated defaults
        let lo = 1_000_000.0 - 3630.0 - 2960.0 - 170_000.0;
        let hi = 1_000_000.0 - 3630.0 + 907.5;
        for u in FAMILIES {
            u.check_shape(lo, hi, 40).unwrap();
        }
    }

    #[test]
    fn convex_power_is_rejected() {
        let u = UtilitySpec::Power { gamma: 1.5 };
        assert!(matches!(
            u.check_shape(0.0, 10.0, 5),
            Err(UtilityError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn log_domain_error() {
        let u = UtilitySpec::LogShifted { shift: 100.0 };
        assert!(matches!(u.eval(-100.0), Err(UtilityError::Domain { .. })));
        assert!(u.eval(-99.0).is_ok());
    }

    #[test]
    fn power_domain_error() {
        let u = UtilitySpec::Power { gamma: 0.3 };
        assert!(u.eval(-1.0).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for u in FAMILIES {
            assert_eq!(u.to_string().parse::<UtilitySpec>().unwrap(), u);
        }
        assert!("power:2".parse::<UtilitySpec>().is_err());
        assert!("cara:-1".parse::<UtilitySpec>().is_err());
        assert!("quadratic".parse::<UtilitySpec>().is_err());
    }
}
