//! One-dimensional parameter sweeps over simulation configs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::money::Money;
use crate::montecarlo::{
    run_simulation, ModelSummary, SimulationConfig, SimulationError, SimulationSummary,
    StrategyModel,
};
use crate::rng::CounterRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Dollars.
    AuditCost,
    /// Dollars.
    Discount,
    /// Dollars.
    Loss,
    Repetitions,
    Prior,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::AuditCost => "audit-cost",
            SweepAxis::Discount => "discount",
            SweepAxis::Loss => "loss",
            SweepAxis::Repetitions => "repetitions",
            SweepAxis::Prior => "prior",
        }
    }

    /// The base config with this axis set to `value`.
    pub fn apply(self, base: &SimulationConfig, value: f64) -> Result<SimulationConfig, String> {
        let mut config = base.clone();
        let money = || {
            if value.is_finite() {
                Ok(Money::from_dollars_f64(value))
            } else {
                Err(format!("{} value {value} is not finite", self.name()))
            }
        };
        match self {
            SweepAxis::AuditCost => config.params.audit_cost = money()?,
            SweepAxis::Discount => config.params.discount = money()?,
            SweepAxis::Loss => config.params.loss = money()?,
            SweepAxis::Repetitions => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u64::MAX as f64) {
                    return Err(format!(
                        "repetitions must be a positive integer, got {value}"
                    ));
                }
                config.repetitions = value as u64;
            }
            SweepAxis::Prior => config.params.prior = value,
        }
        Ok(config)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown sweep axis `{0}` (expected audit-cost, discount, loss, repetitions or prior)")]
pub struct UnknownAxis(pub String);

impl FromStr for SweepAxis {
    type Err = UnknownAxis;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "audit-cost" | "a" => Ok(SweepAxis::AuditCost),
            "discount" | "d" => Ok(SweepAxis::Discount),
            "loss" | "l" => Ok(SweepAxis::Loss),
            "repetitions" | "reps" => Ok(SweepAxis::Repetitions),
            "prior" | "phi" => Ok(SweepAxis::Prior),
            _ => Err(UnknownAxis(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep needs at least one axis value")]
    NoValues,
}

/// A point that could not be simulated; the sweep carries on past it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointError {
    #[error("{0}")]
    Axis(String),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub config: Option<SimulationConfig>,
    pub result: Result<SimulationSummary, PointError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    /// Column heading for the axis; the axis name unless the caller reports
    /// values in other units.
    pub axis_label: String,
    pub models: Vec<StrategyModel>,
    pub points: Vec<SweepPoint>,
}

/// One output row: a model at an axis value.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow<'a> {
    pub axis_value: f64,
    pub model: StrategyModel,
    pub outcome: Result<(&'a SimulationSummary, &'a ModelSummary), &'a PointError>,
}

/// Difference between the game-theoretic and never-audit insurer payoffs at
/// one axis value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GtAdvantage {
    pub axis_value: f64,
    pub difference: f64,
    /// `sqrt(se_gt^2 + se_never^2)`; conservative under common random numbers.
    pub std_error: f64,
    pub premium: Money,
    pub in_premiums: f64,
}

impl SweepTable {
    pub fn rows(&self) -> impl Iterator<Item = SweepRow<'_>> {
        self.points.iter().flat_map(move |pt| {
            self.models.iter().map(move |&model| SweepRow {
                axis_value: pt.axis_value,
                model,
                outcome: match &pt.result {
                    Ok(s) => Ok((s, s.model(model).expect("summary covers every model"))),
                    Err(e) => Err(e),
                },
            })
        })
    }

    /// GT minus never-audit at every point where both were simulated.
    pub fn gt_advantage(&self) -> Vec<GtAdvantage> {
        self.points
            .iter()
            .filter_map(|pt| {
                let s = pt.result.as_ref().ok()?;
                let gt = s.model(StrategyModel::GameTheoretic)?;
                let na = s.model(StrategyModel::NeverAudit)?;
                let premium = pt.config.as_ref()?.params.premium;
                let difference = gt.mean_insurer_payoff - na.mean_insurer_payoff;
                Some(GtAdvantage {
                    axis_value: pt.axis_value,
                    difference,
                    std_error: gt.std_error.hypot(na.std_error),
                    premium,
                    in_premiums: difference / premium.as_f64(),
                })
            })
            .collect()
    }
}

/// Re-solves and re-simulates the game at every axis value. Point `i` uses a
/// seed split from the master seed by `i`.
pub fn sweep(
    base: &SimulationConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<SweepTable, SweepError> {
    if values.is_empty() {
        return Err(SweepError::NoValues);
    }
    let master = CounterRng::new(base.master_seed);
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &axis_value)| match axis.apply(base, axis_value) {
            Ok(mut config) => {
                config.master_seed = master.split(i as u64).seed_value();
                let result = run_simulation(&config).map_err(PointError::from);
                SweepPoint {
                    axis_value,
                    config: Some(config),
                    result,
                }
            }
            Err(msg) => SweepPoint {
                axis_value,
                config: None,
                result: Err(PointError::Axis(msg)),
            },
        })
        .collect();
    Ok(SweepTable {
        axis,
        axis_label: axis.name().to_string(),
        models: base.models.clone(),
        points,
    })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{MixedError, Region, SolveError};
    use crate::params::GameParams;

    fn base() -> SimulationConfig {
        SimulationConfig::new(GameParams::calibrated()).with_repetitions(200)
    }

    #[test]
    fn empty_values_rejected() {
        assert_eq!(
            sweep(&base(), SweepAxis::Loss, &[]),
            Err(SweepError::NoValues)
        );
    }

    #[test]
    fn one_row_per_value_and_model() {
        let t = sweep(&base(), SweepAxis::AuditCost, &[5000.0, 100_000.0]).unwrap();
        assert_eq!(t.rows().count(), 14);
        assert_eq!(t.gt_advantage().len(), 2);
    }

    #[test]
    fn errors_are_recorded_per_point() {
        // d = 3000 > β l, so no audit rate deters claims in the mixed region
        let t = sweep(&base(), SweepAxis::Discount, &[181.5, 3000.0, 5000.0]).unwrap();
        assert!(t.points[0].result.is_ok());
        assert!(matches!(
            t.points[1].result,
            Err(PointError::Simulation(SimulationError::Solve(
                SolveError::Mixed(MixedError::DeterrenceInfeasible { .. })
            )))
        ));
        assert!(matches!(
            t.points[2].result,
            Err(PointError::Simulation(SimulationError::Solve(
                SolveError::InvalidParams(_)
            )))
        ));
        let t = sweep(&base(), SweepAxis::Repetitions, &[0.5]).unwrap();
        assert!(matches!(t.points[0].result, Err(PointError::Axis(_))));
    }

    #[test]
    fn loss_axis_switches_region_at_audit_cost() {
        // just above l = a, φ* is tiny so φ = 0.5 lands in the pure region
        let t = sweep(&base(), SweepAxis::Loss, &[4999.99, 5000.0, 5000.01]).unwrap();
        let regions: Vec<Region> = t
            .points
            .iter()
            .map(|p| p.result.as_ref().unwrap().solution.region)
            .collect();
        assert_eq!(regions, [Region::Pbe1, Region::Pbe1, Region::Pbe2]);
    }

    #[test]
    fn points_get_distinct_seeds() {
        let t = sweep(&base(), SweepAxis::Prior, &[0.5, 0.5]).unwrap();
        let seeds: Vec<u64> = t
            .points
            .iter()
            .map(|p| p.config.as_ref().unwrap().master_seed)
            .collect();
        assert_ne!(seeds[0], seeds[1]);
    }

    #[test]
    fn axis_names_parse() {
        for axis in [
            SweepAxis::AuditCost,
            SweepAxis::Discount,
            SweepAxis::Loss,
            SweepAxis::Repetitions,
            SweepAxis::Prior,
        ] {
            assert_eq!(axis.name().parse::<SweepAxis>().unwrap(), axis);
        }
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 9.0, 1), vec![2.0]);
    }
}
