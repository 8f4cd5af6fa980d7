//! Scenario documents: a flat `key: value` format describing one game
//! instance plus its simulation settings.
//!
//! ```text
//! # comments and blank lines are ignored
//! audit_cost: 5000
//! investment_cost: 2960
//! discount_pct: 25          # or `discount: 907.5`
//! loss: 170000
//! premium: 3630
//! breach_prob: 0.015
//! effectiveness_pct: 80     # or `breach_prob_invested: 0.003`
//! prior: 0.5
//! utility: linear           # log:SHIFT | cara:ALPHA | power:GAMMA
//! models: GT, A/A, NA/NA
//! ```
//!
//! Keys may also be written `key = value`. Unknown keys are rejected.
//! Documents can be layered: later layers override earlier ones key by key.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::money::Money;
use crate::montecarlo::{SimulationConfig, StrategyModel};
use crate::params::GameParams;
use crate::sweep::SweepAxis;
use crate::utility::UtilitySpec;

/// The calibrated scenario: $170k median loss at breach frequency 0.015, a
/// $2,960 control that cuts breaches by 80%, a $3,630 premium with a 5%
/// discount and a $5k audit.
pub const CALIBRATED: &str = "\
# calibrated defaults
audit_cost: 5000
investment_cost: 2960
discount: 181.5
loss: 170000
premium: 3630
wealth: 1000000
breach_prob: 0.015
breach_prob_invested: 0.003
prior: 0.5
utility: linear
repetitions: 1000
seed: 42
models: GT, A/A, NA/NA, A/NA, NA/A, 0.5A/0.5A, 0.5A/NA
common_random_numbers: true
";

pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "paper-default" | "calibrated" | "default" => Some(CALIBRATED),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub params: GameParams,
    pub utility: UtilitySpec,
    pub repetitions: u64,
    pub seed: u64,
    pub models: Vec<StrategyModel>,
    pub common_random_numbers: bool,
    /// Set from the command line, not from the document.
    pub sweep: Option<SweepSpec>,
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn simulation_config(&self) -> SimulationConfig {
        SimulationConfig {
            params: self.params,
            utility: self.utility,
            repetitions: self.repetitions,
            master_seed: self.seed,
            models: self.models.clone(),
            common_random_numbers: self.common_random_numbers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    /// `line` is 1-based; 0 means the error is not tied to a line.
    #[error("{}{}{message}",
        if *line > 0 { format!("line {line}: ") } else { String::new() },
        key.as_ref().map(|k| format!("`{k}`: ")).unwrap_or_default())]
    Parse {
        line: usize,
        key: Option<String>,
        message: String,
    },
    #[error("invalid scenario: {}", problems.join("; "))]
    Validation { problems: Vec<String> },
}

impl ScenarioError {
    fn parse(line: usize, key: &str, message: impl Into<String>) -> Self {
        ScenarioError::Parse {
            line,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

/// Keys that set the same quantity two ways share a slot.
const SLOTS: &[(&str, &[&str])] = &[
    ("audit_cost", &["audit_cost"]),
    ("investment_cost", &["investment_cost"]),
    ("discount", &["discount", "discount_pct"]),
    ("loss", &["loss"]),
    ("premium", &["premium"]),
    ("wealth", &["wealth"]),
    ("breach_prob", &["breach_prob"]),
    (
        "breach_prob_invested",
        &["breach_prob_invested", "effectiveness_pct"],
    ),
    ("prior", &["prior"]),
    ("utility", &["utility"]),
    ("repetitions", &["repetitions"]),
    ("seed", &["seed"]),
    ("models", &["models"]),
    ("common_random_numbers", &["common_random_numbers"]),
];

fn slot_of(key: &str) -> Option<&'static str> {
    SLOTS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(slot, _)| *slot)
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

fn parse_layer(text: &str, into: &mut BTreeMap<&'static str, Entry>) -> Result<(), ScenarioError> {
    let mut seen = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':').or_else(|| content.split_once('=')) else {
            return Err(ScenarioError::Parse {
                line,
                key: None,
                message: format!("expected `key: value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let slot = slot_of(key).ok_or_else(|| ScenarioError::parse(line, key, "unknown key"))?;
        if let Some(prev) = seen.insert(slot, (key.to_string(), line)) {
            return Err(ScenarioError::parse(
                line,
                key,
                format!("conflicts with `{}` on line {}", prev.0, prev.1),
            ));
        }
        into.insert(
            slot,
            Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_layers(&[text])
}

/// Parses documents in order, each overriding keys set by the ones before.
pub fn parse_layers(layers: &[&str]) -> Result<Scenario, ScenarioError> {
    let mut entries = BTreeMap::new();
    for layer in layers {
        parse_layer(layer, &mut entries)?;
    }

    let money = |slot: &str| -> Result<Option<Money>, ScenarioError> {
        entries
            .get(slot)
            .map(|e| {
                e.value
                    .parse::<Money>()
                    .map_err(|err| ScenarioError::parse(e.line, &e.key, err.to_string()))
            })
            .transpose()
    };
    let number = |e: &Entry| -> Result<f64, ScenarioError> {
        e.value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                ScenarioError::parse(e.line, &e.key, format!("`{}` is not a number", e.value))
            })
    };
    let float = |slot: &str| entries.get(slot).map(number).transpose();
    let integer = |slot: &str| -> Result<Option<u64>, ScenarioError> {
        entries
            .get(slot)
            .map(|e| {
                e.value.replace('_', "").parse::<u64>().map_err(|_| {
                    ScenarioError::parse(
                        e.line,
                        &e.key,
                        format!("`{}` is not a non-negative integer", e.value),
                    )
                })
            })
            .transpose()
    };

    let mut missing = Vec::new();
    let mut need = |slot: &'static str, v: Option<Money>| {
        if v.is_none() {
            missing.push(format!("missing required key `{slot}`"));
        }
        v.unwrap_or(Money::ZERO)
    };
    let audit_cost = need("audit_cost", money("audit_cost")?);
    let investment_cost = need("investment_cost", money("investment_cost")?);
    let loss = need("loss", money("loss")?);
    let premium = need("premium", money("premium")?);
    let wealth = money("wealth")?.unwrap_or(Money::dollars(1_000_000));

    let discount = match entries.get("discount") {
        None => {
            missing.push("missing required key `discount` (or `discount_pct`)".into());
            Money::ZERO
        }
        Some(e) if e.key == "discount_pct" => premium.percent(number(e)?),
        Some(e) => e
            .value
            .parse::<Money>()
            .map_err(|err| ScenarioError::parse(e.line, &e.key, err.to_string()))?,
    };

    let breach_prob = match float("breach_prob")? {
        Some(b) => b,
        None => {
            missing.push("missing required key `breach_prob`".into());
            0.0
        }
    };
    let breach_prob_invested = match entries.get("breach_prob_invested") {
        None => {
            missing.push(
                "missing required key `breach_prob_invested` (or `effectiveness_pct`)".into(),
            );
            0.0
        }
        Some(e) if e.key == "effectiveness_pct" => {
            let pct = number(e)?;
            if !(0.0..=100.0).contains(&pct) {
                return Err(ScenarioError::parse(e.line, &e.key, "must lie in [0, 100]"));
            }
            breach_prob * (100.0 - pct) / 100.0
        }
        Some(e) => number(e)?,
    };
    let prior = float("prior")?.unwrap_or(0.5);

    let utility = match entries.get("utility") {
        Some(e) => e
            .value
            .parse::<UtilitySpec>()
            .map_err(|err| ScenarioError::parse(e.line, &e.key, err.to_string()))?,
        None => UtilitySpec::Linear,
    };
    let repetitions = integer("repetitions")?.unwrap_or(1000);
    let seed = integer("seed")?.unwrap_or(42);
    let models = match entries.get("models") {
        None => StrategyModel::ALL.to_vec(),
        Some(e) => e
            .value
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.parse::<StrategyModel>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|err| ScenarioError::parse(e.line, &e.key, err.to_string()))?,
    };
    let common_random_numbers = match entries.get("common_random_numbers") {
        None => true,
        Some(e) => match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => true,
            "false" | "no" | "off" | "0" => false,
            other => {
                return Err(ScenarioError::parse(
                    e.line,
                    &e.key,
                    format!("`{other}` is not a boolean"),
                ))
            }
        },
    };

    if !missing.is_empty() {
        return Err(ScenarioError::Validation { problems: missing });
    }

    let params = GameParams {
        audit_cost,
        investment_cost,
        discount,
        loss,
        premium,
        wealth,
        breach_prob,
        breach_prob_invested,
        prior,
    };
    let scenario = Scenario {
        params,
        utility,
        repetitions,
        seed,
        models,
        common_random_numbers,
        sweep: None,
        output: None,
    };

    let mut problems: Vec<String> = params
        .validate()
        .violations
        .iter()
        .map(ToString::to_string)
        .collect();
    problems.extend(scenario.simulation_config().problems());
    if !problems.is_empty() {
        return Err(ScenarioError::Validation { problems });
    }
    Ok(scenario)
}
