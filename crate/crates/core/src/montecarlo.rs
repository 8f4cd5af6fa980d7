//! Repeated play of the audit game against a policyholder who follows her
//! equilibrium strategy, with the insurer following one of seven audit
//! policies.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::equilibrium::{solve_pbe, InsurerStrategy, PbeSolution, SolveError};
use crate::game::{
    insurer_payoff, utility_table, InsurerAction, Leaf, Outcome, PolicyholderAction,
    PolicyholderType,
};
use crate::money::Money;
use crate::params::GameParams;
use crate::rng::{CounterRng, DrawKind};
use crate::utility::{UtilityError, UtilitySpec};

/// Repetitions per work unit. Fixed so that aggregation order, and hence every
/// floating-point sum, does not depend on the thread count.
const CHUNK: u64 = 4096;

/// Stream id for nature's draws when they are shared across models.
const SHARED_NATURE_STREAM: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyModel {
    /// Follow the equilibrium audit strategy.
    GameTheoretic,
    AlwaysAudit,
    NeverAudit,
    AuditOnClaim,
    AuditOnNoClaim,
    HalfHalf,
    HalfOnClaim,
}

impl StrategyModel {
    pub const ALL: [StrategyModel; 7] = [
        StrategyModel::GameTheoretic,
        StrategyModel::AlwaysAudit,
        StrategyModel::NeverAudit,
        StrategyModel::AuditOnClaim,
        StrategyModel::AuditOnNoClaim,
        StrategyModel::HalfHalf,
        StrategyModel::HalfOnClaim,
    ];

    /// Stable index, used to key the model's random substream.
    pub fn index(self) -> u32 {
        self as u32
    }

    pub fn label(self) -> &'static str {
        match self {
            StrategyModel::GameTheoretic => "GT",
            StrategyModel::AlwaysAudit => "A/A",
            StrategyModel::NeverAudit => "NA/NA",
            StrategyModel::AuditOnClaim => "A/NA",
            StrategyModel::AuditOnNoClaim => "NA/A",
            StrategyModel::HalfHalf => "0.5A/0.5A",
            StrategyModel::HalfOnClaim => "0.5A/NA",
        }
    }

    fn slug(self) -> &'static str {
        match self {
            StrategyModel::GameTheoretic => "gt",
            StrategyModel::AlwaysAudit => "always-audit",
            StrategyModel::NeverAudit => "never-audit",
            StrategyModel::AuditOnClaim => "audit-on-claim",
            StrategyModel::AuditOnNoClaim => "audit-on-no-claim",
            StrategyModel::HalfHalf => "half-half",
            StrategyModel::HalfOnClaim => "half-on-claim",
        }
    }
}

impl fmt::Display for StrategyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy model `{0}`")]
pub struct UnknownModel(pub String);

impl FromStr for StrategyModel {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        StrategyModel::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(t) || m.slug().eq_ignore_ascii_case(t))
            .ok_or_else(|| UnknownModel(t.to_string()))
    }
}

pub fn insurer_strategy_for(model: StrategyModel, sol: &PbeSolution) -> InsurerStrategy {
    match model {
        StrategyModel::GameTheoretic => sol.ins_strategy,
        StrategyModel::AlwaysAudit => InsurerStrategy::new(1.0, 1.0),
        StrategyModel::NeverAudit => InsurerStrategy::new(0.0, 0.0),
        StrategyModel::AuditOnClaim => InsurerStrategy::new(1.0, 0.0),
        StrategyModel::AuditOnNoClaim => InsurerStrategy::new(0.0, 1.0),
        StrategyModel::HalfHalf => InsurerStrategy::new(0.5, 0.5),
        StrategyModel::HalfOnClaim => InsurerStrategy::new(0.5, 0.0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub params: GameParams,
    pub utility: UtilitySpec,
    pub repetitions: u64,
    pub master_seed: u64,
    pub models: Vec<StrategyModel>,
    /// Share nature's draws (type, claim, breach) across models.
    pub common_random_numbers: bool,
}

impl SimulationConfig {
    pub fn new(params: GameParams) -> Self {
        SimulationConfig {
            params,
            utility: UtilitySpec::Linear,
            repetitions: 1000,
            master_seed: 42,
            models: StrategyModel::ALL.to_vec(),
            common_random_numbers: true,
        }
    }

    pub fn with_repetitions(mut self, n: u64) -> Self {
        self.repetitions = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_models(mut self, models: Vec<StrategyModel>) -> Self {
        self.models = models;
        self
    }

    pub fn with_common_random_numbers(mut self, on: bool) -> Self {
        self.common_random_numbers = on;
        self
    }

    pub fn with_utility(mut self, u: UtilitySpec) -> Self {
        self.utility = u;
        self
    }

    /// Structural problems; parameter validity is checked by the solver.
    pub fn problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.repetitions == 0 {
            problems.push("repetitions must be at least 1".to_string());
        }
        if self.models.is_empty() {
            problems.push("at least one strategy model is required".to_string());
        }
        for (i, m) in self.models.iter().enumerate() {
            if self.models[..i].contains(m) {
                problems.push(format!("strategy model {m} listed twice"));
            }
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("invalid simulation config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EventCounts {
    pub claims: u64,
    pub breaches: u64,
    pub no_claim_breaches: u64,
    pub audits: u64,
    /// Audits that uncovered a misrepresented claim.
    pub denials: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSummary {
    pub model: StrategyModel,
    pub insurer_strategy: InsurerStrategy,
    /// Exact sum of the insurer's payoffs over all repetitions.
    pub total_insurer_payoff: Money,
    pub mean_insurer_payoff: f64,
    pub std_error: f64,
    /// Mean policyholder utility among repetitions of each type; `None` if
    /// the type never came up.
    pub mean_ph_secure_utility: Option<f64>,
    pub mean_ph_nonsecure_utility: Option<f64>,
    pub counts: EventCounts,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub repetitions: u64,
    pub master_seed: u64,
    pub common_random_numbers: bool,
    /// Equilibrium followed by the policyholder and by the GT model.
    pub solution: PbeSolution,
    pub models: Vec<ModelSummary>,
}

impl SimulationSummary {
    pub fn model(&self, model: StrategyModel) -> Option<&ModelSummary> {
        self.models.iter().find(|m| m.model == model)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    sum_cents: i128,
    sum_sq_cents: i128,
    secure_n: u64,
    secure_utility: f64,
    nonsecure_n: u64,
    nonsecure_utility: f64,
    counts: EventCounts,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.sum_cents += other.sum_cents;
        self.sum_sq_cents += other.sum_sq_cents;
        self.secure_n += other.secure_n;
        self.secure_utility += other.secure_utility;
        self.nonsecure_n += other.nonsecure_n;
        self.nonsecure_utility += other.nonsecure_utility;
        let (c, o) = (&mut self.counts, &other.counts);
        c.claims += o.claims;
        c.breaches += o.breaches;
        c.no_claim_breaches += o.no_claim_breaches;
        c.audits += o.audits;
        c.denials += o.denials;
    }
}

struct Nature {
    ph_type: PolicyholderType,
    action: PolicyholderAction,
    breach: bool,
}

struct Plan<'a> {
    config: &'a SimulationConfig,
    rng: CounterRng,
    solution: &'a PbeSolution,
    strategies: Vec<InsurerStrategy>,
    insurer_cents: [i64; 12],
    utilities: [f64; 12],
}

impl Plan<'_> {
    fn nature(&self, rep: u64, stream: u32) -> Nature {
        let p = &self.config.params;
        let ph_type = if self.rng.bernoulli(p.prior, rep, stream, DrawKind::Type) {
            PolicyholderType::Secure
        } else {
            PolicyholderType::NonSecure
        };
        let claim_prob = self.solution.ph_strategy.claim_prob(ph_type);
        let action = if self.rng.bernoulli(claim_prob, rep, stream, DrawKind::Claim) {
            PolicyholderAction::ClaimDiscount
        } else {
            PolicyholderAction::NoClaim
        };
        let beta = match ph_type {
            PolicyholderType::Secure => p.breach_prob_invested,
            PolicyholderType::NonSecure => p.breach_prob,
        };
        Nature {
            ph_type,
            action,
            breach: self.rng.bernoulli(beta, rep, stream, DrawKind::Breach),
        }
    }

    fn chunk(&self, chunk: u64) -> Vec<Tally> {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(self.config.repetitions);
        let mut tallies = vec![Tally::default(); self.config.models.len()];
        for rep in start..end {
            let shared = self
                .config
                .common_random_numbers
                .then(|| self.nature(rep, SHARED_NATURE_STREAM));
            for (i, model) in self.config.models.iter().enumerate() {
                let own;
                let nature = match &shared {
                    Some(n) => n,
                    None => {
                        own = self.nature(rep, model.index());
                        &own
                    }
                };
                let outcome = if nature.breach {
                    let q = self.strategies[i].audit_prob(nature.action);
                    if self.rng.bernoulli(q, rep, model.index(), DrawKind::Audit) {
                        Outcome::Breach(InsurerAction::Audit)
                    } else {
                        Outcome::Breach(InsurerAction::NoAudit)
                    }
                } else {
                    Outcome::NoBreach
                };
                let leaf = Leaf::new(nature.ph_type, nature.action, outcome);
                record(
                    &mut tallies[i],
                    leaf,
                    self.insurer_cents[leaf.index()],
                    self.utilities[leaf.index()],
                );
            }
        }
        tallies
    }
}

fn record(t: &mut Tally, leaf: Leaf, cents: i64, utility: f64) {
    let cents = cents as i128;
    t.sum_cents += cents;
    t.sum_sq_cents += cents * cents;
    match leaf.ph_type {
        PolicyholderType::Secure => {
            t.secure_n += 1;
            t.secure_utility += utility;
        }
        PolicyholderType::NonSecure => {
            t.nonsecure_n += 1;
            t.nonsecure_utility += utility;
        }
    }
    let claimed = leaf.action == PolicyholderAction::ClaimDiscount;
    t.counts.claims += claimed as u64;
    if leaf.outcome.is_breach() {
        t.counts.breaches += 1;
        t.counts.no_claim_breaches += !claimed as u64;
    }
    t.counts.audits += leaf.outcome.audited() as u64;
    t.counts.denials += leaf.is_denial() as u64;
}

fn summarize(model: StrategyModel, strategy: InsurerStrategy, t: &Tally, n: u64) -> ModelSummary {
    let n_i = n as i128;
    let mean_cents = t.sum_cents as f64 / n as f64;
    let std_error = if n > 1 {
        // exact integer numerator of the sample variance, in cents^2
        let numer = n_i * t.sum_sq_cents - t.sum_cents * t.sum_cents;
        let var_cents = numer as f64 / (n_i * (n_i - 1)) as f64;
        (var_cents.max(0.0) / n as f64).sqrt() / 100.0
    } else {
        0.0
    };
    let mean = |sum: f64, k: u64| (k > 0).then(|| sum / k as f64);
    ModelSummary {
        model,
        insurer_strategy: strategy,
        total_insurer_payoff: Money::from_cents(
            i64::try_from(t.sum_cents).expect("insurer payoff total overflows i64 cents"),
        ),
        mean_insurer_payoff: mean_cents / 100.0,
        std_error,
        mean_ph_secure_utility: mean(t.secure_utility, t.secure_n),
        mean_ph_nonsecure_utility: mean(t.nonsecure_utility, t.nonsecure_n),
        counts: t.counts,
    }
}

/// Runs the simulation. Output is a function of the config alone: the same
/// config, seed included, gives a bit-identical summary on any thread count.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationSummary, SimulationError> {
    let problems = config.problems();
    if !problems.is_empty() {
        return Err(SimulationError::InvalidConfig(problems));
    }
    let solution = solve_pbe(&config.params, &config.utility)?;
    let p = &config.params;
    let lo = (p.wealth - p.premium - p.investment_cost - p.loss).as_f64();
    let hi = (p.wealth - p.premium + p.discount).as_f64();
    config.utility.check_shape(lo, hi, 16)?;

    let mut insurer_cents = [0i64; 12];
    for leaf in Leaf::all() {
        insurer_cents[leaf.index()] = insurer_payoff(leaf, p).cents();
    }
    let plan = Plan {
        config,
        rng: CounterRng::new(config.master_seed),
        solution: &solution,
        strategies: config
            .models
            .iter()
            .map(|m| insurer_strategy_for(*m, &solution))
            .collect(),
        insurer_cents,
        utilities: utility_table(p, &config.utility)?,
    };

    let chunks = config.repetitions.div_ceil(CHUNK);
    let partials: Vec<Vec<Tally>> = (0..chunks).into_par_iter().map(|c| plan.chunk(c)).collect();
    let mut totals = vec![Tally::default(); config.models.len()];
    for partial in &partials {
        for (total, t) in totals.iter_mut().zip(partial) {
            total.merge(t);
        }
    }

    let models = config
        .models
        .iter()
        .zip(&plan.strategies)
        .zip(&totals)
        .map(|((m, s), t)| summarize(*m, *s, t, config.repetitions))
        .collect();
    Ok(SimulationSummary {
        repetitions: config.repetitions,
        master_seed: config.master_seed,
        common_random_numbers: config.common_random_numbers,
        solution,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::Region;

    #[test]
    fn model_strategies() {
        let p = GameParams::calibrated().with_prior(0.995);
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        assert_eq!(sol.region, Region::Pbe2);
        assert_eq!(
            insurer_strategy_for(StrategyModel::GameTheoretic, &sol),
            InsurerStrategy::new(0.0, 0.0)
        );
        assert_eq!(
            insurer_strategy_for(StrategyModel::AuditOnClaim, &sol),
            InsurerStrategy::new(1.0, 0.0)
        );
        assert_eq!(
            insurer_strategy_for(StrategyModel::HalfOnClaim, &sol),
            InsurerStrategy::new(0.5, 0.0)
        );
    }

    #[test]
    fn model_labels_parse() {
        for m in StrategyModel::ALL {
            assert_eq!(m.label().parse::<StrategyModel>().unwrap(), m);
            assert_eq!(m.slug().parse::<StrategyModel>().unwrap(), m);
        }
        assert!("sometimes".parse::<StrategyModel>().is_err());
    }

    #[test]
    fn degenerate_randomness_is_exact() {
        let p = GameParams::calibrated()
            .with_breach_probs(1.0, 1.0)
            .with_prior(1.0);
        let config = SimulationConfig::new(p)
            .with_repetitions(1)
            .with_models(vec![StrategyModel::NeverAudit]);
        let s = run_simulation(&config).unwrap();
        let m = &s.models[0];
        assert_eq!(m.mean_insurer_payoff, -166_551.5);
        assert_eq!(m.total_insurer_payoff, Money::from_cents(-16_655_150));
        assert_eq!(m.std_error, 0.0);
        assert_eq!(m.mean_ph_nonsecure_utility, None);
    }

    #[test]
    fn config_problems() {
        let base = SimulationConfig::new(GameParams::calibrated());
        let bad = base.clone().with_repetitions(0);
        assert!(matches!(
            run_simulation(&bad),
            Err(SimulationError::InvalidConfig(_))
        ));
        let dup = base
            .clone()
            .with_models(vec![StrategyModel::HalfHalf, StrategyModel::HalfHalf]);
        assert!(matches!(
            run_simulation(&dup),
            Err(SimulationError::InvalidConfig(_))
        ));
        let none = base.with_models(vec![]);
        assert!(matches!(
            run_simulation(&none),
            Err(SimulationError::InvalidConfig(_))
        ));
    }

    #[test]
    fn chunk_boundaries_do_not_matter() {
        // a run spanning several chunks equals the union of its draws
        let config = SimulationConfig::new(GameParams::calibrated())
            .with_repetitions(3 * CHUNK + 17)
            .with_seed(5);
        let a = run_simulation(&config).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_simulation(&config).unwrap());
        assert_eq!(a, b);
    }
}
