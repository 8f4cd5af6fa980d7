//! Beliefs, sequential-rationality thresholds and the classification of the
//! audit game into its five perfect Bayesian equilibrium regions.
//!
//! The regions are cut by three comparisons: loss against audit cost (can an
//! audit ever pay for itself), loss against discount (does the threat of a
//! denied claim deter a non-investor from claiming), and the prior against the
//! audit threshold `φ* = (l - a) / l`.

use std::fmt;

use thiserror::Error;

use crate::game::{
    insurer_payoff, InsurerAction, Leaf, Outcome, PolicyholderAction, PolicyholderType,
};
use crate::params::{GameParams, ValidationReport};
use crate::utility::{UtilityError, UtilitySpec};

/// Probabilities above 1 by less than this are rounding, not region errors.
const PROB_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyholderStrategy {
    pub claim_prob_secure: f64,
    /// `δ` in the mixed equilibrium.
    pub claim_prob_nonsecure: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InsurerStrategy {
    /// `θ` in the mixed equilibrium.
    pub audit_prob_given_cd: f64,
    pub audit_prob_given_nc: f64,
}

impl PolicyholderStrategy {
    pub const fn new(claim_prob_secure: f64, claim_prob_nonsecure: f64) -> Self {
        PolicyholderStrategy {
            claim_prob_secure,
            claim_prob_nonsecure,
        }
    }

    pub fn claim_prob(&self, t: PolicyholderType) -> f64 {
        match t {
            PolicyholderType::Secure => self.claim_prob_secure,
            PolicyholderType::NonSecure => self.claim_prob_nonsecure,
        }
    }

    pub fn action_prob(&self, t: PolicyholderType, a: PolicyholderAction) -> f64 {
        let q = self.claim_prob(t);
        match a {
            PolicyholderAction::ClaimDiscount => q,
            PolicyholderAction::NoClaim => 1.0 - q,
        }
    }

    pub fn is_valid(&self) -> bool {
        is_prob(self.claim_prob_secure) && is_prob(self.claim_prob_nonsecure)
    }
}

impl InsurerStrategy {
    pub const fn new(audit_prob_given_cd: f64, audit_prob_given_nc: f64) -> Self {
        InsurerStrategy {
            audit_prob_given_cd,
            audit_prob_given_nc,
        }
    }

    /// Audit probability after a breach, given what the policyholder did.
    pub fn audit_prob(&self, observed: PolicyholderAction) -> f64 {
        match observed {
            PolicyholderAction::ClaimDiscount => self.audit_prob_given_cd,
            PolicyholderAction::NoClaim => self.audit_prob_given_nc,
        }
    }

    pub fn action_prob(&self, observed: PolicyholderAction, a: InsurerAction) -> f64 {
        let q = self.audit_prob(observed);
        match a {
            InsurerAction::Audit => q,
            InsurerAction::NoAudit => 1.0 - q,
        }
    }

    pub fn is_valid(&self) -> bool {
        is_prob(self.audit_prob_given_cd) && is_prob(self.audit_prob_given_nc)
    }
}

fn is_prob(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl fmt::Display for PolicyholderStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(P_S claims w.p. {}, P_N claims w.p. {})",
            self.claim_prob_secure, self.claim_prob_nonsecure
        )
    }
}

impl fmt::Display for InsurerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(audit after CD w.p. {}, audit after NC w.p. {})",
            self.audit_prob_given_cd, self.audit_prob_given_nc
        )
    }
}

/// The insurer's belief that it faces an investor at one information set.
/// Off the equilibrium path Bayes' rule says nothing and no number is stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Belief {
    OnPath(f64),
    OffPath,
}

impl Belief {
    pub fn value(self) -> Option<f64> {
        match self {
            Belief::OnPath(v) => Some(v),
            Belief::OffPath => None,
        }
    }
}

impl fmt::Display for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Belief::OnPath(v) => write!(f, "{v}"),
            Belief::OffPath => write!(f, "off-path"),
        }
    }
}

/// `mu = Pr(Secure | CD)`, `lambda = Pr(Secure | NC)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beliefs {
    pub mu: Belief,
    pub lambda: Belief,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// `l < a`: auditing never pays; claim regardless, never audit.
    Pbe1,
    /// `l > a`, `l > d`, `φ > φ*`: claim regardless, never audit.
    Pbe2,
    /// `l > a`, `l > d`, `φ ≤ φ*`: non-investors mix, insurer mixes after CD.
    Pbe3Mixed,
    /// `l > a`, `l < d`, `φ > φ*`: claim regardless, never audit.
    Pbe4,
    /// `l > a`, `l < d`, `φ ≤ φ*`: claim regardless, audit every claim.
    Pbe5,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Pbe1 => "PBE1",
            Region::Pbe2 => "PBE2",
            Region::Pbe3Mixed => "PBE3",
            Region::Pbe4 => "PBE4",
            Region::Pbe5 => "PBE5",
        }
    }

    pub fn is_mixed(self) -> bool {
        self == Region::Pbe3Mixed
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PbeSolution {
    pub region: Region,
    pub ph_strategy: PolicyholderStrategy,
    pub ins_strategy: InsurerStrategy,
    pub beliefs: Beliefs,
    pub phi_star: f64,
    pub theta: Option<f64>,
    pub delta: Option<f64>,
    /// Boundary ties and other classification remarks.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixedError {
    #[error("prior φ = 1 leaves the non-investor's mixing probability undefined")]
    PriorDegenerate,
    #[error("no audit frequency deters misrepresentation (θ = {theta} > 1)")]
    DeterrenceInfeasible { theta: f64 },
    #[error("parameters lie outside the mixed region (δ = {delta} > 1, i.e. φ > φ*)")]
    RegionMismatch { delta: f64 },
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Mixed(#[from] MixedError),
}

/// `φ* = (l - a) / l`. Not clamped: a value `<= 0` means auditing is never
/// rational. Computed from integer cents, so the only rounding is the final
/// division.
pub fn audit_threshold(params: &GameParams) -> f64 {
    let l = params.loss.cents();
    (l - params.audit_cost.cents()) as f64 / l as f64
}

pub fn posterior_beliefs(phi: f64, ph: &PolicyholderStrategy) -> Beliefs {
    let q_s = ph.claim_prob_secure;
    let q_n = ph.claim_prob_nonsecure;
    let posterior = |secure: f64, nonsecure: f64| {
        let reach = secure + nonsecure;
        if reach > 0.0 {
            Belief::OnPath(secure / reach)
        } else {
            Belief::OffPath
        }
    };
    Beliefs {
        mu: posterior(phi * q_s, (1.0 - phi) * q_n),
        lambda: posterior(phi * (1.0 - q_s), (1.0 - phi) * (1.0 - q_n)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedSolution {
    pub theta: f64,
    pub delta: f64,
    pub beliefs: Beliefs,
}

/// Audit frequency `θ` that makes the non-investor indifferent between
/// claiming and not, and claim frequency `δ = a / ((1 - φ) l)` that makes the
/// insurer indifferent between auditing and not.
pub fn mixed_solution(params: &GameParams, u: &UtilitySpec) -> Result<MixedSolution, MixedError> {
    let phi = params.prior;
    if phi >= 1.0 {
        return Err(MixedError::PriorDegenerate);
    }
    let l = params.loss.as_f64();
    let delta = params.audit_cost.as_f64() / ((1.0 - phi) * l);
    if delta > 1.0 + PROB_SLACK {
        return Err(MixedError::RegionMismatch { delta });
    }

    let base = (params.wealth - params.premium).as_f64();
    let d = params.discount.as_f64();
    let claim_kept = u.eval(base + d)?;
    let no_claim = u.eval(base)?;
    let claim_denied = u.eval(base + d - l)?;
    let denom = params.breach_prob * (claim_kept - claim_denied);
    let theta = if denom > 0.0 {
        (claim_kept - no_claim) / denom
    } else {
        f64::INFINITY
    };
    if theta.is_nan() || theta > 1.0 + PROB_SLACK {
        return Err(MixedError::DeterrenceInfeasible { theta });
    }

    let theta = theta.min(1.0);
    let delta = delta.min(1.0);
    Ok(MixedSolution {
        theta,
        delta,
        beliefs: posterior_beliefs(phi, &PolicyholderStrategy::new(1.0, delta)),
    })
}

/// The insurer's expected payoffs for auditing and not auditing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditPayoffs {
    pub audit: f64,
    pub no_audit: f64,
}

impl AuditPayoffs {
    /// Gain from auditing over not auditing.
    pub fn advantage(&self) -> f64 {
        self.audit - self.no_audit
    }
}

/// Payoffs at the information set reached by a claimed discount and a breach,
/// given belief `mu` that the claimant invested:
/// `audit = p - mu l - d - a`, `no_audit = p - d - l`.
pub fn cd_infoset_insurer_payoffs(belief_mu: f64, params: &GameParams) -> AuditPayoffs {
    let (p, d, l, a) = (
        params.premium.as_f64(),
        params.discount.as_f64(),
        params.loss.as_f64(),
        params.audit_cost.as_f64(),
    );
    AuditPayoffs {
        audit: p - belief_mu * l - d - a,
        no_audit: p - d - l,
    }
}

/// Prior-weighted comparison of auditing every breach against auditing none,
/// as the equilibrium proofs do it: each type is weighted by its prior and by
/// its claim probability, with no weighting by breach probability.
///
/// For `ph = (1, 1)` this is exactly [`cd_infoset_insurer_payoffs`] at
/// `mu = φ`; for `ph = (1, δ)` its indifference condition is `δ (1 - φ) l = a`.
pub fn prior_weighted_audit_payoffs(
    phi: f64,
    ph: &PolicyholderStrategy,
    params: &GameParams,
) -> AuditPayoffs {
    let value = |ins: InsurerAction| {
        let mut total = 0.0;
        for t in PolicyholderType::ALL {
            let weight = match t {
                PolicyholderType::Secure => phi,
                PolicyholderType::NonSecure => 1.0 - phi,
            };
            for act in PolicyholderAction::ALL {
                let leaf = Leaf::new(t, act, Outcome::Breach(ins));
                total += weight * ph.action_prob(t, act) * insurer_payoff(leaf, params).as_f64();
            }
        }
        total
    };
    AuditPayoffs {
        audit: value(InsurerAction::Audit),
        no_audit: value(InsurerAction::NoAudit),
    }
}

/// Belief at which [`cd_infoset_insurer_payoffs`] reproduces the audit
/// advantage of [`prior_weighted_audit_payoffs`]: `1 - (1 - φ) q_N`.
///
/// Equals the Bayes posterior `mu` whenever the non-investor plays a pure
/// strategy and investors always claim; in the mixed equilibrium it equals
/// `φ*` while the Bayes posterior is strictly below `φ*`.
pub fn prior_weighted_cd_belief(phi: f64, ph: &PolicyholderStrategy) -> f64 {
    1.0 - (1.0 - phi) * ph.claim_prob_nonsecure
}

pub fn solve_pbe(params: &GameParams, u: &UtilitySpec) -> Result<PbeSolution, SolveError> {
    let report = params.validate();
    if !report.is_valid() {
        return Err(SolveError::InvalidParams(report));
    }
    u.check_parameters()?;

    let phi = params.prior;
    let phi_star = audit_threshold(params);
    let (l, a, d) = (params.loss, params.audit_cost, params.discount);
    let mut notes = Vec::new();

    let claim_always = PolicyholderStrategy::new(1.0, 1.0);
    let pure = |region, ins: InsurerStrategy, notes| PbeSolution {
        region,
        ph_strategy: claim_always,
        ins_strategy: ins,
        beliefs: posterior_beliefs(phi, &claim_always),
        phi_star,
        theta: None,
        delta: None,
        notes,
    };
    let never_audit = InsurerStrategy::new(0.0, 0.0);

    if l <= a {
        if l == a {
            notes.push(
                "boundary l = a: an audit recovers exactly its cost; tie broken toward no audit"
                    .into(),
            );
        } else {
            notes.push(format!("a > l: φ* = {phi_star} < 0, auditing is dominated"));
        }
        return Ok(pure(Region::Pbe1, never_audit, notes));
    }

    let deterrable = l >= d;
    if l == d {
        notes.push("boundary l = d: a denied claim leaves the non-investor indifferent; tie broken toward the deterrable region".into());
    }

    if phi > phi_star {
        let region = if deterrable {
            Region::Pbe2
        } else {
            Region::Pbe4
        };
        return Ok(pure(region, never_audit, notes));
    }
    if phi == phi_star {
        notes.push("boundary φ = φ*: classified with φ ≤ φ*".into());
    }

    if !deterrable {
        return Ok(pure(Region::Pbe5, InsurerStrategy::new(1.0, 0.0), notes));
    }

    let mixed = mixed_solution(params, u)?;
    Ok(PbeSolution {
        region: Region::Pbe3Mixed,
        ph_strategy: PolicyholderStrategy::new(1.0, mixed.delta),
        ins_strategy: InsurerStrategy::new(mixed.theta, 0.0),
        beliefs: mixed.beliefs,
        phi_star,
        theta: Some(mixed.theta),
        delta: Some(mixed.delta),
        notes,
    })
}

impl fmt::Display for PbeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "region:       {}", self.region)?;
        writeln!(f, "policyholder: {}", self.ph_strategy)?;
        writeln!(f, "insurer:      {}", self.ins_strategy)?;
        writeln!(f, "mu:           {}", self.beliefs.mu)?;
        writeln!(f, "lambda:       {}", self.beliefs.lambda)?;
        writeln!(f, "phi*:         {}", self.phi_star)?;
        if let (Some(theta), Some(delta)) = (self.theta, self.delta) {
            writeln!(f, "theta:        {theta}")?;
            writeln!(f, "delta:        {delta}")?;
        }
        for note in &self.notes {
            writeln!(f, "note:         {note}")?;
        }
        Ok(())
    }
}
