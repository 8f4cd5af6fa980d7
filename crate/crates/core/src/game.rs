//! The game tree: leaves and their payoffs.
//!
//! Nature draws the policyholder's type, the policyholder claims the premium
//! discount or not, nature draws a breach, and only after a breach does the
//! insurer decide whether to audit. An audit of a non-investing policyholder
//! who claimed the discount denies the indemnity.

use std::fmt;

use crate::money::Money;
use crate::params::GameParams;
use crate::utility::{UtilityError, UtilitySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyholderType {
    /// Made the security investment.
    Secure,
    NonSecure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyholderAction {
    ClaimDiscount,
    NoClaim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InsurerAction {
    Audit,
    NoAudit,
}

/// What happens after the policyholder moves. The insurer only acts on a breach.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    NoBreach,
    Breach(InsurerAction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    pub ph_type: PolicyholderType,
    pub action: PolicyholderAction,
    pub outcome: Outcome,
}

/// Payoff changes relative to the contract baseline: the policyholder's
/// wealth is `W - p + policyholder`, the insurer's payoff `p + insurer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Offsets {
    pub policyholder: Money,
    pub insurer: Money,
}

impl PolicyholderType {
    pub const ALL: [PolicyholderType; 2] = [PolicyholderType::Secure, PolicyholderType::NonSecure];
}

impl PolicyholderAction {
    pub const ALL: [PolicyholderAction; 2] = [
        PolicyholderAction::ClaimDiscount,
        PolicyholderAction::NoClaim,
    ];
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [
        Outcome::NoBreach,
        Outcome::Breach(InsurerAction::Audit),
        Outcome::Breach(InsurerAction::NoAudit),
    ];

    pub fn is_breach(self) -> bool {
        matches!(self, Outcome::Breach(_))
    }

    pub fn audited(self) -> bool {
        self == Outcome::Breach(InsurerAction::Audit)
    }
}

impl Leaf {
    pub const fn new(
        ph_type: PolicyholderType,
        action: PolicyholderAction,
        outcome: Outcome,
    ) -> Self {
        Leaf {
            ph_type,
            action,
            outcome,
        }
    }

    /// All twelve terminal nodes, ordered by type, action, outcome.
    pub fn all() -> [Leaf; 12] {
        let mut leaves = [Leaf::new(
            PolicyholderType::Secure,
            PolicyholderAction::ClaimDiscount,
            Outcome::NoBreach,
        ); 12];
        let mut i = 0;
        for t in PolicyholderType::ALL {
            for a in PolicyholderAction::ALL {
                for o in Outcome::ALL {
                    leaves[i] = Leaf::new(t, a, o);
                    i += 1;
                }
            }
        }
        leaves
    }

    /// Dense index in `0..12`, consistent with [`Leaf::all`].
    pub fn index(self) -> usize {
        let t = self.ph_type as usize;
        let a = self.action as usize;
        let o = match self.outcome {
            Outcome::NoBreach => 0,
            Outcome::Breach(InsurerAction::Audit) => 1,
            Outcome::Breach(InsurerAction::NoAudit) => 2,
        };
        (t * 2 + a) * 3 + o
    }

    /// A misrepresented claim uncovered by an audit: the indemnity is refused.
    pub fn is_denial(self) -> bool {
        self.ph_type == PolicyholderType::NonSecure
            && self.action == PolicyholderAction::ClaimDiscount
            && self.outcome.audited()
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.ph_type {
            PolicyholderType::Secure => "P_S",
            PolicyholderType::NonSecure => "P_N",
        };
        let a = match self.action {
            PolicyholderAction::ClaimDiscount => "CD",
            PolicyholderAction::NoClaim => "NC",
        };
        let o = match self.outcome {
            Outcome::NoBreach => "NB",
            Outcome::Breach(InsurerAction::Audit) => "B,A",
            Outcome::Breach(InsurerAction::NoAudit) => "B,NA",
        };
        write!(f, "{t},{a},{o}")
    }
}

pub fn leaf_net_offsets(leaf: Leaf, params: &GameParams) -> Offsets {
    let claimed = leaf.action == PolicyholderAction::ClaimDiscount;
    let secure = leaf.ph_type == PolicyholderType::Secure;
    let denied = leaf.is_denial();

    let mut policyholder = Money::ZERO;
    let mut insurer = Money::ZERO;
    if claimed {
        policyholder += params.discount;
        insurer -= params.discount;
    }
    if secure {
        policyholder -= params.investment_cost;
    }
    if leaf.outcome.is_breach() {
        if denied {
            policyholder -= params.loss;
        } else {
            insurer -= params.loss;
        }
    }
    if leaf.outcome.audited() {
        insurer -= params.audit_cost;
    }
    Offsets {
        policyholder,
        insurer,
    }
}

/// Policyholder's terminal wealth `W - p + offset`.
pub fn policyholder_wealth(leaf: Leaf, params: &GameParams) -> Money {
    params.wealth - params.premium + leaf_net_offsets(leaf, params).policyholder
}

pub fn policyholder_utility(
    leaf: Leaf,
    params: &GameParams,
    u: &UtilitySpec,
) -> Result<f64, UtilityError> {
    u.eval(policyholder_wealth(leaf, params).as_f64())
}

/// The insurer is risk neutral: its payoff is money.
pub fn insurer_payoff(leaf: Leaf, params: &GameParams) -> Money {
    params.premium + leaf_net_offsets(leaf, params).insurer
}

/// Policyholder utilities for all twelve leaves, indexed by [`Leaf::index`].
pub fn utility_table(params: &GameParams, u: &UtilitySpec) -> Result<[f64; 12], UtilityError> {
    let mut table = [0.0; 12];
    for leaf in Leaf::all() {
        table[leaf.index()] = policyholder_utility(leaf, params, u)?;
    }
    Ok(table)
}
