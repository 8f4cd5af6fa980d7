//! Independent checks of equilibrium profiles: exact expected payoffs under
//! the game's chance measure, grid-search best-response gaps, and residuals
//! of the mixed-equilibrium indifference equations.
//!
//! Gaps are reported under two accountings. The true measure weights every
//! leaf by its reach probability, breach probabilities included. The
//! prior-weighted accounting is the one the equilibrium proofs use for the
//! insurer: each information set is judged from beliefs that ignore how
//! likely each type is to be breached.

use thiserror::Error;

use crate::equilibrium::{
    cd_infoset_insurer_payoffs, prior_weighted_cd_belief, InsurerStrategy, PbeSolution,
    PolicyholderStrategy, Region,
};
use crate::game::{
    insurer_payoff, policyholder_utility, InsurerAction, Leaf, Outcome, PolicyholderAction,
    PolicyholderType,
};
use crate::params::GameParams;
use crate::utility::{UtilityError, UtilitySpec};

pub const DEFAULT_GRID_N: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyProfile {
    pub ph: PolicyholderStrategy,
    pub ins: InsurerStrategy,
}

impl StrategyProfile {
    pub const fn new(ph: PolicyholderStrategy, ins: InsurerStrategy) -> Self {
        StrategyProfile { ph, ins }
    }

    pub fn is_valid(&self) -> bool {
        self.ph.is_valid() && self.ins.is_valid()
    }
}

impl PbeSolution {
    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile::new(self.ph_strategy, self.ins_strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("strategy probabilities must lie in [0, 1]: {0:?}")]
    InvalidProfile(StrategyProfile),
    #[error("indifference residuals need a mixed equilibrium, got {0}")]
    WrongRegion(Region),
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

/// Expected payoffs of a profile. Policyholder values are conditional on
/// type; the insurer's value is ex ante, before the type draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedPayoffs {
    pub ph_secure: f64,
    pub ph_nonsecure: f64,
    pub insurer: f64,
}

/// Probability of reaching `leaf` given the policyholder's type.
pub fn conditional_reach(leaf: Leaf, profile: &StrategyProfile, params: &GameParams) -> f64 {
    let beta = match leaf.ph_type {
        PolicyholderType::Secure => params.breach_prob_invested,
        PolicyholderType::NonSecure => params.breach_prob,
    };
    let action = profile.ph.action_prob(leaf.ph_type, leaf.action);
    let nature = match leaf.outcome {
        Outcome::NoBreach => 1.0 - beta,
        Outcome::Breach(ins) => beta * profile.ins.action_prob(leaf.action, ins),
    };
    action * nature
}

/// The insurer's ex-ante expected payoff alone; same value as
/// `expected_payoffs(..).insurer` without evaluating any utility.
pub fn expected_insurer_payoff(profile: &StrategyProfile, params: &GameParams) -> f64 {
    let phi = params.prior;
    let mut total = 0.0;
    for leaf in Leaf::all() {
        let reach = conditional_reach(leaf, profile, params);
        if reach == 0.0 {
            continue;
        }
        let weight = match leaf.ph_type {
            PolicyholderType::Secure => phi,
            PolicyholderType::NonSecure => 1.0 - phi,
        };
        total += weight * reach * insurer_payoff(leaf, params).as_f64();
    }
    total
}

pub fn expected_payoffs(
    profile: &StrategyProfile,
    params: &GameParams,
    u: &UtilitySpec,
) -> Result<ExpectedPayoffs, UtilityError> {
    let phi = params.prior;
    let mut out = ExpectedPayoffs {
        ph_secure: 0.0,
        ph_nonsecure: 0.0,
        insurer: 0.0,
    };
    for leaf in Leaf::all() {
        let reach = conditional_reach(leaf, profile, params);
        if reach == 0.0 {
            continue;
        }
        let utility = policyholder_utility(leaf, params, u)?;
        let money = insurer_payoff(leaf, params).as_f64();
        match leaf.ph_type {
            PolicyholderType::Secure => {
                out.ph_secure += reach * utility;
                out.insurer += phi * reach * money;
            }
            PolicyholderType::NonSecure => {
                out.ph_nonsecure += reach * utility;
                out.insurer += (1.0 - phi) * reach * money;
            }
        }
    }
    Ok(out)
}

/// Best-response gaps for one accounting, with the deviation that achieved
/// each gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    pub ph_secure_gap: f64,
    pub ph_secure_best: f64,
    pub ph_nonsecure_gap: f64,
    pub ph_nonsecure_best: f64,
    pub insurer_gap: f64,
    pub insurer_best: InsurerStrategy,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationReport {
    pub true_measure: GapReport,
    pub prior_weighted: GapReport,
}

fn grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

/// Max of `value` over the grid and the current point, minus the current value.
fn best_on_grid<T: Copy>(
    current: T,
    candidates: impl Iterator<Item = T>,
    mut value: impl FnMut(T) -> Result<f64, UtilityError>,
) -> Result<(f64, T), UtilityError> {
    let base = value(current)?;
    let mut best = (base, current);
    for c in candidates {
        let v = value(c)?;
        if v > best.0 {
            best = (v, c);
        }
    }
    Ok((best.0 - base, best.1))
}

/// Unilateral deviation gaps on the grid `{0, 1/(n-1), ..., 1}`.
pub fn deviation_gaps(
    profile: &StrategyProfile,
    params: &GameParams,
    u: &UtilitySpec,
    grid_n: usize,
) -> Result<DeviationReport, OracleError> {
    if grid_n < 2 {
        return Err(OracleError::GridTooSmall(grid_n));
    }
    if !profile.is_valid() {
        return Err(OracleError::InvalidProfile(*profile));
    }

    // Policyholder payoffs are the same under both accountings: each type
    // knows its own breach probability.
    let (ph_secure_gap, ph_secure_best) =
        best_on_grid(profile.ph.claim_prob_secure, grid(grid_n), |q| {
            let alt = StrategyProfile {
                ph: PolicyholderStrategy {
                    claim_prob_secure: q,
                    ..profile.ph
                },
                ..*profile
            };
            Ok(expected_payoffs(&alt, params, u)?.ph_secure)
        })?;
    let (ph_nonsecure_gap, ph_nonsecure_best) =
        best_on_grid(profile.ph.claim_prob_nonsecure, grid(grid_n), |q| {
            let alt = StrategyProfile {
                ph: PolicyholderStrategy {
                    claim_prob_nonsecure: q,
                    ..profile.ph
                },
                ..*profile
            };
            Ok(expected_payoffs(&alt, params, u)?.ph_nonsecure)
        })?;

    let insurer_grid =
        grid(grid_n).flat_map(move |cd| grid(grid_n).map(move |nc| InsurerStrategy::new(cd, nc)));

    let (true_gap, true_best) = best_on_grid(profile.ins, insurer_grid.clone(), |ins| {
        Ok(expected_insurer_payoff(
            &StrategyProfile { ins, ..*profile },
            params,
        ))
    })?;

    let cd =
        cd_infoset_insurer_payoffs(prior_weighted_cd_belief(params.prior, &profile.ph), params);
    let nc_audit = no_claim_infoset_payoff(InsurerAction::Audit, params);
    let nc_skip = no_claim_infoset_payoff(InsurerAction::NoAudit, params);
    let (pw_gap, pw_best) = best_on_grid(profile.ins, insurer_grid, |ins| {
        let q_cd = ins.audit_prob_given_cd;
        let q_nc = ins.audit_prob_given_nc;
        Ok(q_cd * cd.audit + (1.0 - q_cd) * cd.no_audit + q_nc * nc_audit + (1.0 - q_nc) * nc_skip)
    })?;

    let ph_part = |insurer_gap, insurer_best| GapReport {
        ph_secure_gap,
        ph_secure_best,
        ph_nonsecure_gap,
        ph_nonsecure_best,
        insurer_gap,
        insurer_best,
    };
    Ok(DeviationReport {
        true_measure: ph_part(true_gap, true_best),
        prior_weighted: ph_part(pw_gap, pw_best),
    })
}

/// Insurer payoff after a breach with no discount claimed. Both types pay the
/// same here, so the belief `lambda` never matters.
fn no_claim_infoset_payoff(action: InsurerAction, params: &GameParams) -> f64 {
    let leaf = Leaf::new(
        PolicyholderType::NonSecure,
        PolicyholderAction::NoClaim,
        Outcome::Breach(action),
    );
    insurer_payoff(leaf, params).as_f64()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndifferenceResiduals {
    /// Non-investor's expected utility of claiming minus not claiming.
    pub ph: f64,
    /// `δ (1 - φ) l - a`.
    pub insurer: f64,
}

pub fn indifference_residuals(
    sol: &PbeSolution,
    params: &GameParams,
    u: &UtilitySpec,
) -> Result<IndifferenceResiduals, OracleError> {
    let (Some(theta), Some(delta)) = (sol.theta, sol.delta) else {
        return Err(OracleError::WrongRegion(sol.region));
    };
    if !sol.region.is_mixed() {
        return Err(OracleError::WrongRegion(sol.region));
    }
    let beta = params.breach_prob;
    let leaf_u = |action, outcome| {
        policyholder_utility(
            Leaf::new(PolicyholderType::NonSecure, action, outcome),
            params,
            u,
        )
    };
    let denied = leaf_u(
        PolicyholderAction::ClaimDiscount,
        Outcome::Breach(InsurerAction::Audit),
    )?;
    let kept = leaf_u(PolicyholderAction::ClaimDiscount, Outcome::NoBreach)?;
    let no_claim = leaf_u(PolicyholderAction::NoClaim, Outcome::NoBreach)?;

    let ph = beta * theta * (denied - kept) + (kept - no_claim);
    let insurer = delta * (1.0 - params.prior) * params.loss.as_f64() - params.audit_cost.as_f64();
    Ok(IndifferenceResiduals { ph, insurer })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::equilibrium::solve_pbe;
    use crate::money::Money;
    use proptest::prelude::*;

    #[test]
    fn insurer_only_expectation_matches_full() {
        let p = GameParams::calibrated().with_prior(0.3);
        for (q_s, q_n, cd, nc) in [
            (1.0, 0.2, 0.3, 0.0),
            (0.0, 1.0, 1.0, 1.0),
            (0.5, 0.5, 0.0, 0.7),
        ] {
            let profile = StrategyProfile::new(
                PolicyholderStrategy::new(q_s, q_n),
                InsurerStrategy::new(cd, nc),
            );
            let full = expected_payoffs(&profile, &p, &UtilitySpec::Linear).unwrap();
            assert_eq!(expected_insurer_payoff(&profile, &p), full.insurer);
        }
    }

    const PURE: [f64; 2] = [0.0, 1.0];

    fn profile(qs: f64, qn: f64, acd: f64, anc: f64) -> StrategyProfile {
        StrategyProfile::new(
            PolicyholderStrategy::new(qs, qn),
            InsurerStrategy::new(acd, anc),
        )
    }

    fn mixed_params() -> GameParams {
        GameParams::calibrated()
            .with_audit_cost(Money::dollars(100_000))
            .with_discount(Money::from_cents(90_750))
            .with_prior(0.3)
    }

    #[test]
    fn no_breaches_means_discount_is_the_only_cost() {
        let p = GameParams::calibrated().with_breach_probs(0.0, 0.0);
        for acd in PURE {
            for anc in PURE {
                let e = expected_payoffs(&profile(1.0, 1.0, acd, anc), &p, &UtilitySpec::Linear)
                    .unwrap();
                assert!((e.insurer - (3630.0 - 181.5)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pooling_never_audit_value() {
        let p = GameParams::calibrated();
        let e = expected_payoffs(&profile(1.0, 1.0, 0.0, 0.0), &p, &UtilitySpec::Linear).unwrap();
        assert!((e.insurer - 1918.5).abs() < 1e-9);
    }

    #[test]
    fn auditing_claims_against_pooling() {
        let p = GameParams::calibrated();
        let audit =
            expected_payoffs(&profile(1.0, 1.0, 1.0, 0.0), &p, &UtilitySpec::Linear).unwrap();
        let skip =
            expected_payoffs(&profile(1.0, 1.0, 0.0, 0.0), &p, &UtilitySpec::Linear).unwrap();
        assert!((audit.insurer - skip.insurer - 1230.0).abs() < 1e-9);
    }

    /// Closed-form sums over the reachable leaves of a pure profile, written
    /// out by hand rather than through the leaf table.
    fn hand_enumeration(pr: &StrategyProfile, p: &GameParams) -> (f64, f64, f64) {
        let (a, c, d, l, pm, w) = (
            p.audit_cost.as_f64(),
            p.investment_cost.as_f64(),
            p.discount.as_f64(),
            p.loss.as_f64(),
            p.premium.as_f64(),
            p.wealth.as_f64(),
        );
        let (bs, bn, phi) = (p.breach_prob_invested, p.breach_prob, p.prior);
        let claim_s = pr.ph.claim_prob_secure == 1.0;
        let claim_n = pr.ph.claim_prob_nonsecure == 1.0;
        let audit_s = if claim_s {
            pr.ins.audit_prob_given_cd
        } else {
            pr.ins.audit_prob_given_nc
        } == 1.0;
        let audit_n = if claim_n {
            pr.ins.audit_prob_given_cd
        } else {
            pr.ins.audit_prob_given_nc
        } == 1.0;

        let ph_s = if claim_s { w - pm + d - c } else { w - pm - c };
        let ph_n = match (claim_n, audit_n) {
            (true, true) => bn * (w - pm + d - l) + (1.0 - bn) * (w - pm + d),
            (true, false) => w - pm + d,
            (false, _) => w - pm,
        };
        let disc_s = if claim_s { d } else { 0.0 };
        let ins_s = pm - disc_s - bs * (l + if audit_s { a } else { 0.0 });
        let disc_n = if claim_n { d } else { 0.0 };
        let ins_n = pm
            - disc_n
            - bn * match (claim_n, audit_n) {
                (true, true) => a,
                (_, true) => l + a,
                (_, false) => l,
            };
        (ph_s, ph_n, phi * ins_s + (1.0 - phi) * ins_n)
    }

    #[test]
    fn pure_profiles_match_hand_enumeration() {
        let params = [
            GameParams::calibrated(),
            mixed_params(),
            GameParams::calibrated()
                .with_loss(Money::dollars(4000))
                .with_prior(0.8),
        ];
        for p in params {
            for qs in PURE {
                for qn in PURE {
                    for acd in PURE {
                        for anc in PURE {
                            let pr = profile(qs, qn, acd, anc);
                            let e = expected_payoffs(&pr, &p, &UtilitySpec::Linear).unwrap();
                            let (s, n, i) = hand_enumeration(&pr, &p);
                            assert!((e.ph_secure - s).abs() <= 1e-12 * s.abs());
                            assert!((e.ph_nonsecure - n).abs() <= 1e-12 * n.abs());
                            assert!((e.insurer - i).abs() <= 1e-12 * i.abs().max(1.0), "{pr:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pbe1_profile_has_no_profitable_deviation() {
        let p = GameParams::calibrated().with_loss(Money::dollars(4000));
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        let r = deviation_gaps(&sol.profile(), &p, &UtilitySpec::Linear, DEFAULT_GRID_N).unwrap();
        for g in [r.true_measure, r.prior_weighted] {
            assert_eq!(g.ph_secure_gap, 0.0);
            assert_eq!(g.ph_nonsecure_gap, 0.0);
            assert_eq!(g.insurer_gap, 0.0);
        }
    }

    #[test]
    fn pbe2_profile_prior_weighted_gaps_vanish() {
        let p = GameParams::calibrated().with_prior(0.995);
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        let g = deviation_gaps(&sol.profile(), &p, &UtilitySpec::Linear, DEFAULT_GRID_N)
            .unwrap()
            .prior_weighted;
        assert_eq!(
            (g.ph_secure_gap, g.ph_nonsecure_gap, g.insurer_gap),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn pbe3_prior_weighted_gaps_vanish_true_measure_reported() {
        let p = mixed_params();
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        let r = deviation_gaps(&sol.profile(), &p, &UtilitySpec::Linear, DEFAULT_GRID_N).unwrap();
        assert!(r.prior_weighted.insurer_gap <= 1e-9);
        assert!(r.prior_weighted.ph_nonsecure_gap <= 1e-9 * 1e6);
        assert_eq!(r.prior_weighted.ph_secure_gap, 0.0);
        assert!(r.true_measure.insurer_gap >= 0.0);
    }

    #[test]
    fn residuals_vanish_and_respond_linearly() {
        let p = mixed_params();
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        let r = indifference_residuals(&sol, &p, &UtilitySpec::Linear).unwrap();
        assert!(r.ph.abs() <= 1e-9);
        assert!(r.insurer.abs() <= 1e-9);

        let mut bumped = sol.clone();
        bumped.theta = Some(sol.theta.unwrap() + 0.01);
        let r = indifference_residuals(&bumped, &p, &UtilitySpec::Linear).unwrap();
        assert!((r.ph - -25.5).abs() < 1e-6);

        let mut bumped = sol.clone();
        bumped.delta = Some(sol.delta.unwrap() + 0.01);
        let r = indifference_residuals(&bumped, &p, &UtilitySpec::Linear).unwrap();
        assert!((r.insurer - 1190.0).abs() < 1e-6);
    }

    #[test]
    fn residuals_reject_pure_solutions() {
        let p = GameParams::calibrated().with_prior(0.995);
        let sol = solve_pbe(&p, &UtilitySpec::Linear).unwrap();
        assert_eq!(
            indifference_residuals(&sol, &p, &UtilitySpec::Linear),
            Err(OracleError::WrongRegion(Region::Pbe2))
        );
    }

    #[test]
    fn tiny_grid_rejected() {
        let p = GameParams::calibrated();
        assert_eq!(
            deviation_gaps(&profile(1.0, 1.0, 0.0, 0.0), &p, &UtilitySpec::Linear, 1),
            Err(OracleError::GridTooSmall(1))
        );
    }

    #[test]
    fn never_audit_optimal_when_loss_below_audit_cost() {
        let p = GameParams::calibrated()
            .with_loss(Money::dollars(4000))
            .with_prior(0.4);
        for qs in [0.0, 0.3, 1.0] {
            for qn in [0.0, 0.5, 1.0] {
                let r = deviation_gaps(
                    &profile(qs, qn, 0.0, 0.0),
                    &p,
                    &UtilitySpec::Linear,
                    DEFAULT_GRID_N,
                )
                .unwrap();
                assert_eq!(r.true_measure.insurer_gap, 0.0);
                assert_eq!(r.true_measure.insurer_best, InsurerStrategy::new(0.0, 0.0));
            }
        }
    }

    fn probability() -> impl Strategy<Value = f64> {
        0.0f64..=1.0
    }

    proptest! {
        #[test]
        fn auditing_no_claims_wastes_exactly_a(
            qs in probability(), qn in probability(), acd in probability(),
            lo in probability(), hi in probability(), phi in probability(),
        ) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let p = GameParams::calibrated().with_prior(phi);
            let u = UtilitySpec::Linear;
            let low = expected_payoffs(&profile(qs, qn, acd, lo), &p, &u).unwrap().insurer;
            let high = expected_payoffs(&profile(qs, qn, acd, hi), &p, &u).unwrap().insurer;
            let nc_breach = phi * (1.0 - qs) * p.breach_prob_invested + (1.0 - phi) * (1.0 - qn) * p.breach_prob;
            let expected = -(hi - lo) * p.audit_cost.as_f64() * nc_breach;
            prop_assert!((high - low - expected).abs() <= 1e-9);
        }

        #[test]
        fn insurer_value_non_increasing_in_audit_cost(
            qs in probability(), qn in probability(), acd in probability(), anc in probability(),
            a1 in 0i64..150_000, a2 in 0i64..150_000,
        ) {
            let (a1, a2) = (a1.min(a2), a1.max(a2));
            let u = UtilitySpec::Linear;
            let pr = profile(qs, qn, acd, anc);
            let v = |a| expected_payoffs(&pr, &GameParams::calibrated().with_audit_cost(Money::dollars(a)), &u).unwrap().insurer;
            if acd == 0.0 && anc == 0.0 {
                prop_assert_eq!(v(a1), v(a2));
            } else {
                prop_assert!(v(a2) <= v(a1) + 1e-9);
            }
        }
    }
}
