//! Pass/fail verification of a solved equilibrium against the oracles.

use std::fmt;

use crate::equilibrium::{
    cd_infoset_insurer_payoffs, prior_weighted_cd_belief, solve_pbe, PbeSolution, SolveError,
};
use crate::oracle::{deviation_gaps, indifference_residuals, OracleError};
use crate::params::GameParams;
use crate::utility::{UtilityError, UtilitySpec};

/// Absolute tolerance on dollar quantities.
pub const MONEY_TOL: f64 = 1e-9;

/// Tolerance on utility quantities: `1e-9 · max(1, |U(W)|)`.
pub fn utility_tolerance(params: &GameParams, u: &UtilitySpec) -> Result<f64, UtilityError> {
    Ok(1e-9 * u.eval(params.wealth.as_f64())?.abs().max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported for context only; never fails verification.
    Info,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl Check {
    fn bound(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            status: if value.abs() <= tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
        }
    }

    fn info(name: &str, value: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance: f64::NAN,
            status: CheckStatus::Info,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            CheckStatus::Info => write!(f, "INFO {}: {:e}", self.name, self.value),
            s => write!(
                f,
                "{} {}: {:e} (tol {:e})",
                if s == CheckStatus::Pass {
                    "PASS"
                } else {
                    "FAIL"
                },
                self.name,
                self.value,
                self.tolerance
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub solution: PbeSolution,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

/// Solves the game and checks the result:
///
/// * best-response gaps under the prior-weighted accounting,
/// * that investors always claim and a no-claim breach is never audited,
/// * that the prescribed audit rate maximises the insurer's payoff at the
///   claim information set, at the prior-weighted belief,
/// * the indifference equations, for the mixed equilibrium.
///
/// True-measure insurer gaps are reported as `Info`.
pub fn verify(
    params: &GameParams,
    u: &UtilitySpec,
    grid_n: usize,
) -> Result<Verification, VerifyError> {
    let solution = solve_pbe(params, u)?;
    let utol = utility_tolerance(params, u)?;
    let gaps = deviation_gaps(&solution.profile(), params, u, grid_n)?;
    let pw = gaps.prior_weighted;

    let mut checks = vec![
        Check::bound("investor deviation gap", pw.ph_secure_gap, utol),
        Check::bound("non-investor deviation gap", pw.ph_nonsecure_gap, utol),
        Check::bound(
            "insurer deviation gap (prior-weighted)",
            pw.insurer_gap,
            MONEY_TOL,
        ),
        Check::bound(
            "investor claim probability - 1",
            solution.ph_strategy.claim_prob_secure - 1.0,
            0.0,
        ),
        Check::bound(
            "audit probability after no claim",
            solution.ins_strategy.audit_prob_given_nc,
            0.0,
        ),
    ];

    let belief = prior_weighted_cd_belief(params.prior, &solution.ph_strategy);
    let cd = cd_infoset_insurer_payoffs(belief, params);
    let theta = solution.ins_strategy.audit_prob_given_cd;
    let prescribed = theta * cd.audit + (1.0 - theta) * cd.no_audit;
    checks.push(Check::bound(
        "claim infoset argmax shortfall",
        cd.audit.max(cd.no_audit) - prescribed,
        MONEY_TOL,
    ));

    if solution.region.is_mixed() {
        let r = indifference_residuals(&solution, params, u)?;
        checks.push(Check::bound(
            "non-investor indifference residual",
            r.ph,
            utol,
        ));
        checks.push(Check::bound(
            "insurer indifference residual",
            r.insurer,
            MONEY_TOL,
        ));
    }

    checks.push(Check::info(
        "insurer deviation gap (true measure)",
        gaps.true_measure.insurer_gap,
    ));
    Ok(Verification { solution, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::Money;

    #[test]
    fn every_region_verifies() {
        let base = GameParams::calibrated();
        let undeterrable = base
            .with_discount(Money::dollars(3000))
            .with_loss(Money::dollars(2900))
            .with_audit_cost(Money::dollars(100));
        let cases = [
            base.with_loss(Money::dollars(4000)),
            base.with_prior(0.99),
            base.with_prior(0.3),
            undeterrable.with_prior(0.99),
            undeterrable,
        ];
        let mut regions = Vec::new();
        for p in cases {
            let v = verify(&p, &UtilitySpec::Linear, 101).unwrap();
            assert!(v.passed(), "{:?}\n{:#?}", v.solution.region, v.checks);
            regions.push(v.solution.region.as_str());
        }
        assert_eq!(regions, ["PBE1", "PBE2", "PBE3", "PBE4", "PBE5"]);
    }

    #[test]
    fn mixed_region_reports_residuals() {
        let v = verify(
            &GameParams::calibrated().with_prior(0.3),
            &UtilitySpec::Linear,
            11,
        )
        .unwrap();
        assert!(v.checks.iter().any(|c| c.name.contains("indifference")));
        assert!(v.checks.iter().any(|c| c.status == CheckStatus::Info));
    }

    #[test]
    fn any_failed_check_fails_verification() {
        let mut v = verify(&GameParams::calibrated(), &UtilitySpec::Linear, 11).unwrap();
        assert!(v.passed());
        v.checks.push(Check::bound("synthetic", 1.0, 0.5));
        assert!(!v.passed());
        assert!(v
            .checks
            .last()
            .unwrap()
            .to_string()
            .starts_with("FAIL synthetic"));
    }
}
