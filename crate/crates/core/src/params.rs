//! Parameters of one audit-game instance and their validation.

use std::fmt;

use crate::money::Money;

/// Monetary and probability parameters of the audit game.
///
/// Amounts are in US dollars (held as cents). Wealth and premium are the
/// exogenous contract terms; everything else drives the leaf payoffs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameParams {
    /// Insurer's cost of one forensic audit (`a`).
    pub audit_cost: Money,
    /// Policyholder's security investment (`c`).
    pub investment_cost: Money,
    /// Premium discount granted for declared security (`d`).
    pub discount: Money,
    /// Loss suffered in a breach, fully indemnified unless denied (`l`).
    pub loss: Money,
    /// Annual premium (`p`).
    pub premium: Money,
    /// Policyholder's initial wealth (`W`).
    pub wealth: Money,
    /// Breach probability without the investment (`β`).
    pub breach_prob: f64,
    /// Breach probability with the investment (`β*`).
    pub breach_prob_invested: f64,
    /// Prior probability that the policyholder invested (`φ`).
    pub prior: f64,
}

impl GameParams {
    /// Calibrated values: median breach loss $170k at frequency 0.015, a $2,960
    /// firewall cutting breach probability by 80%, a $3,630 premium with a 5%
    /// discount and the cheapest audit quote of $5k. Wealth and prior are
    /// free choices ($1M coverage limit, uninformative prior).
    pub fn calibrated() -> Self {
        GameParams {
            audit_cost: Money::dollars(5_000),
            investment_cost: Money::dollars(2_960),
            discount: Money::from_cents(18_150),
            loss: Money::dollars(170_000),
            premium: Money::dollars(3_630),
            wealth: Money::dollars(1_000_000),
            breach_prob: 0.015,
            breach_prob_invested: 0.003,
            prior: 0.5,
        }
    }

    pub fn with_audit_cost(mut self, a: Money) -> Self {
        self.audit_cost = a;
        self
    }

    pub fn with_discount(mut self, d: Money) -> Self {
        self.discount = d;
        self
    }

    pub fn with_loss(mut self, l: Money) -> Self {
        self.loss = l;
        self
    }

    pub fn with_prior(mut self, phi: f64) -> Self {
        self.prior = phi;
        self
    }

    pub fn with_breach_probs(mut self, beta: f64, beta_invested: f64) -> Self {
        self.breach_prob = beta;
        self.breach_prob_invested = beta_invested;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }
}

/// One broken assumption about a [`GameParams`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    WealthNotAbovePremium {
        wealth: Money,
        premium: Money,
    },
    PremiumNotAboveDiscount {
        premium: Money,
        discount: Money,
    },
    InvestmentUnaffordable {
        net_wealth: Money,
        investment_cost: Money,
    },
    InvestedBreachAboveBase {
        breach_prob: f64,
        breach_prob_invested: f64,
    },
    NonPositive {
        field: &'static str,
        value: Money,
    },
    Negative {
        field: &'static str,
        value: Money,
    },
    ProbabilityOutOfRange {
        field: &'static str,
        value: f64,
    },
}

impl Violation {
    /// Parameter names involved in the violation.
    pub fn fields(&self) -> Vec<&'static str> {
        match self {
            Violation::WealthNotAbovePremium { .. } => vec!["wealth", "premium"],
            Violation::PremiumNotAboveDiscount { .. } => vec!["premium", "discount"],
            Violation::InvestmentUnaffordable { .. } => {
                vec!["wealth", "premium", "discount", "investment_cost"]
            }
            Violation::InvestedBreachAboveBase { .. } => {
                vec!["breach_prob", "breach_prob_invested"]
            }
            Violation::NonPositive { field, .. }
            | Violation::Negative { field, .. }
            | Violation::ProbabilityOutOfRange { field, .. } => vec![field],
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WealthNotAbovePremium { wealth, premium } => {
                write!(f, "W > p violated: wealth {wealth} <= premium {premium}")
            }
            Violation::PremiumNotAboveDiscount { premium, discount } => {
                write!(f, "p > d violated: premium {premium} <= discount {discount}")
            }
            Violation::InvestmentUnaffordable {
                net_wealth,
                investment_cost,
            } => write!(
                f,
                "W - p + d > c violated: {net_wealth} <= investment_cost {investment_cost}"
            ),
            Violation::InvestedBreachAboveBase {
                breach_prob,
                breach_prob_invested,
            } => write!(
                f,
                "β* ≤ β violated: breach_prob_invested {breach_prob_invested} > breach_prob {breach_prob}"
            ),
            Violation::NonPositive { field, value } => write!(f, "{field} must be > 0, got {value}"),
            Violation::Negative { field, value } => write!(f, "{field} must be >= 0, got {value}"),
            Violation::ProbabilityOutOfRange { field, value } => {
                write!(f, "{field} must be a probability in [0, 1], got {value}")
            }
        }
    }
}

/// Every violated assumption, in a fixed order. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.fields().contains(&field))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("; "))
    }
}

pub fn validate_params(params: &GameParams) -> ValidationReport {
    let mut violations = Vec::new();

    for (field, value) in [("loss", params.loss), ("premium", params.premium)] {
        if value <= Money::ZERO {
            violations.push(Violation::NonPositive { field, value });
        }
    }
    for (field, value) in [
        ("audit_cost", params.audit_cost),
        ("investment_cost", params.investment_cost),
        ("discount", params.discount),
    ] {
        if value.is_negative() {
            violations.push(Violation::Negative { field, value });
        }
    }

    if params.wealth <= params.premium {
        violations.push(Violation::WealthNotAbovePremium {
            wealth: params.wealth,
            premium: params.premium,
        });
    }
    if params.premium <= params.discount {
        violations.push(Violation::PremiumNotAboveDiscount {
            premium: params.premium,
            discount: params.discount,
        });
    }
    let net_wealth = params.wealth - params.premium + params.discount;
    if net_wealth <= params.investment_cost {
        violations.push(Violation::InvestmentUnaffordable {
            net_wealth,
            investment_cost: params.investment_cost,
        });
    }

    let mut probs_ok = true;
    for (field, value) in [
        ("breach_prob", params.breach_prob),
        ("breach_prob_invested", params.breach_prob_invested),
        ("prior", params.prior),
    ] {
        if !(0.0..=1.0).contains(&value) {
            probs_ok = false;
            violations.push(Violation::ProbabilityOutOfRange { field, value });
        }
    }
    if probs_ok && params.breach_prob_invested > params.breach_prob {
        violations.push(Violation::InvestedBreachAboveBase {
            breach_prob: params.breach_prob,
            breach_prob_invested: params.breach_prob_invested,
        });
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibrated_is_valid() {
        let report = validate_params(&GameParams::calibrated());
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn low_wealth_violates_w_above_p() {
        let params = GameParams {
            wealth: Money::dollars(1000),
            ..GameParams::calibrated()
        };
        let report = validate_params(&params);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("W > p")));
        assert!(report.mentions("wealth"));
    }

    #[test]
    fn invested_breach_above_base() {
        let params = GameParams::calibrated().with_breach_probs(0.015, 0.02);
        let report = validate_params(&params);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].to_string().starts_with("β* ≤ β"));
    }

    #[test]
    fn reports_every_violation() {
        let params = GameParams {
            loss: Money::ZERO,
            audit_cost: Money::dollars(-1),
            prior: 1.5,
            discount: Money::dollars(4000),
            ..GameParams::calibrated()
        };
        let report = validate_params(&params);
        assert!(report.mentions("loss"));
        assert!(report.mentions("audit_cost"));
        assert!(report.mentions("prior"));
        assert!(report.mentions("discount"));
        assert_eq!(report.violations.len(), 4);
    }

    #[test]
    fn unaffordable_investment() {
        let params = GameParams {
            wealth: Money::dollars(5000),
            investment_cost: Money::dollars(2000),
            ..GameParams::calibrated()
        };
        let report = validate_params(&params);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::InvestmentUnaffordable { .. }]
        ));
    }
}
