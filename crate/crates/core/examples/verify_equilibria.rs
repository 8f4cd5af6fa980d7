//! Run the oracle checks on one scenario in every equilibrium region.
//!
//!     cargo run --example verify_equilibria

use ciag::money::Money;
use ciag::params::GameParams;
use ciag::utility::UtilitySpec;
use ciag::verify::verify;

fn main() {
    let base = GameParams::calibrated();
    // l < d is only possible with a small loss, so shrink the audit cost too
    let undeterrable = base
        .with_discount(Money::dollars(3000))
        .with_loss(Money::dollars(2900))
        .with_audit_cost(Money::dollars(100));
    let cases = [
        (
            "audit costs more than the loss",
            base.with_loss(Money::dollars(4000)),
        ),
        ("confident prior", base.with_prior(0.995)),
        ("mixed", base.with_prior(0.3)),
        (
            "discount above loss, confident",
            undeterrable.with_prior(0.99),
        ),
        ("discount above loss", undeterrable),
    ];
    for (label, params) in cases {
        let v = verify(&params, &UtilitySpec::Linear, 101).expect("solvable");
        println!("== {label}: {}", v.solution.region);
        for check in &v.checks {
            println!("  {check}");
        }
    }
}
