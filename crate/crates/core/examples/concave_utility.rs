//! How risk aversion moves the mixed equilibrium: the deterrence audit rate
//! θ depends on the utility curve, δ does not.
//!
//!     cargo run --example concave_utility

use ciag::equilibrium::solve_pbe;
use ciag::params::GameParams;
use ciag::utility::UtilitySpec;

fn main() {
    let base = GameParams::calibrated().with_prior(0.3);
    let params = base.with_discount(base.premium.percent(25.0));
    let specs = [
        "linear",
        "log:0",
        "cara:0.000002",
        "cara:0.00001",
        "power:0.5",
        "power:0.2",
    ];
    println!(
        "{:<16} {:>8} {:>10} {:>10}",
        "utility", "region", "theta", "delta"
    );
    for spec in specs {
        let u: UtilitySpec = spec.parse().expect("known family");
        match solve_pbe(&params, &u) {
            Ok(sol) => println!(
                "{:<16} {:>8} {:>10.6} {:>10.6}",
                u.to_string(),
                sol.region,
                sol.theta.unwrap_or(f64::NAN),
                sol.delta.unwrap_or(f64::NAN)
            ),
            Err(e) => println!("{:<16} {e}", u.to_string()),
        }
    }
}
