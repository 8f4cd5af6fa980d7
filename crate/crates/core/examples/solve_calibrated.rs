//! Classify the calibrated scenario at a few priors.
//!
//!     cargo run --example solve_calibrated

use ciag::equilibrium::{audit_threshold, solve_pbe};
use ciag::params::GameParams;
use ciag::utility::UtilitySpec;

fn main() {
    let base = GameParams::calibrated();
    println!("audit threshold φ* = {:.6}\n", audit_threshold(&base));
    for prior in [0.3, 0.5, 0.995] {
        let sol = solve_pbe(&base.with_prior(prior), &UtilitySpec::Linear)
            .expect("calibrated params solve");
        println!("φ = {prior}");
        println!("{sol}");
    }
}
