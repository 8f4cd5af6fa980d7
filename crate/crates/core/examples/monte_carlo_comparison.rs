//! Compare the seven audit policies against the equilibrium policyholder,
//! and check each mean against its exact expectation.
//!
//!     cargo run --release --example monte_carlo_comparison [REPS]

use ciag::montecarlo::{insurer_strategy_for, run_simulation, SimulationConfig};
use ciag::oracle::{expected_insurer_payoff, StrategyProfile};
use ciag::params::GameParams;
use ciag::report::render_simulation;

fn main() {
    let reps = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("REPS must be an integer"))
        .unwrap_or(200_000);
    let base = GameParams::calibrated().with_prior(0.3);
    let params = base.with_discount(base.premium.percent(25.0));
    let config = SimulationConfig::new(params).with_repetitions(reps);
    let summary = run_simulation(&config).expect("valid config");
    print!("{}", render_simulation(&summary));

    println!("\n{:<10} {:>12} {:>8}", "model", "exact", "z");
    for m in &summary.models {
        let profile = StrategyProfile::new(
            summary.solution.ph_strategy,
            insurer_strategy_for(m.model, &summary.solution),
        );
        let exact = expected_insurer_payoff(&profile, &params);
        let z = (m.mean_insurer_payoff - exact) / m.std_error;
        println!("{:<10} {:>12.2} {:>8.2}", m.model.label(), exact, z);
    }
}
