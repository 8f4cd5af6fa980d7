//! Parse a scenario document, layer an override on the preset, and run it.
//!
//!     cargo run --example scenario_file

use ciag::montecarlo::run_simulation;
use ciag::report::write_simulation_csv;
use ciag::scenario::{parse_layers, parse_scenario, ScenarioError, CALIBRATED};

const OVERRIDE: &str = "\
# an insurer facing a more sceptical market
discount_pct: 25
effectiveness_pct: 80
prior: 0.3
repetitions: 10000
models: GT, NA/NA, A/NA
";

fn main() {
    let sc = parse_layers(&[CALIBRATED, OVERRIDE]).expect("valid scenario");
    println!(
        "discount = {}, β* = {}",
        sc.params.discount, sc.params.breach_prob_invested
    );
    let summary = run_simulation(&sc.simulation_config()).expect("simulates");
    write_simulation_csv(std::io::stdout(), &summary).expect("stdout");

    // errors carry the line and key
    match parse_scenario("loss: 170000\nbogus: 1\n") {
        Err(ScenarioError::Parse { line, key, message }) => {
            println!("\nrejected line {line} ({key:?}): {message}")
        }
        other => println!("unexpected: {other:?}"),
    }
}
