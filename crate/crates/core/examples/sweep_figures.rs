//! Write the four figure-style sweep tables as CSV.
//!
//!     cargo run --release --example sweep_figures [OUT_DIR]
//!
//! Each table gets a `*_gt_advantage.csv` companion with the game-theoretic
//! minus never-audit payoff, also expressed in annual premiums.

use std::fs::{self, File};
use std::path::PathBuf;

use ciag::montecarlo::SimulationConfig;
use ciag::params::GameParams;
use ciag::report::{write_gt_advantage_csv, write_sweep_csv};
use ciag::sweep::{linspace, sweep, SweepAxis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    fs::create_dir_all(&dir)?;

    let base = GameParams::calibrated().with_prior(0.3);
    let deep_discount = base.with_discount(base.premium.percent(25.0));
    let premium = base.premium.as_f64();

    let tables = [
        (
            "repetitions",
            SimulationConfig::new(base),
            SweepAxis::Repetitions,
            vec![100.0, 500.0, 1000.0, 1500.0],
        ),
        (
            "audit_cost",
            SimulationConfig::new(deep_discount),
            SweepAxis::AuditCost,
            linspace(5_000.0, 100_000.0, 20),
        ),
        (
            "discount",
            SimulationConfig::new(base),
            SweepAxis::Discount,
            linspace(0.0, 0.25 * premium, 11),
        ),
        (
            "loss",
            SimulationConfig::new(base),
            SweepAxis::Loss,
            linspace(1_000.0, 340_000.0, 35),
        ),
    ];
    for (name, config, axis, values) in tables {
        let table = sweep(&config.with_repetitions(20_000), axis, &values)?;
        let main = dir.join(format!("{name}.csv"));
        write_sweep_csv(File::create(&main)?, &table)?;
        write_gt_advantage_csv(
            File::create(dir.join(format!("{name}_gt_advantage.csv")))?,
            &table.gt_advantage(),
        )?;
        let failed = table.points.iter().filter(|p| p.result.is_err()).count();
        println!(
            "{} ({} points, {failed} without an equilibrium)",
            main.display(),
            values.len()
        );
    }
    Ok(())
}
