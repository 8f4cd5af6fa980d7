//! CSV and plain-text rendering of simulation and sweep results.
//!
//! Every float is written in Rust's shortest round-trip form, so parsing a
//! cell gives back the exact `f64` that was written.

use std::fmt::Write as _;
use std::io::Write;

use thiserror::Error;

use crate::equilibrium::PbeSolution;
use crate::montecarlo::{ModelSummary, SimulationSummary};
use crate::sweep::{GtAdvantage, SweepTable};

pub const COLUMNS: [&str; 14] = [
    "axis_value",
    "model",
    "mean_insurer_payoff",
    "std_error",
    "mean_ph_secure_utility",
    "mean_ph_nonsecure_utility",
    "claims",
    "breaches",
    "audits",
    "denials",
    "pbe_region",
    "theta",
    "delta",
    "phi_star",
];

pub const GT_ADVANTAGE_COLUMNS: [&str; 5] = [
    "axis_value",
    "gt_minus_never_audit",
    "std_error",
    "premium",
    "in_premiums",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn model_record(axis_value: Option<f64>, sol: &PbeSolution, m: &ModelSummary) -> [String; 14] {
    [
        opt(axis_value),
        m.model.label().to_string(),
        m.mean_insurer_payoff.to_string(),
        m.std_error.to_string(),
        opt(m.mean_ph_secure_utility),
        opt(m.mean_ph_nonsecure_utility),
        m.counts.claims.to_string(),
        m.counts.breaches.to_string(),
        m.counts.audits.to_string(),
        m.counts.denials.to_string(),
        sol.region.to_string(),
        opt(sol.theta),
        opt(sol.delta),
        sol.phi_star.to_string(),
    ]
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// One row per model, with an empty `axis_value`.
pub fn write_simulation_csv<W: Write>(
    w: W,
    summary: &SimulationSummary,
) -> Result<(), ReportError> {
    let mut out = writer(w);
    out.write_record(COLUMNS)?;
    for m in &summary.models {
        out.write_record(model_record(None, &summary.solution, m))?;
    }
    out.flush()?;
    Ok(())
}

/// One row per (axis value, model). Failed points keep their rows with empty
/// numeric cells and the error in `pbe_region`.
pub fn write_sweep_csv<W: Write>(w: W, table: &SweepTable) -> Result<(), ReportError> {
    let mut out = writer(w);
    out.write_record(COLUMNS)?;
    for row in table.rows() {
        match row.outcome {
            Ok((summary, m)) => {
                out.write_record(model_record(Some(row.axis_value), &summary.solution, m))?
            }
            Err(e) => {
                let mut rec: [String; 14] = Default::default();
                rec[0] = row.axis_value.to_string();
                rec[1] = row.model.label().to_string();
                rec[10] = format!("ERROR: {e}");
                out.write_record(rec)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_gt_advantage_csv<W: Write>(w: W, rows: &[GtAdvantage]) -> Result<(), ReportError> {
    let mut out = writer(w);
    out.write_record(GT_ADVANTAGE_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.axis_value.to_string(),
            r.difference.to_string(),
            r.std_error.to_string(),
            r.premium.to_string(),
            r.in_premiums.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub const SOLUTION_COLUMNS: [&str; 10] = [
    "pbe_region",
    "claim_prob_secure",
    "claim_prob_nonsecure",
    "audit_prob_given_cd",
    "audit_prob_given_nc",
    "mu",
    "lambda",
    "phi_star",
    "theta",
    "delta",
];

/// A single row describing an equilibrium. Off-path beliefs are empty.
pub fn write_solution_csv<W: Write>(w: W, sol: &PbeSolution) -> Result<(), ReportError> {
    let mut out = writer(w);
    out.write_record(SOLUTION_COLUMNS)?;
    out.write_record([
        sol.region.to_string(),
        sol.ph_strategy.claim_prob_secure.to_string(),
        sol.ph_strategy.claim_prob_nonsecure.to_string(),
        sol.ins_strategy.audit_prob_given_cd.to_string(),
        sol.ins_strategy.audit_prob_given_nc.to_string(),
        opt(sol.beliefs.mu.value()),
        opt(sol.beliefs.lambda.value()),
        sol.phi_star.to_string(),
        opt(sol.theta),
        opt(sol.delta),
    ])?;
    out.flush()?;
    Ok(())
}

/// Aligned text table of a sweep followed by the GT advantage at each point.
pub fn render_sweep(table: &SweepTable) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>14} {:<10} {:>16} {:>12} {:>6}",
        table.axis_label, "model", "mean payoff", "std err", "region"
    );
    for row in table.rows() {
        match row.outcome {
            Ok((summary, m)) => {
                let _ = writeln!(
                    s,
                    "{:>14} {:<10} {:>16.2} {:>12.2} {:>6}",
                    row.axis_value,
                    m.model.label(),
                    m.mean_insurer_payoff,
                    m.std_error,
                    summary.solution.region
                );
            }
            Err(e) => {
                let _ = writeln!(
                    s,
                    "{:>14} {:<10} error: {e}",
                    row.axis_value,
                    row.model.label()
                );
            }
        }
    }
    let adv = table.gt_advantage();
    if !adv.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>14} {:>16} {:>12} {:>12}",
            table.axis_label, "GT - NA/NA", "std err", "premiums"
        );
        for r in adv {
            let _ = writeln!(
                s,
                "{:>14} {:>16.2} {:>12.2} {:>12.4}",
                r.axis_value, r.difference, r.std_error, r.in_premiums
            );
        }
    }
    s
}

/// Aligned text table of a simulation, for terminals.
pub fn render_simulation(summary: &SimulationSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} repetitions, seed {}, common random numbers {}",
        summary.repetitions,
        summary.master_seed,
        if summary.common_random_numbers {
            "on"
        } else {
            "off"
        }
    );
    let _ = write!(s, "{}", summary.solution);
    let _ = writeln!(
        s,
        "{:<10} {:>16} {:>12} {:>8} {:>8} {:>8} {:>8}",
        "model", "mean payoff", "std err", "claims", "breaches", "audits", "denials"
    );
    for m in &summary.models {
        let _ = writeln!(
            s,
            "{:<10} {:>16.2} {:>12.2} {:>8} {:>8} {:>8} {:>8}",
            m.model.label(),
            m.mean_insurer_payoff,
            m.std_error,
            m.counts.claims,
            m.counts.breaches,
            m.counts.audits,
            m.counts.denials
        );
    }
    s
}
