//! Equilibrium solver and Monte Carlo simulator for the cyber insurance audit
//! game: a policyholder who may or may not have invested in security decides
//! whether to claim a premium discount, and after a breach the insurer decides
//! whether to audit the claim.

pub mod cli;
pub mod equilibrium;
pub mod game;
pub mod money;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod sweep;
pub mod utility;
pub mod verify;
