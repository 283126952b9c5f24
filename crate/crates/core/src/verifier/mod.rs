//! Exhaustive oracles for small instances.

mod brute;
mod generator;
mod monotone;
mod tap;

pub use brute::{brute_solve, check_answer, compare, enumerate_models, BruteAnswer, BruteError, BruteForceBudget, CheckOutcome};
pub use generator::{base_cnf, instance_for, random_cnf, random_dnf, GeneratorParams};
pub use monotone::{check_monotone, minimal_hitting_sets, MonotoneReport};
pub use tap::TapReport;
