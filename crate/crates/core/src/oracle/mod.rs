//! Incremental SAT oracles returning `(status, witness)` pairs.

mod cdcl;
mod external;

pub use cdcl::Solver;
pub use external::ExternalSolver;

use thiserror::Error;

use crate::formula::{Assignment, Lit};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("failed to run solver `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error while talking to the solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("unusable solver output ({reason}); captured output:\n{output}")]
    BadOutput { reason: String, output: String },
}

/// Result of one oracle call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Satisfiable, with a model total over the variables loaded so far.
    Sat(Assignment),
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SolveOutcome::Sat(m) => Some(m),
            SolveOutcome::Unsat => None,
        }
    }

    pub fn into_model(self) -> Option<Assignment> {
        match self {
            SolveOutcome::Sat(m) => Some(m),
            SolveOutcome::Unsat => None,
        }
    }
}

/// A clause database queried under transient assumptions.
pub trait Oracle: Send {
    /// Adds a clause permanently. Duplicate literals are tolerated.
    fn add_clause(&mut self, lits: &[Lit]);

    /// Makes sure variables `1..=n` exist even if no clause mentions them.
    fn reserve_vars(&mut self, n: u32);

    /// Decides the loaded clauses conjoined with `assumptions`. Each call
    /// counts once, including calls with inconsistent assumptions.
    fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveOutcome, OracleError>;

    fn num_vars(&self) -> u32;

    /// Number of `solve` calls so far.
    fn calls(&self) -> u64;
}

/// Which oracle implementation to instantiate.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Internal,
    External { program: String, args: Vec<String> },
}

impl Backend {
    /// Parses `internal` or `exec:PATH [ARGS...]`.
    pub fn parse(value: &str) -> Option<Backend> {
        let value = value.trim();
        if value == "internal" {
            return Some(Backend::Internal);
        }
        let rest = value.strip_prefix("exec:")?;
        let mut parts = rest.split_whitespace().map(str::to_owned);
        let program = parts.next()?;
        Some(Backend::External {
            program,
            args: parts.collect(),
        })
    }

    pub fn create(&self) -> Box<dyn Oracle> {
        match self {
            Backend::Internal => Box::new(Solver::new()),
            Backend::External { program, args } => {
                Box::new(ExternalSolver::new(program.clone(), args.clone()))
            }
        }
    }
}

pub(crate) fn has_complementary_pair(lits: &[Lit]) -> bool {
    let mut v = lits.to_vec();
    v.sort_unstable();
    v.dedup();
    v.windows(2).any(|w| w[0].var() == w[1].var())
}
