//! Monotone predicates and minimal-set extraction.

mod algorithms;
mod predicate;

pub use algorithms::{
    exhaustive_minimal, extract_minimal, verify_minimal, Algorithm, ExtractOptions, MinimalSetResult,
};
pub use predicate::{
    make_form_b, make_form_l, make_form_p, ElementLits, FnPredicate, Form, Predicate,
    PredicateBuilder, PredicateInstance, Probe,
};

use thiserror::Error;

use crate::oracle::OracleError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("ill-posed instance: the predicate does not hold on the full reference set")]
    IllPosed,
    #[error("engine contract violated: {0}")]
    Internal(String),
}
