//! Boolean function problems (MUS, MCS, backbones, prime implicants,
//! autarkies, minimal models and more) reduced to computing a minimal set
//! over a monotone predicate, decided with an incremental SAT oracle.

pub mod bench;
pub mod cardenc;
pub mod clausify;
pub mod engine;
pub mod formula;
pub mod io;
pub mod oracle;
pub mod reductions;
pub mod verifier;
