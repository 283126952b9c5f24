//! Sampled monotonicity checks and hitting-set duality.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{EngineError, Predicate};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotoneReport {
    pub samples: usize,
    pub violations: usize,
    /// First `(W0, W1)` found with `W0 ⊆ W1`, `P(W0)` and `¬P(W1)`.
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
    /// Distinct subsets actually tested.
    pub tests: usize,
}

/// Samples `samples` chains `W0 ⊆ W1 ⊆ R` and counts monotonicity
/// violations. Each distinct subset is tested once.
pub fn check_monotone(pred: &mut dyn Predicate, samples: usize, seed: u64) -> Result<MonotoneReport, EngineError> {
    let n = pred.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut report = MonotoneReport {
        samples,
        ..Default::default()
    };
    if n == 0 {
        return Ok(report);
    }
    let mut eval = |w: Vec<usize>, pred: &mut dyn Predicate| -> Result<bool, EngineError> {
        if let Some(&v) = memo.get(&w) {
            return Ok(v);
        }
        let v = pred.test(&w)?.holds;
        memo.insert(w, v);
        Ok(v)
    };
    for _ in 0..samples {
        let w1: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let w0: Vec<usize> = w1.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let p0 = eval(w0.clone(), pred)?;
        if p0 && !eval(w1.clone(), pred)? {
            report.violations += 1;
            report.counterexample.get_or_insert((w0, w1));
        }
    }
    report.tests = memo.len();
    Ok(report)
}

/// Whether every set in `b` is a minimal hitting set of the collection `a`.
pub fn minimal_hitting_sets(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let hits = |h: &[i64]| a.iter().all(|s| s.iter().any(|x| h.contains(x)));
    b.iter().all(|h| {
        hits(h)
            && h.iter().all(|x| {
                let smaller: Vec<i64> = h.iter().copied().filter(|y| y != x).collect();
                !hits(&smaller)
            })
    })
}
