//! Sequential counter encoding of `Σ lits ≥ k`.

use crate::formula::{Lit, Var};

/// Counter outputs over a literal list: `outputs[j-1]` implies that at least
/// `j` of the literals are true. Only the implication direction is encoded,
/// which is all that asserting lower bounds needs.
#[derive(Debug, Clone, Default)]
pub struct SequentialCounter {
    pub clauses: Vec<Vec<Lit>>,
    pub outputs: Vec<Lit>,
}

impl SequentialCounter {
    /// Builds counter registers for bounds `1..=min(max_bound, lits.len())`.
    pub fn build(lits: &[Lit], max_bound: usize, fresh: &mut dyn FnMut() -> Var) -> Self {
        let n = lits.len();
        let k = max_bound.min(n);
        let mut clauses = Vec::new();
        if k == 0 {
            return SequentialCounter::default();
        }
        // prev[j-1] = s_{i-1,j}
        let mut prev: Vec<Lit> = Vec::new();
        for (i, &p) in lits.iter().enumerate() {
            let i = i + 1;
            let width = i.min(k);
            let mut cur = Vec::with_capacity(width);
            for j in 1..=width {
                let s = fresh().pos();
                if i == 1 {
                    clauses.push(vec![!s, p]);
                } else if j == 1 {
                    clauses.push(vec![!s, prev[0], p]);
                } else if j < i {
                    clauses.push(vec![!s, prev[j - 1], p]);
                    clauses.push(vec![!s, prev[j - 1], prev[j - 2]]);
                } else {
                    clauses.push(vec![!s, p]);
                    clauses.push(vec![!s, prev[j - 2]]);
                }
                cur.push(s);
            }
            prev = cur;
        }
        SequentialCounter {
            clauses,
            outputs: prev,
        }
    }

    /// The literal asserting `Σ ≥ bound`, if `1 ≤ bound ≤` the built width.
    pub fn at_least(&self, bound: usize) -> Option<Lit> {
        bound.checked_sub(1).and_then(|i| self.outputs.get(i)).copied()
    }
}

/// Clauses whose models, projected onto `lits`, are exactly the assignments
/// with at least `bound` true literals. `bound > lits.len()` yields the empty
/// clause.
pub fn encode_geq(lits: &[Lit], bound: usize, fresh: &mut dyn FnMut() -> Var) -> Vec<Vec<Lit>> {
    if bound == 0 {
        return Vec::new();
    }
    if bound > lits.len() {
        return vec![Vec::new()];
    }
    let counter = SequentialCounter::build(lits, bound, fresh);
    let mut clauses = counter.clauses;
    clauses.push(vec![counter.outputs[bound - 1]]);
    clauses
}
