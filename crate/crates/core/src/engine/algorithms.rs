use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::Assignment;

use super::{EngineError, Predicate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Deletion,
    Insertion,
    Dichotomic,
    QuickXplain,
    Progression,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Deletion,
        Algorithm::Insertion,
        Algorithm::Dichotomic,
        Algorithm::QuickXplain,
        Algorithm::Progression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Deletion => "deletion",
            Algorithm::Insertion => "insertion",
            Algorithm::Dichotomic => "dichotomic",
            Algorithm::QuickXplain => "quickxplain",
            Algorithm::Progression => "progression",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    /// Test `P(R)` before extracting and fail with `IllPosed` if it is false.
    pub check_wellposed: bool,
    /// Element traversal order; index order when `None`.
    pub order: Option<Vec<usize>>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            check_wellposed: true,
            order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalSetResult {
    /// Element indices of the minimal set, ascending.
    pub set: Vec<usize>,
    /// For sat-defined predicates, a model of the final `P(M)` test. For
    /// unsat-defined ones, the model of the last failing probe (diagnostic).
    pub witness: Option<Assignment>,
    /// All predicate tests: probes, well-posedness check, confirmation.
    pub oracle_calls: u64,
    /// Tests made by the algorithm proper.
    pub probes: u64,
    pub wellposed_checked: bool,
    pub algorithm: Algorithm,
}

struct Tracker<'a> {
    pred: &'a mut dyn Predicate,
    probes: u64,
    last_true: Option<(Vec<usize>, Option<Assignment>)>,
    last_false: Option<Assignment>,
}

impl Tracker<'_> {
    fn test(&mut self, w: &[usize]) -> Result<bool, EngineError> {
        self.probes += 1;
        let probe = self.pred.test(w)?;
        if probe.holds {
            let mut key = w.to_vec();
            key.sort_unstable();
            self.last_true = Some((key, probe.witness));
        } else if probe.witness.is_some() {
            self.last_false = probe.witness;
        }
        Ok(probe.holds)
    }

    fn test_union(&mut self, parts: &[&[usize]]) -> Result<bool, EngineError> {
        let w: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        self.test(&w)
    }
}

fn deletion(t: &mut Tracker, order: &[usize]) -> Result<Vec<usize>, EngineError> {
    let mut w = order.to_vec();
    for &e in order {
        let candidate: Vec<usize> = w.iter().copied().filter(|&x| x != e).collect();
        if t.test(&candidate)? {
            w = candidate;
        }
    }
    Ok(w)
}

fn insertion(t: &mut Tracker, order: &[usize]) -> Result<Vec<usize>, EngineError> {
    let mut m = Vec::new();
    let mut c = order.to_vec();
    loop {
        // Smallest j with P(M ∪ C[..j]); j = |C| is known to hold.
        let mut j = c.len();
        for k in 0..c.len() {
            if t.test_union(&[&m, &c[..k]])? {
                j = k;
                break;
            }
        }
        if j == 0 {
            return Ok(m);
        }
        m.push(c[j - 1]);
        c.truncate(j - 1);
    }
}

/// Smallest `i` in `1..=d.len()` with `P(base ∪ d[..i])`, given that it holds
/// for `i = d.len()`.
fn bisect(t: &mut Tracker, base: &[&[usize]], d: &[usize]) -> Result<usize, EngineError> {
    let (mut lo, mut hi) = (1, d.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let mut parts = base.to_vec();
        parts.push(&d[..mid]);
        if t.test_union(&parts)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

fn dichotomic(t: &mut Tracker, order: &[usize]) -> Result<Vec<usize>, EngineError> {
    let mut m = Vec::new();
    let mut c = order.to_vec();
    while !c.is_empty() && !t.test(&m)? {
        let i = bisect(t, &[&m], &c)?;
        m.push(c[i - 1]);
        c.truncate(i - 1);
    }
    Ok(m)
}

fn quickxplain(t: &mut Tracker, order: &[usize]) -> Result<Vec<usize>, EngineError> {
    fn qx(t: &mut Tracker, b: &[usize], delta: bool, c: &[usize]) -> Result<Vec<usize>, EngineError> {
        if delta && t.test(b)? {
            return Ok(Vec::new());
        }
        if c.len() == 1 {
            return Ok(c.to_vec());
        }
        let (c1, c2) = c.split_at(c.len() / 2);
        let b1: Vec<usize> = b.iter().chain(c1).copied().collect();
        let d2 = qx(t, &b1, true, c2)?;
        let b2: Vec<usize> = b.iter().chain(&d2).copied().collect();
        let mut d1 = qx(t, &b2, !d2.is_empty(), c1)?;
        d1.extend(d2);
        Ok(d1)
    }
    if order.is_empty() {
        return Ok(Vec::new());
    }
    qx(t, &[], true, order)
}

fn progression(t: &mut Tracker, order: &[usize]) -> Result<Vec<usize>, EngineError> {
    let mut m: Vec<usize> = Vec::new();
    let mut w = order.to_vec();
    let mut k = 1usize;
    while !w.is_empty() {
        let split = k.min(w.len());
        let (d, rest) = w.split_at(split);
        if t.test_union(&[&m, rest])? {
            w = rest.to_vec();
            k *= 2;
            continue;
        }
        let i = bisect(t, &[&m, rest], d)?;
        m.push(d[i - 1]);
        let mut next = d[..i - 1].to_vec();
        next.extend_from_slice(rest);
        w = next;
        k = 1;
    }
    Ok(m)
}

/// Extracts a subset-minimal `M` with `P(M)`.
pub fn extract_minimal(
    pred: &mut dyn Predicate,
    alg: Algorithm,
    opts: &ExtractOptions,
) -> Result<MinimalSetResult, EngineError> {
    let n = pred.len();
    let order: Vec<usize> = match &opts.order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(EngineError::Internal(
                    "traversal order is not a permutation of the reference set".into(),
                ));
            }
            o.clone()
        }
        None => (0..n).collect(),
    };
    let needs_witness = pred.needs_witness();
    let mut t = Tracker {
        pred,
        probes: 0,
        last_true: None,
        last_false: None,
    };
    let mut extra = 0;
    if opts.check_wellposed {
        extra += 1;
        if !t.test(&order)? {
            return Err(EngineError::IllPosed);
        }
        t.probes = 0;
    }
    let mut set = match alg {
        Algorithm::Deletion => deletion(&mut t, &order)?,
        Algorithm::Insertion => insertion(&mut t, &order)?,
        Algorithm::Dichotomic => dichotomic(&mut t, &order)?,
        Algorithm::QuickXplain => quickxplain(&mut t, &order)?,
        Algorithm::Progression => progression(&mut t, &order)?,
    };
    set.sort_unstable();
    let probes = t.probes;
    let witness = if needs_witness {
        match t.last_true.take() {
            Some((s, wit)) if s == set => wit,
            _ => {
                extra += 1;
                let probe = t.pred.test(&set)?;
                if !probe.holds {
                    return Err(EngineError::Internal(
                        "predicate does not hold on the extracted set".into(),
                    ));
                }
                probe.witness
            }
        }
    } else {
        t.last_false.take()
    };
    Ok(MinimalSetResult {
        set,
        witness,
        oracle_calls: probes + extra,
        probes,
        wellposed_checked: opts.check_wellposed,
        algorithm: alg,
    })
}

/// Checks `P(M)` and that every single deletion falsifies `P`.
pub fn verify_minimal(pred: &mut dyn Predicate, set: &[usize]) -> Result<Result<(), String>, EngineError> {
    if !pred.test(set)?.holds {
        return Ok(Err("P(M) does not hold".into()));
    }
    for &e in set {
        let smaller: Vec<usize> = set.iter().copied().filter(|&x| x != e).collect();
        if pred.test(&smaller)?.holds {
            return Ok(Err(format!("P(M \\ {{{e}}}) holds")));
        }
    }
    Ok(Ok(()))
}

/// Checks `P(M)` and that no strict subset of `M` satisfies `P`.
///
/// # Panics
///
/// Panics if `M` has more than 20 elements.
pub fn exhaustive_minimal(pred: &mut dyn Predicate, set: &[usize]) -> Result<Result<(), String>, EngineError> {
    assert!(set.len() <= 20, "exhaustive check limited to 20 elements");
    if !pred.test(set)?.holds {
        return Ok(Err("P(M) does not hold".into()));
    }
    let full = (1u32 << set.len()) - 1;
    for mask in 0..full {
        let sub: Vec<usize> = (0..set.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        if pred.test(&sub)?.holds {
            return Ok(Err(format!("strict subset {sub:?} satisfies P")));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnPredicate;

    /// P(W) = W contains every element of `need` (unique minimal set `need`).
    fn superset_of(need: Vec<usize>, n: usize) -> FnPredicate<impl FnMut(&[usize]) -> bool> {
        FnPredicate::new(n, move |w: &[usize]| need.iter().all(|x| w.contains(x)))
    }

    #[test]
    fn all_algorithms_find_planted_set() {
        for alg in Algorithm::ALL {
            for need in [vec![], vec![0], vec![3, 7], vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9], vec![9]] {
                let mut p = superset_of(need.clone(), 10);
                let r = extract_minimal(&mut p, alg, &ExtractOptions::default()).unwrap();
                assert_eq!(r.set, need, "{alg}");
            }
        }
    }

    #[test]
    fn deletion_counts_one_probe_per_element() {
        let mut p = superset_of(vec![2], 6);
        let r = extract_minimal(&mut p, Algorithm::Deletion, &ExtractOptions::default()).unwrap();
        assert_eq!(r.probes, 6);
        assert_eq!(r.oracle_calls, 7);
    }

    #[test]
    fn ill_posed_detected() {
        let mut p = FnPredicate::new(3, |_: &[usize]| false);
        let err = extract_minimal(&mut p, Algorithm::Progression, &ExtractOptions::default());
        assert!(matches!(err, Err(EngineError::IllPosed)));
    }

    #[test]
    fn order_permutation_respected() {
        // Two minimal sets {0} and {1}: traversal order decides.
        let mk = || FnPredicate::new(2, |w: &[usize]| !w.is_empty());
        let opts = ExtractOptions {
            order: Some(vec![1, 0]),
            ..Default::default()
        };
        let r = extract_minimal(&mut mk(), Algorithm::Deletion, &opts).unwrap();
        assert_eq!(r.set, vec![0]);
        let r = extract_minimal(&mut mk(), Algorithm::Deletion, &ExtractOptions::default()).unwrap();
        assert_eq!(r.set, vec![1]);
    }

    #[test]
    fn certificate_checks() {
        let mut p = superset_of(vec![1, 2], 4);
        assert!(verify_minimal(&mut p, &[1, 2]).unwrap().is_ok());
        assert!(verify_minimal(&mut p, &[1, 2, 3]).unwrap().is_err());
        assert!(exhaustive_minimal(&mut p, &[1, 2]).unwrap().is_ok());
    }
}
