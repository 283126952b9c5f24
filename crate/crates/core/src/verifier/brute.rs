//! Exhaustive solvers computed straight from the problem definitions.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Assignment, Clause, Formula, Lit, Term, Var};
use crate::reductions::{AnswerPayload, Payload, ProblemInstance, ProblemKind, ProblemKind::*};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceBudget {
    pub max_vars: u32,
    pub max_elements: usize,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget {
            max_vars: 12,
            max_elements: 14,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteError {
    #[error("brute-force budget exceeded: {0}")]
    Budget(String),
    #[error("instance not usable for {kind}: {reason}")]
    Unusable { kind: ProblemKind, reason: String },
}

/// All valid answers of a problem, each in [`AnswerPayload::items`] form,
/// sorted by size then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteAnswer {
    Sets(Vec<Vec<i64>>),
    Optimum { value: usize, sets: Vec<Vec<i64>> },
}

impl BruteAnswer {
    pub fn sets(&self) -> &[Vec<i64>] {
        match self {
            BruteAnswer::Sets(s) => s,
            BruteAnswer::Optimum { sets, .. } => sets,
        }
    }
}

fn canonical(mut sets: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    for s in &mut sets {
        s.sort_by_key(|&x| (x.unsigned_abs(), x < 0));
    }
    sets.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let ka: Vec<_> = a.iter().map(|&x| (x.unsigned_abs(), x < 0)).collect();
            let kb: Vec<_> = b.iter().map(|&x| (x.unsigned_abs(), x < 0)).collect();
            ka.cmp(&kb)
        })
    });
    sets.dedup();
    sets
}

fn lit_true(l: Lit, a: u32) -> bool {
    (a >> (l.var().id() - 1) & 1 == 1) != l.is_negated()
}

fn clause_true(c: &Clause, a: u32) -> bool {
    c.lits().iter().any(|&l| lit_true(l, a))
}

fn term_true(t: &Term, a: u32) -> bool {
    t.lits().iter().all(|&l| lit_true(l, a))
}

fn eval_bits(f: &Formula, a: u32) -> bool {
    match f {
        Formula::Const(b) => *b,
        Formula::Atom(v) => a >> (v.id() - 1) & 1 == 1,
        Formula::Not(g) => !eval_bits(g, a),
        Formula::And(cs) => cs.iter().all(|c| eval_bits(c, a)),
        Formula::Or(cs) => cs.iter().any(|c| eval_bits(c, a)),
    }
}

/// Marks every subset of every seed.
fn down_closure(m: usize, seeds: impl IntoIterator<Item = u32>) -> Vec<bool> {
    let mut marked = vec![false; 1 << m];
    for s in seeds {
        marked[s as usize] = true;
    }
    for s in (0..marked.len()).rev() {
        if marked[s] {
            let mut bits = s;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                marked[s ^ b] = true;
                bits ^= b;
            }
        }
    }
    marked
}

fn bits_of(s: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| s >> i & 1 == 1)
}

/// Sets where `good` holds and fails after removing any one element.
/// Valid for upward-closed `good`, which all callers use.
fn minimal_sets(m: usize, good: impl Fn(u32) -> bool) -> Vec<u32> {
    (0..1u32 << m)
        .filter(|&s| good(s) && bits_of(s).all(|e| !good(s ^ (1 << e))))
        .collect()
}

/// Sets where `good` holds and fails after adding any one element.
/// Valid for downward-closed `good`.
fn maximal_sets(m: usize, good: impl Fn(u32) -> bool) -> Vec<u32> {
    let full = (1u32 << m) - 1;
    (0..1u32 << m)
        .filter(|&s| good(s) && bits_of(full ^ s).all(|e| !good(s | (1 << e))))
        .collect()
}

fn index_items(s: u32) -> Vec<i64> {
    bits_of(s).map(|i| i as i64 + 1).collect()
}

fn var_items(a: u32) -> Vec<i64> {
    bits_of(a).map(|i| i as i64 + 1).collect()
}

/// Satisfying assignments of `f` over `var(f)`, in lexicographic order of
/// the value vectors (variables ascending, false before true).
pub fn enumerate_models(f: &Formula, budget: &BruteForceBudget) -> Result<Vec<Assignment>, BruteError> {
    let vars: Vec<Var> = f.vars().into_iter().collect();
    let k = vars.len();
    if k as u32 > budget.max_vars {
        return Err(BruteError::Budget(format!("{k} variables > {}", budget.max_vars)));
    }
    let mut out = Vec::new();
    for idx in 0..1u64 << k {
        let mut a = Assignment::new();
        for (j, v) in vars.iter().enumerate() {
            let val = idx >> (k - 1 - j) & 1 == 1;
            a.assign(Lit::new(*v, !val)).expect("fresh variable");
        }
        if f.evaluate(&a).expect("total over var(f)") {
            out.push(a);
        }
    }
    Ok(out)
}

struct Ctx {
    n: u32,
    count: u32,
}

impl Ctx {
    fn all(&self) -> impl Iterator<Item = u32> {
        0..self.count
    }
}

fn check_elements(m: usize, budget: &BruteForceBudget) -> Result<(), BruteError> {
    if m > budget.max_elements {
        return Err(BruteError::Budget(format!(
            "{m} reference elements > {}",
            budget.max_elements
        )));
    }
    Ok(())
}

fn unusable(kind: ProblemKind, reason: &str) -> BruteError {
    BruteError::Unusable {
        kind,
        reason: reason.to_string(),
    }
}

/// Computes every valid answer of `kind` on `inst` by enumeration.
pub fn brute_solve(kind: ProblemKind, inst: &ProblemInstance, budget: &BruteForceBudget) -> Result<BruteAnswer, BruteError> {
    let mut inst = inst.clone();
    inst.normalize_universe();
    let n = inst.num_vars;
    if n > budget.max_vars {
        return Err(BruteError::Budget(format!("{n} variables > {}", budget.max_vars)));
    }
    let ctx = Ctx { n, count: 1 << n };
    let f = inst.formula();
    let fvals: Vec<bool> = ctx.all().map(|a| eval_bits(&f, a)).collect();
    let models: Vec<u32> = ctx.all().filter(|&a| fvals[a as usize]).collect();
    let cnf = match &inst.payload {
        Payload::Cnf(c) => Some(c),
        _ => None,
    };
    let need_cnf = || cnf.ok_or_else(|| unusable(kind, "needs CNF input"));

    let sets: Vec<Vec<i64>> = match kind {
        Fmus | Fmcs | Fmss => {
            let cnf = need_cnf()?;
            // Elements are clauses, or groups 1..k with group 0 hard.
            let (hard, elems): (Vec<&Clause>, Vec<Vec<&Clause>>) = match &inst.groups {
                None => (Vec::new(), cnf.clauses.iter().map(|c| vec![c]).collect()),
                Some((ids, k)) => {
                    let mut hard = Vec::new();
                    let mut el = vec![Vec::new(); *k as usize];
                    for (c, &g) in cnf.clauses.iter().zip(ids) {
                        if g == 0 {
                            hard.push(c);
                        } else {
                            el[g as usize - 1].push(c);
                        }
                    }
                    (hard, el)
                }
            };
            let m = elems.len();
            check_elements(m, budget)?;
            if !models.is_empty() {
                return Err(unusable(kind, "the formula is satisfiable"));
            }
            let masks = ctx.all().filter(|&a| hard.iter().all(|c| clause_true(c, a))).map(|a| {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(_, cs)| cs.iter().all(|c| clause_true(c, a)))
                    .fold(0u32, |acc, (i, _)| acc | 1 << i)
            });
            let sat = down_closure(m, masks);
            let full = (1u32 << m) - 1;
            match kind {
                Fmus => minimal_sets(m, |s| !sat[s as usize]),
                Fmcs => minimal_sets(m, |c| sat[(full ^ c) as usize]),
                _ => maximal_sets(m, |s| sat[s as usize]),
            }
            .into_iter()
            .map(index_items)
            .collect()
        }
        Fmes | Fmds | Fmns | Fmcfs | Fmfs | Fsmcs | Fsmds | Fsmcfs | FmnEs => {
            let cnf = need_cnf()?;
            let m = cnf.len();
            check_elements(m, budget)?;
            let full = (1u32 << m) - 1;
            let mask: Vec<u32> = ctx
                .all()
                .map(|a| {
                    cnf.clauses
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| clause_true(c, a))
                        .fold(0, |acc, (i, _)| acc | 1 << i)
                })
                .collect();
            let pop = |s: u32| s.count_ones() as usize;
            match kind {
                Fmes | Fmds | Fmns | Fsmds => {
                    // S ⊆ F is non-equivalent iff some non-model of F satisfies all of S.
                    let nonequiv = down_closure(m, mask.iter().copied().filter(|&s| s != full));
                    match kind {
                        Fmes => minimal_sets(m, |s| !nonequiv[s as usize]).into_iter().map(index_items).collect(),
                        Fmds => minimal_sets(m, |d| nonequiv[(full ^ d) as usize]).into_iter().map(index_items).collect(),
                        Fmns => maximal_sets(m, |s| nonequiv[s as usize]).into_iter().map(index_items).collect(),
                        _ => {
                            let best = mask.iter().copied().filter(|&s| s != full).map(pop).max();
                            let Some(best) = best else {
                                return Err(unusable(kind, "the formula has no non-model"));
                            };
                            let value = m - best;
                            let sets = (0..=full)
                                .filter(|&d| pop(d) == value && nonequiv[(full ^ d) as usize])
                                .map(index_items)
                                .collect();
                            return Ok(BruteAnswer::Optimum { value, sets: canonical(sets) });
                        }
                    }
                }
                Fmcfs | Fmfs | Fsmcfs => {
                    let fals = down_closure(m, mask.iter().map(|&s| full ^ s));
                    match kind {
                        Fmcfs => minimal_sets(m, |c| fals[(full ^ c) as usize]).into_iter().map(index_items).collect(),
                        Fmfs => maximal_sets(m, |s| fals[s as usize]).into_iter().map(index_items).collect(),
                        _ => {
                            let value = mask.iter().copied().map(pop).min().unwrap_or(0);
                            let sets = (0..=full)
                                .filter(|&c| pop(c) == value && fals[(full ^ c) as usize])
                                .map(index_items)
                                .collect();
                            return Ok(BruteAnswer::Optimum { value, sets: canonical(sets) });
                        }
                    }
                }
                Fsmcs => {
                    let sat = down_closure(m, mask.iter().copied());
                    let best = mask.iter().copied().map(pop).max().unwrap_or(0);
                    let value = m - best;
                    let sets = (0..=full)
                        .filter(|&c| pop(c) == value && sat[(full ^ c) as usize])
                        .map(index_items)
                        .collect();
                    return Ok(BruteAnswer::Optimum { value, sets: canonical(sets) });
                }
                _ => {
                    let target = inst
                        .target
                        .as_ref()
                        .ok_or_else(|| unusable(kind, "needs a target formula"))?;
                    let bad = down_closure(
                        m,
                        ctx.all().filter(|&a| !eval_bits(target, a)).map(|a| mask[a as usize]),
                    );
                    if bad[full as usize] {
                        return Err(unusable(kind, "J does not entail I"));
                    }
                    minimal_sets(m, |s| !bad[s as usize]).into_iter().map(index_items).collect()
                }
            }
        }
        FmnM | FmxM | FsmnM => {
            if models.is_empty() {
                return Err(unusable(kind, "the formula is unsatisfiable"));
            }
            match kind {
                FmnM => models
                    .iter()
                    .filter(|&&a| !models.iter().any(|&b| b != a && b & a == b))
                    .map(|&a| var_items(a))
                    .collect(),
                FmxM => models
                    .iter()
                    .filter(|&&a| !models.iter().any(|&b| b != a && b & a == a))
                    .map(|&a| var_items(a))
                    .collect(),
                _ => {
                    let value = models.iter().map(|a| a.count_ones()).min().unwrap() as usize;
                    let sets = models
                        .iter()
                        .filter(|a| a.count_ones() as usize == value)
                        .map(|&a| var_items(a))
                        .collect();
                    return Ok(BruteAnswer::Optimum { value, sets: canonical(sets) });
                }
            }
        }
        FpIt | FpIc => {
            let lits: Vec<Lit> = if kind == FpIt {
                inst.term.as_ref().ok_or_else(|| unusable(kind, "needs a term"))?.lits().to_vec()
            } else {
                inst.clause.as_ref().ok_or_else(|| unusable(kind, "needs a clause"))?.lits().to_vec()
            };
            let k = lits.len();
            check_elements(k, budget)?;
            let sub = |s: u32| -> Vec<Lit> { bits_of(s).map(|i| lits[i]).collect() };
            let good = |s: u32| -> bool {
                let ls = sub(s);
                if kind == FpIt {
                    // term ⊨ F: no non-model satisfies every literal
                    ctx.all().all(|a| fvals[a as usize] || !ls.iter().all(|&l| lit_true(l, a)))
                } else {
                    // F ⊨ clause: every model satisfies some literal
                    models.iter().all(|&a| ls.iter().any(|&l| lit_true(l, a)))
                }
            };
            if !good((1 << k) - 1) {
                return Err(unusable(kind, "the side input does not satisfy the entailment"));
            }
            minimal_sets(k, good)
                .into_iter()
                .map(|s| sub(s).iter().map(|l| l.to_dimacs()).collect())
                .collect()
        }
        FleIt | FleIc => lei(kind, &inst, &ctx, budget)?,
        FmxEs => {
            if models.is_empty() {
                return Err(unusable(kind, "J is unsatisfiable"));
            }
            let cands = inst
                .candidates
                .as_ref()
                .ok_or_else(|| unusable(kind, "needs candidate clauses"))?;
            check_elements(cands.len(), budget)?;
            vec![cands
                .clauses
                .iter()
                .enumerate()
                .filter(|(_, c)| models.iter().all(|&a| clause_true(c, a)))
                .map(|(i, _)| i as i64 + 1)
                .collect()]
        }
        FbBr => {
            let v = inst.model.as_ref().ok_or_else(|| unusable(kind, "needs a reference model"))?;
            check_elements(v.len(), budget)?;
            vec![v
                .iter()
                .filter(|&&l| models.iter().all(|&a| lit_true(l, a)))
                .map(|l| l.to_dimacs())
                .collect()]
        }
        Fbb => {
            if models.is_empty() {
                return Err(unusable(kind, "the formula is unsatisfiable"));
            }
            vec![(1..=n)
                .filter_map(|i| {
                    let v = Var::new(i);
                    [v.pos(), v.neg()]
                        .into_iter()
                        .find(|&l| models.iter().all(|&a| lit_true(l, a)))
                        .map(|l| l.to_dimacs())
                })
                .collect()]
        }
        FvInd => vec![(1..=n)
            .filter(|&i| ctx.all().all(|a| fvals[a as usize] == fvals[(a ^ 1 << (i - 1)) as usize]))
            .map(|i| i as i64)
            .collect()],
        FautL | FautB => {
            let cnf = need_cnf()?;
            if !models.is_empty() {
                return Err(unusable(kind, "the formula is satisfiable"));
            }
            vec![autarky_vars(&cnf.clauses, n)]
        }
    };
    Ok(BruteAnswer::Sets(canonical(sets)))
}

/// Union of all autarkies: subsets `A` with an assignment to `A` satisfying
/// every clause that mentions a variable of `A`.
fn autarky_vars(clauses: &[Clause], n: u32) -> Vec<i64> {
    let mut union = 0u32;
    for a_set in 1..1u32 << n {
        if a_set & !union == 0 {
            continue;
        }
        let touching: Vec<&Clause> = clauses
            .iter()
            .filter(|c| c.lits().iter().any(|l| a_set >> (l.var().id() - 1) & 1 == 1))
            .collect();
        // Enumerate assignments over A only: iterate submasks of A.
        let mut vals = a_set;
        loop {
            let ok = touching.iter().all(|c| {
                c.lits().iter().any(|&l| a_set >> (l.var().id() - 1) & 1 == 1 && lit_true(l, vals))
            });
            if ok {
                union |= a_set;
                break;
            }
            if vals == 0 {
                break;
            }
            vals = (vals - 1) & a_set;
        }
    }
    var_items(union)
}

fn lei(kind: ProblemKind, inst: &ProblemInstance, ctx: &Ctx, budget: &BruteForceBudget) -> Result<Vec<Vec<i64>>, BruteError> {
    let k = inst.unit_index.ok_or_else(|| unusable(kind, "needs a unit index"))?;
    // unit literals, F value and the value of the other units per assignment
    let (unit, fv, rest): (Vec<Lit>, Vec<bool>, Vec<bool>) = match (&inst.payload, kind) {
        (Payload::Dnf(d), FleIt) => {
            let t = d.terms.get(k.wrapping_sub(1)).ok_or_else(|| unusable(kind, "unit index out of range"))?;
            let others: Vec<&Term> = d.terms.iter().enumerate().filter(|(i, _)| i + 1 != k).map(|(_, t)| t).collect();
            let rest: Vec<bool> = ctx.all().map(|a| others.iter().any(|t| term_true(t, a))).collect();
            let fv = ctx.all().map(|a| rest[a as usize] || term_true(t, a)).collect();
            (t.lits().to_vec(), fv, rest)
        }
        (Payload::Cnf(c), FleIc) => {
            let cl = c.clauses.get(k.wrapping_sub(1)).ok_or_else(|| unusable(kind, "unit index out of range"))?;
            let others: Vec<&Clause> = c.clauses.iter().enumerate().filter(|(i, _)| i + 1 != k).map(|(_, c)| c).collect();
            let rest: Vec<bool> = ctx.all().map(|a| others.iter().all(|c| clause_true(c, a))).collect();
            let fv = ctx.all().map(|a| rest[a as usize] && clause_true(cl, a)).collect();
            (cl.lits().to_vec(), fv, rest)
        }
        _ => return Err(unusable(kind, "wrong input shape")),
    };
    let free: Vec<Var> = (1..=ctx.n)
        .map(Var::new)
        .filter(|v| unit.iter().all(|l| l.var() != *v))
        .collect();
    check_elements(2 * free.len(), budget)?;
    // Each free variable is absent (0), positive (1) or negative (2).
    let total = 3usize.pow(free.len() as u32);
    let decode = |mut code: usize| -> Vec<Lit> {
        let mut q = Vec::new();
        for &v in &free {
            match code % 3 {
                1 => q.push(v.pos()),
                2 => q.push(v.neg()),
                _ => {}
            }
            code /= 3;
        }
        q
    };
    let valid = |q: &[Lit]| -> bool {
        ctx.all().all(|a| {
            let i = a as usize;
            let v = if kind == FleIt {
                let u = unit.iter().chain(q).all(|&l| lit_true(l, a));
                rest[i] || u
            } else {
                let u = unit.iter().chain(q).any(|&l| lit_true(l, a));
                rest[i] && u
            };
            v == fv[i]
        })
    };
    let ok: Vec<Option<Vec<Lit>>> = (0..total)
        .map(|c| {
            let q = decode(c);
            valid(&q).then_some(q)
        })
        .collect();
    let valid_set: BTreeSet<Vec<Lit>> = ok.iter().flatten().map(|q| {
        let mut q = q.clone();
        q.sort_unstable();
        q
    }).collect();
    let mut out = Vec::new();
    for q in &valid_set {
        let extendable = free.iter().filter(|v| q.iter().all(|l| l.var() != **v)).any(|&v| {
            [v.pos(), v.neg()].into_iter().any(|l| {
                let mut bigger = q.clone();
                bigger.push(l);
                bigger.sort_unstable();
                valid_set.contains(&bigger)
            })
        });
        if !extendable {
            out.push(unit.iter().chain(q).map(|l| l.to_dimacs()).collect());
        }
    }
    Ok(out)
}

/// Pass/fail of a solver answer against the exhaustive answer set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub reason: String,
}

pub fn check_answer(kind: ProblemKind, answer: &AnswerPayload, inst: &ProblemInstance, budget: &BruteForceBudget) -> Result<CheckOutcome, BruteError> {
    let brute = brute_solve(kind, inst, budget)?;
    Ok(compare(answer, &brute))
}

/// Compares an answer with a precomputed exhaustive answer set.
pub fn compare(answer: &AnswerPayload, brute: &BruteAnswer) -> CheckOutcome {
    let items = answer.items();
    if let (BruteAnswer::Optimum { value, .. }, got) = (brute, answer.optimum()) {
        if got != Some(*value) {
            return CheckOutcome {
                pass: false,
                reason: format!("optimum is {value}, answer claims {got:?}"),
            };
        }
    }
    let sets = brute.sets();
    if sets.contains(&items) {
        return CheckOutcome {
            pass: true,
            reason: "matches an exhaustive answer".into(),
        };
    }
    let as_set: BTreeSet<i64> = items.iter().copied().collect();
    let sub = |s: &Vec<i64>| s.iter().all(|x| as_set.contains(x));
    let reason = if sets.iter().any(|s| sub(s) && s.len() < items.len()) {
        "not minimal".to_string()
    } else if sets.iter().any(|s| items.iter().all(|x| s.contains(x)) && s.len() > items.len()) {
        "not maximal".to_string()
    } else {
        format!("not a valid answer; expected one of {sets:?}")
    };
    CheckOutcome { pass: false, reason }
}
