//! Seeded random instances and side inputs for the exhaustive checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Clause, Cnf, Dnf, Formula, Lit, Term, Var};
use crate::reductions::{Payload, ProblemInstance, ProblemKind, ProblemKind::*};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    pub min_vars: u32,
    pub max_vars: u32,
    pub max_clauses: usize,
    pub max_len: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            min_vars: 2,
            max_vars: 6,
            max_clauses: 10,
            max_len: 3,
        }
    }
}

fn random_lits(rng: &mut ChaCha8Rng, n: u32, max_len: usize) -> Vec<Lit> {
    let len = rng.gen_range(1..=max_len.min(n as usize));
    let mut vars: Vec<u32> = (1..=n).collect();
    vars.shuffle(rng);
    vars[..len]
        .iter()
        .map(|&v| Lit::new(Var::new(v), rng.gen_bool(0.5)))
        .collect()
}

/// Clause lengths are uniform in `1..=max_len` over distinct variables.
pub fn random_cnf(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> Cnf {
    let n = rng.gen_range(p.min_vars..=p.max_vars);
    let m = rng.gen_range(1..=p.max_clauses);
    let clauses = (0..m)
        .map(|_| Clause::new(random_lits(rng, n, p.max_len)).expect("distinct variables"))
        .collect();
    Cnf::new(n, clauses)
}

pub fn random_dnf(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> Dnf {
    let n = rng.gen_range(p.min_vars..=p.max_vars);
    let m = rng.gen_range(1..=p.max_clauses);
    let terms = (0..m)
        .map(|_| Term::new(random_lits(rng, n, p.max_len)).expect("distinct variables"))
        .collect();
    Dnf::new(n, terms)
}

/// The base CNF for `seed`; identical for every problem kind.
pub fn base_cnf(seed: u64, p: &GeneratorParams) -> Cnf {
    random_cnf(&mut ChaCha8Rng::seed_from_u64(seed), p)
}

fn models(cnf: &Cnf) -> Vec<u32> {
    (0..1u32 << cnf.num_vars)
        .filter(|&a| {
            cnf.clauses.iter().all(|c| {
                c.lits()
                    .iter()
                    .any(|l| (a >> (l.var().id() - 1) & 1 == 1) != l.is_negated())
            })
        })
        .collect()
}

fn full_lits(a: u32, n: u32) -> Vec<Lit> {
    (1..=n)
        .map(|i| Lit::new(Var::new(i), a >> (i - 1) & 1 == 0))
        .collect()
}

/// A random instance of `kind` for `seed`, or `None` when the base formula
/// does not meet the kind's precondition.
pub fn instance_for(kind: ProblemKind, seed: u64, p: &GeneratorParams) -> Option<ProblemInstance> {
    let kind_ix = ProblemKind::ALL.iter().position(|&k| k == kind).unwrap() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(kind_ix + 1));
    if kind == FleIt {
        let dnf = random_dnf(&mut ChaCha8Rng::seed_from_u64(seed), p);
        let k = rng.gen_range(1..=dnf.len());
        let mut inst = ProblemInstance::new(Payload::Dnf(dnf));
        inst.unit_index = Some(k);
        return Some(inst);
    }
    let cnf = base_cnf(seed, p);
    let n = cnf.num_vars;
    let ms = models(&cnf);
    let sat = !ms.is_empty();
    let mut inst = ProblemInstance::cnf(cnf.clone());
    match kind {
        Fmus | Fmcs | Fmss | FautL | FautB if sat => return None,
        FmnM | FmxM | FsmnM | Fbb | FmxEs if !sat => return None,
        FpIt => {
            let &a = ms.choose(&mut rng)?;
            inst.term = Some(Term::new(full_lits(a, n)).unwrap());
        }
        FpIc => {
            let non: Vec<u32> = (0..1u32 << n).filter(|a| !ms.contains(a)).collect();
            let &a = non.choose(&mut rng)?;
            inst.clause = Some(Term::new(full_lits(a, n)).unwrap().negation());
        }
        FleIc => inst.unit_index = Some(rng.gen_range(1..=cnf.len())),
        FmnEs => {
            let k = rng.gen_range(1..=cnf.len().min(3));
            let picked: Vec<&Clause> = cnf.clauses.choose_multiple(&mut rng, k).collect();
            let mut target = Formula::and(picked.iter().map(|c| c.to_formula()).collect());
            if rng.gen_bool(0.5) {
                let l = Lit::new(Var::new(rng.gen_range(1..=n)), rng.gen_bool(0.5));
                target = Formula::or(vec![target, Formula::lit(l)]);
            }
            inst.target = Some(target);
        }
        FmxEs => {
            let count = rng.gen_range(1..=8);
            let mut cands = Vec::new();
            for _ in 0..count {
                let c = match rng.gen_range(0..3) {
                    0 => cnf.clauses.choose(&mut rng).unwrap().clone(),
                    1 => {
                        let base = cnf.clauses.choose(&mut rng).unwrap();
                        let mut lits = base.lits().to_vec();
                        let v = Var::new(rng.gen_range(1..=n));
                        if lits.iter().all(|l| l.var() != v) {
                            lits.push(Lit::new(v, rng.gen_bool(0.5)));
                        }
                        Clause::new(lits).unwrap()
                    }
                    _ => Clause::new(random_lits(&mut rng, n, p.max_len)).unwrap(),
                };
                cands.push(c);
            }
            inst.candidates = Some(Cnf::new(n, cands));
        }
        FbBr => {
            let &a = ms.choose(&mut rng)?;
            inst.model = Some(full_lits(a, n));
        }
        _ => {}
    }
    Some(inst)
}
