//! Tseitin clausification into an incrementally grown clause list.

use std::collections::HashMap;

use crate::formula::{Formula, Lit, Var};

/// Collects clauses and allocates fresh variables above a reserved prefix.
#[derive(Debug, Clone, Default)]
pub struct CnfBuilder {
    clauses: Vec<Vec<Lit>>,
    next_var: u32,
    aux: Vec<Var>,
    cache: HashMap<Formula, Lit>,
    true_lit: Option<Lit>,
}

impl CnfBuilder {
    /// Variables `1..=reserved` belong to the caller; fresh ones start above.
    pub fn new(reserved: u32) -> Self {
        CnfBuilder {
            next_var: reserved + 1,
            ..Default::default()
        }
    }

    /// Makes sure fresh variables are allocated above `id`.
    pub fn reserve(&mut self, id: u32) {
        self.next_var = self.next_var.max(id + 1);
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(self.next_var);
        self.next_var += 1;
        self.aux.push(v);
        v
    }

    pub fn num_vars(&self) -> u32 {
        self.next_var - 1
    }

    pub fn aux_vars(&self) -> &[Var] {
        &self.aux
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn take_clauses(&mut self) -> Vec<Vec<Lit>> {
        std::mem::take(&mut self.clauses)
    }

    /// Adds a clause after sorting and deduplicating; tautologies are dropped.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut c = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        for l in &c {
            self.reserve(l.var().id());
        }
        self.clauses.push(c);
    }

    fn const_lit(&mut self, value: bool) -> Lit {
        let t = match self.true_lit {
            Some(t) => t,
            None => {
                let t = self.fresh().pos();
                self.clauses.push(vec![t]);
                self.true_lit = Some(t);
                t
            }
        };
        if value {
            t
        } else {
            !t
        }
    }

    /// Asserts `f` at the top level, splitting conjunctions and emitting
    /// disjunctions of literals as plain clauses.
    pub fn assert_formula(&mut self, f: &Formula) {
        match f {
            Formula::Const(true) => {}
            Formula::Const(false) => self.clauses.push(Vec::new()),
            Formula::And(cs) => cs.iter().for_each(|c| self.assert_formula(c)),
            Formula::Not(g) if matches!(**g, Formula::Or(_)) => {
                let Formula::Or(cs) = &**g else { unreachable!() };
                for c in cs {
                    self.assert_formula(&c.clone().negate());
                }
            }
            Formula::Not(g) if matches!(**g, Formula::Not(_)) => {
                let Formula::Not(h) = &**g else { unreachable!() };
                self.assert_formula(h);
            }
            Formula::Or(cs) => {
                let mut clause = Vec::with_capacity(cs.len());
                for c in cs {
                    match c {
                        Formula::Const(true) => return,
                        Formula::Const(false) => {}
                        _ => clause.push(self.define(c)),
                    }
                }
                self.add_clause(&clause);
            }
            _ => {
                let l = self.define(f);
                self.add_clause(&[l]);
            }
        }
    }

    /// A literal equivalent to `f` under the definitions added so far.
    /// Repeated subformulas share one definition.
    pub fn define(&mut self, f: &Formula) -> Lit {
        if let Some(l) = f.as_lit() {
            self.reserve(l.var().id());
            return l;
        }
        if let Some(&l) = self.cache.get(f) {
            return l;
        }
        let l = match f {
            Formula::Const(b) => self.const_lit(*b),
            Formula::Not(g) => !self.define(g),
            Formula::And(cs) | Formula::Or(cs) => {
                let kids: Vec<Lit> = cs.iter().map(|c| self.define(c)).collect();
                let out = self.fresh().pos();
                // And: out <-> ∧ kids; Or is the dual with all literals complemented.
                let (o, ks): (Lit, Vec<Lit>) = if matches!(f, Formula::And(_)) {
                    (out, kids)
                } else {
                    (!out, kids.into_iter().map(|k| !k).collect())
                };
                let mut long = vec![o];
                for &k in &ks {
                    self.clauses.push(vec![!o, k]);
                    long.push(!k);
                }
                self.clauses.push(long);
                out
            }
            Formula::Atom(_) => unreachable!(),
        };
        self.cache.insert(f.clone(), l);
        l
    }
}

/// Clausifies `f` on its own. Fresh variables start above `f`'s largest id.
pub fn clausify(f: &Formula) -> (Vec<Vec<Lit>>, u32) {
    let mut b = CnfBuilder::new(f.max_var());
    b.assert_formula(f);
    let n = b.num_vars();
    (b.take_clauses(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Assignment;
    use std::collections::BTreeSet;

    fn x(i: u32) -> Formula {
        Formula::atom(Var::new(i))
    }

    fn clause_sat(c: &[Lit], bits: u64) -> bool {
        c.iter()
            .any(|l| (bits >> (l.var().id() - 1) & 1 == 1) != l.is_negated())
    }

    fn projected_models(clauses: &[Vec<Lit>], n: u32, k: u32) -> BTreeSet<u64> {
        (0..1u64 << n)
            .filter(|&b| clauses.iter().all(|c| clause_sat(c, b)))
            .map(|b| b & ((1 << k) - 1))
            .collect()
    }

    fn formula_models(f: &Formula, k: u32) -> BTreeSet<u64> {
        (0..1u64 << k)
            .filter(|&b| {
                let vals: Vec<bool> = (0..k).map(|i| b >> i & 1 == 1).collect();
                f.evaluate(&Assignment::from_values(&vals)).unwrap()
            })
            .collect()
    }

    #[test]
    fn tseitin_preserves_projected_models() {
        let f = Formula::or(vec![x(1), Formula::and(vec![x(2), x(3)])]);
        let (cls, n) = clausify(&f);
        let m = projected_models(&cls, n, 3);
        assert_eq!(m.len(), 5);
        assert_eq!(m, formula_models(&f, 3));
    }

    #[test]
    fn constants_and_negations() {
        let (cls, n) = clausify(&Formula::Const(false));
        assert!(projected_models(&cls, n, 0).is_empty());
        let f = Formula::Not(Box::new(Formula::or(vec![
            x(1),
            Formula::and(vec![x(2), Formula::Const(true)]),
        ])));
        let (cls, n) = clausify(&f);
        assert_eq!(projected_models(&cls, n, 2), formula_models(&f, 2));
    }

    #[test]
    fn shared_subformulas_defined_once() {
        let g = Formula::and(vec![x(1), x(2)]);
        let mut b = CnfBuilder::new(2);
        let a = b.define(&g);
        let c = b.define(&g);
        assert_eq!(a, c);
        assert_eq!(b.aux_vars().len(), 1);
    }
}
