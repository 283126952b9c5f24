use crate::cardenc::SequentialCounter;
use crate::engine::{ElementLits, Form, PredicateBuilder, PredicateInstance};
use crate::formula::{Clause, Formula, Lit, Subst, Var};
use crate::oracle::Backend;

use super::{ProblemInstance, ProblemKind, ProblemKind::*, ReductionError};

/// What each reference-set element stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Meta {
    /// 1-based clause, term or group index per element.
    Indices(Vec<usize>),
    Lits(Vec<Lit>),
    Vars(Vec<Var>),
    /// Element `b` is the bound `Σ p ≥ b`; `ids[i]` is the 1-based clause
    /// index or variable id that selector `selectors[i]` relaxes.
    Bounds { selectors: Vec<Lit>, ids: Vec<usize> },
}

impl Meta {
    pub fn len(&self) -> usize {
        match self {
            Meta::Indices(v) => v.len(),
            Meta::Lits(v) => v.len(),
            Meta::Vars(v) => v.len(),
            Meta::Bounds { selectors, .. } => selectors.len() + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A predicate ready for extraction plus the element meaning needed to
/// decode its minimal set.
pub struct Built {
    pub pred: PredicateInstance,
    pub meta: Meta,
}

fn lits_formula(c: &Clause) -> Formula {
    c.to_formula()
}

/// Reference-set elements over clauses: hard clauses and one clause list
/// per element (one clause each unless grouped).
type ClauseElements = (Vec<Clause>, Vec<Vec<Clause>>, Vec<usize>);

fn clause_elements(inst: &ProblemInstance, kind: ProblemKind) -> Result<ClauseElements, ReductionError> {
    let cnf = inst.as_cnf(kind)?;
    match &inst.groups {
        None => Ok((
            Vec::new(),
            cnf.clauses.iter().map(|c| vec![c.clone()]).collect(),
            (1..=cnf.len()).collect(),
        )),
        Some((ids, k)) => {
            let mut hard = Vec::new();
            let mut groups = vec![Vec::new(); *k as usize];
            for (c, &g) in cnf.clauses.iter().zip(ids) {
                if g == 0 {
                    hard.push(c.clone());
                } else {
                    groups[g as usize - 1].push(c.clone());
                }
            }
            Ok((hard, groups, (1..=*k as usize).collect()))
        }
    }
}

fn conj(cs: &[Clause]) -> Formula {
    Formula::and(cs.iter().map(lits_formula).collect())
}

/// `¬(c1 ∧ … ∧ ck)` as a disjunction of negated clauses.
fn neg_conj(cs: &[Clause]) -> Formula {
    Formula::negation_of_clauses(cs)
}

fn shift(f: &Formula, n: u32) -> Formula {
    f.rename(&|v| Some(Subst::Var(Var::new(v.id() + n))))
}

fn simple(form: Form, reserved: u32, g: &Formula, sigma: &[Formula], meta: Meta, be: &Backend) -> Built {
    let mut b = PredicateBuilder::new(form, reserved);
    b.assert(g);
    for s in sigma {
        b.push_sigma(s);
    }
    Built {
        pred: b.finish(be.create()),
        meta,
    }
}

/// Builds the predicate for `kind`. Side inputs must already be present
/// (a reference model for FBBr included).
pub fn build_predicate(kind: ProblemKind, inst: &ProblemInstance, be: &Backend) -> Result<Built, ReductionError> {
    let n = inst.num_vars;
    let universe = inst.universe();
    Ok(match kind {
        Fmus | Fmcs | Fmss | Fmcfs | Fmfs => {
            let (hard, elems, ids) = clause_elements(inst, kind)?;
            let (form, sigma): (Form, Vec<Formula>) = match kind {
                Fmus => (Form::P, elems.iter().map(|e| conj(e)).collect()),
                Fmcs | Fmss => (Form::L, elems.iter().map(|e| conj(e)).collect()),
                _ => (Form::L, elems.iter().map(|e| neg_conj(e)).collect()),
            };
            simple(form, n, &conj(&hard), &sigma, Meta::Indices(ids), be)
        }
        Fmes | Fmds | Fmns => {
            let cnf = inst.as_cnf(kind)?;
            let form = if kind == Fmes { Form::P } else { Form::L };
            let mut b = PredicateBuilder::new(form, n);
            for c in &cnf.clauses {
                let pos = b.define(&c.to_formula());
                let neg = b.define(&c.negation().to_formula());
                b.push_element(if kind == Fmes {
                    ElementLits {
                        in_conj: Some(pos),
                        out_disj: Some(neg),
                        ..Default::default()
                    }
                } else {
                    ElementLits {
                        out_conj: Some(pos),
                        in_disj: Some(neg),
                        ..Default::default()
                    }
                });
            }
            Built {
                pred: b.disjunctive(true).finish(be.create()),
                meta: Meta::Indices((1..=cnf.len()).collect()),
            }
        }
        FmnM | FmxM => {
            let f = if kind == FmnM {
                inst.formula()
            } else {
                inst.formula().flip_polarity()
            };
            let sigma: Vec<Formula> = universe.iter().map(|&v| Formula::lit(v.neg())).collect();
            simple(Form::L, n, &f, &sigma, Meta::Vars(universe), be)
        }
        FpIt => {
            let t = inst.term.as_ref().ok_or_else(|| missing(kind, "a term"))?;
            let sigma: Vec<Formula> = t.lits().iter().map(|&l| Formula::lit(l)).collect();
            simple(Form::P, n, &inst.formula().negate(), &sigma, Meta::Lits(t.lits().to_vec()), be)
        }
        FpIc => {
            let c = inst.clause.as_ref().ok_or_else(|| missing(kind, "a clause"))?;
            let sigma: Vec<Formula> = c.lits().iter().map(|&l| Formula::lit(!l)).collect();
            simple(Form::P, n, &inst.formula(), &sigma, Meta::Lits(c.lits().to_vec()), be)
        }
        FleIt | FleIc => {
            let k = inst.unit_index.ok_or_else(|| missing(kind, "a unit index"))?;
            let (unit_lits, g): (Vec<Lit>, Formula) = if kind == FleIt {
                let d = inst.as_dnf(kind)?;
                let tk = d.terms.get(k.wrapping_sub(1)).ok_or_else(|| bad_index(kind, k))?;
                let mut parts = vec![tk.to_formula()];
                for (i, t) in d.terms.iter().enumerate() {
                    if i + 1 != k {
                        parts.push(t.negation().to_formula());
                    }
                }
                (tk.lits().to_vec(), Formula::and(parts))
            } else {
                let f = inst.as_cnf(kind)?;
                let ck = f.clauses.get(k.wrapping_sub(1)).ok_or_else(|| bad_index(kind, k))?;
                let mut parts = vec![ck.negation().to_formula()];
                for (i, c) in f.clauses.iter().enumerate() {
                    if i + 1 != k {
                        parts.push(c.to_formula());
                    }
                }
                (ck.lits().to_vec(), Formula::and(parts))
            };
            let cands: Vec<Lit> = universe
                .iter()
                .filter(|v| unit_lits.iter().all(|l| l.var() != **v))
                .flat_map(|&v| [v.pos(), v.neg()])
                .collect();
            let sigma: Vec<Formula> = cands
                .iter()
                .map(|&l| Formula::lit(if kind == FleIt { !l } else { l }))
                .collect();
            simple(Form::B, n, &g, &sigma, Meta::Lits(cands), be)
        }
        FmnEs => {
            let j = inst.as_cnf(kind)?;
            let i = inst.target.as_ref().ok_or_else(|| missing(kind, "a target formula"))?;
            let sigma: Vec<Formula> = j.clauses.iter().map(Clause::to_formula).collect();
            simple(Form::P, n, &i.clone().negate(), &sigma, Meta::Indices((1..=j.len()).collect()), be)
        }
        FmxEs => {
            let cands = inst.candidates.as_ref().ok_or_else(|| missing(kind, "candidate clauses"))?;
            let sigma: Vec<Formula> = cands.clauses.iter().map(|c| c.negation().to_formula()).collect();
            simple(Form::B, n, &inst.formula(), &sigma, Meta::Indices((1..=cands.len()).collect()), be)
        }
        FbBr => {
            let v = inst.model.as_ref().ok_or_else(|| missing(kind, "a reference model"))?;
            let sigma: Vec<Formula> = v.iter().map(|&l| Formula::lit(!l)).collect();
            simple(Form::B, n, &inst.formula(), &sigma, Meta::Lits(v.clone()), be)
        }
        Fbb => {
            let f = inst.formula();
            let g = Formula::and(vec![f.clone(), shift(&f, n)]);
            let sigma: Vec<Formula> = universe
                .iter()
                .map(|&x| Formula::and(vec![Formula::atom(x), Formula::lit(Var::new(x.id() + n).neg())]))
                .collect();
            simple(Form::B, 2 * n, &g, &sigma, Meta::Vars(universe), be)
        }
        FvInd => {
            let f = inst.formula();
            let g = Formula::xor(shift(&f, n), f);
            let sigma: Vec<Formula> = universe
                .iter()
                .map(|&x| Formula::iff(Formula::atom(x), Formula::atom(Var::new(x.id() + n))))
                .collect();
            simple(Form::P, 2 * n, &g, &sigma, Meta::Vars(universe), be)
        }
        FautL | FautB => {
            let cnf = inst.as_cnf(kind)?;
            let form = if kind == FautL { Form::L } else { Form::B };
            let mut b = PredicateBuilder::new(form, n);
            let mut plus = Vec::new();
            let mut one = Vec::new();
            let mut zero = Vec::new();
            for &x in &universe {
                let p = b.cnf().fresh();
                let sel = Formula::atom(p);
                one.push(b.define(&Formula::and(vec![sel.clone(), Formula::atom(x)])));
                zero.push(b.define(&Formula::and(vec![sel, Formula::lit(x.neg())])));
                plus.push(p);
            }
            for c in &cnf.clauses {
                let translated: Vec<Lit> = c
                    .lits()
                    .iter()
                    .map(|l| {
                        let i = l.var().index() - 1;
                        if l.is_negated() {
                            zero[i]
                        } else {
                            one[i]
                        }
                    })
                    .collect();
                for l in c.lits() {
                    let mut cl = vec![plus[l.var().index() - 1].neg()];
                    cl.extend(&translated);
                    b.cnf().add_clause(&cl);
                }
            }
            for &p in &plus {
                b.push_sigma(&Formula::atom(p));
            }
            Built {
                pred: b.finish(be.create()),
                meta: Meta::Vars(universe),
            }
        }
        Fsmcs | Fsmds | Fsmcfs | FsmnM => optimization(kind, inst, be)?,
    })
}

fn missing(kind: ProblemKind, what: &str) -> ReductionError {
    ReductionError::Input(format!("{kind} needs {what}"))
}

fn bad_index(kind: ProblemKind, k: usize) -> ReductionError {
    ReductionError::Input(format!("{kind}: unit index {k} is out of range"))
}

/// Relaxation selectors `p_i` plus the sequential counter realising the
/// bounds `b ∈ {0..m}`; element `b` asserts `Σ p ≥ b`.
fn optimization(kind: ProblemKind, inst: &ProblemInstance, be: &Backend) -> Result<Built, ReductionError> {
    let n = inst.num_vars;
    let mut b = PredicateBuilder::new(Form::L, n);
    let mut selectors = Vec::new();
    let ids: Vec<usize> = match kind {
        FsmnM => {
            b.assert(&inst.formula());
            for x in inst.universe() {
                let p = b.cnf().fresh().pos();
                b.cnf().add_clause(&[!p, x.neg()]);
                selectors.push(p);
            }
            (1..=n as usize).collect()
        }
        _ => {
            let cnf = inst.as_cnf(kind)?;
            if kind == Fsmds {
                b.assert(&Formula::negation_of_clauses(&cnf.clauses));
            }
            for c in &cnf.clauses {
                let p = b.cnf().fresh().pos();
                if kind == Fsmcfs {
                    // p → ¬c, i.e. p → ¬l for each literal l of c
                    for &l in c.lits() {
                        b.cnf().add_clause(&[!p, !l]);
                    }
                } else {
                    let mut cl = vec![!p];
                    cl.extend_from_slice(c.lits());
                    b.cnf().add_clause(&cl);
                }
                selectors.push(p);
            }
            (1..=cnf.len()).collect()
        }
    };
    let cnf = b.cnf();
    let counter = SequentialCounter::build(&selectors, selectors.len(), &mut || cnf.fresh());
    for c in &counter.clauses {
        cnf.add_clause(c);
    }
    b.push_element(ElementLits::default());
    for bound in 1..=selectors.len() {
        b.push_element(ElementLits {
            out_conj: counter.at_least(bound),
            ..Default::default()
        });
    }
    Ok(Built {
        pred: b.chain(true).finish(be.create()),
        meta: Meta::Bounds { selectors, ids },
    })
}
