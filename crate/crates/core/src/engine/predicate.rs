use crate::clausify::CnfBuilder;
use crate::formula::{Assignment, Formula, Lit};
use crate::oracle::{Oracle, OracleError};

use super::EngineError;

/// Outcome of one predicate test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub holds: bool,
    pub witness: Option<Assignment>,
}

/// A predicate over subsets of `0..len()`, expected to be monotone.
pub trait Predicate {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tests `P(W)`; `w` lists distinct element indices in any order.
    fn test(&mut self, w: &[usize]) -> Result<Probe, EngineError>;

    /// Whether results should carry a model of the final `P(M)` test.
    fn needs_witness(&self) -> bool {
        false
    }
}

/// Wraps a closure as a predicate, handy for tests and synthetic instances.
pub struct FnPredicate<F> {
    len: usize,
    f: F,
}

impl<F: FnMut(&[usize]) -> bool> FnPredicate<F> {
    pub fn new(len: usize, f: F) -> Self {
        FnPredicate { len, f }
    }
}

impl<F: FnMut(&[usize]) -> bool> Predicate for FnPredicate<F> {
    fn len(&self) -> usize {
        self.len
    }

    fn test(&mut self, w: &[usize]) -> Result<Probe, EngineError> {
        Ok(Probe {
            holds: (self.f)(w),
            witness: None,
        })
    }
}

/// The three oracle shapes a predicate can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// `P(W) = SAT(G ∧ ∧_{u ∈ R\W} σ(u))`
    L,
    /// `P(W) = ¬SAT(G ∧ ∧_{u ∈ W} σ(u))`
    P,
    /// `P(W) = ¬SAT(G ∧ ∨_{u ∈ R\W} σ(u))`
    B,
}

/// Literals standing for an element's formula in each position of a query.
///
/// `in_conj`/`out_conj` are assumed when the element is inside/outside `W`;
/// `in_disj`/`out_disj` join the per-call disjunction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ElementLits {
    pub in_conj: Option<Lit>,
    pub out_conj: Option<Lit>,
    pub in_disj: Option<Lit>,
    pub out_disj: Option<Lit>,
}

/// Accumulates the base formula and element literals of a predicate.
pub struct PredicateBuilder {
    cnf: CnfBuilder,
    form: Form,
    elements: Vec<ElementLits>,
    chain: bool,
    disjunctive: bool,
}

impl PredicateBuilder {
    /// `reserved` is the largest variable id owned by the caller.
    pub fn new(form: Form, reserved: u32) -> Self {
        PredicateBuilder {
            cnf: CnfBuilder::new(reserved),
            form,
            elements: Vec::new(),
            chain: false,
            disjunctive: form == Form::B,
        }
    }

    pub fn cnf(&mut self) -> &mut CnfBuilder {
        &mut self.cnf
    }

    pub fn assert(&mut self, g: &Formula) {
        self.cnf.assert_formula(g);
    }

    pub fn define(&mut self, f: &Formula) -> Lit {
        self.cnf.define(f)
    }

    /// Adds an element whose formula is placed according to the form.
    pub fn push_sigma(&mut self, sigma: &Formula) {
        let l = self.cnf.define(sigma);
        let e = match self.form {
            Form::L => ElementLits {
                out_conj: Some(l),
                ..Default::default()
            },
            Form::P => ElementLits {
                in_conj: Some(l),
                ..Default::default()
            },
            Form::B => ElementLits {
                out_disj: Some(l),
                ..Default::default()
            },
        };
        self.elements.push(e);
    }

    pub fn push_element(&mut self, e: ElementLits) {
        self.elements.push(e);
    }

    /// Only the highest-index element outside `W` contributes its `out_conj`
    /// literal; sound when those literals form an implication chain.
    pub fn chain(mut self, on: bool) -> Self {
        self.chain = on;
        self
    }

    /// Each query carries a disjunction over the `*_disj` literals, empty
    /// (hence false) when no element contributes. Always on for form B.
    pub fn disjunctive(mut self, on: bool) -> Self {
        self.disjunctive |= on;
        self
    }

    pub fn finish(mut self, mut oracle: Box<dyn Oracle>) -> PredicateInstance {
        oracle.reserve_vars(self.cnf.num_vars());
        for c in self.cnf.take_clauses() {
            oracle.add_clause(&c);
        }
        PredicateInstance {
            oracle,
            form: self.form,
            elements: self.elements,
            chain: self.chain,
            disjunctive: self.disjunctive,
            tests: 0,
        }
    }
}

/// A monotone predicate evaluated through an incremental oracle session.
pub struct PredicateInstance {
    oracle: Box<dyn Oracle>,
    form: Form,
    elements: Vec<ElementLits>,
    chain: bool,
    disjunctive: bool,
    tests: u64,
}

impl PredicateInstance {
    pub fn form(&self) -> Form {
        self.form
    }

    pub fn tests(&self) -> u64 {
        self.tests
    }

    pub fn oracle_calls(&self) -> u64 {
        self.oracle.calls()
    }

    /// Direct access to the session, e.g. for a model of the base formula.
    pub fn oracle_mut(&mut self) -> &mut dyn Oracle {
        self.oracle.as_mut()
    }

    fn query(&mut self, w: &[usize]) -> Result<Option<Assignment>, OracleError> {
        let mut inside = vec![false; self.elements.len()];
        for &i in w {
            inside[i] = true;
        }
        let mut assumptions = Vec::new();
        let mut disj = Vec::new();
        let mut top_out = None;
        for (i, e) in self.elements.iter().enumerate() {
            if inside[i] {
                assumptions.extend(e.in_conj);
                disj.extend(e.in_disj);
            } else {
                if self.chain {
                    if e.out_conj.is_some() {
                        top_out = e.out_conj;
                    }
                } else {
                    assumptions.extend(e.out_conj);
                }
                disj.extend(e.out_disj);
            }
        }
        assumptions.extend(top_out);
        let selector = if self.disjunctive {
            let q = self.oracle.num_vars() + 1;
            let q = crate::formula::Var::new(q).pos();
            disj.push(!q);
            self.oracle.add_clause(&disj);
            assumptions.push(q);
            Some(q)
        } else {
            None
        };
        let out = self.oracle.solve(&assumptions)?;
        if let Some(q) = selector {
            self.oracle.add_clause(&[!q]);
        }
        Ok(out.into_model())
    }
}

impl Predicate for PredicateInstance {
    fn len(&self) -> usize {
        self.elements.len()
    }

    fn test(&mut self, w: &[usize]) -> Result<Probe, EngineError> {
        self.tests += 1;
        let model = self.query(w)?;
        let holds = match self.form {
            Form::L => model.is_some(),
            Form::P | Form::B => model.is_none(),
        };
        Ok(Probe {
            holds,
            witness: model,
        })
    }

    fn needs_witness(&self) -> bool {
        self.form == Form::L
    }
}

/// `P(W) = SAT(G ∧ ∧_{u ∈ R\W} σ(u))`
pub fn make_form_l(g: &Formula, sigma: &[Formula], oracle: Box<dyn Oracle>) -> PredicateInstance {
    make_form(Form::L, g, sigma, oracle)
}

/// `P(W) = ¬SAT(G ∧ ∧_{u ∈ W} σ(u))`
pub fn make_form_p(g: &Formula, sigma: &[Formula], oracle: Box<dyn Oracle>) -> PredicateInstance {
    make_form(Form::P, g, sigma, oracle)
}

/// `P(W) = ¬SAT(G ∧ ∨_{u ∈ R\W} σ(u))`
pub fn make_form_b(g: &Formula, sigma: &[Formula], oracle: Box<dyn Oracle>) -> PredicateInstance {
    make_form(Form::B, g, sigma, oracle)
}

fn make_form(form: Form, g: &Formula, sigma: &[Formula], oracle: Box<dyn Oracle>) -> PredicateInstance {
    let reserved = sigma.iter().map(Formula::max_var).fold(g.max_var(), u32::max);
    let mut b = PredicateBuilder::new(form, reserved);
    b.assert(g);
    for s in sigma {
        b.push_sigma(s);
    }
    b.finish(oracle)
}
