//! Propositional formulas: variables, literals, clauses and terms, CNF/DNF
//! sets, the general formula tree, and (partial) truth assignments.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable x{0} is unassigned")]
    Unassigned(u32),
    #[error("clause contains both x{0} and -x{0}")]
    Tautology(u32),
    #[error("term contains both x{0} and -x{0}")]
    Contradiction(u32),
    #[error("assignment sets x{0} both true and false")]
    Inconsistent(u32),
    #[error("substitution source x{0} is not a variable of the formula")]
    SubstitutionSource(u32),
}

/// A propositional variable, identified by a positive index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    ///
    /// Panics if `id` is zero.
    pub fn new(id: u32) -> Self {
        assert!(id >= 1, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal packed as `var << 1 | negated`. The derived order sorts by
/// variable first, positive before negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Self {
        Lit(var.0 << 1 | negated as u32)
    }

    /// Builds a literal from its signed DIMACS form.
    ///
    /// # Panics
    ///
    /// Panics if `value` is zero.
    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0, "0 is not a literal");
        let var = Var::new(value.unsigned_abs() as u32);
        Lit::new(var, value < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense index usable for per-literal tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn complement(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.complement()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

fn normalize(lits: impl IntoIterator<Item = Lit>) -> Vec<Lit> {
    let mut v: Vec<Lit> = lits.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn clashing_var(sorted: &[Lit]) -> Option<Var> {
    sorted
        .windows(2)
        .find(|w| w[0].var() == w[1].var())
        .map(|w| w[0].var())
}

/// A non-tautologous disjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self, FormulaError> {
        let lits = normalize(lits);
        match clashing_var(&lits) {
            Some(v) => Err(FormulaError::Tautology(v.0)),
            None => Ok(Clause(lits)),
        }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, FormulaError> {
        let mut any = false;
        for &l in &self.0 {
            any |= a.lit_value(l).ok_or(FormulaError::Unassigned(l.var().0))?;
        }
        Ok(any)
    }

    /// The negation of the clause as a term of complemented literals.
    pub fn negation(&self) -> Term {
        Term(self.0.iter().map(|&l| !l).collect::<BTreeSet<_>>().into_iter().collect())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.0.iter().map(|&l| Formula::lit(l)).collect())
    }
}

/// A non-contradictory conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Vec<Lit>);

impl Term {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self, FormulaError> {
        let lits = normalize(lits);
        match clashing_var(&lits) {
            Some(v) => Err(FormulaError::Contradiction(v.0)),
            None => Ok(Term(lits)),
        }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, FormulaError> {
        let mut all = true;
        for &l in &self.0 {
            all &= a.lit_value(l).ok_or(FormulaError::Unassigned(l.var().0))?;
        }
        Ok(all)
    }

    pub fn negation(&self) -> Clause {
        Clause(self.0.iter().map(|&l| !l).collect::<BTreeSet<_>>().into_iter().collect())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.0.iter().map(|&l| Formula::lit(l)).collect())
    }
}

/// A CNF formula: an ordered list of clauses over a declared variable count.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Self {
        let max = clauses
            .iter()
            .flat_map(|c| c.lits())
            .map(|l| l.var().0)
            .max()
            .unwrap_or(0);
        Cnf {
            num_vars: num_vars.max(max),
            clauses,
        }
    }

    /// Convenience constructor from signed DIMACS literals.
    pub fn from_dimacs(clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        let cls = clauses
            .iter()
            .map(|c| Clause::new(c.iter().map(|&v| Lit::from_dimacs(v))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cnf::new(0, cls))
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn universe(&self) -> Vec<Var> {
        (1..=self.num_vars).map(Var).collect()
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, FormulaError> {
        let mut all = true;
        for c in &self.clauses {
            all &= c.eval(a)?;
        }
        Ok(all)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.clauses.iter().map(Clause::to_formula).collect())
    }
}

/// A DNF formula: an ordered list of terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Dnf {
    pub num_vars: u32,
    pub terms: Vec<Term>,
}

impl Dnf {
    pub fn new(num_vars: u32, terms: Vec<Term>) -> Self {
        let max = terms
            .iter()
            .flat_map(|t| t.lits())
            .map(|l| l.var().0)
            .max()
            .unwrap_or(0);
        Dnf {
            num_vars: num_vars.max(max),
            terms,
        }
    }

    pub fn from_dimacs(terms: &[&[i64]]) -> Result<Self, FormulaError> {
        let ts = terms
            .iter()
            .map(|t| Term::new(t.iter().map(|&v| Lit::from_dimacs(v))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Dnf::new(0, ts))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn universe(&self) -> Vec<Var> {
        (1..=self.num_vars).map(Var).collect()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.terms.iter().map(Term::to_formula).collect())
    }
}

/// The general formula tree.
///
/// `And`/`Or` nodes built through [`Formula::and`] and [`Formula::or`] always
/// have at least two children; the empty cases collapse to `Const`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Atom(Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

/// Replacement target for [`Formula::substitute`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subst {
    Var(Var),
    Const(bool),
}

impl Formula {
    pub fn atom(v: Var) -> Self {
        Formula::Atom(v)
    }

    pub fn lit(l: Lit) -> Self {
        if l.is_negated() {
            Formula::Not(Box::new(Formula::Atom(l.var())))
        } else {
            Formula::Atom(l.var())
        }
    }

    pub fn and(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::Const(true),
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    pub fn or(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::Const(false),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(vec![a.negate(), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::or(vec![
            Formula::and(vec![a.clone(), b.clone()]),
            Formula::and(vec![a.negate(), b.negate()]),
        ])
    }

    /// `(a ∧ ¬b) ∨ (¬a ∧ b)`.
    pub fn xor(a: Formula, b: Formula) -> Self {
        Formula::or(vec![
            Formula::and(vec![a.clone(), b.clone().negate()]),
            Formula::and(vec![a.negate(), b]),
        ])
    }

    /// Wraps the formula in a negation; a leading negation is cancelled
    /// instead of doubled.
    pub fn negate(self) -> Formula {
        match self {
            Formula::Not(inner) => *inner,
            Formula::Const(b) => Formula::Const(!b),
            other => Formula::Not(Box::new(other)),
        }
    }

    /// As a literal, if the node is an atom or a negated atom.
    pub fn as_lit(&self) -> Option<Lit> {
        match self {
            Formula::Atom(v) => Some(v.pos()),
            Formula::Not(inner) => match **inner {
                Formula::Atom(v) => Some(v.neg()),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Atom(v) => a.value(*v).ok_or(FormulaError::Unassigned(v.0))?,
            Formula::Not(g) => !g.evaluate(a)?,
            Formula::And(cs) => {
                let mut all = true;
                for c in cs {
                    all &= c.evaluate(a)?;
                }
                all
            }
            Formula::Or(cs) => {
                let mut any = false;
                for c in cs {
                    any |= c.evaluate(a)?;
                }
                any
            }
        })
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(v) => {
                out.insert(*v);
            }
            Formula::Not(g) => g.collect_vars(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn max_var(&self) -> u32 {
        self.vars().last().map_or(0, |v| v.0)
    }

    /// Replaces atoms according to `mapping`. Every source must be a variable
    /// of the formula; distinct sources may map to conflicting constants.
    pub fn substitute(&self, mapping: &HashMap<Var, Subst>) -> Result<Formula, FormulaError> {
        let vars = self.vars();
        if let Some(bad) = mapping.keys().find(|k| !vars.contains(k)) {
            return Err(FormulaError::SubstitutionSource(bad.0));
        }
        Ok(self.rename(&|v| mapping.get(&v).copied()))
    }

    /// Renames atoms with `f`; atoms for which `f` returns `None` are kept.
    pub fn rename(&self, f: &dyn Fn(Var) -> Option<Subst>) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(v) => match f(*v) {
                None => Formula::Atom(*v),
                Some(Subst::Var(w)) => Formula::Atom(w),
                Some(Subst::Const(b)) => Formula::Const(b),
            },
            Formula::Not(g) => Formula::Not(Box::new(g.rename(f))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.rename(f)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.rename(f)).collect()),
        }
    }

    /// Complements every literal leaf while keeping the rest of the tree.
    pub fn flip_polarity(&self) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(v) => Formula::Not(Box::new(Formula::Atom(*v))),
            Formula::Not(g) => match **g {
                Formula::Atom(v) => Formula::Atom(v),
                _ => Formula::Not(Box::new(g.flip_polarity())),
            },
            Formula::And(cs) => Formula::And(cs.iter().map(Formula::flip_polarity).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(Formula::flip_polarity).collect()),
        }
    }

    /// `∨_{c ∈ clauses} ¬c`, each `¬c` a term of complemented literals.
    pub fn negation_of_clauses<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> Formula {
        Formula::or(
            clauses
                .into_iter()
                .map(|c| c.negation().to_formula())
                .collect(),
        )
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => write!(f, "true"),
            Formula::Const(false) => write!(f, "false"),
            Formula::Atom(v) => write!(f, "{v}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(cs) | Formula::Or(cs) => {
                let head = if matches!(self, Formula::And(_)) { "and" } else { "or" };
                write!(f, "({head}")?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A consistent set of literals, stored densely by variable id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Result<Self, FormulaError> {
        let mut a = Assignment::new();
        for l in lits {
            a.assign(l)?;
        }
        Ok(a)
    }

    /// Total assignment over `1..=values.len()`, `values[i]` giving `x{i+1}`.
    pub fn from_values(values: &[bool]) -> Self {
        let mut a = Assignment {
            values: Vec::with_capacity(values.len() + 1),
        };
        a.values.push(None);
        a.values.extend(values.iter().map(|&b| Some(b)));
        a.trim();
        a
    }

    fn trim(&mut self) {
        while matches!(self.values.last(), Some(None)) {
            self.values.pop();
        }
    }

    pub fn assign(&mut self, l: Lit) -> Result<(), FormulaError> {
        let v = l.var().index();
        if self.values.len() <= v {
            self.values.resize(v + 1, None);
        }
        let val = !l.is_negated();
        match self.values[v] {
            Some(old) if old != val => Err(FormulaError::Inconsistent(l.var().0)),
            _ => {
                self.values[v] = Some(val);
                Ok(())
            }
        }
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.values.get(v.index()).copied().flatten()
    }

    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value(l.var()).map(|b| b != l.is_negated())
    }

    /// The assigned literals in variable order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Lit::new(Var(i as u32), !b)))
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_total_over(&self, universe: &[Var]) -> bool {
        universe.iter().all(|&v| self.value(v).is_some())
    }

    /// Keeps only the variables in `universe`.
    pub fn restrict(&self, universe: &[Var]) -> Assignment {
        let mut out = Assignment::new();
        for &v in universe {
            if let Some(b) = self.value(v) {
                out.assign(Lit::new(v, !b)).expect("restriction stays consistent");
            }
        }
        out
    }

    /// Variables assigned true.
    pub fn true_vars(&self) -> Vec<Var> {
        self.lits().filter(|l| !l.is_negated()).map(Lit::var).collect()
    }
}
