//! Function problems over Boolean formulas, each reduced to a minimal set
//! over a monotone predicate and decoded back into the problem's answer.

mod build;
mod decode;

pub use build::{build_predicate, Built, Meta};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clausify::CnfBuilder;
use crate::engine::{
    extract_minimal, verify_minimal, Algorithm, EngineError, ExtractOptions, MinimalSetResult, Predicate,
};
use crate::formula::{Assignment, Clause, Cnf, Dnf, Formula, Lit, Term, Var};
use crate::oracle::{Backend, OracleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Fmus,
    Fmcs,
    Fmss,
    Fmes,
    Fmds,
    Fmns,
    Fmcfs,
    Fmfs,
    FmnM,
    FmxM,
    FpIt,
    FpIc,
    FleIt,
    FleIc,
    FmnEs,
    FmxEs,
    FbBr,
    Fbb,
    FvInd,
    FautL,
    FautB,
    Fsmcs,
    Fsmds,
    Fsmcfs,
    FsmnM,
}

use ProblemKind::*;

impl ProblemKind {
    pub const ALL: [ProblemKind; 25] = [
        Fmus, Fmcs, Fmss, Fmes, Fmds, Fmns, Fmcfs, Fmfs, FmnM, FmxM, FpIt, FpIc, FleIt, FleIc,
        FmnEs, FmxEs, FbBr, Fbb, FvInd, FautL, FautB, Fsmcs, Fsmds, Fsmcfs, FsmnM,
    ];

    /// Conventional acronym, e.g. `FMUS`.
    pub fn acronym(self) -> &'static str {
        match self {
            Fmus => "FMUS",
            Fmcs => "FMCS",
            Fmss => "FMSS",
            Fmes => "FMES",
            Fmds => "FMDS",
            Fmns => "FMNS",
            Fmcfs => "FMCFS",
            Fmfs => "FMFS",
            FmnM => "FMnM",
            FmxM => "FMxM",
            FpIt => "FPIt",
            FpIc => "FPIc",
            FleIt => "FLEIt",
            FleIc => "FLEIc",
            FmnEs => "FMnES",
            FmxEs => "FMxES",
            FbBr => "FBBr",
            Fbb => "FBB",
            FvInd => "FVInd",
            FautL => "FAutL",
            FautB => "FAutB",
            Fsmcs => "FSMCS",
            Fsmds => "FSMDS",
            Fsmcfs => "FSMCFS",
            FsmnM => "FSMnM",
        }
    }

    /// Command-line name. Both autarky forms share `autarky`.
    pub fn cli_name(self) -> &'static str {
        match self {
            Fmus => "mus",
            Fmcs => "mcs",
            Fmss => "mss",
            Fmes => "mes",
            Fmds => "mds",
            Fmns => "mns",
            Fmcfs => "mcfs",
            Fmfs => "mfs",
            FmnM => "minmodel",
            FmxM => "maxmodel",
            FpIt => "pit",
            FpIc => "pic",
            FleIt => "leit",
            FleIc => "leic",
            FmnEs => "mnes",
            FmxEs => "mxes",
            FbBr => "backbone",
            Fbb => "backbone-full",
            FvInd => "varind",
            FautL | FautB => "autarky",
            Fsmcs => "smcs",
            Fsmds => "smds",
            Fsmcfs => "smcfs",
            FsmnM => "smnm",
        }
    }

    /// Looks up a command-line name; `autarky` maps to the sat-form variant.
    pub fn from_cli(name: &str) -> Option<ProblemKind> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == name && *k != FautB)
    }

    pub fn is_optimization(self) -> bool {
        matches!(self, Fsmcs | Fsmds | Fsmcfs | FsmnM)
    }

    /// Kinds whose answer is the same for every algorithm and order.
    pub fn has_unique_answer(self) -> bool {
        matches!(self, FleIt | FleIc | FmxEs | FbBr | Fbb | FautL | FautB)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.acronym())
    }
}

impl FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.acronym().eq_ignore_ascii_case(s))
            .or_else(|| ProblemKind::from_cli(s))
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("{kind} requires {requirement}")]
    Precondition {
        kind: ProblemKind,
        requirement: String,
    },
    #[error("{kind}: ill-posed instance, the predicate is false on the full reference set")]
    IllPosed { kind: ProblemKind },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(EngineError),
    #[error("{kind}: minimality certificate failed: {reason}")]
    Certificate { kind: ProblemKind, reason: String },
}

impl From<EngineError> for ReductionError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Oracle(o) => ReductionError::Oracle(o),
            other => ReductionError::Engine(other),
        }
    }
}

/// Main formula of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Cnf(Cnf),
    Dnf(Dnf),
    Formula(Formula),
}

/// A formula plus the side inputs some problems need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub payload: Payload,
    /// Variable universe is `1..=num_vars`.
    pub num_vars: u32,
    /// Group id per clause (0 = hard) and the number of groups.
    pub groups: Option<(Vec<u32>, u32)>,
    /// Term `t` (FPIt).
    pub term: Option<Term>,
    /// Clause `c` (FPIc).
    pub clause: Option<Clause>,
    /// 1-based index of the unit to extend (FLEIt, FLEIc).
    pub unit_index: Option<usize>,
    /// Target formula `I` (FMnES).
    pub target: Option<Formula>,
    /// Candidate clauses `N` (FMxES).
    pub candidates: Option<Cnf>,
    /// Reference model `V` (FBBr).
    pub model: Option<Vec<Lit>>,
}

impl ProblemInstance {
    pub fn new(payload: Payload) -> Self {
        let num_vars = match &payload {
            Payload::Cnf(c) => c.num_vars,
            Payload::Dnf(d) => d.num_vars,
            Payload::Formula(f) => f.max_var(),
        };
        ProblemInstance {
            payload,
            num_vars,
            groups: None,
            term: None,
            clause: None,
            unit_index: None,
            target: None,
            candidates: None,
            model: None,
        }
    }

    pub fn cnf(cnf: Cnf) -> Self {
        Self::new(Payload::Cnf(cnf))
    }

    /// Widens the universe to cover the side inputs.
    pub fn normalize_universe(&mut self) {
        let mut n = self.num_vars;
        let lit_max = |ls: &[Lit]| ls.iter().map(|l| l.var().id()).max().unwrap_or(0);
        if let Some(t) = &self.term {
            n = n.max(lit_max(t.lits()));
        }
        if let Some(c) = &self.clause {
            n = n.max(lit_max(c.lits()));
        }
        if let Some(i) = &self.target {
            n = n.max(i.max_var());
        }
        if let Some(c) = &self.candidates {
            n = n.max(c.num_vars);
        }
        if let Some(m) = &self.model {
            n = n.max(lit_max(m));
        }
        self.num_vars = n;
    }

    pub fn universe(&self) -> Vec<Var> {
        (1..=self.num_vars).map(Var::new).collect()
    }

    pub fn formula(&self) -> Formula {
        match &self.payload {
            Payload::Cnf(c) => c.to_formula(),
            Payload::Dnf(d) => d.to_formula(),
            Payload::Formula(f) => f.clone(),
        }
    }

    pub fn as_cnf(&self, kind: ProblemKind) -> Result<&Cnf, ReductionError> {
        match &self.payload {
            Payload::Cnf(c) => Ok(c),
            _ => Err(ReductionError::Input(format!("{kind} needs CNF input"))),
        }
    }

    pub fn as_dnf(&self, kind: ProblemKind) -> Result<&Dnf, ReductionError> {
        match &self.payload {
            Payload::Dnf(d) => Ok(d),
            _ => Err(ReductionError::Input(format!("{kind} needs DNF input"))),
        }
    }

    fn require<'a, T>(&self, v: &'a Option<T>, kind: ProblemKind, what: &str) -> Result<&'a T, ReductionError> {
        v.as_ref()
            .ok_or_else(|| ReductionError::Input(format!("{kind} needs {what}")))
    }
}

/// Decoded answer of a function problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnswerPayload {
    /// 1-based clause, term or group indices, ascending.
    Indices(Vec<usize>),
    Literals(Vec<Lit>),
    Vars(Vec<Var>),
    /// Optimum value with a subset attaining it.
    Optimum { value: usize, set: Box<AnswerPayload> },
}

impl AnswerPayload {
    /// Signed integer form: indices and variable ids as positive numbers,
    /// literals in DIMACS form, sorted by magnitude then sign.
    pub fn items(&self) -> Vec<i64> {
        let mut v: Vec<i64> = match self {
            AnswerPayload::Indices(ix) => ix.iter().map(|&i| i as i64).collect(),
            AnswerPayload::Literals(ls) => ls.iter().map(|l| l.to_dimacs()).collect(),
            AnswerPayload::Vars(vs) => vs.iter().map(|v| v.id() as i64).collect(),
            AnswerPayload::Optimum { set, .. } => return set.items(),
        };
        v.sort_by_key(|&x| (x.unsigned_abs(), x < 0));
        v
    }

    pub fn optimum(&self) -> Option<usize> {
        match self {
            AnswerPayload::Optimum { value, .. } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemAnswer {
    pub kind: ProblemKind,
    pub payload: AnswerPayload,
    pub result: MinimalSetResult,
    /// Size of the reference set the minimal set was drawn from.
    pub reference_size: usize,
    /// Oracle calls spent on preconditions and on computing a missing model.
    pub precondition_calls: u64,
    /// Oracle calls spent after extraction (e.g. backbone polarities).
    pub decode_calls: u64,
    /// Set when an extension problem admits contradictory candidates; see
    /// [`ProblemKind::FleIt`].
    pub degenerate: bool,
}

impl ProblemAnswer {
    pub fn total_oracle_calls(&self) -> u64 {
        self.precondition_calls + self.result.oracle_calls + self.decode_calls
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub backend: Backend,
    pub assume_wellposed: bool,
    /// Re-check minimality of the extracted set with fresh oracle calls.
    pub verify: bool,
    pub order: Option<Vec<usize>>,
}

/// One oracle call on `f`; returns a model restricted to `1..=keep` if sat.
fn sat_model(f: &Formula, keep: u32, backend: &Backend) -> Result<Option<Assignment>, OracleError> {
    let mut b = CnfBuilder::new(keep.max(f.max_var()));
    b.assert_formula(f);
    let mut oracle = backend.create();
    oracle.reserve_vars(b.num_vars());
    for c in b.take_clauses() {
        oracle.add_clause(&c);
    }
    let universe: Vec<Var> = (1..=keep).map(Var::new).collect();
    Ok(oracle.solve(&[])?.into_model().map(|m| m.restrict(&universe)))
}

fn precondition(kind: ProblemKind, requirement: &str) -> ReductionError {
    ReductionError::Precondition {
        kind,
        requirement: requirement.to_string(),
    }
}

struct Prepared {
    calls: u64,
    model: Option<Assignment>,
}

/// Checks the kind's precondition and fills in derived side inputs.
fn prepare(kind: ProblemKind, inst: &mut ProblemInstance, opts: &SolveOptions) -> Result<Prepared, ReductionError> {
    let mut p = Prepared {
        calls: 0,
        model: None,
    };
    let n = inst.num_vars;
    let be = &opts.backend;
    let check = !opts.assume_wellposed;

    if inst.groups.is_some() && !matches!(kind, Fmus | Fmcs) {
        return Err(ReductionError::Input(format!(
            "{kind} does not accept grouped input (only FMUS and FMCS do)"
        )));
    }

    match kind {
        Fmus | Fmcs | Fmss | FautL | FautB => {
            inst.as_cnf(kind)?;
            if check {
                p.calls += 1;
                if sat_model(&inst.formula(), n, be)?.is_some() {
                    return Err(precondition(kind, "F ⊨ ⊥, but the formula is satisfiable"));
                }
            }
        }
        Fmds | Fmns | Fsmds => {
            if inst.as_cnf(kind)?.is_empty() {
                return Err(precondition(kind, "a non-empty formula"));
            }
        }
        FmnM | FmxM | FsmnM => {
            if check {
                p.calls += 1;
                if sat_model(&inst.formula(), n, be)?.is_none() {
                    return Err(precondition(kind, "F ⊭ ⊥, but the formula is unsatisfiable"));
                }
            }
        }
        Fbb => {
            // The model doubles as the source of backbone polarities.
            p.calls += 1;
            p.model = sat_model(&inst.formula(), n, be)?;
            if p.model.is_none() {
                return Err(precondition(kind, "F ⊭ ⊥, but the formula is unsatisfiable"));
            }
        }
        FpIt => {
            let t = inst.require(&inst.term, kind, "a term (--term)")?.clone();
            if check {
                p.calls += 1;
                let f = Formula::and(vec![inst.formula().negate(), t.to_formula()]);
                if sat_model(&f, n, be)?.is_some() {
                    return Err(precondition(kind, "t ⊨ F, but the term does not entail the formula"));
                }
            }
        }
        FpIc => {
            let c = inst.require(&inst.clause, kind, "a clause (--clause)")?.clone();
            if check {
                p.calls += 1;
                let f = Formula::and(vec![inst.formula(), c.negation().to_formula()]);
                if sat_model(&f, n, be)?.is_some() {
                    return Err(precondition(kind, "F ⊨ c, but the formula does not entail the clause"));
                }
            }
        }
        FleIt | FleIc => {
            let units = if kind == FleIt {
                inst.as_dnf(kind)?.len()
            } else {
                inst.as_cnf(kind)?.len()
            };
            let k = *inst.require(&inst.unit_index, kind, "a unit index (--unit-index)")?;
            if k == 0 || k > units {
                return Err(precondition(
                    kind,
                    &format!("the indexed unit to belong to F, but index {k} is outside 1..={units}"),
                ));
            }
        }
        FmnEs => {
            let i = inst.require(&inst.target, kind, "a target formula (--target)")?.clone();
            let j = inst.as_cnf(kind)?;
            if check {
                p.calls += 1;
                let f = Formula::and(vec![j.to_formula(), i.negate()]);
                if sat_model(&f, n, be)?.is_some() {
                    return Err(precondition(kind, "J ⊨ I, but the formula does not entail the target"));
                }
            }
        }
        FmxEs => {
            inst.require(&inst.candidates, kind, "a candidate clause set (--candidates)")?;
            if check {
                p.calls += 1;
                if sat_model(&inst.formula(), n, be)?.is_none() {
                    return Err(precondition(kind, "J ⊭ ⊥, but the formula is unsatisfiable"));
                }
            }
        }
        FbBr => match &inst.model {
            Some(v) => {
                let a = Assignment::from_lits(v.iter().copied()).map_err(|e| {
                    precondition(kind, &format!("V to be a model of F, but V is inconsistent ({e})"))
                })?;
                if !a.is_total_over(&inst.universe()) {
                    return Err(precondition(kind, "V to be a model of F, but V is not total"));
                }
                if !inst.formula().evaluate(&a).unwrap_or(false) {
                    return Err(precondition(kind, "V to be a model of F, but V falsifies F"));
                }
            }
            None => {
                p.calls += 1;
                let m = sat_model(&inst.formula(), n, be)?
                    .ok_or_else(|| precondition(kind, "F ⊭ ⊥, but the formula is unsatisfiable"))?;
                let mut lits: Vec<Lit> = m.lits().collect();
                for v in inst.universe() {
                    if m.value(v).is_none() {
                        lits.push(v.neg());
                    }
                }
                lits.sort_unstable();
                inst.model = Some(lits);
            }
        },
        Fmes | Fmcfs | Fmfs | Fsmcs | Fsmcfs => {
            inst.as_cnf(kind)?;
        }
        FvInd => {}
    }
    Ok(p)
}

/// Whether the kind's precondition (or its structure) already guarantees
/// that the predicate holds on the whole reference set.
fn wellposed_implied(kind: ProblemKind, inst: &ProblemInstance) -> bool {
    !(kind == Fmcs && inst.groups.is_some())
}

/// Size of the reference set `solve` would extract from, without oracle
/// calls. Useful for building a custom traversal order.
pub fn reference_size(kind: ProblemKind, inst: &ProblemInstance, opts: &SolveOptions) -> Result<usize, ReductionError> {
    let mut inst = inst.clone();
    inst.normalize_universe();
    if kind == FbBr && inst.model.is_none() {
        inst.model = Some(inst.universe().into_iter().map(Var::neg).collect());
    }
    Ok(build_predicate(kind, &inst, &opts.backend)?.meta.len())
}

/// The predicate `solve` would extract from, after checking preconditions
/// and filling derived side inputs.
pub fn prepared_predicate(kind: ProblemKind, inst: &ProblemInstance, opts: &SolveOptions) -> Result<Built, ReductionError> {
    let mut inst = inst.clone();
    inst.normalize_universe();
    prepare(kind, &mut inst, opts)?;
    build_predicate(kind, &inst, &opts.backend)
}

/// Solves `kind` on `inst` with algorithm `alg`.
pub fn solve(
    kind: ProblemKind,
    inst: &ProblemInstance,
    alg: Algorithm,
    opts: &SolveOptions,
) -> Result<ProblemAnswer, ReductionError> {
    let mut inst = inst.clone();
    inst.normalize_universe();
    let prep = prepare(kind, &mut inst, opts)?;
    let mut built = build_predicate(kind, &inst, &opts.backend)?;
    let reference_size = built.pred.len();
    let eopts = ExtractOptions {
        check_wellposed: !opts.assume_wellposed && !wellposed_implied(kind, &inst),
        order: opts.order.clone(),
    };
    let result = match extract_minimal(&mut built.pred, alg, &eopts) {
        Err(EngineError::IllPosed) => return Err(ReductionError::IllPosed { kind }),
        other => other?,
    };
    let mut decode_calls = 0;
    let model = match prep.model {
        Some(m) => Some(m),
        None if kind == Fbb => {
            decode_calls += 1;
            sat_model(&inst.formula(), inst.num_vars, &opts.backend)?
        }
        None => None,
    };
    let (payload, degenerate) = decode::decode(kind, &inst, &built.meta, &result, model.as_ref())?;
    if opts.verify {
        let mut fresh = build_predicate(kind, &inst, &opts.backend)?;
        if let Err(reason) = verify_minimal(&mut fresh.pred, &result.set)? {
            return Err(ReductionError::Certificate { kind, reason });
        }
    }
    Ok(ProblemAnswer {
        kind,
        payload,
        result,
        reference_size,
        precondition_calls: prep.calls,
        decode_calls,
        degenerate,
    })
}
