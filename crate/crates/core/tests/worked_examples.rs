//! Small hand-checkable instances for each operation.

use std::collections::HashMap;

use msmp::clausify::clausify;
use msmp::engine::{extract_minimal, make_form_b, make_form_l, make_form_p, Algorithm, ExtractOptions, FnPredicate, Predicate};
use msmp::formula::{Assignment, Clause, Cnf, Formula, Lit, Subst, Var};
use msmp::io::{parse_formula_text, parse_gcnf};
use msmp::oracle::{Backend, SolveOutcome};
use msmp::reductions::{solve, AnswerPayload, Payload, ProblemInstance, ProblemKind, ProblemKind::*, SolveOptions};
use msmp::verifier::{brute_solve, check_answer, check_monotone, enumerate_models, BruteAnswer, BruteForceBudget};

fn x(i: u32) -> Formula {
    Formula::atom(Var::new(i))
}

fn cnf(cs: &[&[i64]]) -> Cnf {
    Cnf::from_dimacs(cs).unwrap()
}

fn e2() -> ProblemInstance {
    ProblemInstance::cnf(cnf(&[&[1], &[-1], &[2]]))
}

fn fml(src: &str) -> ProblemInstance {
    let p = parse_formula_text(src).unwrap();
    let mut inst = ProblemInstance::new(Payload::Formula(p.formula));
    inst.num_vars = p.num_vars;
    inst
}

fn run(kind: ProblemKind, inst: &ProblemInstance, alg: Algorithm) -> msmp::reductions::ProblemAnswer {
    solve(kind, inst, alg, &SolveOptions { verify: true, ..Default::default() }).unwrap()
}

fn items(kind: ProblemKind, inst: &ProblemInstance, alg: Algorithm) -> Vec<i64> {
    run(kind, inst, alg).payload.items()
}

fn all_assignments(n: u32) -> Vec<Assignment> {
    (0..1u32 << n)
        .map(|bits| Assignment::from_values(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

// formula

#[test]
fn double_negation_evaluates_as_atom() {
    let f = x(1).negate().negate();
    for a in all_assignments(1) {
        assert_eq!(f.evaluate(&a).unwrap(), x(1).evaluate(&a).unwrap());
    }
}

#[test]
fn substitute_constant() {
    let f = Formula::or(vec![x(1), x(2)]);
    let g = f.substitute(&HashMap::from([(Var::new(2), Subst::Const(false))])).unwrap();
    for a in all_assignments(2) {
        assert_eq!(g.evaluate(&a).unwrap(), a.value(Var::new(1)).unwrap());
    }
}

#[test]
fn flip_polarity_of_disjunction() {
    let f = Formula::or(vec![x(1), x(2)]);
    assert_eq!(f.flip_polarity(), Formula::or(vec![x(1).negate(), x(2).negate()]));
}

#[test]
fn clausify_flat_conjunction() {
    let (cs, n) = clausify(&Formula::and(vec![x(1), x(2)]));
    assert_eq!(n, 2);
    let v: Vec<Vec<i64>> = cs.iter().map(|c| c.iter().map(|l| l.to_dimacs()).collect()).collect();
    assert_eq!(v, vec![vec![1], vec![2]]);
}

#[test]
fn negation_of_clause_sets() {
    assert_eq!(Formula::negation_of_clauses(&[] as &[Clause]), Formula::Const(false));
    let s = cnf(&[&[1], &[-1]]);
    let f = Formula::negation_of_clauses(&s.clauses);
    assert!(all_assignments(1).iter().any(|a| f.evaluate(a).unwrap()));
}

// oracle

#[test]
fn oracle_contract() {
    let mut o = Backend::Internal.create();
    o.add_clause(&[Lit::from_dimacs(1)]);
    o.add_clause(&[Lit::from_dimacs(-1)]);
    assert_eq!(o.solve(&[]).unwrap(), SolveOutcome::Unsat);

    let mut o = Backend::Internal.create();
    o.add_clause(&[Lit::from_dimacs(1), Lit::from_dimacs(2)]);
    let m = o.solve(&[Lit::from_dimacs(-1)]).unwrap().into_model().unwrap();
    assert_eq!(m.value(Var::new(2)), Some(true));

    let mut o = Backend::Internal.create();
    o.add_clause(&[Lit::from_dimacs(-1)]);
    assert!(!o.solve(&[Lit::from_dimacs(1)]).unwrap().is_sat());
    assert!(o.solve(&[]).unwrap().is_sat());
    assert_eq!(o.calls(), 2);
}

// engine

#[test]
fn deletion_on_three_clauses() {
    let sigma: Vec<Formula> = e2().formula_clauses();
    let mut p = make_form_p(&Formula::Const(true), &sigma, Backend::Internal.create());
    let opts = ExtractOptions { check_wellposed: false, order: None };
    let r = extract_minimal(&mut p, Algorithm::Deletion, &opts).unwrap();
    assert_eq!(r.set, vec![0, 1]);
    assert_eq!(r.oracle_calls, 3);

    let mut p = make_form_p(&Formula::Const(true), &sigma, Backend::Internal.create());
    let r = extract_minimal(&mut p, Algorithm::Deletion, &ExtractOptions::default()).unwrap();
    assert_eq!((r.probes, r.oracle_calls), (3, 4));
}

trait Clauses {
    fn formula_clauses(&self) -> Vec<Formula>;
}

impl Clauses for ProblemInstance {
    fn formula_clauses(&self) -> Vec<Formula> {
        match &self.payload {
            Payload::Cnf(c) => c.clauses.iter().map(Clause::to_formula).collect(),
            _ => unreachable!(),
        }
    }
}

#[test]
fn form_l_full_set_is_sat_of_base() {
    // FMCS on unsat F with empty G: the empty conjunction over R \ R
    let sigma = e2().formula_clauses();
    let mut p = make_form_l(&Formula::Const(true), &sigma, Backend::Internal.create());
    assert!(p.test(&[0, 1, 2]).unwrap().holds);
    assert!(!p.test(&[]).unwrap().holds);
}

#[test]
fn form_b_full_set_always_holds() {
    let mut p = make_form_b(&x(1), &[x(1), x(2)], Backend::Internal.create());
    assert!(p.test(&[0, 1]).unwrap().holds);
    let mut p = make_form_b(&Formula::Const(true), &[], Backend::Internal.create());
    assert!(p.test(&[]).unwrap().holds);
}

// reductions

#[test]
fn mus_of_e2() {
    let a = run(Fmus, &e2(), Algorithm::Deletion);
    assert_eq!(a.payload.items(), vec![1, 2]);
    assert_eq!(a.result.oracle_calls, 3);
    assert_eq!(a.precondition_calls, 1);
    assert_eq!(a.reference_size, 3);
}

#[test]
fn mcs_and_mss_of_e2_with_deletion() {
    // dropping c1 leaves {c1} satisfiable, so deletion discards c1 first
    assert_eq!(items(Fmcs, &e2(), Algorithm::Deletion), vec![2]);
    assert_eq!(items(Fmss, &e2(), Algorithm::Deletion), vec![1, 3]);
}

#[test]
fn mes_drops_subsumed_clause() {
    let inst = ProblemInstance::cnf(cnf(&[&[1], &[1, 2]]));
    for alg in Algorithm::ALL {
        assert_eq!(items(Fmes, &inst, alg), vec![1]);
    }
}

#[test]
fn min_and_max_model() {
    let inst = ProblemInstance::cnf(cnf(&[&[1, 2]]));
    // deletion removes x1 first (F ∧ ¬x1 is satisfiable); insertion keeps it
    assert_eq!(items(FmnM, &inst, Algorithm::Deletion), vec![2]);
    assert_eq!(items(FmnM, &inst, Algorithm::Insertion), vec![1]);
    assert_eq!(items(FmxM, &inst, Algorithm::Deletion), vec![1, 2]);
}

#[test]
fn prime_implicant_and_implicate() {
    let mut inst = fml("(or x1 (and x1 x2))");
    inst.term = Some(msmp::formula::Term::new([Lit::from_dimacs(1), Lit::from_dimacs(2)]).unwrap());
    assert_eq!(items(FpIt, &inst, Algorithm::Deletion), vec![1]);

    let mut inst = fml("(and x1 (or x1 x2))");
    inst.clause = Some(Clause::new([Lit::from_dimacs(1), Lit::from_dimacs(2)]).unwrap());
    assert_eq!(items(FpIc, &inst, Algorithm::Deletion), vec![1]);
}

#[test]
fn longest_extension_of_implicate() {
    let mut inst = ProblemInstance::cnf(cnf(&[&[1, 2], &[1]]));
    inst.unit_index = Some(2);
    for alg in Algorithm::ALL {
        let a = run(FleIc, &inst, alg);
        assert_eq!(a.payload.items(), vec![1, -2]);
        assert!(!a.degenerate);
    }
}

#[test]
fn backbones() {
    let mut inst = ProblemInstance::cnf(cnf(&[&[1], &[2, 3]]));
    for alg in Algorithm::ALL {
        assert_eq!(items(Fbb, &inst, alg), vec![1]);
    }
    inst.model = Some([1, 2, -3].map(Lit::from_dimacs).to_vec());
    let a = run(FbBr, &inst, Algorithm::Progression);
    assert_eq!(a.reference_size, 3);
    assert_eq!(a.payload.items(), vec![1]);
}

#[test]
fn independent_variable() {
    let inst = fml("(or (and x1 x2) (and x1 (not x2)))");
    for alg in Algorithm::ALL {
        assert_eq!(items(FvInd, &inst, alg), vec![2]);
    }
}

#[test]
fn maximal_autarky() {
    let inst = ProblemInstance::cnf(cnf(&[&[1, 2], &[-1, 2], &[3], &[-3]]));
    for alg in Algorithm::ALL {
        assert_eq!(items(FautL, &inst, alg), vec![1, 2]);
        assert_eq!(items(FautB, &inst, alg), vec![1, 2]);
    }
}

#[test]
fn optimization_values() {
    let two_pairs = ProblemInstance::cnf(cnf(&[&[1], &[-1], &[2], &[-2]]));
    assert_eq!(run(Fsmcs, &two_pairs, Algorithm::Progression).payload.optimum(), Some(2));

    let pair = ProblemInstance::cnf(cnf(&[&[1], &[-1]]));
    assert_eq!(run(Fsmcfs, &pair, Algorithm::Progression).payload.optimum(), Some(1));

    let f = ProblemInstance::cnf(cnf(&[&[1, 2], &[1, 3]]));
    let a = run(FsmnM, &f, Algorithm::Progression);
    assert_eq!(a.payload.optimum(), Some(1));
    assert_eq!(a.payload.items(), vec![1]);

    let sat = ProblemInstance::cnf(cnf(&[&[1, 2], &[-1]]));
    assert_eq!(run(Fsmcs, &sat, Algorithm::Deletion).payload.optimum(), Some(0));
}

#[test]
fn maximal_entailed_subset() {
    let mut inst = ProblemInstance::cnf(cnf(&[&[1]]));
    inst.candidates = Some(cnf(&[&[1], &[2], &[1, 2]]));
    for alg in Algorithm::ALL {
        assert_eq!(items(FmxEs, &inst, alg), vec![1, 3]);
    }
}

#[test]
fn satisfiable_input_rejected_for_mus() {
    let inst = ProblemInstance::cnf(cnf(&[&[1, 2]]));
    let e = solve(Fmus, &inst, Algorithm::Deletion, &SolveOptions::default()).unwrap_err();
    assert!(e.to_string().contains("FMUS requires F ⊨ ⊥"), "{e}");
}

// groups

#[test]
fn group_mus() {
    let load = |src: &str| {
        let (f, g, k) = parse_gcnf(src).unwrap();
        let mut inst = ProblemInstance::cnf(f);
        inst.groups = Some((g, k));
        inst
    };
    let a = run(Fmus, &load("p gcnf 1 2 1\n{0} 1 0\n{1} -1 0\n"), Algorithm::Deletion);
    assert_eq!((a.reference_size, a.payload.items()), (1, vec![1]));

    let a = run(Fmus, &load("p gcnf 1 2 0\n{0} 1 0\n{0} -1 0\n"), Algorithm::Progression);
    assert_eq!(a.payload, AnswerPayload::Indices(vec![]));

    let inst = load("p gcnf 1 2 2\n{1} 1 0\n{2} -1 0\n");
    for alg in Algorithm::ALL {
        assert_eq!(items(Fmus, &inst, alg), vec![1, 2]);
    }
}

// verifier

#[test]
fn brute_force_answers() {
    let b = BruteForceBudget::default();
    let pair = ProblemInstance::cnf(cnf(&[&[1], &[-1]]));
    assert_eq!(brute_solve(Fmcs, &pair, &b).unwrap(), BruteAnswer::Sets(vec![vec![1], vec![2]]));
    let f = ProblemInstance::cnf(cnf(&[&[1], &[2, 3]]));
    assert_eq!(brute_solve(Fbb, &f, &b).unwrap().sets(), &[vec![1]]);
    let aut = ProblemInstance::cnf(cnf(&[&[1, 2], &[-1, 2], &[3], &[-3]]));
    assert_eq!(brute_solve(FautL, &aut, &b).unwrap().sets(), &[vec![1, 2]]);
}

#[test]
fn checker_verdicts() {
    let b = BruteForceBudget::default();
    let ok = check_answer(Fmus, &AnswerPayload::Indices(vec![1, 2]), &e2(), &b).unwrap();
    assert!(ok.pass);
    let bad = check_answer(Fmus, &AnswerPayload::Indices(vec![1, 2, 3]), &e2(), &b).unwrap();
    assert!(!bad.pass);
    assert_eq!(bad.reason, "not minimal");
    let two_pairs = ProblemInstance::cnf(cnf(&[&[1], &[-1], &[2], &[-2]]));
    let three = AnswerPayload::Optimum { value: 3, set: Box::new(AnswerPayload::Indices(vec![1, 2, 3])) };
    let out = check_answer(Fsmcs, &three, &two_pairs, &b).unwrap();
    assert!(!out.pass);
    assert!(out.reason.starts_with("optimum is 2"), "{}", out.reason);
}

#[test]
fn model_enumeration() {
    let b = BruteForceBudget::default();
    assert_eq!(enumerate_models(&Formula::or(vec![x(1), x(2)]), &b).unwrap().len(), 3);
    assert_eq!(enumerate_models(&Formula::and(vec![x(1), x(1).negate()]), &b).unwrap().len(), 0);
    assert_eq!(enumerate_models(&Formula::iff(x(1), x(2)), &b).unwrap().len(), 2);
}

#[test]
fn monotonicity_reports() {
    let sigma = e2().formula_clauses();
    let mut p = make_form_p(&Formula::Const(true), &sigma, Backend::Internal.create());
    assert_eq!(check_monotone(&mut p, 100, 0).unwrap().violations, 0);

    let mut at_least = FnPredicate::new(6, |w: &[usize]| w.len() >= 3);
    assert_eq!(check_monotone(&mut at_least, 200, 0).unwrap().violations, 0);

    let mut parity = FnPredicate::new(6, |w: &[usize]| w.len() % 2 == 1);
    let r = check_monotone(&mut parity, 200, 0).unwrap();
    assert!(r.violations > 0);
    let (w0, w1) = r.counterexample.unwrap();
    assert!(w0.iter().all(|e| w1.contains(e)));

    let mut empty = FnPredicate::new(0, |_: &[usize]| true);
    assert_eq!(check_monotone(&mut empty, 10, 0).unwrap().violations, 0);
}
