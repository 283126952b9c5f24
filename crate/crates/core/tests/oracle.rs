use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use msmp::engine::Algorithm;
use msmp::formula::{Assignment, Lit, Var};
use msmp::oracle::{Backend, Oracle, OracleError, SolveOutcome};
use msmp::reductions::{solve, ProblemKind, SolveOptions};
use msmp::verifier::{instance_for, GeneratorParams};

fn random_clauses(rng: &mut ChaCha8Rng, n: u32, m: usize) -> Vec<Vec<Lit>> {
    (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=3.min(n) as usize);
            let mut c: Vec<Lit> = Vec::new();
            while c.len() < len {
                let v = Var::new(rng.gen_range(1..=n));
                if c.iter().all(|l| l.var() != v) {
                    c.push(Lit::new(v, rng.gen()));
                }
            }
            c
        })
        .collect()
}

fn satisfies(a: &Assignment, clauses: &[Vec<Lit>]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&l| a.lit_value(l) == Some(true)))
}

fn enumerate_sat(n: u32, clauses: &[Vec<Lit>]) -> bool {
    (0..1u32 << n).any(|bits| {
        let a = Assignment::from_values(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
        satisfies(&a, clauses)
    })
}

fn load(o: &mut dyn Oracle, n: u32, clauses: &[Vec<Lit>]) {
    o.reserve_vars(n);
    for c in clauses {
        o.add_clause(c);
    }
}

fn check_against_enumeration(backend: &Backend, instances: usize, max_vars: u32, max_clauses: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..instances {
        let n = rng.gen_range(1..=max_vars);
        let m = rng.gen_range(0..=max_clauses);
        let clauses = random_clauses(&mut rng, n, m);
        let mut o = backend.create();
        load(o.as_mut(), n, &clauses);
        let expected = enumerate_sat(n, &clauses);
        match o.solve(&[]).unwrap() {
            SolveOutcome::Sat(a) => {
                assert!(expected, "instance {i}: solver says sat, enumeration unsat");
                assert!(satisfies(&a, &clauses), "instance {i}: witness falsifies a clause");
                assert!(a.is_total_over(&(1..=n).map(Var::new).collect::<Vec<_>>()));
                sat += 1;
            }
            SolveOutcome::Unsat => {
                assert!(!expected, "instance {i}: solver says unsat, enumeration sat");
                unsat += 1;
            }
        }
        assert_eq!(o.calls(), 1);
    }
    assert!(sat > 0 && unsat > 0, "degenerate sample: {sat} sat, {unsat} unsat");
}

#[test]
fn embedded_solver_agrees_with_enumeration() {
    check_against_enumeration(&Backend::Internal, 1500, 5, 8, 11);
}

#[test]
fn embedded_solver_under_assumptions_and_growth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let mut o = Backend::Internal.create();
        o.reserve_vars(n);
        let mut all = Vec::new();
        for _ in 0..4 {
            let m = rng.gen_range(1..=4);
            let extra = random_clauses(&mut rng, n, m);
            for c in &extra {
                o.add_clause(c);
            }
            all.extend(extra);
            let k = rng.gen_range(0..=n as usize);
            let assumptions: Vec<Lit> = (1..=k as u32).map(|v| Lit::new(Var::new(v), rng.gen())).collect();
            let mut with_units = all.clone();
            with_units.extend(assumptions.iter().map(|&l| vec![l]));
            let got = o.solve(&assumptions).unwrap();
            assert_eq!(got.is_sat(), enumerate_sat(n, &with_units));
            if let Some(a) = got.model() {
                assert!(satisfies(a, &with_units));
            }
        }
    }
}

fn script() -> Option<Backend> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/support/brute_sat.py");
    let ok = Command::new("python3").arg("--version").output().is_ok_and(|o| o.status.success());
    if !ok {
        eprintln!("python3 not found; skipping external solver checks");
        return None;
    }
    Some(Backend::External {
        program: "python3".into(),
        args: vec![path.display().to_string()],
    })
}

#[test]
fn external_adapter_agrees_with_enumeration() {
    let Some(backend) = script() else { return };
    check_against_enumeration(&backend, 200, 8, 12, 3);
}

#[test]
fn external_adapter_handles_assumptions_and_failures() {
    let Some(backend) = script() else { return };
    let mut o = backend.create();
    load(o.as_mut(), 2, &[vec![Lit::from_dimacs(1), Lit::from_dimacs(2)]]);
    let m = o.solve(&[Lit::from_dimacs(-1)]).unwrap().into_model().unwrap();
    assert_eq!(m.value(Var::new(2)), Some(true));
    assert!(!o.solve(&[Lit::from_dimacs(-1), Lit::from_dimacs(-2)]).unwrap().is_sat());
    assert!(o.solve(&[]).unwrap().is_sat());

    let Backend::External { program, mut args } = backend else { unreachable!() };
    args.push("--crash".into());
    let mut o = Backend::External { program, args }.create();
    load(o.as_mut(), 1, &[vec![Lit::from_dimacs(1)]]);
    match o.solve(&[]) {
        Err(OracleError::BadOutput { .. }) => {}
        other => panic!("expected an oracle error, got {other:?}"),
    }

    let mut o = Backend::External {
        program: "/nonexistent/solver".into(),
        args: vec![],
    }
    .create();
    load(o.as_mut(), 1, &[vec![Lit::from_dimacs(1)]]);
    assert!(matches!(o.solve(&[]), Err(OracleError::Spawn { .. })));
}

#[test]
fn external_backend_reproduces_internal_answers() {
    // the script enumerates assignments, so keep queries (with their
    // definition variables) tiny
    let Some(backend) = script() else { return };
    let params = GeneratorParams {
        min_vars: 2,
        max_vars: 3,
        max_clauses: 5,
        max_len: 2,
    };
    let ext_opts = SolveOptions {
        backend,
        ..Default::default()
    };
    let mut compared = 0;
    for seed in 0..60 {
        for kind in [ProblemKind::Fmus, ProblemKind::FmnM] {
            let Some(inst) = instance_for(kind, seed, &params) else { continue };
            let internal = solve(kind, &inst, Algorithm::Deletion, &SolveOptions::default()).unwrap();
            let external = solve(kind, &inst, Algorithm::Deletion, &ext_opts).unwrap();
            assert_eq!(internal.payload, external.payload, "seed {seed} {kind}");
            assert_eq!(internal.total_oracle_calls(), external.total_oracle_calls());
            compared += 1;
        }
        if compared >= 8 {
            break;
        }
    }
    assert!(compared >= 8);
}
