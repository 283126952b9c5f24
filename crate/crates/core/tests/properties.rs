use proptest::prelude::*;

use msmp::cardenc::encode_geq;
use msmp::clausify::CnfBuilder;
use msmp::engine::{exhaustive_minimal, extract_minimal, Algorithm, ExtractOptions, FnPredicate};
use msmp::formula::{Assignment, Clause, Cnf, Formula, Lit, Var};
use msmp::io::{parse_dimacs, write_dimacs};
use msmp::oracle::Backend;

const VARS: u32 = 6;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (1..=VARS).prop_map(|v| Formula::atom(Var::new(v))),
        any::<bool>().prop_map(Formula::Const),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::and),
            prop::collection::vec(inner, 2..4).prop_map(Formula::or),
        ]
    })
}

fn assignments(n: u32) -> impl Iterator<Item = Assignment> {
    (0..1u32 << n).map(move |bits| Assignment::from_values(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>()))
}

/// Whether some extension of `a` (over `1..=n`) satisfies `cs`, decided by
/// the embedded solver under the assumptions `a`.
fn extends(a: &Assignment, n: u32, total: u32, cs: &[Vec<Lit>]) -> bool {
    let mut o = Backend::Internal.create();
    o.reserve_vars(total);
    for c in cs {
        o.add_clause(c);
    }
    let lits: Vec<Lit> = (1..=n).map(|i| Lit::new(Var::new(i), !a.value(Var::new(i)).unwrap())).collect();
    o.solve(&lits).unwrap().is_sat()
}

fn cnf_strategy() -> impl Strategy<Value = Cnf> {
    let clause = prop::collection::btree_set(1..=8u32, 1..=4).prop_flat_map(|vars| {
        let vars: Vec<u32> = vars.into_iter().collect();
        let n = vars.len();
        prop::collection::vec(any::<bool>(), n).prop_map(move |signs| {
            Clause::new(vars.iter().zip(&signs).map(|(&v, &s)| Lit::new(Var::new(v), s))).unwrap()
        })
    });
    (8u32..12, prop::collection::vec(clause, 0..12)).prop_map(|(n, cs)| Cnf::new(n, cs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn de_morgan_holds(fs in prop::collection::vec(formula(), 2..4)) {
        let lhs = Formula::And(fs.clone()).negate();
        let rhs = Formula::Or(fs.into_iter().map(Formula::negate).collect());
        for a in assignments(VARS) {
            prop_assert_eq!(lhs.evaluate(&a).unwrap(), rhs.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn clausify_preserves_projected_models(f in formula()) {
        let mut b = CnfBuilder::new(VARS);
        b.assert_formula(&f);
        let total = b.num_vars();
        let cs = b.take_clauses();
        for a in assignments(VARS) {
            prop_assert_eq!(f.evaluate(&a).unwrap(), extends(&a, VARS, total, &cs));
        }
    }

    #[test]
    fn flip_polarity_is_an_involution(f in formula()) {
        prop_assert_eq!(f.flip_polarity().flip_polarity(), f);
    }

    #[test]
    fn dimacs_write_parse_fixpoint(cnf in cnf_strategy()) {
        let once = parse_dimacs(&write_dimacs(&cnf)).unwrap();
        prop_assert_eq!(&once, &cnf);
        let twice = parse_dimacs(&write_dimacs(&once)).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn every_algorithm_returns_a_minimal_set(
        n in 0usize..10,
        seeds in prop::collection::vec(prop::collection::btree_set(0usize..10, 0..5), 1..4),
        alg in prop::sample::select(Algorithm::ALL.to_vec()),
    ) {
        // upward closure of a few seed sets: monotone with P(R) true
        let seeds: Vec<Vec<usize>> = seeds.into_iter().map(|s| s.into_iter().filter(|&e| e < n).collect()).collect();
        let holds = move |w: &[usize]| seeds.iter().any(|s| s.iter().all(|e| w.contains(e)));
        let mut p = FnPredicate::new(n, holds.clone());
        let r = extract_minimal(&mut p, alg, &ExtractOptions::default()).unwrap();
        let mut check = FnPredicate::new(n, holds);
        prop_assert_eq!(exhaustive_minimal(&mut check, &r.set).unwrap(), Ok(()));
        if alg == Algorithm::Deletion {
            prop_assert_eq!(r.probes, n as u64);
        }
    }
}

#[test]
fn cardinality_encoding_exact_up_to_eight() {
    for n in 0..=8u32 {
        let lits: Vec<Lit> = (1..=n).map(|i| Var::new(i).pos()).collect();
        for k in 0..=n as usize + 1 {
            let mut next = n;
            let cs = encode_geq(&lits, k, &mut || {
                next += 1;
                Var::new(next)
            });
            for a in assignments(n) {
                let count = (1..=n).filter(|&i| a.value(Var::new(i)) == Some(true)).count();
                assert_eq!(extends(&a, n, next, &cs), count >= k, "n={n} k={k}");
            }
            if k == 0 {
                assert!(cs.is_empty());
            }
            if k > n as usize {
                assert!(cs.iter().any(Vec::is_empty));
            }
        }
    }
}
