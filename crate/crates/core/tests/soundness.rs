use msmp::engine::Algorithm;
use msmp::reductions::{solve, ProblemKind, SolveOptions};
use msmp::verifier::{brute_solve, compare, instance_for, BruteForceBudget, GeneratorParams};

#[test]
fn every_kind_matches_brute_force() {
    let params = GeneratorParams::default();
    let budget = BruteForceBudget::default();
    let mut checked = 0;
    for seed in 0..120 {
        for kind in ProblemKind::ALL {
            let Some(inst) = instance_for(kind, seed, &params) else { continue };
            let brute = brute_solve(kind, &inst, &budget).unwrap();
            for alg in Algorithm::ALL {
                let opts = SolveOptions { verify: true, ..Default::default() };
                let ans = solve(kind, &inst, alg, &opts)
                    .unwrap_or_else(|e| panic!("seed {seed} {kind} {alg}: {e}"));
                let out = compare(&ans.payload, &brute);
                assert!(out.pass, "seed {seed} {kind} {alg}: {} (got {:?})\n{inst:?}", out.reason, ans.payload);
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}
