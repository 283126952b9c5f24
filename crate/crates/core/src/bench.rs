//! Oracle-call benchmarks over generated or on-disk instances.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::Algorithm;
use crate::formula::{Clause, Cnf, Lit, Var};
use crate::io::{parse_instance, InputFormat, ParseError};
use crate::oracle::Backend;
use crate::reductions::{solve, ProblemInstance, ProblemKind, ReductionError, SolveOptions};

pub const CSV_HEADER: &str = "problem,alg,r,m,calls,ms";

/// Generated instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `r` clauses containing exactly one MUS, of size `m`, at random
    /// positions; the other clauses are satisfiable on their own and share
    /// no variables with it.
    Planted { r: usize, m: usize },
    /// Random 3-CNF over `vars` variables and `clauses` clauses, redrawn
    /// until unsatisfiable.
    RandomUnsat { vars: u32, clauses: usize },
}

#[derive(Clone, Debug)]
pub enum Source {
    Generated { generator: Generator, seeds: std::ops::Range<u64> },
    Files(Vec<PathBuf>),
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub problem: ProblemKind,
    pub algorithms: Vec<Algorithm>,
    pub source: Source,
    pub backend: Backend,
    /// Report wall-clock time; when off the `ms` column is 0.
    pub timing: bool,
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub problem: ProblemKind,
    pub alg: Algorithm,
    pub r: usize,
    pub m: usize,
    /// Predicate tests made by the algorithm (well-posedness and witness
    /// confirmation excluded).
    pub calls: u64,
    pub ms: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{name}: {source}")]
    Solve { name: String, source: ReductionError },
    #[error("{0}")]
    Generator(String),
}

/// Planted-MUS instance; requires `2 <= m <= r`.
///
/// The MUS is the implication chain `x1, x1→x2, …, ¬x(m-1)`. Filler clauses
/// range over fresh variables and each agrees with a hidden assignment.
pub fn planted_mus(r: usize, m: usize, seed: u64) -> Cnf {
    assert!(m >= 2 && m <= r, "planted MUS needs 2 <= m <= r");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain = (m - 1) as u32;
    let v = |i: u32| Var::new(i);
    let mut clauses = vec![Clause::new([v(1).pos()]).unwrap()];
    for i in 1..chain {
        clauses.push(Clause::new([v(i).neg(), v(i + 1).pos()]).unwrap());
    }
    clauses.push(Clause::new([v(chain).neg()]).unwrap());
    let fill = r - m;
    let extra = (fill as u32 / 2).max(3);
    let hidden: Vec<bool> = (0..extra).map(|_| rng.gen()).collect();
    for _ in 0..fill {
        let len = rng.gen_range(1..=3usize);
        let mut lits: Vec<Lit> = Vec::with_capacity(len);
        while lits.len() < len {
            let k = rng.gen_range(0..extra);
            let var = v(chain + 1 + k);
            if lits.iter().any(|l| l.var() == var) {
                continue;
            }
            lits.push(Lit::new(var, rng.gen()));
        }
        // one literal agrees with the hidden assignment
        let k = (lits[0].var().id() - chain - 1) as usize;
        lits[0] = Lit::new(lits[0].var(), !hidden[k]);
        clauses.push(Clause::new(lits).unwrap());
    }
    clauses.shuffle(&mut rng);
    Cnf::new(chain + extra, clauses)
}

/// Random unsatisfiable 3-CNF (clause length `min(3, vars)`).
pub fn random_unsat(vars: u32, clauses: usize, seed: u64, backend: &Backend) -> Result<Cnf, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = vars.min(3) as usize;
    for _ in 0..1000 {
        let cs: Vec<Clause> = (0..clauses)
            .map(|_| {
                let mut ids: Vec<u32> = (1..=vars).collect();
                ids.shuffle(&mut rng);
                Clause::new(ids[..len].iter().map(|&i| Lit::new(Var::new(i), rng.gen()))).unwrap()
            })
            .collect();
        let cnf = Cnf::new(vars, cs);
        let mut o = backend.create();
        o.reserve_vars(vars);
        for c in &cnf.clauses {
            o.add_clause(c.lits());
        }
        let sat = o
            .solve(&[])
            .map_err(|e| BenchError::Generator(e.to_string()))?
            .is_sat();
        if !sat {
            return Ok(cnf);
        }
    }
    Err(BenchError::Generator(format!(
        "no unsatisfiable draw with {vars} vars and {clauses} clauses"
    )))
}

fn ceil_log2(x: usize) -> u64 {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as u64
    }
}

/// `|M|·(⌈log2 |R|⌉ + 2)`
pub fn dichotomic_bound(r: usize, m: usize) -> u64 {
    m as u64 * (ceil_log2(r) + 2)
}

/// `4·|M|·(1 + ⌈log2(1 + |R|/max(|M|,1))⌉)`
pub fn progression_bound(r: usize, m: usize) -> u64 {
    let ratio = 1.0 + r as f64 / m.max(1) as f64;
    4 * m as u64 * (1 + ratio.log2().ceil() as u64)
}

/// Checks a row against the call bound of its algorithm, if it has one.
pub fn check_row(row: &BenchRow) -> Result<(), String> {
    let (ok, what) = match row.alg {
        Algorithm::Deletion => (row.calls == row.r as u64, format!("= {}", row.r)),
        Algorithm::Dichotomic => {
            let b = dichotomic_bound(row.r, row.m);
            (row.calls <= b, format!("<= {b}"))
        }
        Algorithm::Progression => {
            let b = progression_bound(row.r, row.m);
            (row.calls <= b, format!("<= {b}"))
        }
        _ => return Ok(()),
    };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "{} on r={} m={}: {} calls, expected {what}",
            row.alg, row.r, row.m, row.calls
        ))
    }
}

fn load(cfg: &BenchConfig) -> Result<Vec<(String, ProblemInstance)>, BenchError> {
    match &cfg.source {
        Source::Generated { generator, seeds } => seeds
            .clone()
            .map(|s| {
                let cnf = match *generator {
                    Generator::Planted { r, m } => {
                        if m < 2 || m > r {
                            return Err(BenchError::Generator("planted MUS needs 2 <= m <= r".into()));
                        }
                        planted_mus(r, m, s)
                    }
                    Generator::RandomUnsat { vars, clauses } => random_unsat(vars, clauses, s, &cfg.backend)?,
                };
                Ok((format!("seed {s}"), ProblemInstance::cnf(cnf)))
            })
            .collect(),
        Source::Files(paths) => {
            let mut paths = paths.clone();
            paths.sort();
            paths
                .iter()
                .map(|p| {
                    let path = p.display().to_string();
                    let src = std::fs::read_to_string(p).map_err(|source| BenchError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let inst = parse_instance(&src, InputFormat::Auto).map_err(|source| BenchError::Parse {
                        path: path.clone(),
                        source,
                    })?;
                    Ok((path, inst))
                })
                .collect()
        }
    }
}

fn run_one(cfg: &BenchConfig, name: &str, inst: &ProblemInstance, alg: Algorithm) -> Result<BenchRow, BenchError> {
    let opts = SolveOptions {
        backend: cfg.backend.clone(),
        ..Default::default()
    };
    let start = Instant::now();
    let ans = solve(cfg.problem, inst, alg, &opts).map_err(|source| BenchError::Solve {
        name: name.to_string(),
        source,
    })?;
    let ms = if cfg.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(BenchRow {
        problem: cfg.problem,
        alg,
        r: ans.reference_size,
        m: ans.result.set.len(),
        calls: ans.result.probes,
        ms,
    })
}

/// Runs every algorithm on every instance; rows come in instance-major
/// order regardless of `jobs`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let instances = load(cfg)?;
    let work: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| cfg.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let jobs = cfg.jobs.max(1).min(work.len().max(1));
    let mut slots: Vec<Option<Result<BenchRow, BenchError>>> = (0..work.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let work = &work;
                let instances = &instances;
                s.spawn(move || {
                    (j..work.len())
                        .step_by(jobs)
                        .map(|k| {
                            let (i, alg) = work[k];
                            (k, run_one(cfg, &instances[i].0, &instances[i].1, alg))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("bench worker panicked") {
                slots[k] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}

pub fn write_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.3}",
            r.problem.cli_name(),
            r.alg,
            r.r,
            r.m,
            r.calls,
            r.ms
        );
    }
    s
}
