use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use msmp::bench::{self, BenchConfig, Generator, Source};
use msmp::engine::Algorithm;
use msmp::formula::{Clause, Term};
use msmp::io::{self, InputFormat, OutputFormat, ParseError, RunInfo};
use msmp::oracle::Backend;
use msmp::reductions::{solve, ProblemInstance, ProblemKind, ReductionError, SolveOptions};
use msmp::verifier::{self, BruteForceBudget, GeneratorParams, TapReport};

#[derive(Parser)]
#[command(
    name = "msmp",
    version,
    about = "Solve Boolean function problems by minimal-set extraction over monotone predicates",
    after_help = "Problems: mus mcs mss mes mds mns mcfs mfs minmodel maxmodel pit pic leit leic mnes mxes \
                  backbone backbone-full varind autarky smcs smds smcfs smnm\n\
                  Run `msmp <problem> --help` for solve options."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem instance (also reachable as `msmp <problem> ...`)
    Solve(SolveArgs),
    /// Compare algorithms on generated or on-disk instances, CSV output
    Bench(BenchArgs),
    /// Cross-check every problem and algorithm against brute force (TAP output)
    Verify(VerifyArgs),
    #[command(external_subcommand)]
    Problem(Vec<String>),
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsFormat {
    Plain,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutForm {
    L,
    B,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem name, e.g. mus, mcs, backbone
    problem: String,
    /// Input file, or - for stdin
    input: PathBuf,
    #[arg(long, default_value = "progression")]
    alg: Algorithm,
    /// internal | exec:PATH [ARGS]; the MSMP_SOLVER variable takes precedence
    #[arg(long, default_value = "internal")]
    solver: String,
    /// Seed for --random-order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Traverse reference-set elements in a seeded random order
    #[arg(long)]
    random_order: bool,
    /// Re-check minimality of the result with fresh oracle calls
    #[arg(long)]
    verify: bool,
    /// Skip precondition and well-posedness checks
    #[arg(long)]
    assume_wellposed: bool,
    /// Print statistics with the answer (json replaces the plain answer line)
    #[arg(long)]
    stats: Option<StatsFormat>,
    #[arg(long, default_value = "auto")]
    format: InputFormat,
    /// Report time_ms as null, for byte-identical output across runs
    #[arg(long)]
    no_timing: bool,
    /// Term t as DIMACS literals, e.g. "1 -2" (pit)
    #[arg(long, allow_hyphen_values = true)]
    term: Option<String>,
    /// Clause c as DIMACS literals (pic)
    #[arg(long, allow_hyphen_values = true)]
    clause: Option<String>,
    /// 1-based index of the term or clause to extend (leit, leic)
    #[arg(long)]
    unit_index: Option<usize>,
    /// Target formula I (mnes), any input format
    #[arg(long)]
    target: Option<PathBuf>,
    /// Candidate clauses N in DIMACS (mxes)
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Reference model V as "v" lines (backbone)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Predicate form for autarky
    #[arg(long, value_enum, default_value = "l")]
    aut_form: AutForm,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Planted,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "mus")]
    problem: String,
    /// Comma-separated algorithms
    #[arg(long, value_delimiter = ',', default_value = "deletion,insertion,dichotomic,quickxplain,progression")]
    algs: Vec<Algorithm>,
    /// Directory of instance files; overrides the generator
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "planted")]
    generator: GenKind,
    /// Number of generated instances
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    /// Planted generator: clause count
    #[arg(long, default_value_t = 50)]
    r: usize,
    /// Planted generator: MUS size
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Random generator: variables
    #[arg(long, default_value_t = 8)]
    vars: u32,
    /// Random generator: clauses
    #[arg(long, default_value_t = 60)]
    clauses: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "internal")]
    solver: String,
    /// Write 0 in the ms column
    #[arg(long)]
    no_timing: bool,
    /// Fail (exit 3) when a row exceeds its algorithm's call bound
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated problems; all when omitted
    #[arg(long, value_delimiter = ',')]
    problems: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "deletion,insertion,dichotomic,quickxplain,progression")]
    algs: Vec<Algorithm>,
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = 2)]
    min_vars: u32,
    #[arg(long, default_value_t = 6)]
    max_vars: u32,
    #[arg(long, default_value_t = 10)]
    max_clauses: usize,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long, default_value = "internal")]
    solver: String,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Precondition(anyhow::Error),
    Parse(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Precondition(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Precondition(e) | Failure::Parse(e) | Failure::Internal(e) => e,
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Precondition { .. } | ReductionError::IllPosed { .. } => Failure::Precondition(e.into()),
            ReductionError::Input(_) => Failure::Parse(e.into()),
            _ => Failure::Internal(e.into()),
        }
    }
}

fn parse_failure(path: &Path, e: impl Into<anyhow::Error>) -> Failure {
    Failure::Parse(e.into().context(format!("reading {}", path.display())))
}

fn backend(cli_value: &str) -> Result<Backend, Failure> {
    let value = std::env::var("MSMP_SOLVER").unwrap_or_else(|_| cli_value.to_string());
    Backend::parse(&value)
        .ok_or_else(|| Failure::Parse(anyhow::anyhow!("invalid solver '{value}' (expected internal or exec:PATH)")))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| parse_failure(path, e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| parse_failure(path, e))
    }
}

fn problem_kind(name: &str, aut_form: AutForm) -> Result<ProblemKind, Failure> {
    let kind = ProblemKind::from_cli(name).ok_or_else(|| Failure::Parse(anyhow::anyhow!("unknown problem '{name}'")))?;
    Ok(match (kind, aut_form) {
        (ProblemKind::FautL, AutForm::B) => ProblemKind::FautB,
        _ => kind,
    })
}

fn load_instance(a: &SolveArgs) -> Result<ProblemInstance, Failure> {
    let src = read_input(&a.input)?;
    let mut inst = io::parse_instance(&src, a.format).map_err(|e| parse_failure(&a.input, e))?;
    let lits = |s: &str, what: &str| {
        io::parse_lits(s).map_err(|e| Failure::Parse(anyhow::Error::from(e).context(format!("parsing {what}"))))
    };
    if let Some(t) = &a.term {
        inst.term = Some(Term::new(lits(t, "--term")?).map_err(|e| Failure::Parse(anyhow::anyhow!("--term: {e}")))?);
    }
    if let Some(c) = &a.clause {
        inst.clause =
            Some(Clause::new(lits(c, "--clause")?).map_err(|e| Failure::Parse(anyhow::anyhow!("--clause: {e}")))?);
    }
    inst.unit_index = a.unit_index;
    if let Some(p) = &a.target {
        let src = read_input(p)?;
        let t = io::parse_instance(&src, InputFormat::Auto).map_err(|e| parse_failure(p, e))?;
        inst.target = Some(t.formula());
    }
    if let Some(p) = &a.candidates {
        let src = read_input(p)?;
        inst.candidates = Some(io::parse_dimacs(&src).map_err(|e| parse_failure(p, e))?);
    }
    if let Some(p) = &a.model {
        let src = read_input(p)?;
        inst.model = Some(io::parse_model(&src).map_err(|e: ParseError| parse_failure(p, e))?);
    }
    Ok(inst)
}

fn random_order(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

fn run_solve(a: SolveArgs) -> Result<(), Failure> {
    let kind = problem_kind(&a.problem, a.aut_form)?;
    let inst = load_instance(&a)?;
    let mut opts = SolveOptions {
        backend: backend(&a.solver)?,
        assume_wellposed: a.assume_wellposed,
        verify: a.verify,
        order: None,
    };
    if a.random_order {
        let len = msmp::reductions::reference_size(kind, &inst, &opts)?;
        opts.order = Some(random_order(len, a.seed));
    }
    let start = Instant::now();
    let answer = solve(kind, &inst, a.alg, &opts)?;
    let info = RunInfo {
        algorithm: a.alg,
        time_ms: (!a.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    if answer.degenerate {
        eprintln!("c warning: both polarities of a variable extend the unit; returned one subset-maximal extension");
    }
    let out = match a.stats {
        Some(StatsFormat::Json) => io::write_answer(&answer, OutputFormat::Json, &info),
        Some(StatsFormat::Plain) => {
            io::write_answer(&answer, OutputFormat::Plain, &info) + &io::write_stats(&answer, &info)
        }
        None => io::write_answer(&answer, OutputFormat::Plain, &info),
    };
    print!("{out}");
    Ok(())
}

fn run_bench(a: BenchArgs) -> Result<(), Failure> {
    let problem = problem_kind(&a.problem, AutForm::L)?;
    let source = match &a.dir {
        Some(dir) => {
            let mut files = Vec::new();
            for entry in std::fs::read_dir(dir).map_err(|e| parse_failure(dir, e))? {
                let p = entry.map_err(|e| parse_failure(dir, e))?.path();
                if p.is_file() {
                    files.push(p);
                }
            }
            Source::Files(files)
        }
        None => Source::Generated {
            generator: match a.generator {
                GenKind::Planted => Generator::Planted { r: a.r, m: a.m },
                GenKind::Random => Generator::RandomUnsat {
                    vars: a.vars,
                    clauses: a.clauses,
                },
            },
            seeds: a.seed_start..a.seed_start + a.seeds,
        },
    };
    let cfg = BenchConfig {
        problem,
        algorithms: a.algs,
        source,
        backend: backend(&a.solver)?,
        timing: !a.no_timing,
        jobs: a.jobs,
    };
    let rows = bench::run_bench(&cfg).map_err(|e| match e {
        bench::BenchError::Solve { name, source } => {
            let f = Failure::from(source);
            let code = f.code();
            let err = anyhow::anyhow!("{}: {}", name, f.error());
            match code {
                1 => Failure::Precondition(err),
                2 => Failure::Parse(err),
                _ => Failure::Internal(err),
            }
        }
        e @ (bench::BenchError::Parse { .. } | bench::BenchError::Io { .. }) => Failure::Parse(e.into()),
        e => Failure::Internal(e.into()),
    })?;
    print!("{}", bench::write_csv(&rows));
    if a.check {
        let bad: Vec<String> = rows.iter().filter_map(|r| bench::check_row(r).err()).collect();
        if !bad.is_empty() {
            return Err(Failure::Internal(anyhow::anyhow!("call bound violated:\n{}", bad.join("\n"))));
        }
    }
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<bool, Failure> {
    let kinds: Vec<ProblemKind> = if a.problems.is_empty() {
        ProblemKind::ALL.to_vec()
    } else {
        let mut ks = Vec::new();
        for name in &a.problems {
            let k = problem_kind(name, AutForm::L)?;
            ks.push(k);
            if k == ProblemKind::FautL {
                ks.push(ProblemKind::FautB);
            }
        }
        ks
    };
    let params = GeneratorParams {
        min_vars: a.min_vars,
        max_vars: a.max_vars,
        max_clauses: a.max_clauses,
        max_len: a.max_len,
    };
    let opts = SolveOptions {
        backend: backend(&a.solver)?,
        verify: true,
        ..Default::default()
    };
    let budget = BruteForceBudget::default();
    let mut tap = TapReport::new();
    for seed in a.seed_start..a.seed_start + a.seeds {
        for &kind in &kinds {
            let Some(inst) = verifier::instance_for(kind, seed, &params) else {
                continue;
            };
            let brute = match verifier::brute_solve(kind, &inst, &budget) {
                Ok(b) => b,
                Err(e) => {
                    tap.record(false, format!("seed {seed} {kind}: brute force failed: {e}"));
                    continue;
                }
            };
            for &alg in &a.algs {
                let desc = format!("seed {seed} {kind} {alg}");
                match solve(kind, &inst, alg, &opts) {
                    Ok(ans) => {
                        let c = verifier::compare(&ans.payload, &brute);
                        if c.pass {
                            tap.record(true, desc);
                        } else {
                            tap.record(false, format!("{desc}: {}", c.reason));
                        }
                    }
                    Err(e) => tap.record(false, format!("{desc}: {e}")),
                }
            }
        }
    }
    print!("{tap}");
    Ok(tap.failures() == 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Problem(argv) => {
            let full = std::iter::once("msmp".to_string()).chain(argv);
            match SolveCmd::try_parse_from(full) {
                Ok(c) => run_solve(c.args),
                Err(e) => e.exit(),
            }
        }
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => match run_verify(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

#[derive(Parser)]
#[command(name = "msmp")]
struct SolveCmd {
    #[command(flatten)]
    args: SolveArgs,
}
