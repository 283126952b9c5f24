//! Adapter for an external SAT-competition style solver binary.

use std::io::Write;
use std::process::Command;

use super::{Oracle, OracleError, SolveOutcome};
use crate::formula::{Assignment, Lit};

/// Runs `program [args...] FILE` once per call on a temporary DIMACS file
/// holding the loaded clauses plus one unit clause per assumption.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
    clauses: Vec<Vec<Lit>>,
    num_vars: u32,
    calls: u64,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args,
            clauses: Vec::new(),
            num_vars: 0,
            calls: 0,
        }
    }

    fn write_query(&self, assumptions: &[Lit]) -> Result<tempfile::NamedTempFile, OracleError> {
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        let mut text = format!(
            "p cnf {} {}\n",
            self.num_vars,
            self.clauses.len() + assumptions.len()
        );
        for c in &self.clauses {
            for l in c {
                text.push_str(&format!("{} ", l.to_dimacs()));
            }
            text.push_str("0\n");
        }
        for a in assumptions {
            text.push_str(&format!("{} 0\n", a.to_dimacs()));
        }
        file.write_all(text.as_bytes())?;
        file.flush()?;
        Ok(file)
    }

    fn parse_output(&self, stdout: &str) -> Result<Option<Vec<bool>>, String> {
        let mut status = None;
        let mut values = vec![None; self.num_vars as usize];
        for line in stdout.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("s ") {
                status = match rest.trim() {
                    "SATISFIABLE" => Some(true),
                    "UNSATISFIABLE" => Some(false),
                    other => return Err(format!("unknown status `{other}`")),
                };
            } else if let Some(rest) = line.strip_prefix('v') {
                for tok in rest.split_whitespace() {
                    let x: i64 = tok.parse().map_err(|_| format!("bad model token `{tok}`"))?;
                    if x == 0 {
                        continue;
                    }
                    let v = x.unsigned_abs() as usize;
                    if v <= values.len() {
                        values[v - 1] = Some(x > 0);
                    }
                }
            }
        }
        match status {
            None => Err("no status line".to_string()),
            Some(false) => Ok(None),
            Some(true) => Ok(Some(values.into_iter().map(|v| v.unwrap_or(false)).collect())),
        }
    }
}

impl Oracle for ExternalSolver {
    fn add_clause(&mut self, lits: &[Lit]) {
        let mut c = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if let Some(max) = c.iter().map(|l| l.var().id()).max() {
            self.num_vars = self.num_vars.max(max);
        }
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        self.clauses.push(c);
    }

    fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveOutcome, OracleError> {
        self.calls += 1;
        if super::has_complementary_pair(assumptions) {
            return Ok(SolveOutcome::Unsat);
        }
        if let Some(max) = assumptions.iter().map(|l| l.var().id()).max() {
            self.num_vars = self.num_vars.max(max);
        }
        let file = self.write_query(assumptions)?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(file.path())
            .output()
            .map_err(|source| OracleError::Spawn {
                program: self.program.clone(),
                source,
            })?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        let stderr = String::from_utf8_lossy(&output.stderr);
        let captured = || format!("{stdout}{stderr}");
        let values = self
            .parse_output(&stdout)
            .map_err(|reason| OracleError::BadOutput {
                reason,
                output: captured(),
            })?;
        let Some(values) = values else {
            return Ok(SolveOutcome::Unsat);
        };
        let model = Assignment::from_values(&values);
        let holds = |l: &Lit| model.lit_value(*l) == Some(true);
        let valid = self.clauses.iter().all(|c| c.iter().any(holds)) && assumptions.iter().all(holds);
        if !valid {
            return Err(OracleError::BadOutput {
                reason: "reported model falsifies the query".to_string(),
                output: captured(),
            });
        }
        Ok(SolveOutcome::Sat(model))
    }

    fn num_vars(&self) -> u32 {
        self.num_vars
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}
