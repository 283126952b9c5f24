//! Input formats and answer output.

mod answer;
mod dimacs;
mod text;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::reductions::{Payload, ProblemInstance};

pub use answer::{write_answer, write_stats, OutputFormat, RunInfo};
pub use dimacs::{parse_dimacs, parse_dnf, parse_gcnf, parse_lits, parse_model, parse_wcnf, write_dimacs, write_dnf, Wcnf};
pub use text::{parse_formula_text, ParsedFormula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("position {pos}: {message}")]
    Position { pos: usize, message: String },
    #[error("{0}")]
    Other(String),
}

impl ParseError {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

/// Input format selector; `Auto` sniffs the header.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputFormat {
    #[default]
    Auto,
    Dimacs,
    Dnf,
    Gcnf,
    Wcnf,
    Fml,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "auto" => InputFormat::Auto,
            "dimacs" | "cnf" => InputFormat::Dimacs,
            "dnf" => InputFormat::Dnf,
            "gcnf" => InputFormat::Gcnf,
            "wcnf" => InputFormat::Wcnf,
            "fml" => InputFormat::Fml,
            other => return Err(format!("unknown format '{other}'")),
        })
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Auto => "auto",
            InputFormat::Dimacs => "dimacs",
            InputFormat::Dnf => "dnf",
            InputFormat::Gcnf => "gcnf",
            InputFormat::Wcnf => "wcnf",
            InputFormat::Fml => "fml",
        })
    }
}

/// Guesses the format from the first significant line.
pub fn detect_format(src: &str) -> InputFormat {
    for line in src.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('(') || t.starts_with(';') {
            return InputFormat::Fml;
        }
        let mut it = t.split_whitespace();
        if it.next() == Some("p") {
            return match it.next() {
                Some("dnf") => InputFormat::Dnf,
                Some("gcnf") => InputFormat::Gcnf,
                Some("wcnf") => InputFormat::Wcnf,
                _ => InputFormat::Dimacs,
            };
        }
        if t.starts_with('h') {
            return InputFormat::Wcnf;
        }
        return if t.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            InputFormat::Fml
        } else {
            InputFormat::Dimacs
        };
    }
    InputFormat::Dimacs
}

/// Parses a main input file into an instance without side inputs.
///
/// WCNF input with hard clauses becomes a grouped instance (hard clauses in
/// group 0, one group per soft clause); without hard clauses it is plain CNF.
pub fn parse_instance(src: &str, format: InputFormat) -> Result<ProblemInstance, ParseError> {
    let format = match format {
        InputFormat::Auto => detect_format(src),
        f => f,
    };
    Ok(match format {
        InputFormat::Auto | InputFormat::Dimacs => ProblemInstance::cnf(parse_dimacs(src)?),
        InputFormat::Dnf => ProblemInstance::new(Payload::Dnf(parse_dnf(src)?)),
        InputFormat::Gcnf => {
            let (cnf, groups, k) = parse_gcnf(src)?;
            let mut inst = ProblemInstance::cnf(cnf);
            inst.groups = Some((groups, k));
            inst
        }
        InputFormat::Wcnf => {
            let w = parse_wcnf(src)?;
            let has_hard = w.hard.iter().any(|&h| h);
            let mut inst = ProblemInstance::cnf(w.cnf);
            if has_hard {
                let mut next = 0;
                let ids = w
                    .hard
                    .iter()
                    .map(|&h| {
                        if h {
                            0
                        } else {
                            next += 1;
                            next
                        }
                    })
                    .collect();
                inst.groups = Some((ids, next));
            }
            inst
        }
        InputFormat::Fml => {
            let p = parse_formula_text(src)?;
            let mut inst = ProblemInstance::new(Payload::Formula(p.formula));
            inst.num_vars = p.num_vars;
            inst
        }
    })
}
