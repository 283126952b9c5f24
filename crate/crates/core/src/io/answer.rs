use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::Algorithm;
use crate::reductions::{AnswerPayload, ProblemAnswer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    /// `v ... 0`, preceded by `o <value>` for optimization problems.
    #[default]
    Plain,
    Json,
}

/// Run metadata reported next to the answer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunInfo {
    pub algorithm: Algorithm,
    /// `None` prints as `null`, for byte-stable output.
    pub time_ms: Option<f64>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonAnswer {
    Set(Vec<i64>),
    Optimum { optimum: usize, set: Vec<i64> },
}

#[derive(Serialize)]
struct JsonReport<'a> {
    problem: &'a str,
    answer: JsonAnswer,
    oracle_calls: u64,
    algorithm: &'a str,
    time_ms: Option<f64>,
}

fn v_line(items: &[i64]) -> String {
    let mut s = String::from("v");
    for i in items {
        let _ = write!(s, " {i}");
    }
    s.push_str(" 0\n");
    s
}

/// Renders an answer; every format ends with a newline.
pub fn write_answer(answer: &ProblemAnswer, format: OutputFormat, info: &RunInfo) -> String {
    let items = answer.payload.items();
    match format {
        OutputFormat::Plain => match &answer.payload {
            AnswerPayload::Optimum { value, .. } => format!("o {value}\n{}", v_line(&items)),
            _ => v_line(&items),
        },
        OutputFormat::Json => {
            let report = JsonReport {
                problem: answer.kind.cli_name(),
                answer: match answer.payload.optimum() {
                    Some(optimum) => JsonAnswer::Optimum { optimum, set: items },
                    None => JsonAnswer::Set(items),
                },
                oracle_calls: answer.total_oracle_calls(),
                algorithm: info.algorithm.name(),
                time_ms: info.time_ms,
            };
            let mut s = serde_json::to_string(&report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

/// Comment lines with run statistics, for plain output.
pub fn write_stats(answer: &ProblemAnswer, info: &RunInfo) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c problem {}", answer.kind.cli_name());
    let _ = writeln!(s, "c algorithm {}", info.algorithm.name());
    let _ = writeln!(s, "c oracle_calls {}", answer.total_oracle_calls());
    let _ = writeln!(s, "c predicate_tests {}", answer.result.probes);
    match info.time_ms {
        Some(t) => {
            let _ = writeln!(s, "c time_ms {t:.3}");
        }
        None => s.push_str("c time_ms null\n"),
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::MinimalSetResult;
    use crate::formula::Lit;
    use crate::reductions::ProblemKind;

    fn answer(kind: ProblemKind, payload: AnswerPayload) -> ProblemAnswer {
        ProblemAnswer {
            kind,
            payload,
            result: MinimalSetResult {
                set: vec![],
                witness: None,
                oracle_calls: 3,
                probes: 3,
                wellposed_checked: false,
                algorithm: Algorithm::Deletion,
            },
            reference_size: 3,
            precondition_calls: 1,
            decode_calls: 0,
            degenerate: false,
        }
    }

    const INFO: RunInfo = RunInfo {
        algorithm: Algorithm::Deletion,
        time_ms: None,
    };

    #[test]
    fn plain_lines() {
        let a = answer(ProblemKind::Fmus, AnswerPayload::Indices(vec![1, 2]));
        assert_eq!(write_answer(&a, OutputFormat::Plain, &INFO), "v 1 2 0\n");
        let lits = [3, 1].map(|v| Lit::from_dimacs(if v == 3 { -3 } else { 1 }));
        let a = answer(ProblemKind::Fbb, AnswerPayload::Literals(lits.to_vec()));
        assert_eq!(write_answer(&a, OutputFormat::Plain, &INFO), "v 1 -3 0\n");
        let a = answer(
            ProblemKind::Fsmcs,
            AnswerPayload::Optimum {
                value: 2,
                set: Box::new(AnswerPayload::Indices(vec![1, 3])),
            },
        );
        assert_eq!(write_answer(&a, OutputFormat::Plain, &INFO), "o 2\nv 1 3 0\n");
    }

    #[test]
    fn json_round_trip() {
        let a = answer(ProblemKind::Fmus, AnswerPayload::Indices(vec![1, 2]));
        let s = write_answer(&a, OutputFormat::Json, &INFO);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["problem"], "mus");
        assert_eq!(v["answer"], serde_json::json!([1, 2]));
        assert_eq!(v["oracle_calls"], 4);
        assert_eq!(v["algorithm"], "deletion");
        assert!(v["time_ms"].is_null());
        assert_eq!(v.as_object().unwrap().len(), 5);
    }
}
