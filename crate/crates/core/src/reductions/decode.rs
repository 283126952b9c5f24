use crate::engine::MinimalSetResult;
use crate::formula::{Assignment, Lit, Var};

use super::{AnswerPayload, Meta, ProblemInstance, ProblemKind, ProblemKind::*, ReductionError};

fn complement(set: &[usize], len: usize) -> Vec<usize> {
    let mut inside = vec![false; len];
    for &i in set {
        inside[i] = true;
    }
    (0..len).filter(|&i| !inside[i]).collect()
}

fn internal(msg: &str) -> ReductionError {
    ReductionError::Engine(crate::engine::EngineError::Internal(msg.to_string()))
}

fn pick<T: Copy>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i]).collect()
}

/// Keeps the first literal per variable (input order: positive first).
fn first_per_var(lits: Vec<Lit>) -> (Vec<Lit>, bool) {
    let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
    let mut degenerate = false;
    for l in lits {
        if out.iter().any(|o| o.var() == l.var()) {
            degenerate = true;
        } else {
            out.push(l);
        }
    }
    (out, degenerate)
}

pub(super) fn decode(
    kind: ProblemKind,
    inst: &ProblemInstance,
    meta: &Meta,
    result: &MinimalSetResult,
    model: Option<&Assignment>,
) -> Result<(AnswerPayload, bool), ReductionError> {
    let m = &result.set;
    let rest = complement(m, meta.len());
    let payload = match (kind, meta) {
        (Fmus | Fmcs | Fmes | Fmds | Fmcfs | FmnEs, Meta::Indices(ids)) => AnswerPayload::Indices(pick(ids, m)),
        (Fmss | Fmns | Fmfs | FmxEs, Meta::Indices(ids)) => AnswerPayload::Indices(pick(ids, &rest)),
        (FpIt | FpIc, Meta::Lits(ls)) => AnswerPayload::Literals(pick(ls, m)),
        (FbBr, Meta::Lits(ls)) => AnswerPayload::Literals(pick(ls, &rest)),
        (FmnM | FautB, Meta::Vars(vs)) => AnswerPayload::Vars(pick(vs, m)),
        (FmxM | FvInd | FautL, Meta::Vars(vs)) => AnswerPayload::Vars(pick(vs, &rest)),
        (Fbb, Meta::Vars(vs)) => {
            let model = model.ok_or_else(|| internal("FBB decode needs a model of F"))?;
            let lits = pick(vs, &rest)
                .into_iter()
                .map(|v: Var| Lit::new(v, model.value(v) == Some(false)))
                .collect();
            AnswerPayload::Literals(lits)
        }
        (FleIt | FleIc, Meta::Lits(ls)) => {
            let k = inst.unit_index.unwrap_or(0);
            let unit: Vec<Lit> = match kind {
                FleIt => inst.as_dnf(kind)?.terms[k - 1].lits().to_vec(),
                _ => inst.as_cnf(kind)?.clauses[k - 1].lits().to_vec(),
            };
            let (ext, degenerate) = first_per_var(pick(ls, &rest));
            let mut all = unit;
            all.extend(ext);
            all.sort_unstable();
            return Ok((AnswerPayload::Literals(all), degenerate));
        }
        (Fsmcs | Fsmds | Fsmcfs | FsmnM, Meta::Bounds { selectors, ids }) => {
            let best = rest.iter().copied().max().unwrap_or(0);
            let witness = result
                .witness
                .as_ref()
                .ok_or_else(|| internal("optimization decode needs the final witness"))?;
            let off: Vec<usize> = selectors
                .iter()
                .zip(ids)
                .filter(|(p, _)| witness.lit_value(**p) != Some(true))
                .map(|(_, &i)| i)
                .collect();
            let set = if kind == FsmnM {
                AnswerPayload::Vars(off.iter().map(|&i| Var::new(i as u32)).collect())
            } else {
                AnswerPayload::Indices(off)
            };
            AnswerPayload::Optimum {
                value: selectors.len() - best,
                set: Box::new(set),
            }
        }
        _ => return Err(internal("element metadata does not match the problem kind")),
    };
    Ok((payload, false))
}
