use std::collections::BTreeMap;

use crate::formula::{Formula, Var};

use super::ParseError;

/// A parsed prefix formula and the names given to its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedFormula {
    pub formula: Formula,
    /// Variables `1..=num_vars`; ids not mentioned are unconstrained.
    pub num_vars: u32,
    /// Display name per id for bare identifiers.
    pub names: BTreeMap<u32, String>,
}

#[derive(Debug)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn tokenize(src: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut in_comment = false;
    for (i, ch) in src.char_indices() {
        if in_comment {
            if ch == '\n' {
                in_comment = false;
            }
            continue;
        }
        if ch == '(' || ch == ')' || ch.is_whitespace() || ch == ';' {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur), start));
            }
            if ch == ';' {
                in_comment = true;
            } else if !ch.is_whitespace() {
                out.push((ch.to_string(), i));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((cur, start));
    }
    out
}

fn read(tokens: &[(String, usize)], at: &mut usize, end: usize) -> Result<Sexp, ParseError> {
    let (tok, pos) = tokens.get(*at).ok_or(ParseError::Position {
        pos: end,
        message: "unexpected end of input".into(),
    })?;
    *at += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    None => {
                        return Err(ParseError::Position {
                            pos: *pos,
                            message: "unbalanced '('".into(),
                        })
                    }
                    Some((t, _)) if t == ")" => {
                        *at += 1;
                        return Ok(Sexp::List(items, *pos));
                    }
                    _ => items.push(read(tokens, at, end)?),
                }
            }
        }
        ")" => Err(ParseError::Position {
            pos: *pos,
            message: "unbalanced ')'".into(),
        }),
        _ => Ok(Sexp::Atom(tok.clone(), *pos)),
    }
}

fn numbered(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&n| n > 0)
}

fn valid_ident(name: &str) -> bool {
    let mut cs = name.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

fn collect_names(e: &Sexp, fixed: &mut u32, bare: &mut Vec<String>) {
    match e {
        Sexp::Atom(name, _) => {
            if let Some(n) = numbered(name) {
                *fixed = (*fixed).max(n);
            } else if !bare.contains(name) && !matches!(name.as_str(), "true" | "false") {
                bare.push(name.clone());
            }
        }
        Sexp::List(items, _) => {
            for it in items.iter().skip(1) {
                collect_names(it, fixed, bare);
            }
        }
    }
}

fn build(e: &Sexp, ids: &BTreeMap<String, u32>) -> Result<Formula, ParseError> {
    match e {
        Sexp::Atom(name, pos) => match name.as_str() {
            "true" => Ok(Formula::Const(true)),
            "false" => Ok(Formula::Const(false)),
            _ if numbered(name).is_some() => Ok(Formula::atom(Var::new(numbered(name).unwrap()))),
            _ if valid_ident(name) => Ok(Formula::atom(Var::new(ids[name]))),
            _ => Err(ParseError::Position {
                pos: *pos,
                message: format!("invalid variable name '{name}'"),
            }),
        },
        Sexp::List(items, pos) => {
            let head = match items.first() {
                Some(Sexp::Atom(h, _)) => h.as_str(),
                _ => {
                    return Err(ParseError::Position {
                        pos: *pos,
                        message: "expected an operator".into(),
                    })
                }
            };
            let args = items[1..]
                .iter()
                .map(|a| build(a, ids))
                .collect::<Result<Vec<_>, _>>()?;
            let arity = |ok: bool, want: &str| {
                if ok {
                    Ok(())
                } else {
                    Err(ParseError::Position {
                        pos: *pos,
                        message: format!("'{head}' takes {want}, got {}", args.len()),
                    })
                }
            };
            let n = args.len();
            match head {
                "not" => {
                    arity(n == 1, "1 operand")?;
                    Ok(args.into_iter().next().unwrap().negate())
                }
                "and" | "or" => {
                    arity(n >= 2, "at least 2 operands")?;
                    Ok(if head == "and" {
                        Formula::and(args)
                    } else {
                        Formula::or(args)
                    })
                }
                "imp" | "iff" => {
                    arity(n == 2, "2 operands")?;
                    let mut it = args.into_iter();
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    Ok(if head == "imp" {
                        Formula::implies(a, b)
                    } else {
                        Formula::iff(a, b)
                    })
                }
                other => Err(ParseError::Position {
                    pos: *pos,
                    message: format!("unknown operator '{other}'"),
                }),
            }
        }
    }
}

/// Parses `F ::= var | (not F) | (and F F+) | (or F F+) | (imp F F) | (iff F F)`.
///
/// `xN` names variable `N`; other identifiers get the ids after the largest
/// `xN`, in order of first appearance. `;` starts a line comment.
pub fn parse_formula_text(src: &str) -> Result<ParsedFormula, ParseError> {
    let tokens = tokenize(src);
    let mut at = 0;
    let e = read(&tokens, &mut at, src.len())?;
    if let Some((tok, pos)) = tokens.get(at) {
        return Err(ParseError::Position {
            pos: *pos,
            message: format!("trailing input '{tok}'"),
        });
    }
    let mut fixed = 0;
    let mut bare = Vec::new();
    collect_names(&e, &mut fixed, &mut bare);
    let mut ids = BTreeMap::new();
    let mut names = BTreeMap::new();
    for (i, name) in bare.into_iter().enumerate() {
        let id = fixed + 1 + i as u32;
        ids.insert(name.clone(), id);
        names.insert(id, name);
    }
    let formula = build(&e, &ids)?;
    let num_vars = fixed + names.len() as u32;
    Ok(ParsedFormula {
        formula,
        num_vars,
        names,
    })
}
