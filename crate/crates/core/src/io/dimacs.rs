use std::fmt::Write as _;

use crate::formula::{Clause, Cnf, Dnf, FormulaError, Lit, Term};

use super::ParseError;

struct Header {
    line: usize,
    fields: Vec<u64>,
}

/// Splits DIMACS-like text into the header and `(line, tokens)` records.
/// Records may span lines; each ends at a `0` token.
struct Scanner<'a> {
    src: &'a str,
}

#[derive(Debug)]
struct Record {
    line: usize,
    prefix: Option<String>,
    lits: Vec<i64>,
}

impl<'a> Scanner<'a> {
    fn scan(&self, kind: &str, nfields: usize, prefixed: bool) -> Result<(Header, Vec<Record>), ParseError> {
        let mut header: Option<Header> = None;
        let mut records = Vec::new();
        let mut cur: Option<Record> = None;
        for (i, raw) in self.src.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            if t.starts_with('p') {
                if header.is_some() {
                    return Err(ParseError::line(line, "duplicate header"));
                }
                if cur.is_some() {
                    return Err(ParseError::line(line, "header inside a clause"));
                }
                let mut it = t.split_whitespace();
                it.next();
                if it.next() != Some(kind) {
                    return Err(ParseError::line(line, format!("expected 'p {kind}' header")));
                }
                let fields: Vec<u64> = it
                    .map(|s| s.parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError::line(line, "malformed header"))?;
                if fields.len() != nfields && !(kind == "wcnf" && fields.len() == nfields - 1) {
                    return Err(ParseError::line(line, "malformed header"));
                }
                header = Some(Header { line, fields });
                continue;
            }
            if header.is_none() {
                return Err(ParseError::line(line, format!("missing 'p {kind}' header")));
            }
            for tok in t.split_whitespace() {
                let rec = cur.get_or_insert_with(|| Record {
                    line,
                    prefix: None,
                    lits: Vec::new(),
                });
                if prefixed && rec.prefix.is_none() {
                    rec.prefix = Some(tok.to_string());
                    continue;
                }
                let v: i64 = tok
                    .parse()
                    .map_err(|_| ParseError::line(line, format!("unexpected token '{tok}'")))?;
                if v == 0 {
                    records.push(cur.take().unwrap());
                } else {
                    rec.lits.push(v);
                }
            }
        }
        if let Some(r) = cur {
            return Err(ParseError::line(r.line, "unterminated clause (missing 0)"));
        }
        let header = header.ok_or_else(|| ParseError::line(1, format!("missing 'p {kind}' header")))?;
        Ok((header, records))
    }
}

fn check_lits(lits: &[i64], nvars: u64, line: usize) -> Result<Vec<Lit>, ParseError> {
    lits.iter()
        .map(|&l| {
            if l.unsigned_abs() > nvars {
                Err(ParseError::line(line, format!("variable {} exceeds declared count {nvars}", l.abs())))
            } else {
                Ok(Lit::from_dimacs(l))
            }
        })
        .collect()
}

fn clause_at(lits: &[i64], nvars: u64, line: usize) -> Result<Clause, ParseError> {
    Clause::new(check_lits(lits, nvars, line)?).map_err(|e| match e {
        FormulaError::Tautology(_) => ParseError::line(line, "tautologous clause"),
        other => ParseError::line(line, other.to_string()),
    })
}

fn count_check(h: &Header, got: usize, what: &str) -> Result<(), ParseError> {
    if h.fields[1] as usize != got {
        return Err(ParseError::line(h.line, format!("header declares {} {what}, found {got}", h.fields[1])));
    }
    Ok(())
}

fn nvars(h: &Header) -> Result<u32, ParseError> {
    u32::try_from(h.fields[0]).map_err(|_| ParseError::line(h.line, "too many variables"))
}

/// Parses `p cnf` DIMACS.
pub fn parse_dimacs(src: &str) -> Result<Cnf, ParseError> {
    let (h, recs) = Scanner { src }.scan("cnf", 2, false)?;
    count_check(&h, recs.len(), "clauses")?;
    let n = nvars(&h)?;
    let clauses = recs
        .iter()
        .map(|r| clause_at(&r.lits, n as u64, r.line))
        .collect::<Result<_, _>>()?;
    Ok(Cnf::new(n, clauses))
}

/// Parses `p dnf`: DIMACS syntax where each line is a term.
pub fn parse_dnf(src: &str) -> Result<Dnf, ParseError> {
    let (h, recs) = Scanner { src }.scan("dnf", 2, false)?;
    count_check(&h, recs.len(), "terms")?;
    let n = nvars(&h)?;
    let terms = recs
        .iter()
        .map(|r| {
            Term::new(check_lits(&r.lits, n as u64, r.line)?).map_err(|e| match e {
                FormulaError::Contradiction(_) => ParseError::line(r.line, "contradictory term"),
                other => ParseError::line(r.line, other.to_string()),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(Dnf::new(n, terms))
}

/// Parses `p gcnf`; returns the clauses, the group of each clause and the
/// number of groups.
pub fn parse_gcnf(src: &str) -> Result<(Cnf, Vec<u32>, u32), ParseError> {
    let (h, recs) = Scanner { src }.scan("gcnf", 3, true)?;
    count_check(&h, recs.len(), "clauses")?;
    let n = nvars(&h)?;
    let k = u32::try_from(h.fields[2]).map_err(|_| ParseError::line(h.line, "too many groups"))?;
    let mut clauses = Vec::with_capacity(recs.len());
    let mut groups = Vec::with_capacity(recs.len());
    for r in &recs {
        let p = r.prefix.as_deref().unwrap_or("");
        let g: u32 = p
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ParseError::line(r.line, format!("expected group '{{g}}', found '{p}'")))?;
        if g > k {
            return Err(ParseError::line(r.line, format!("group {g} exceeds declared count {k}")));
        }
        groups.push(g);
        clauses.push(clause_at(&r.lits, n as u64, r.line)?);
    }
    Ok((Cnf::new(n, clauses), groups, k))
}

/// Unweighted WCNF: every soft clause has weight 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wcnf {
    pub cnf: Cnf,
    pub hard: Vec<bool>,
}

/// Parses `p wcnf <n> <m> [top]`. Weights must be 1 or `top`.
pub fn parse_wcnf(src: &str) -> Result<Wcnf, ParseError> {
    let (h, recs) = Scanner { src }.scan("wcnf", 3, true)?;
    count_check(&h, recs.len(), "clauses")?;
    let n = nvars(&h)?;
    let top = h.fields.get(2).copied();
    let mut clauses = Vec::with_capacity(recs.len());
    let mut hard = Vec::with_capacity(recs.len());
    for r in &recs {
        let p = r.prefix.as_deref().unwrap_or("");
        let w: u64 = p
            .parse()
            .map_err(|_| ParseError::line(r.line, format!("expected a weight, found '{p}'")))?;
        let is_hard = Some(w) == top && w != 1;
        if !is_hard && w != 1 {
            return Err(ParseError::line(r.line, format!("weight {w} not supported (only 1 or top)")));
        }
        hard.push(is_hard);
        clauses.push(clause_at(&r.lits, n as u64, r.line)?);
    }
    Ok(Wcnf {
        cnf: Cnf::new(n, clauses),
        hard,
    })
}

/// Parses a whitespace-separated literal list, optionally `0`-terminated.
pub fn parse_lits(src: &str) -> Result<Vec<Lit>, ParseError> {
    let mut out = Vec::new();
    let mut ended = false;
    for tok in src.split_whitespace() {
        if ended {
            return Err(ParseError::Other(format!("unexpected token '{tok}' after 0")));
        }
        let v: i64 = tok
            .parse()
            .map_err(|_| ParseError::Other(format!("unexpected token '{tok}'")))?;
        if v == 0 {
            ended = true;
        } else {
            out.push(Lit::from_dimacs(v));
        }
    }
    Ok(out)
}

/// Reads a model from `v` lines (solver output style); `s` and `c` lines
/// are skipped. Bare integer lines are accepted too.
pub fn parse_model(src: &str) -> Result<Vec<Lit>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('s') {
            continue;
        }
        let body = t.strip_prefix('v').unwrap_or(t);
        for tok in body.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| ParseError::line(i + 1, format!("unexpected token '{tok}'")))?;
            if v != 0 {
                out.push(Lit::from_dimacs(v));
            }
        }
    }
    Ok(out)
}

fn write_rows<'a>(out: &mut String, rows: impl Iterator<Item = &'a [Lit]>) {
    for r in rows {
        for l in r {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.len());
    write_rows(&mut out, cnf.clauses.iter().map(|c| c.lits()));
    out
}

pub fn write_dnf(dnf: &Dnf) -> String {
    let mut out = format!("p dnf {} {}\n", dnf.num_vars, dnf.len());
    write_rows(&mut out, dnf.terms.iter().map(|t| t.lits()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_cnf() {
        let f = parse_dimacs("c hi\np cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.num_vars, 1);
        let f = parse_dimacs("p cnf 2 3\n1 0\n-1 0\n2 0\n").unwrap();
        assert_eq!(f.universe().len(), 2);
    }

    #[test]
    fn cnf_errors() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap_err(),
            ParseError::line(2, "tautologous clause")
        );
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1 0\nfoo\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn multi_line_clause() {
        let f = parse_dimacs("p cnf 3 1\n1 2\n3 0\n").unwrap();
        assert_eq!(f.clauses[0].len(), 3);
    }

    #[test]
    fn gcnf_groups() {
        let (f, g, k) = parse_gcnf("p gcnf 1 2 1\n{0} 1 0\n{1} -1 0\n").unwrap();
        assert_eq!((f.len(), g, k), (2, vec![0, 1], 1));
        assert!(parse_gcnf("p gcnf 1 1 1\n{2} 1 0\n").is_err());
        assert!(parse_gcnf("p gcnf 1 1 1\n1 0\n").is_err());
    }

    #[test]
    fn wcnf_weights() {
        let w = parse_wcnf("p wcnf 2 3 10\n10 1 0\n1 -1 0\n1 2 0\n").unwrap();
        assert_eq!(w.hard, vec![true, false, false]);
        assert!(parse_wcnf("p wcnf 1 1 10\n3 1 0\n").is_err());
        let w = parse_wcnf("p wcnf 1 1\n1 1 0\n").unwrap();
        assert_eq!(w.hard, vec![false]);
    }

    #[test]
    fn dnf_terms() {
        let d = parse_dnf("p dnf 2 2\n1 2 0\n-1 0\n").unwrap();
        assert_eq!(d.len(), 2);
        assert!(parse_dnf("p dnf 1 1\n1 -1 0\n").is_err());
    }

    #[test]
    fn model_lines() {
        let m = parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n").unwrap();
        assert_eq!(m.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(), vec![1, -2, 3]);
    }

    #[test]
    fn write_then_parse() {
        let src = "p cnf 3 2\n1 -3 0\n2 0\n";
        let f = parse_dimacs(src).unwrap();
        assert_eq!(write_dimacs(&f), src);
    }
}
