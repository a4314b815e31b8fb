//! DIMACS CNF reading and writing, and conversion of clauses to functions.

use std::fmt::{self, Write as _};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{BoolFunc, Manager, Point, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("no `p cnf` header found")]
    NoHeader,
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {var_count} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        var_count: usize,
    },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    /// From a non-zero DIMACS integer.
    pub fn from_dimacs(k: i64) -> Self {
        assert!(k != 0, "0 is the clause terminator, not a literal");
        Literal {
            var: VarId((k.unsigned_abs() - 1) as u32),
            negated: k < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -self.var.dimacs()
        } else {
            self.var.dimacs()
        }
    }

    pub fn eval(self, p: &Point) -> bool {
        p.get(self.var) != self.negated
    }
}

/// A disjunction of literals, free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    literals: Vec<Literal>,
    tautological: bool,
}

impl Clause {
    /// Builds a clause, dropping repeated literals (first occurrence wins)
    /// and flagging `x ∨ ¬x`.
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Self {
        let mut literals: Vec<Literal> = Vec::new();
        let mut tautological = false;
        for lit in lits {
            if literals.contains(&lit) {
                continue;
            }
            if literals
                .iter()
                .any(|l| l.var == lit.var && l.negated != lit.negated)
            {
                tautological = true;
            }
            literals.push(lit);
        }
        Clause {
            literals,
            tautological,
        }
    }

    pub fn from_dimacs(lits: &[i64]) -> Self {
        Self::new(lits.iter().map(|&k| Literal::from_dimacs(k)))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    /// The empty clause, which is unsatisfiable.
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_tautological(&self) -> bool {
        self.tautological
    }

    pub fn to_func(&self, mgr: &Manager) -> BoolFunc {
        clause_to_func(self, mgr)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lit in &self.literals {
            write!(f, "{} ", lit.to_dimacs())?;
        }
        f.write_str("0")
    }
}

/// A CNF formula `C1 · C2 · ... · Cm` over `var_count` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub var_count: usize,
    pub clauses: Vec<Clause>,
    /// Comment lines, without the leading `c`.
    pub comments: Vec<String>,
}

impl CnfFormula {
    /// Panics if a clause mentions a variable `>= var_count`.
    pub fn new(var_count: usize, clauses: Vec<Clause>) -> Self {
        for c in &clauses {
            for l in c.literals() {
                assert!(l.var.index() < var_count, "literal {l:?} out of range");
            }
        }
        CnfFormula {
            var_count,
            clauses,
            comments: Vec::new(),
        }
    }

    pub fn from_dimacs_clauses(var_count: usize, clauses: &[&[i64]]) -> Self {
        Self::new(
            var_count,
            clauses.iter().map(|c| Clause::from_dimacs(c)).collect(),
        )
    }

    /// Clause-by-clause evaluation.
    pub fn satisfied_by(&self, p: &Point) -> bool {
        self.clauses
            .iter()
            .all(|c| c.literals().iter().any(|l| l.eval(p)))
    }
}

/// Parses DIMACS CNF. Accepts LF or CRLF line endings; a `%` line ends the
/// input (SATLIB convention). A clause count that disagrees with the header
/// is logged, not rejected.
pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula, DimacsError> {
    let text = std::str::from_utf8(input).map_err(|_| DimacsError::Encoding)?;
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            comments.push(line[1..].trim_start().to_string());
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            header = Some(parse_header(line).ok_or_else(|| DimacsError::BadHeader {
                line: line_no,
                text: line.to_string(),
            })?);
            continue;
        }
        let Some((var_count, _)) = header else {
            return Err(DimacsError::MissingHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            let k: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if k == 0 {
                clauses.push(Clause::from_dimacs(&current));
                current.clear();
            } else if k.unsigned_abs() > var_count as u64 {
                return Err(DimacsError::LiteralOutOfRange {
                    line: line_no,
                    literal: k,
                    var_count,
                });
            } else {
                current.push(k);
            }
        }
    }

    let (var_count, declared) = header.ok_or(DimacsError::NoHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if declared != clauses.len() {
        warn!(
            "header declares {declared} clauses but {} were read",
            clauses.len()
        );
    }
    Ok(CnfFormula {
        var_count,
        clauses,
        comments,
    })
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    if it.next()? != "p" || it.next()? != "cnf" {
        return None;
    }
    let n = it.next()?.parse().ok()?;
    let m = it.next()?.parse().ok()?;
    it.next().is_none().then_some((n, m))
}

pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    for c in &f.comments {
        if c.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {c}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", f.var_count, f.clauses.len());
    for c in &f.clauses {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// The disjunction of the clause's literals; the empty clause is `0`.
pub fn clause_to_func(c: &Clause, mgr: &Manager) -> BoolFunc {
    mgr.or_all(c.literals().iter().map(|l| {
        mgr.literal(l.var, l.negated)
            .expect("clause variable outside the manager")
    }))
}

/// The conjunction of every clause. The decomposition solver never builds
/// this; it exists for cross-checking.
pub fn formula_to_func(f: &CnfFormula, mgr: &Manager) -> BoolFunc {
    mgr.and_all(f.clauses.iter().map(|c| clause_to_func(c, mgr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_small_formula() {
        let f = parse_dimacs(b"p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(f.var_count, 2);
        assert_eq!(f.clauses, vec![Clause::from_dimacs(&[1, -2])]);
    }

    #[test]
    fn parses_worked_examples() {
        let sat = parse_dimacs(b"p cnf 4 3\n-1 2 4 0\n-2 3 -4 0\n1 3 -4 0\n").unwrap();
        assert_eq!(
            sat,
            CnfFormula::from_dimacs_clauses(4, &[&[-1, 2, 4], &[-2, 3, -4], &[1, 3, -4]])
        );
        let unsat = parse_dimacs(b"p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(unsat.clauses.len(), 4);
        let m = Manager::new(2);
        assert!(m.is_zero(formula_to_func(&unsat, &m)));
        let m = Manager::new(4);
        assert!(m.is_sat(formula_to_func(&sat, &m)));
    }

    #[test]
    fn comments_crlf_and_split_clauses() {
        let f = parse_dimacs(b"c hello\r\nc\r\np cnf 3 2\r\n1 2\r\n 3 0 -1\r\n0\r\n").unwrap();
        assert_eq!(f.comments, vec!["hello".to_string(), String::new()]);
        assert_eq!(
            f.clauses,
            vec![Clause::from_dimacs(&[1, 2, 3]), Clause::from_dimacs(&[-1])]
        );
    }

    #[test]
    fn empty_clause_is_const_zero() {
        let f = parse_dimacs(b"p cnf 1 2\n1 0\n0\n").unwrap();
        assert!(f.clauses[1].is_empty());
        let m = Manager::new(1);
        assert!(m.is_zero(formula_to_func(&f, &m)));
    }

    #[test]
    fn count_mismatch_is_not_an_error() {
        let f = parse_dimacs(b"p cnf 2 5\n1 0\n").unwrap();
        assert_eq!(f.clauses.len(), 1);
    }

    #[test]
    fn percent_terminates_input() {
        let f = parse_dimacs(b"p cnf 2 1\n1 2 0\n%\n0\n").unwrap();
        assert_eq!(f.clauses.len(), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_dimacs(b"1 2 0\n"),
            Err(DimacsError::MissingHeader { line: 1 })
        );
        assert_eq!(parse_dimacs(b"c only\n"), Err(DimacsError::NoHeader));
        assert!(matches!(
            parse_dimacs(b"p cnf x 1\n"),
            Err(DimacsError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs(b"p dnf 1 1\n"),
            Err(DimacsError::BadHeader { .. })
        ));
        assert_eq!(
            parse_dimacs(b"p cnf 2 1\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                var_count: 2
            })
        );
        assert_eq!(
            parse_dimacs(b"p cnf 2 1\n\n1 a 0\n"),
            Err(DimacsError::BadToken {
                line: 3,
                token: "a".into()
            })
        );
        assert_eq!(
            parse_dimacs(b"p cnf 2 1\n1 2\n"),
            Err(DimacsError::Unterminated)
        );
        assert_eq!(
            parse_dimacs(b"p cnf 2 1\np cnf 2 1\n"),
            Err(DimacsError::DuplicateHeader { line: 2 })
        );
        assert_eq!(parse_dimacs(&[0xff, 0xfe]), Err(DimacsError::Encoding));
    }

    #[test]
    fn duplicates_and_tautologies() {
        let c = Clause::from_dimacs(&[1, 2, 1]);
        assert_eq!(c.len(), 2);
        assert!(!c.is_tautological());
        let t = Clause::from_dimacs(&[1, -1]);
        assert!(t.is_tautological());
        let m = Manager::new(1);
        assert!(m.is_one(t.to_func(&m)));
    }

    #[test]
    fn clause_func_at_origin() {
        let m = Manager::new(2);
        let c = Clause::from_dimacs(&[1, -2]).to_func(&m);
        assert!(m.eval(c, &Point::zeros(2)).unwrap());
    }

    #[test]
    fn empty_formula_is_one() {
        let m = Manager::new(3);
        assert!(m.is_one(formula_to_func(&CnfFormula::new(3, vec![]), &m)));
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1usize..8).prop_flat_map(|n| {
            let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            prop::collection::vec(prop::collection::vec(lit, 0..5), 0..10).prop_map(move |cs| {
                let mut f = CnfFormula::new(n, cs.iter().map(|c| Clause::from_dimacs(c)).collect());
                f.comments.push("generated".into());
                f
            })
        })
    }

    proptest! {
        #[test]
        fn emit_then_parse_round_trips(f in arb_formula()) {
            let text = emit_dimacs(&f);
            prop_assert_eq!(parse_dimacs(text.as_bytes()).unwrap(), f);
        }

        #[test]
        fn clause_func_matches_direct_eval(f in arb_formula()) {
            let m = Manager::new(f.var_count);
            for c in &f.clauses {
                let cf = c.to_func(&m);
                for idx in 0..1u64 << f.var_count {
                    let p = Point::from_index(f.var_count, idx);
                    let direct = c.literals().iter().any(|l| l.eval(&p));
                    prop_assert_eq!(m.eval(cf, &p).unwrap(), direct);
                }
            }
        }
    }
}
