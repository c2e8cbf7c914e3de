//! DIMACS CNF input/output, random instances and JSON run reports.
//!
//! The reader accepts `c` comment lines, a single `p cnf <vars> <clauses>`
//! problem line and zero-terminated clauses that may span lines. A line
//! starting with `%` ends the input (SATLIB files carry one). Clauses with
//! more than three distinct variables are rejected.

mod generate;
pub mod report;

use std::fmt;

pub use generate::{gen_random_3sat, GenerateError};

use crate::clausal::{canonicalize, Canonical, Instance, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A message about the input text. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Warning,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {kind}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub instance: Instance,
    pub warnings: Vec<Diagnostic>,
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (true, Some((b, c))) => {
                out.push((c + 1, &line[b..byte]));
                start = None;
            }
            (false, None) => start = Some((byte, col)),
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push((c + 1, &line[b..]));
    }
    out
}

struct Header {
    num_vars: u32,
    num_clauses: usize,
    line: usize,
    column: usize,
}

struct PendingClause {
    literals: Vec<Literal>,
    line: usize,
    column: usize,
    too_wide: bool,
}

impl PendingClause {
    fn new(line: usize, column: usize) -> Self {
        PendingClause {
            literals: Vec::new(),
            line,
            column,
            too_wide: false,
        }
    }
}

fn parse_header(toks: &[(usize, &str)], line: usize) -> Result<Header, Diagnostic> {
    if toks.len() != 4 || toks[0].1 != "p" {
        return Err(Diagnostic::error(line, toks[0].0, "problem line must read `p cnf <variables> <clauses>`"));
    }
    if toks[1].1 != "cnf" {
        return Err(Diagnostic::error(line, toks[1].0, format!("unsupported format `{}`; expected `cnf`", toks[1].1)));
    }
    let num_vars = toks[2]
        .1
        .parse::<u32>()
        .map_err(|_| Diagnostic::error(line, toks[2].0, format!("invalid variable count `{}`", toks[2].1)))?;
    let num_clauses = toks[3]
        .1
        .parse::<usize>()
        .map_err(|_| Diagnostic::error(line, toks[3].0, format!("invalid clause count `{}`", toks[3].1)))?;
    Ok(Header {
        num_vars,
        num_clauses,
        line,
        column: toks[0].0,
    })
}

/// Parses DIMACS text into a canonical instance. On failure every collected
/// diagnostic (errors and warnings) is returned.
pub fn parse_dimacs(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut header: Option<Header> = None;
    let mut clauses: Vec<PendingClause> = Vec::new();
    let mut current: Option<PendingClause> = None;
    let mut last_pos = (1, 1);

    'lines: for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = tokens(line);
        let Some(&(first_col, first)) = toks.first() else {
            continue;
        };
        if first.starts_with('c') {
            continue;
        }
        if first.starts_with('%') {
            break;
        }
        if first.starts_with('p') {
            if let Some(h) = &header {
                diags.push(Diagnostic::error(
                    lineno,
                    first_col,
                    format!("duplicate problem line (first on line {})", h.line),
                ));
                continue;
            }
            if !clauses.is_empty() || current.is_some() {
                diags.push(Diagnostic::error(lineno, first_col, "problem line after clauses"));
                continue;
            }
            match parse_header(&toks, lineno) {
                Ok(h) => header = Some(h),
                Err(d) => {
                    diags.push(d);
                    break 'lines;
                }
            }
            continue;
        }
        let Some(h) = &header else {
            diags.push(Diagnostic::error(lineno, first_col, "clause data before the `p cnf` problem line"));
            break;
        };
        for &(col, tok) in &toks {
            last_pos = (lineno, col + tok.chars().count());
            let lit: i64 = match tok.parse() {
                Ok(v) => v,
                Err(_) => {
                    diags.push(Diagnostic::error(lineno, col, format!("invalid literal `{tok}`")));
                    continue;
                }
            };
            let pending = current.get_or_insert_with(|| PendingClause::new(lineno, col));
            if lit == 0 {
                clauses.push(current.take().unwrap());
                continue;
            }
            let Some(l) = Literal::from_dimacs(lit).filter(|l| l.var <= h.num_vars) else {
                diags.push(Diagnostic::error(
                    lineno,
                    col,
                    format!("literal {lit} outside the declared {} variables", h.num_vars),
                ));
                continue;
            };
            if !pending.literals.iter().any(|x| x.var == l.var) {
                let distinct = 1 + {
                    let mut vs: Vec<u32> = pending.literals.iter().map(|x| x.var).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    vs.len()
                };
                if distinct > 3 && !pending.too_wide {
                    pending.too_wide = true;
                    diags.push(Diagnostic::error(
                        lineno,
                        col,
                        "clause width exceeds 3 distinct variables; only 3SAT input is accepted",
                    ));
                }
            }
            pending.literals.push(l);
        }
    }

    if let Some(pending) = current.take() {
        diags.push(Diagnostic::warning(last_pos.0, last_pos.1, "final clause is not terminated by 0"));
        clauses.push(pending);
    }

    let Some(h) = header else {
        if diags.iter().all(|d| !d.is_error()) {
            diags.push(Diagnostic::error(1, 1, "missing `p cnf` problem line"));
        }
        return Err(diags);
    };

    if clauses.len() != h.num_clauses {
        diags.push(Diagnostic::warning(
            h.line,
            h.column,
            format!("problem line declares {} clauses but {} were read", h.num_clauses, clauses.len()),
        ));
    }

    let mut raw = Vec::with_capacity(clauses.len());
    for c in clauses.iter().filter(|c| !c.too_wide) {
        match canonicalize(&c.literals, h.num_vars) {
            Ok(Canonical::Tautology) => diags.push(Diagnostic::warning(c.line, c.column, "tautological clause dropped")),
            Ok(_) => {}
            Err(e) => diags.push(Diagnostic::error(c.line, c.column, e.to_string())),
        }
        raw.push(c.literals.clone());
    }

    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    let instance = Instance::new(h.num_vars, raw).map_err(|e| vec![Diagnostic::error(h.line, h.column, e.to_string())])?;
    Ok(Parsed { instance, warnings: diags })
}

/// Canonical DIMACS text: header, then one clause per line in stored order.
/// An empty clause is written last as a bare `0`.
pub fn emit_dimacs(instance: &Instance) -> String {
    let m = instance.clauses().len() + usize::from(instance.has_empty_clause());
    let mut out = format!("p cnf {} {}\n", instance.num_vars(), m);
    for c in instance.clauses() {
        for l in c.literals() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    if instance.has_empty_clause() {
        out.push_str("0\n");
    }
    out
}
