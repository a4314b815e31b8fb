//! `projsat` command-line front end.
//!
//! Exit codes follow the SAT competition: 10 for SAT, 20 for UNSAT. `verify`
//! mode exits 0 when every check passes and 3 when one fails; 1 means a
//! usage, input or resource error.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use projsat::engine::DEFAULT_ENUM_CAP;
use projsat::solver::StepRecord;
use projsat::{
    parse_dimacs, CnfFormula, DimacsError, FactorOrder, SolveConfig, SolveError, Status,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Decide satisfiability and print one witness.
    Solve,
    /// Print every satisfying assignment.
    All,
    /// Print every step of the decomposition.
    Trace,
    /// Cross-check the result against exhaustive evaluation.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Input,
    Size,
}

#[derive(Debug, Parser)]
#[command(
    name = "projsat",
    version,
    about = "Decide and enumerate CNF satisfiability by projective cofactor decomposition"
)]
pub struct CliOptions {
    /// DIMACS CNF file; reads stdin when absent or `-`.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Solve)]
    pub mode: Mode,
    /// Worker threads for the reduction step.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
    /// Order in which clauses enter the decomposition.
    #[arg(long, value_enum, default_value_t = Order::Input)]
    pub order: Order,
    /// Check the final function against an exhaustive evaluation of the input.
    #[arg(long)]
    pub oracle_check: bool,
    /// Print step details (implied by `--mode trace`).
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub json: bool,
    /// Largest number of solutions `--mode all` may print.
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    pub max_enum: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] DimacsError),
    #[error("{0}")]
    Solve(#[from] SolveError),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

/// Machine-readable output of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub mode: Mode,
    pub status: Status,
    pub var_count: usize,
    pub clause_count: usize,
    /// DIMACS literals of the witness.
    pub witness: Option<Vec<i64>>,
    pub all_solutions: Option<Vec<Vec<i64>>>,
    pub dropped: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub oracle_agrees: Option<bool>,
    pub witness_checked: Option<bool>,
}

impl JsonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Parses `args` (including the program name) and runs. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(args) {
        Ok(o) => o,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(&opts, stdin, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_formula(opts: &CliOptions, stdin: &mut dyn Read) -> Result<CnfFormula, CliError> {
    let mut bytes = Vec::new();
    match &opts.input {
        Some(path) if path.as_os_str() != "-" => {
            bytes = std::fs::read(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        _ => {
            stdin
                .read_to_end(&mut bytes)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
        }
    }
    Ok(parse_dimacs(&bytes)?)
}

pub fn execute(
    opts: &CliOptions,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let formula = read_formula(opts, stdin)?;
    let trace = opts.trace || opts.mode == Mode::Trace;
    let cfg = SolveConfig {
        factor_order: match opts.order {
            Order::Input => FactorOrder::Input,
            Order::Size => FactorOrder::AscendingClauseSize,
        },
        threads: usize::from(opts.threads),
        trace,
        enumerate_all: opts.mode == Mode::All,
        oracle_check: opts.oracle_check || opts.mode == Mode::Verify,
        max_enum: opts.max_enum,
        var_order: None,
    };
    let result = projsat::solve(&formula, &cfg)?;
    let witness_checked = result
        .witness
        .as_ref()
        .map(|w| formula.satisfied_by(w))
        .or((opts.mode == Mode::Verify).then_some(true));
    let checks_pass = result.oracle_agrees != Some(false) && witness_checked != Some(false);

    let report = JsonReport {
        mode: opts.mode,
        status: result.status,
        var_count: formula.var_count,
        clause_count: formula.clauses.len(),
        witness: result.witness.as_ref().map(|w| w.dimacs_literals()),
        all_solutions: result
            .all_solutions
            .as_ref()
            .map(|s| s.iter().map(|p| p.dimacs_literals()).collect()),
        dropped: result.dropped.clone(),
        steps: result.steps.clone(),
        oracle_agrees: result.oracle_agrees,
        witness_checked,
    };

    if opts.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        write_human(out, &report, trace)?;
    }

    Ok(if !checks_pass {
        EXIT_CHECK_FAILED
    } else if opts.mode == Mode::Verify {
        EXIT_VERIFIED
    } else {
        match result.status {
            Status::Sat => EXIT_SAT,
            Status::Unsat => EXIT_UNSAT,
        }
    })
}

fn v_line(lits: &[i64]) -> String {
    let mut s = String::from("v");
    for l in lits {
        s.push(' ');
        s.push_str(&l.to_string());
    }
    s.push_str(" 0");
    s
}

fn write_human(out: &mut dyn Write, r: &JsonReport, trace: bool) -> std::io::Result<()> {
    writeln!(
        out,
        "c {} variables, {} clauses",
        r.var_count, r.clause_count
    )?;
    if !r.dropped.is_empty() {
        let list: Vec<_> = r.dropped.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "c dropped tautological clauses: {}", list.join(" "))?;
    }
    if trace {
        for s in &r.steps {
            write!(
                out,
                "c step {}: clause {}, size {}, {:?}",
                s.step,
                s.factor + 1,
                s.size,
                s.action
            )?;
            if let (Some(t), Some(y)) = (s.target, &s.off_point) {
                write!(
                    out,
                    ", target clause {}, off-point {}, later factors {} -> {} nodes",
                    t + 1,
                    y,
                    s.remaining_before,
                    s.remaining_after
                )?;
            }
            writeln!(out)?;
            if let Some(f) = &s.function {
                writeln!(out, "c   f{} = {}", s.step, f)?;
            }
            for line in s.projection.iter().flatten() {
                writeln!(out, "c   {line}")?;
            }
        }
    }
    if let Some(ok) = r.oracle_agrees {
        writeln!(
            out,
            "c oracle check: {}",
            if ok {
                "final function matches the input"
            } else {
                "MISMATCH"
            }
        )?;
    }
    if r.mode == Mode::Verify {
        if let Some(ok) = r.witness_checked {
            writeln!(
                out,
                "c witness check: {}",
                if ok {
                    "ok"
                } else {
                    "witness falsifies the input"
                }
            )?;
        }
    }
    match r.status {
        Status::Sat => writeln!(out, "s SATISFIABLE")?,
        Status::Unsat => writeln!(out, "s UNSATISFIABLE")?,
    }
    match &r.all_solutions {
        Some(all) => {
            writeln!(out, "c {} solutions", all.len())?;
            for s in all {
                writeln!(out, "{}", v_line(s))?;
            }
        }
        None => {
            if let Some(w) = &r.witness {
                writeln!(out, "{}", v_line(w))?;
            }
        }
    }
    Ok(())
}
