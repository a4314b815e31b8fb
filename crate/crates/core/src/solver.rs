//! Projective cofactors and the decomposition solver.
//!
//! For a projection `P ∈ 𝒫(g, h)` the projective cofactor `ζ[h, g, P]` is
//! `h ∘ P`. It agrees with `h` on the ON-set of `g` and vanishes on the
//! OFF-set, so `ζ[h, g, P] = g·h` and the two functions have the same
//! solutions. Since `ζ[·, g, P]` is a Boolean homomorphism, a product
//! `f = h₁·h₂·…·h_k` can be processed one factor at a time: take
//! `f₁ = h₁`, push every remaining factor through a projection of `f₁`,
//! take the reduced second factor as `f₂`, and so on. The last `f_k` has
//! exactly the solutions of `f`.
//!
//! Each step's reductions are independent of each other and run in
//! parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{clause_to_func, formula_to_func, CnfFormula};
use crate::engine::{BoolFunc, EngineError, Manager, Point, VarId, DEFAULT_ENUM_CAP};
use crate::oracle::{self, MAX_ORACLE_VARS};
use crate::projection::{projection_for, verify_projection, Projection, ProjectionError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("thread count must be at least 1")]
    NoThreads,
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorOrder {
    /// Clauses in file order.
    #[default]
    Input,
    /// Shortest clauses first; ties keep file order.
    AscendingClauseSize,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub factor_order: FactorOrder,
    pub threads: usize,
    /// Render each `fᵢ` and projection into the step records.
    pub trace: bool,
    pub enumerate_all: bool,
    /// Compare the final function against an exhaustive evaluation of the
    /// input.
    pub oracle_check: bool,
    pub max_enum: u64,
    /// Decision-diagram variable order; `None` means `x1 < x2 < ...`.
    pub var_order: Option<Vec<VarId>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            factor_order: FactorOrder::Input,
            threads: 1,
            trace: false,
            enumerate_all: false,
            oracle_check: false,
            max_enum: DEFAULT_ENUM_CAP,
            var_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepAction {
    /// Later factors were reduced through a projection of this one.
    Reduced,
    /// This factor had reduced to 1 and was passed over.
    SkippedTautology,
    /// Last factor, or every later factor had reduced to 1.
    Final,
    /// This factor is 0.
    Unsat,
}

/// What happened at one step of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based position in the chain.
    pub step: usize,
    /// 0-based index of the clause this factor came from.
    pub factor: usize,
    /// Decision-diagram nodes in `fᵢ`.
    pub size: usize,
    pub action: StepAction,
    /// Clause whose reduced factor supplied the off-point.
    pub target: Option<usize>,
    /// Off-point used for the projection; `-` marks coordinates the
    /// projection leaves alone.
    pub off_point: Option<String>,
    /// Total nodes in the later factors before and after the reduction.
    pub remaining_before: usize,
    pub remaining_after: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    pub witness: Option<Point>,
    pub all_solutions: Option<Vec<Point>>,
    pub steps: Vec<StepRecord>,
    /// Clauses dropped up front because they are tautologies.
    pub dropped: Vec<usize>,
    pub oracle_agrees: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ChainStep {
    pub function: BoolFunc,
    pub projection: Option<Projection>,
    pub record: StepRecord,
}

/// Every intermediate `fᵢ` of a run, plus the function whose ON-set is the
/// solution set.
#[derive(Debug, Clone)]
pub struct Chain {
    pub steps: Vec<ChainStep>,
    pub final_function: BoolFunc,
    pub dropped: Vec<usize>,
}

impl Chain {
    pub fn status(&self, mgr: &Manager) -> Status {
        if mgr.is_sat(self.final_function) {
            Status::Sat
        } else {
            Status::Unsat
        }
    }

    pub fn functions(&self) -> Vec<BoolFunc> {
        self.steps.iter().map(|s| s.function).collect()
    }
}

/// `ζ[h, g, P] = h ∘ P`.
pub fn zeta(
    mgr: &Manager,
    h: BoolFunc,
    g: BoolFunc,
    p: &Projection,
) -> Result<BoolFunc, EngineError> {
    debug_assert!(
        p.base() == g && verify_projection(mgr, p, g, p.target()),
        "projection is not in 𝒫(g, target)"
    );
    mgr.compose(h, p.subst())
}

/// `g·h = ζ[h, g, P]`: the two sides have the same solutions, and both are
/// canonical, so this is one handle comparison.
pub fn check_sat_preservation(
    mgr: &Manager,
    g: BoolFunc,
    h: BoolFunc,
    p: &Projection,
) -> Result<bool, EngineError> {
    Ok(mgr.and(g, h) == zeta(mgr, h, g, p)?)
}

struct Factor {
    clause: usize,
    func: BoolFunc,
}

/// Runs the decomposition on `formula` inside `mgr` and returns every step.
pub fn solve_chain_trace(
    mgr: &Manager,
    formula: &CnfFormula,
    cfg: &SolveConfig,
) -> Result<Chain, SolveError> {
    if cfg.threads == 0 {
        return Err(SolveError::NoThreads);
    }
    let pool = if cfg.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| SolveError::ThreadPool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut dropped = Vec::new();
    let mut factors = Vec::new();
    for (idx, clause) in formula.clauses.iter().enumerate() {
        let func = clause_to_func(clause, mgr);
        if mgr.is_one(func) {
            dropped.push(idx);
        } else if mgr.is_zero(func) {
            let record = StepRecord {
                step: 1,
                factor: idx,
                size: 0,
                action: StepAction::Unsat,
                target: None,
                off_point: None,
                remaining_before: 0,
                remaining_after: 0,
                function: cfg.trace.then(|| "0".to_string()),
                projection: None,
            };
            return Ok(Chain {
                steps: vec![ChainStep {
                    function: func,
                    projection: None,
                    record,
                }],
                final_function: func,
                dropped,
            });
        } else {
            factors.push(Factor { clause: idx, func });
        }
    }
    if cfg.factor_order == FactorOrder::AscendingClauseSize {
        factors.sort_by_key(|f| formula.clauses[f.clause].len());
    }

    let k = factors.len();
    let mut steps = Vec::with_capacity(k);
    let mut final_function = mgr.one();
    for i in 0..k {
        let fi = factors[i].func;
        let mut record = StepRecord {
            step: i + 1,
            factor: factors[i].clause,
            size: mgr.node_count(fi),
            action: StepAction::Final,
            target: None,
            off_point: None,
            remaining_before: 0,
            remaining_after: 0,
            function: cfg.trace.then(|| mgr.to_formula(fi)),
            projection: None,
        };
        let later = &factors[i + 1..];
        let target = later.iter().find(|f| !mgr.is_one(f.func));
        let outcome = if mgr.is_zero(fi) {
            Some(StepAction::Unsat)
        } else if i + 1 == k || target.is_none() {
            Some(StepAction::Final)
        } else if mgr.is_one(fi) {
            record.action = StepAction::SkippedTautology;
            None
        } else {
            None
        };
        if let Some(action) = outcome {
            record.action = action;
            final_function = fi;
            steps.push(ChainStep {
                function: fi,
                projection: None,
                record,
            });
            break;
        }
        if record.action == StepAction::SkippedTautology {
            steps.push(ChainStep {
                function: fi,
                projection: None,
                record,
            });
            continue;
        }

        let target = target.expect("checked above");
        let proj = projection_for(mgr, fi, target.func)?;
        debug_assert!(verify_projection(mgr, &proj, fi, target.func));
        record.action = StepAction::Reduced;
        record.target = Some(target.clause);
        record.off_point = Some(off_point_pattern(mgr, &proj));
        record.remaining_before = later.iter().map(|f| mgr.node_count(f.func)).sum();
        if cfg.trace {
            record.projection = Some(proj.dump(mgr));
        }

        let reduce = |w: BoolFunc| mgr.compose(w, proj.subst());
        let reduced: Vec<BoolFunc> = match &pool {
            Some(pool) => pool.install(|| {
                later
                    .par_iter()
                    .map(|f| reduce(f.func))
                    .collect::<Result<_, _>>()
            })?,
            None => later
                .iter()
                .map(|f| reduce(f.func))
                .collect::<Result<_, _>>()?,
        };
        for (f, w) in factors[i + 1..].iter_mut().zip(reduced) {
            f.func = w;
        }
        record.remaining_after = factors[i + 1..]
            .iter()
            .map(|f| mgr.node_count(f.func))
            .sum();
        steps.push(ChainStep {
            function: fi,
            projection: Some(proj),
            record,
        });
    }

    Ok(Chain {
        steps,
        final_function,
        dropped,
    })
}

fn off_point_pattern(mgr: &Manager, p: &Projection) -> String {
    let Some(y) = p.off_point() else {
        return String::new();
    };
    let support = mgr.support(p.target());
    (0..y.len() as u32)
        .map(VarId)
        .map(|v| match (support.contains(&v), y.get(v)) {
            (false, _) => '-',
            (true, true) => '1',
            (true, false) => '0',
        })
        .collect()
}

/// Decides `formula`, extracting a witness and, if asked, every solution.
pub fn solve(formula: &CnfFormula, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    let mgr = match &cfg.var_order {
        Some(order) => Manager::with_order(order.clone())?,
        None => Manager::new(formula.var_count),
    };
    if mgr.var_count() != formula.var_count {
        return Err(EngineError::LengthMismatch {
            expected: formula.var_count,
            actual: mgr.var_count(),
        }
        .into());
    }
    solve_in(&mgr, formula, cfg)
}

/// [`solve`] inside a caller-supplied manager.
pub fn solve_in(
    mgr: &Manager,
    formula: &CnfFormula,
    cfg: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    let chain = solve_chain_trace(mgr, formula, cfg)?;
    let fk = chain.final_function;
    let witness = mgr.any_on_point(fk);
    let status = if witness.is_some() {
        Status::Sat
    } else {
        Status::Unsat
    };
    if let Some(w) = &witness {
        debug_assert!(formula.satisfied_by(w), "witness {w} falsifies the input");
    }
    let all_solutions = if cfg.enumerate_all {
        Some(mgr.enumerate_on_set(fk, cfg.max_enum)?)
    } else {
        None
    };
    let oracle_agrees = cfg.oracle_check.then(|| {
        if formula.var_count <= MAX_ORACLE_VARS {
            let expected = oracle::tt_of_formula(formula).expect("size checked");
            let got = oracle::tt_of_func(mgr, fk).expect("size checked");
            expected == got
        } else {
            formula_to_func(formula, mgr) == fk
        }
    });
    Ok(SolveResult {
        status,
        witness,
        all_solutions,
        steps: chain.steps.into_iter().map(|s| s.record).collect(),
        dropped: chain.dropped,
        oracle_agrees,
    })
}
