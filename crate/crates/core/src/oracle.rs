//! Exhaustive enumeration of binary assignments with LP completion. Only for
//! models small enough that `2^k` LP solves are affordable.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::milp::{MilpModel, VarId};
use crate::solver::{fix_binaries, solve_lp_relaxation, SolveOptions, SolveStatus, SolverError};

pub const DEFAULT_MAX_BINARIES: usize = 24;

const ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("model has {count} free binaries, enumeration is capped at {limit}")]
    TooManyBinaries { count: usize, limit: usize },
    #[error("LP completion is unbounded for assignment {0:?}")]
    Unbounded(Vec<bool>),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub max_binaries: usize,
    /// Skip assignments violating a row that involves binaries only.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_binaries: DEFAULT_MAX_BINARIES,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `None` when every assignment is infeasible.
    pub best_objective: Option<f64>,
    /// Values for every binary in [`MilpModel::binary_ids`] order.
    pub best_assignment: Option<Vec<bool>>,
    pub best_values: Option<Vec<f64>>,
    /// Assignments considered, `2^k` for `k` free binaries.
    pub evaluated: usize,
    /// LP completions actually solved.
    pub lp_solves: usize,
    /// Assignments that are infeasible, whether pruned or rejected by the LP.
    pub infeasible: usize,
}

struct Candidate {
    objective: f64,
    assignment: Vec<bool>,
    values: Vec<f64>,
}

fn better(a: &Candidate, b: &Candidate) -> Ordering {
    a.objective
        .total_cmp(&b.objective)
        .then_with(|| a.assignment.cmp(&b.assignment))
}

/// Global minimum of `model` over all binary assignments, using default options.
pub fn enumerate_optimum(model: &MilpModel, max_binaries: usize) -> Result<OracleResult, OracleError> {
    enumerate_with(
        model,
        OracleOptions {
            max_binaries,
            ..OracleOptions::default()
        },
    )
}

pub fn enumerate_with(model: &MilpModel, options: OracleOptions) -> Result<OracleResult, OracleError> {
    model.check().map_err(SolverError::from)?;
    let binaries = model.binary_ids();
    let free: Vec<usize> = binaries
        .iter()
        .enumerate()
        .filter(|(_, id)| {
            let v = &model.variables[id.0];
            v.lower < v.upper
        })
        .map(|(i, _)| i)
        .collect();
    if free.len() > options.max_binaries {
        return Err(OracleError::TooManyBinaries {
            count: free.len(),
            limit: options.max_binaries,
        });
    }
    let base: Vec<bool> = binaries.iter().map(|id| model.variables[id.0].lower >= 0.5).collect();
    let is_binary = {
        let mut flags = vec![false; model.variables.len()];
        for id in &binaries {
            flags[id.0] = true;
        }
        flags
    };
    let binary_rows: Vec<usize> = model
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| c.terms.iter().all(|(v, _)| is_binary[v.0]))
        .map(|(i, _)| i)
        .collect();

    let lp_options = SolveOptions {
        thread_count: None,
        ..SolveOptions::default()
    };
    let total = 1usize << free.len();

    let outcomes: Vec<Result<Option<Evaluated>, OracleError>> = (0..total)
        .into_par_iter()
        .map(|mask| {
            let mut assignment = base.clone();
            for (bit, &pos) in free.iter().enumerate() {
                assignment[pos] = mask >> bit & 1 == 1;
            }
            if options.prune && violates_binary_rows(model, &binaries, &assignment, &binary_rows) {
                return Ok(None);
            }
            evaluate(model, &binaries, assignment, &lp_options).map(Some)
        })
        .collect();

    let mut result = OracleResult {
        best_objective: None,
        best_assignment: None,
        best_values: None,
        evaluated: total,
        lp_solves: 0,
        infeasible: 0,
    };
    let mut best: Option<Candidate> = None;
    for outcome in outcomes {
        match outcome? {
            None => result.infeasible += 1,
            Some(Evaluated::Infeasible) => {
                result.lp_solves += 1;
                result.infeasible += 1;
            }
            Some(Evaluated::Feasible(c)) => {
                result.lp_solves += 1;
                if best.as_ref().is_none_or(|b| better(&c, b) == Ordering::Less) {
                    best = Some(c);
                }
            }
        }
    }
    if let Some(b) = best {
        result.best_objective = Some(b.objective);
        result.best_assignment = Some(b.assignment);
        result.best_values = Some(b.values);
    }
    Ok(result)
}

enum Evaluated {
    Infeasible,
    Feasible(Candidate),
}

fn violates_binary_rows(model: &MilpModel, binaries: &[VarId], assignment: &[bool], rows: &[usize]) -> bool {
    let mut values = vec![0.0; model.variables.len()];
    for (id, &on) in binaries.iter().zip(assignment) {
        values[id.0] = if on { 1.0 } else { 0.0 };
    }
    rows.iter()
        .any(|&r| !model.constraints[r].is_satisfied(&values, ROW_TOL))
}

fn evaluate(
    model: &MilpModel,
    binaries: &[VarId],
    assignment: Vec<bool>,
    options: &SolveOptions,
) -> Result<Evaluated, OracleError> {
    let fixed = fix_binaries(model, binaries, &assignment)?;
    let out = solve_lp_relaxation(&fixed, options)?;
    match out.status {
        SolveStatus::Optimal => Ok(Evaluated::Feasible(Candidate {
            objective: out.objective,
            assignment,
            values: out.values,
        })),
        SolveStatus::Infeasible => Ok(Evaluated::Infeasible),
        SolveStatus::Unbounded => Err(OracleError::Unbounded(assignment)),
        other => Err(SolverError::Numerical(format!("LP completion stopped with {other:?}")).into()),
    }
}
