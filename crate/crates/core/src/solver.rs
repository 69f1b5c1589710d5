//! Branch-and-bound backend. A [`MilpModel`] goes in, a [`SolveOutcome`] comes out;
//! the solver handle never escapes this module.

use std::ffi::CString;
use std::io::Write;
use std::time::{Duration, Instant};

use highs::{ColProblem, HighsModelStatus, HighsSolutionStatus, Row, Sense};
use serde::Serialize;
use thiserror::Error;

use crate::milp::{MilpModel, ModelError, Relation, VarId, VarKind};

/// Environment variable naming the backend. Only `highs` is available.
pub const SOLVER_ENV: &str = "MGPLAN_SOLVER";
/// Environment variable pointing at a HiGHS options file applied before our own settings.
pub const HIGHS_OPTIONS_ENV: &str = "HIGHS_OPTIONS_FILE";

pub const DEFAULT_REL_GAP: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Highs,
}

impl Backend {
    /// Backend selected by `MGPLAN_SOLVER`, defaulting to HiGHS.
    pub fn from_env() -> Result<Self, SolverError> {
        match std::env::var(SOLVER_ENV) {
            Err(_) => Ok(Backend::Highs),
            Ok(name) => Self::from_name(&name),
        }
    }

    pub fn from_name(name: &str) -> Result<Self, SolverError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "" | "highs" => Ok(Backend::Highs),
            other => Err(SolverError::SolverUnavailable(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOptions {
    pub rel_gap: f64,
    pub time_limit_s: Option<f64>,
    pub thread_count: Option<u32>,
    /// 0 is silent; anything higher turns on the solver's own console output.
    pub verbosity: u8,
    pub seed: u64,
    pub backend: Backend,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rel_gap: DEFAULT_REL_GAP,
            time_limit_s: None,
            thread_count: None,
            verbosity: 0,
            seed: 0,
            backend: Backend::Highs,
        }
    }
}

impl SolveOptions {
    pub fn with_gap(rel_gap: f64) -> Self {
        Self {
            rel_gap,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(0.0..=1.0).contains(&self.rel_gap) {
            return Err(SolverError::InvalidOptions(format!("rel_gap {} outside [0, 1]", self.rel_gap)));
        }
        if let Some(t) = self.time_limit_s {
            if !(t > 0.0) {
                return Err(SolverError::InvalidOptions(format!("time limit {t} must be positive")));
            }
        }
        if self.thread_count == Some(0) {
            return Err(SolverError::InvalidOptions("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Proven optimal within the requested relative gap.
    Optimal,
    /// A feasible solution was found but a limit stopped the search before the gap closed.
    FeasibleGap,
    Infeasible,
    Unbounded,
    /// A limit was reached with no feasible solution.
    Timeout,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleGap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Includes the model's objective offset. NaN without a solution.
    pub objective: f64,
    pub best_bound: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub wall_time: Duration,
    /// The relative gap the backend reports it was configured with.
    pub applied_rel_gap: f64,
}

impl SolveOutcome {
    /// `(objective - bound) / max(1, |objective|)`.
    pub fn relative_gap(&self) -> f64 {
        (self.objective - self.best_bound) / self.objective.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("solver backend {0:?} is not available (supported: highs)")]
    SolverUnavailable(String),
    #[error("invalid solve options: {0}")]
    InvalidOptions(String),
    #[error("model is malformed: {0}")]
    Model(#[from] ModelError),
    #[error("binary assignment has {got} entries, model has {expected} binaries")]
    AssignmentLength { expected: usize, got: usize },
    #[error("warm start has {got} values, model has {expected} variables")]
    StartLength { expected: usize, got: usize },
    #[error("solver failed: {0}")]
    Numerical(String),
}

/// Solves `model` to the configured gap.
pub fn solve(model: &MilpModel, options: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    run(model, options, None, false, &mut std::io::sink())
}

/// Like [`solve`], seeding the search with a full column assignment.
pub fn solve_with_start(model: &MilpModel, options: &SolveOptions, start: &[f64]) -> Result<SolveOutcome, SolverError> {
    if start.len() != model.variables.len() {
        return Err(SolverError::StartLength {
            expected: model.variables.len(),
            got: start.len(),
        });
    }
    run(model, options, Some(start), false, &mut std::io::sink())
}

/// Like [`solve_with_start`], writing a short run summary to `log`.
pub fn solve_logged(
    model: &MilpModel,
    options: &SolveOptions,
    start: Option<&[f64]>,
    log: &mut dyn Write,
) -> Result<SolveOutcome, SolverError> {
    if let Some(s) = start {
        if s.len() != model.variables.len() {
            return Err(SolverError::StartLength {
                expected: model.variables.len(),
                got: s.len(),
            });
        }
    }
    run(model, options, start, false, log)
}

/// Fixes every binary to `assignment` (ordered as [`MilpModel::binary_ids`])
/// by bound tightening and solves the remaining LP.
pub fn solve_lp_with_fixed_binaries(
    model: &MilpModel,
    assignment: &[bool],
    options: &SolveOptions,
) -> Result<SolveOutcome, SolverError> {
    let fixed = fix_binaries(model, &model.binary_ids(), assignment)?;
    run(&fixed, options, None, true, &mut std::io::sink())
}

/// Returns a copy of `model` with `binaries[i]` fixed to `assignment[i]`.
pub fn fix_binaries(model: &MilpModel, binaries: &[VarId], assignment: &[bool]) -> Result<MilpModel, SolverError> {
    if binaries.len() != assignment.len() {
        return Err(SolverError::AssignmentLength {
            expected: binaries.len(),
            got: assignment.len(),
        });
    }
    let mut fixed = model.clone();
    for (&id, &on) in binaries.iter().zip(assignment) {
        let v = &mut fixed.variables[id.0];
        let x = if on { 1.0 } else { 0.0 };
        v.lower = x;
        v.upper = x;
    }
    Ok(fixed)
}

/// Solves the continuous relaxation.
pub fn solve_lp_relaxation(model: &MilpModel, options: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    run(model, options, None, true, &mut std::io::sink())
}

fn row_bounds(relation: Relation, rhs: f64) -> (f64, f64) {
    match relation {
        Relation::Le => (f64::NEG_INFINITY, rhs),
        Relation::Eq => (rhs, rhs),
        Relation::Ge => (rhs, f64::INFINITY),
    }
}

fn to_highs(model: &MilpModel, relax: bool) -> ColProblem {
    let mut pb = ColProblem::default();
    let rows: Vec<Row> = model
        .constraints
        .iter()
        .map(|c| {
            let (lo, hi) = row_bounds(c.relation, c.rhs);
            pb.add_row(lo..=hi)
        })
        .collect();
    let mut columns: Vec<Vec<(Row, f64)>> = vec![Vec::new(); model.variables.len()];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(v, coef) in &c.terms {
            columns[v.0].push((rows[r], coef));
        }
    }
    for (v, col) in model.variables.iter().zip(columns) {
        let integer = !relax && v.kind == VarKind::Binary;
        pb.add_column_with_integrality(v.cost, v.lower..=v.upper, col, integer);
    }
    pb
}

fn set_double(model: &mut highs::Model, name: &str, value: f64) {
    model.set_option(name, value);
}

fn read_double_option(model: &mut highs::Model, name: &str) -> f64 {
    let key = CString::new(name).expect("option names have no NUL");
    let mut value = f64::NAN;
    // SAFETY: the pointer comes from a live model and `key` outlives the call.
    unsafe {
        highs_sys::Highs_getDoubleOptionValue(model.as_mut_ptr(), key.as_ptr(), &mut value);
    }
    value
}

fn configure(model: &mut highs::Model, options: &SolveOptions, presolve: bool) {
    if let Ok(path) = std::env::var(HIGHS_OPTIONS_ENV) {
        if let Ok(path) = CString::new(path) {
            // SAFETY: as above; a missing file only yields a warning status.
            unsafe {
                highs_sys::Highs_readOptions(model.as_mut_ptr(), path.as_ptr());
            }
        }
    }
    model.set_option("output_flag", options.verbosity > 0);
    set_double(model, "mip_rel_gap", options.rel_gap);
    if let Some(t) = options.time_limit_s {
        set_double(model, "time_limit", t);
    }
    if let Some(n) = options.thread_count {
        model.set_option("threads", n as i32);
    }
    model.set_option("random_seed", (options.seed % i32::MAX as u64) as i32);
    if !presolve {
        model.set_option("presolve", c"off");
    }
}

fn run(
    model: &MilpModel,
    options: &SolveOptions,
    start: Option<&[f64]>,
    relax: bool,
    log: &mut dyn Write,
) -> Result<SolveOutcome, SolverError> {
    options.validate()?;
    model.check()?;
    let started = Instant::now();
    if model.variables.is_empty() {
        return Ok(trivial_outcome(model, options, started));
    }
    let has_integers = !relax && model.binary_count() > 0;

    let mut presolve = true;
    loop {
        let mut hm = to_highs(model, relax).optimise(Sense::Minimise);
        configure(&mut hm, options, presolve);
        let applied_rel_gap = read_double_option(&mut hm, "mip_rel_gap");
        // SAFETY: the pointer comes from a live model.
        unsafe {
            highs_sys::Highs_changeObjectiveOffset(hm.as_mut_ptr(), model.objective_offset);
        }
        if let Some(s) = start {
            hm.try_set_solution(Some(s), None, None, None)
                .map_err(|e| SolverError::Numerical(format!("rejected warm start: {e:?}")))?;
        }
        let solved = hm
            .try_solve()
            .map_err(|e| SolverError::Numerical(format!("run failed: {e:?}")))?;
        let raw = solved.status();
        if raw == HighsModelStatus::UnboundedOrInfeasible && presolve {
            presolve = false;
            continue;
        }
        let has_primal = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = match raw {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Unbounded,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget => {
                if has_primal {
                    SolveStatus::FeasibleGap
                } else {
                    SolveStatus::Timeout
                }
            }
            other => return Err(SolverError::Numerical(format!("solver stopped with status {other:?}"))),
        };
        let wall_time = started.elapsed();
        let (objective, best_bound, values) = if status.has_solution() {
            let values = solved.get_solution().columns().to_vec();
            let objective = solved.objective_value();
            let bound = if has_integers {
                solved
                    .double_info_value(c"mip_dual_bound")
                    .map_err(|e| SolverError::Numerical(format!("no dual bound: {e:?}")))?
            } else {
                objective
            };
            (objective, bound.min(objective), values)
        } else {
            (f64::NAN, f64::NAN, Vec::new())
        };
        let _ = writeln!(
            log,
            "highs: status={status:?} raw={raw:?} objective={objective} bound={best_bound} \
             cols={} rows={} binaries={} rel_gap={applied_rel_gap} presolve={presolve} time={:.3}s",
            model.variables.len(),
            model.constraints.len(),
            if relax { 0 } else { model.binary_count() },
            wall_time.as_secs_f64()
        );
        return Ok(SolveOutcome {
            status,
            objective,
            best_bound,
            values,
            wall_time,
            applied_rel_gap,
        });
    }
}

/// A model without columns: feasible iff every row holds at zero.
fn trivial_outcome(model: &MilpModel, options: &SolveOptions, started: Instant) -> SolveOutcome {
    let feasible = model.constraints.iter().all(|c| c.is_satisfied(&[], 0.0));
    let objective = if feasible { model.objective_offset } else { f64::NAN };
    SolveOutcome {
        status: if feasible { SolveStatus::Optimal } else { SolveStatus::Infeasible },
        objective,
        best_bound: objective,
        values: Vec::new(),
        wall_time: started.elapsed(),
        applied_rel_gap: options.rel_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_lower_bound() {
        let mut m = MilpModel::default();
        let x = m.add_variable(VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        m.add_cost(x, 1.0);
        m.add_constraint("lb", vec![(x, 1.0)], Relation::Ge, 3.0);
        let out = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn binary_pair() {
        let mut m = MilpModel::default();
        let x = m.add_variable(VarKind::Binary, 0.0, 1.0);
        let y = m.add_variable(VarKind::Binary, 0.0, 1.0);
        m.add_cost(x, -1.0);
        m.add_cost(y, -1.0);
        m.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        let out = solve(&m, &SolveOptions::default()).unwrap();
        assert!((out.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut m = MilpModel::default();
        let x = m.add_variable(VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        m.add_constraint("a", vec![(x, 1.0)], Relation::Ge, 1.0);
        m.add_constraint("b", vec![(x, 1.0)], Relation::Le, 0.0);
        let out = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn offset_is_included() {
        let mut m = MilpModel::default();
        let x = m.add_variable(VarKind::Continuous, 1.0, 2.0);
        m.add_cost(x, 2.0);
        m.objective_offset = 10.0;
        let out = solve(&m, &SolveOptions::default()).unwrap();
        assert!((out.objective - 12.0).abs() < 1e-9);
    }

    #[test]
    fn empty_model() {
        let mut m = MilpModel::default();
        m.objective_offset = 4.0;
        m.add_constraint("empty", vec![], Relation::Le, 0.0);
        let out = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective, 4.0);
        m.add_constraint("broken", vec![], Relation::Ge, 1.0);
        assert_eq!(solve(&m, &SolveOptions::default()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unknown_backend_is_unavailable() {
        assert!(matches!(
            Backend::from_name("gurobi"),
            Err(SolverError::SolverUnavailable(_))
        ));
        assert_eq!(Backend::from_name("HiGHS").unwrap(), Backend::Highs);
    }

    #[test]
    fn options_are_checked() {
        let m = MilpModel::default();
        let bad = SolveOptions::with_gap(1.5);
        assert!(matches!(solve(&m, &bad), Err(SolverError::InvalidOptions(_))));
        let bad = SolveOptions {
            time_limit_s: Some(0.0),
            ..SolveOptions::default()
        };
        assert!(matches!(solve(&m, &bad), Err(SolverError::InvalidOptions(_))));
    }
}
