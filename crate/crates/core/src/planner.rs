//! End-to-end planning: build, warm start, solve, polish, extract.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{
    build_with, extract_solution, BuildError, BuildOptions, ControlMode, ExtractError, MilpModel, ModelSize, VarKey,
    VariableIndex,
};
use crate::problem::{HvacMode, PlanningProblem};
use crate::solution::PlanSolution;
use crate::solver::{fix_binaries, solve_logged, solve_lp_relaxation, SolveOptions, SolveOutcome, SolveStatus, SolverError};
use crate::thermal::{simulate_simple_control, ThermalState};

/// Which HVAC control strategy to plan with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    Surrogate,
    Simple,
}

impl std::str::FromStr for ControlKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "surrogate" => Ok(ControlKind::Surrogate),
            "simple" => Ok(ControlKind::Simple),
            other => Err(format!("unknown control mode {other:?} (expected surrogate or simple)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolverError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// Everything one planning run produced.
#[derive(Debug, Clone)]
pub struct PlanRun {
    pub kind: ControlKind,
    pub mode: ControlMode,
    pub size: ModelSize,
    pub model: MilpModel,
    pub index: VariableIndex,
    /// Outcome of the branch-and-bound solve, before polishing.
    pub outcome: SolveOutcome,
    /// Final column values (polished when possible). Empty without a solution.
    pub values: Vec<f64>,
    pub solution: Option<PlanSolution>,
    pub warm_started: bool,
    pub build_time: Duration,
}

impl PlanRun {
    pub fn status(&self) -> SolveStatus {
        self.outcome.status
    }

    pub fn value(&self, key: VarKey) -> Option<f64> {
        if self.values.is_empty() {
            return None;
        }
        self.index.value(&self.values, key)
    }
}

pub fn plan(problem: &PlanningProblem, kind: ControlKind, options: &SolveOptions) -> Result<PlanRun, PlanError> {
    plan_logged(problem, kind, options, &mut std::io::sink())
}

pub fn plan_logged(
    problem: &PlanningProblem,
    kind: ControlKind,
    options: &SolveOptions,
    log: &mut dyn Write,
) -> Result<PlanRun, PlanError> {
    plan_seeded(problem, kind, options, None, log)
}

/// Like [`plan_logged`], but the warm start copies every binary decision
/// `seed` shares with the new model (installations, generator commitments).
/// A simple-control run seeds a surrogate run on the same data this way.
pub fn plan_seeded(
    problem: &PlanningProblem,
    kind: ControlKind,
    options: &SolveOptions,
    seed: Option<&PlanRun>,
    log: &mut dyn Write,
) -> Result<PlanRun, PlanError> {
    let started = Instant::now();
    let mode = match kind {
        ControlKind::Surrogate => ControlMode::Surrogate,
        ControlKind::Simple => ControlMode::simple_for(problem),
    };
    let build_options = BuildOptions::default();
    let size = ModelSize::predict(problem, &mode, build_options);
    let (model, index) = build_with(problem, &mode, build_options)?;
    let build_time = started.elapsed();
    let _ = writeln!(
        log,
        "built {kind:?} model: {} columns, {} binaries, {} rows in {:.3}s",
        model.variables.len(),
        model.binary_count(),
        model.constraints.len(),
        build_time.as_secs_f64()
    );

    let seed = seed.filter(|r| !r.values.is_empty()).map(|r| (&r.index, r.values.as_slice()));
    let start = warm_start(problem, &mode, &model, &index, options, seed);
    let warm_started = start.is_some();
    let outcome = solve_logged(&model, options, start.as_deref(), log)?;

    let mut values = Vec::new();
    let mut solution = None;
    if outcome.status.has_solution() {
        let (polished, objective) = polish(&model, &outcome, options).unwrap_or((outcome.values.clone(), outcome.objective));
        solution = Some(extract_solution(&polished, objective, &index, problem, &mode)?);
        values = polished;
    }
    Ok(PlanRun {
        kind,
        mode,
        size,
        model,
        index,
        outcome,
        values,
        solution,
        warm_started,
        build_time,
    })
}

/// Re-solves the continuous part with binaries fixed at their rounded
/// values, so every LP-determined column sits at an exact vertex.
fn polish(model: &MilpModel, outcome: &SolveOutcome, options: &SolveOptions) -> Option<(Vec<f64>, f64)> {
    let binaries = model.binary_ids();
    if binaries.is_empty() {
        return None;
    }
    let assignment: Vec<bool> = binaries.iter().map(|id| outcome.values[id.0] > 0.5).collect();
    let fixed = fix_binaries(model, &binaries, &assignment).ok()?;
    let lp = solve_lp_relaxation(&fixed, options).ok()?;
    let tolerance = 1e-9 * outcome.objective.abs().max(1.0);
    (lp.status == SolveStatus::Optimal && lp.objective <= outcome.objective + tolerance).then_some((lp.values, lp.objective))
}

/// A feasible starting point with nothing installed and, in surrogate mode,
/// thermostat schedules run on a narrowed band so the indoor temperature
/// never leaves the comfort band.
fn warm_start(
    problem: &PlanningProblem,
    mode: &ControlMode,
    model: &MilpModel,
    index: &VariableIndex,
    options: &SolveOptions,
    seed: Option<(&VariableIndex, &[f64])>,
) -> Option<Vec<f64>> {
    // Installs, commitments and the idle HVAC switch start at zero unless seeded.
    let mut assignment = vec![false; model.variables.len()];
    if let Some((seed_index, seed_values)) = seed {
        for id in model.binary_ids() {
            if let Some(v) = seed_index.value(seed_values, index.key(id)) {
                assignment[id.0] = v > 0.5;
            }
        }
    }
    if let ControlMode::Surrogate = mode {
        for house in 0..problem.houses.len() {
            for (day, d) in problem.days.iter().enumerate() {
                let on = in_band_schedule(problem, house, day)?;
                for (t, &running) in on.iter().enumerate() {
                    let key = match d.hvac_mode {
                        HvacMode::Heat => VarKey::HvacHeat { house, day, t },
                        HvacMode::Cool => VarKey::HvacCool { house, day, t },
                    };
                    let id = index.id(&key)?;
                    if running && model.variables[id.0].upper < 0.5 {
                        return None;
                    }
                    assignment[id.0] = running;
                }
            }
        }
    }
    let binaries = model.binary_ids();
    let fixed_assignment: Vec<bool> = binaries.iter().map(|id| assignment[id.0]).collect();
    let fixed = fix_binaries(model, &binaries, &fixed_assignment).ok()?;
    let lp = solve_lp_relaxation(&fixed, options).ok()?;
    (lp.status == SolveStatus::Optimal).then_some(lp.values)
}

/// Thermostat schedule whose indoor trajectory stays within the comfort band,
/// found by narrowing the switching band step by step.
fn in_band_schedule(problem: &PlanningProblem, house: usize, day: usize) -> Option<Vec<bool>> {
    let h = &problem.houses[house];
    let d = &problem.days[day];
    let init = ThermalState::from_array(h.initial_state(day));
    for shrink in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let mut model = h.thermal.clone();
        for b in &mut model.band_halfwidth_c[day] {
            *b *= 1.0 - shrink;
        }
        let run = simulate_simple_control(&model, d, day, init, d.hvac_mode);
        let inside = run.indoor_after().enumerate().all(|(t, t_in)| {
            let desired = h.thermal.desired_temp_c[day][t];
            let band = h.thermal.band_halfwidth_c[day][t];
            (t_in - desired).abs() <= band
        });
        if inside {
            return Some(run.on);
        }
    }
    None
}
