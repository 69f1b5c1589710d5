//! Machine-readable run reports.

use std::collections::BTreeMap;

use mgplan_core::milp::ModelSize;
use mgplan_core::problem::{HvacMode, PlanningProblem};
use mgplan_core::solution::{CostBreakdown, InstalledUnit, PlanSolution};
use mgplan_core::solver::{SolveOptions, SolveStatus};
use mgplan_core::{ControlKind, PlanRun};
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "mgplan-report/1";
pub const COMPARE_SCHEMA: &str = "mgplan-compare/1";
pub const SWEEP_SCHEMA: &str = "mgplan-sweep/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    /// Directory the scenario was read from, or `synthesized(seed=..)`.
    pub source: String,
    /// SHA-256 over every scenario file, name and contents.
    pub digest: String,
    pub houses: usize,
    pub days: usize,
    pub intervals: usize,
}

/// One column of the case table: what got built and what it costs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseColumn {
    pub case: String,
    pub mode: ControlKind,
    pub budget: f64,
    pub status: SolveStatus,
    /// Installed copies per candidate name, every candidate listed.
    pub counts: BTreeMap<String, u32>,
    pub investment: Option<f64>,
    pub operation: Option<f64>,
    pub total: Option<f64>,
}

impl CaseColumn {
    pub fn new(case: &str, problem: &PlanningProblem, run: &PlanRun) -> Self {
        let mut counts: BTreeMap<String, u32> = candidate_names(problem).map(|n| (n, 0)).collect();
        let costs = run.solution.as_ref().map(|s| s.costs);
        if let Some(s) = &run.solution {
            for unit in s.installed.iter().filter(|u| u.installed) {
                *counts.entry(candidate_name(unit)).or_default() += 1;
            }
        }
        Self {
            case: case.to_string(),
            mode: run.kind,
            budget: problem.budget,
            status: run.status(),
            counts,
            investment: costs.map(|c| c.investment),
            operation: costs.map(|c| c.operation()),
            total: costs.map(|c| c.total()),
        }
    }
}

fn candidate_names(problem: &PlanningProblem) -> impl Iterator<Item = String> + '_ {
    let res = problem.res.iter().map(|c| c.name.clone());
    let dfg = problem.dfg.iter().map(|c| c.name.clone());
    res.chain(dfg).chain(problem.ess.iter().map(|c| c.name.clone()))
}

/// Candidate name of an installed unit, `MT#2` becomes `MT`.
pub fn candidate_name(unit: &InstalledUnit) -> String {
    unit.label.split('#').next().unwrap_or(&unit.label).to_string()
}

/// Whether the HVAC schedule of a cooling day shows precooling: running in
/// cheap intervals before the price peak and idling in the priciest ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecoolingSignature {
    pub day: usize,
    pub label: String,
    pub peak_interval: usize,
    pub median_price: f64,
    /// Price at or above which an interval is in the top quarter.
    pub top_quartile_price: f64,
    /// Houses running in a below-median interval before the peak.
    pub houses_precooling: Vec<usize>,
    /// Houses idle in at least one top-quarter interval.
    pub houses_idle_at_peak: Vec<usize>,
    /// Houses doing both.
    pub houses_with_signature: Vec<usize>,
}

impl PrecoolingSignature {
    pub fn present(&self) -> bool {
        !self.houses_with_signature.is_empty()
    }
}

pub fn precooling_signatures(problem: &PlanningProblem, solution: &PlanSolution) -> Vec<PrecoolingSignature> {
    problem
        .days
        .iter()
        .enumerate()
        .filter(|(_, d)| d.hvac_mode == HvacMode::Cool)
        .map(|(day, d)| {
            let price = &d.pcc_price_per_kwh;
            let n = price.len();
            let mut sorted = price.clone();
            sorted.sort_by(f64::total_cmp);
            let median_price = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            };
            let top_quartile_price = sorted[n - n.div_ceil(4)];
            let peak_interval = (0..n)
                .max_by(|&a, &b| price[a].total_cmp(&price[b]).then(b.cmp(&a)))
                .unwrap_or(0);
            let mut houses_precooling = Vec::new();
            let mut houses_idle_at_peak = Vec::new();
            let mut houses_with_signature = Vec::new();
            for (h, house) in solution.houses.iter().enumerate() {
                let on = &house.cool_on[day];
                let pre = (0..peak_interval).any(|t| price[t] < median_price && on[t] > 0.5);
                let idle = (0..n).any(|t| price[t] >= top_quartile_price && on[t] < 0.5);
                if pre {
                    houses_precooling.push(h);
                }
                if idle {
                    houses_idle_at_peak.push(h);
                }
                if pre && idle {
                    houses_with_signature.push(h);
                }
            }
            PrecoolingSignature {
                day,
                label: d.label.clone(),
                peak_interval,
                median_price,
                top_quartile_price,
                houses_precooling,
                houses_idle_at_peak,
                houses_with_signature,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub case: String,
    pub scenario: ScenarioSummary,
    pub budget: f64,
    pub mode: ControlKind,
    pub options: SolveOptions,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub relative_gap: Option<f64>,
    /// Gap the backend reports it was configured with.
    pub applied_rel_gap: f64,
    pub model: ModelSize,
    pub warm_started: bool,
    /// Set when a simple-control solve on the same data seeded the warm start.
    pub seeded_from_simple: bool,
    pub installations: Vec<InstalledUnit>,
    pub costs: Option<CostBreakdown>,
    pub case_table: Vec<CaseColumn>,
    pub precooling: Vec<PrecoolingSignature>,
    /// Emitted files, relative to the output directory.
    pub files: BTreeMap<String, String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl RunReport {
    pub fn new(
        case: &str,
        scenario: ScenarioSummary,
        problem: &PlanningProblem,
        options: &SolveOptions,
        run: &PlanRun,
        seeded_from_simple: bool,
    ) -> Self {
        let solution = run.solution.as_ref();
        let objective = solution.map(|s| s.objective).or_else(|| finite(run.outcome.objective));
        let has_solution = run.status().has_solution();
        Self {
            schema: REPORT_SCHEMA,
            case: case.to_string(),
            scenario,
            budget: problem.budget,
            mode: run.kind,
            options: options.clone(),
            status: run.status(),
            objective: objective.filter(|_| has_solution),
            best_bound: finite(run.outcome.best_bound),
            relative_gap: if has_solution { finite(run.outcome.relative_gap()) } else { None },
            applied_rel_gap: run.outcome.applied_rel_gap,
            model: run.size,
            warm_started: run.warm_started,
            seeded_from_simple,
            installations: solution.map(|s| s.installed.clone()).unwrap_or_default(),
            costs: solution.map(|s| s.costs),
            case_table: vec![CaseColumn::new(case, problem, run)],
            precooling: match (run.kind, solution) {
                (ControlKind::Surrogate, Some(s)) => precooling_signatures(problem, s),
                _ => Vec::new(),
            },
            files: BTreeMap::new(),
        }
    }

    pub fn succeeded(&self) -> bool {
        self.status.has_solution()
    }
}

/// A simple-control and a surrogate-control run on identical data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: &'static str,
    pub simple: RunReport,
    pub surrogate: RunReport,
    pub case_table: Vec<CaseColumn>,
    /// Simple total minus surrogate total.
    pub surrogate_saving: Option<f64>,
    pub files: BTreeMap<String, String>,
}

impl CompareReport {
    pub fn succeeded(&self) -> bool {
        self.simple.succeeded() && self.surrogate.succeeded()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub budget: f64,
    pub status: SolveStatus,
    pub investment: Option<f64>,
    pub operation: Option<f64>,
    pub total: Option<f64>,
    pub relative_gap: Option<f64>,
    /// Drop in total cost from the previous (smaller) budget. Descriptive only.
    pub marginal_saving: Option<f64>,
    pub counts: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub scenario: ScenarioSummary,
    pub mode: ControlKind,
    pub options: SolveOptions,
    pub rows: Vec<SweepRow>,
    pub files: BTreeMap<String, String>,
}

impl SweepReport {
    pub fn succeeded(&self) -> bool {
        self.rows.iter().all(|r| r.status.has_solution())
    }
}
