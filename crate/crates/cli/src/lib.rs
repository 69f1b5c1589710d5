//! Batch front end for the planner: solve a case, compare HVAC control
//! strategies, sweep the investment budget and dump models.

pub mod output;
pub mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mgplan_core::milp::{build, mps::write_mps, ControlMode};
use mgplan_core::planner::{plan_seeded, PlanRun};
use mgplan_core::problem::PlanningProblem;
use mgplan_core::solution::CostBreakdown;
use mgplan_core::scenario::{synthesize_default_scenario, ScenarioFileSet, DEFAULT_SEED};
use mgplan_core::solver::{Backend, SolveOptions, SolveStatus};
use mgplan_core::ControlKind;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::output::*;
use crate::report::*;

#[derive(Debug, Parser)]
#[command(name = "mgplan", version, about = "Community microgrid planning with HVAC scheduling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the synthesized default scenario to a directory.
    Synth {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one planning case.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value = "surrogate")]
        mode: ControlKind,
    },
    /// Solve with simple and with surrogate HVAC control on the same data.
    CompareControl {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Solve once per budget, in parallel.
    SweepBudget {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated budgets.
        #[arg(long, value_delimiter = ',', required = true)]
        budget: Vec<f64>,
        #[arg(long, default_value = "surrogate")]
        mode: ControlKind,
        /// Concurrent solves.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the model in free MPS format.
    DumpMps {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value = "surrogate")]
        mode: ControlKind,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario directory. Without it the default study is synthesized from --seed.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Relative MIP gap; defaults to the scenario's setting.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Per-solve time limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// A loaded scenario with its content digest.
#[derive(Debug, Clone)]
pub struct ScenarioInput {
    pub problem: PlanningProblem,
    pub summary: ScenarioSummary,
}

pub fn digest(files: &ScenarioFileSet) -> String {
    let mut h = Sha256::new();
    for (name, contents) in &files.files {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update((contents.len() as u64).to_le_bytes());
        h.update(contents.as_bytes());
    }
    hex::encode(h.finalize())
}

impl ScenarioInput {
    pub fn from_files(files: &ScenarioFileSet, source: String) -> Result<Self> {
        let problem = files.to_problem()?;
        let summary = ScenarioSummary {
            source,
            digest: digest(files),
            houses: problem.houses.len(),
            days: problem.days.len(),
            intervals: problem.days.iter().map(|d| d.interval_count).sum(),
        };
        Ok(Self { problem, summary })
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let files = ScenarioFileSet::read_from(dir).with_context(|| format!("reading scenario {}", dir.display()))?;
        Self::from_files(&files, dir.display().to_string())
    }

    pub fn synthesized(seed: u64) -> Result<Self> {
        Self::from_files(&synthesize_default_scenario(seed), format!("synthesized(seed={seed})"))
    }

    pub fn resolve(scenario: Option<&Path>, seed: u64) -> Result<Self> {
        match scenario {
            Some(dir) => Self::load(dir),
            None => Self::synthesized(seed),
        }
    }

    pub fn with_budget(&self, budget: Option<f64>) -> PlanningProblem {
        let mut p = self.problem.clone();
        if let Some(b) = budget {
            p.budget = b;
        }
        p
    }
}

/// Solver settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub gap: Option<f64>,
    pub time_limit_s: Option<f64>,
    pub seed: u64,
}

impl RunSettings {
    pub fn from_common(common: &CommonArgs) -> Self {
        Self {
            gap: common.gap,
            time_limit_s: common.time_limit,
            seed: common.seed,
        }
    }

    pub fn solve_options(&self, problem: &PlanningProblem) -> Result<SolveOptions> {
        Ok(SolveOptions {
            rel_gap: self.gap.unwrap_or(problem.mip_rel_gap),
            time_limit_s: self.time_limit_s,
            seed: self.seed,
            backend: Backend::from_env()?,
            ..SolveOptions::default()
        })
    }
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            gap: None,
            time_limit_s: None,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Timing {
    build_s: f64,
    solve_s: f64,
    seed_solve_s: Option<f64>,
}

/// Surrogate runs are warm-started from a simple-control solve on the same
/// data; its installations and commitments stay feasible.
fn run_case(problem: &PlanningProblem, kind: ControlKind, options: &SolveOptions, seed: Option<&PlanRun>) -> Result<PlanRun> {
    let mut log = std::io::sink();
    Ok(plan_seeded(problem, kind, options, seed, &mut log)?)
}

fn simple_seed(problem: &PlanningProblem, options: &SolveOptions) -> Option<PlanRun> {
    run_case(problem, ControlKind::Simple, options, None)
        .ok()
        .filter(|r| r.status().has_solution())
}

fn emit_run(dir: &Path, problem: &PlanningProblem, run: &PlanRun, report: &mut RunReport, seed_time: Option<f64>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    if let Some(solution) = &run.solution {
        write_dispatch(&dir.join(DISPATCH_CSV), problem, solution)?;
        write_installations(&dir.join(INSTALLATIONS_CSV), solution)?;
        write_rows(&dir.join(LOAD_CSV), &load_rows(problem, solution))?;
        for name in [DISPATCH_CSV, INSTALLATIONS_CSV, LOAD_CSV] {
            report.files.insert(name.trim_end_matches(".csv").to_string(), name.to_string());
        }
    }
    report.files.insert("timing".into(), TIMING_JSON.into());
    write_json(
        &dir.join(TIMING_JSON),
        &Timing {
            build_s: run.build_time.as_secs_f64(),
            solve_s: run.outcome.wall_time.as_secs_f64(),
            seed_solve_s: seed_time,
        },
    )?;
    write_json(&dir.join(REPORT_JSON), report)
}

/// Solves one case and writes its report and CSVs into `out_dir`.
pub fn cmd_solve(
    input: &ScenarioInput,
    budget: Option<f64>,
    kind: ControlKind,
    settings: &RunSettings,
    out_dir: &Path,
) -> Result<(RunReport, PlanRun)> {
    let problem = input.with_budget(budget);
    let options = settings.solve_options(&problem)?;
    let (seed, seed_time) = match kind {
        ControlKind::Surrogate => {
            let s = simple_seed(&problem, &options);
            let t = s.as_ref().map(|r| (r.build_time + r.outcome.wall_time).as_secs_f64());
            (s, t)
        }
        ControlKind::Simple => (None, None),
    };
    let run = run_case(&problem, kind, &options, seed.as_ref())?;
    let case = case_name(&problem, kind);
    let mut report = RunReport::new(&case, input.summary.clone(), &problem, &options, &run, seed.is_some());
    emit_run(out_dir, &problem, &run, &mut report, seed_time)?;
    Ok((report, run))
}

fn case_name(problem: &PlanningProblem, kind: ControlKind) -> String {
    let mode = match kind {
        ControlKind::Surrogate => "surrogate",
        ControlKind::Simple => "simple",
    };
    format!("{mode}@{}", problem.budget)
}

pub struct Comparison {
    pub report: CompareReport,
    pub simple: PlanRun,
    pub surrogate: PlanRun,
}

/// Simple control first, then surrogate control seeded from it.
pub fn cmd_compare_control(input: &ScenarioInput, budget: Option<f64>, settings: &RunSettings, out_dir: &Path) -> Result<Comparison> {
    let problem = input.with_budget(budget);
    let options = settings.solve_options(&problem)?;
    let simple = run_case(&problem, ControlKind::Simple, &options, None)?;
    let seed = simple.status().has_solution().then_some(&simple);
    let surrogate = run_case(&problem, ControlKind::Surrogate, &options, seed)?;

    let mut simple_report = RunReport::new(&case_name(&problem, ControlKind::Simple), input.summary.clone(), &problem, &options, &simple, false);
    let mut surrogate_report = RunReport::new(
        &case_name(&problem, ControlKind::Surrogate),
        input.summary.clone(),
        &problem,
        &options,
        &surrogate,
        seed.is_some(),
    );
    emit_run(&out_dir.join("simple"), &problem, &simple, &mut simple_report, None)?;
    let seed_time = seed.map(|r| (r.build_time + r.outcome.wall_time).as_secs_f64());
    emit_run(&out_dir.join("surrogate"), &problem, &surrogate, &mut surrogate_report, seed_time)?;

    let mut files = BTreeMap::new();
    let case_table = vec![simple_report.case_table[0].clone(), surrogate_report.case_table[0].clone()];
    write_rows(&out_dir.join(CASES_CSV), &case_rows(&case_table))?;
    files.insert("cases".into(), CASES_CSV.into());
    write_rows(&out_dir.join(COMPARISON_CSV), &comparison_rows(&simple_report, &surrogate_report))?;
    files.insert("comparison".into(), COMPARISON_CSV.into());
    if let (Some(a), Some(b)) = (&simple.solution, &surrogate.solution) {
        let rows = strategy_rows(&load_rows(&problem, a), &load_rows(&problem, b));
        write_rows(&out_dir.join(LOAD_BY_STRATEGY_CSV), &rows)?;
        files.insert("load_by_strategy".into(), LOAD_BY_STRATEGY_CSV.into());
    }
    let saving = match (&simple_report.costs, &surrogate_report.costs) {
        (Some(a), Some(b)) => Some(a.total() - b.total()),
        _ => None,
    };
    let report = CompareReport {
        schema: COMPARE_SCHEMA,
        simple: simple_report,
        surrogate: surrogate_report,
        case_table,
        surrogate_saving: saving,
        files,
    };
    write_json(&out_dir.join(REPORT_JSON), &report)?;
    Ok(Comparison { report, simple, surrogate })
}

#[derive(Serialize)]
struct ComparisonRow {
    quantity: String,
    simple: Option<f64>,
    surrogate: Option<f64>,
    difference: Option<f64>,
}

fn comparison_rows(simple: &RunReport, surrogate: &RunReport) -> Vec<ComparisonRow> {
    type Component = fn(&CostBreakdown) -> f64;
    let components: [(&str, Component); 11] = [
        ("investment", |c| c.investment),
        ("fuel", |c| c.fuel),
        ("no_load", |c| c.no_load),
        ("startup", |c| c.startup),
        ("energy", |c| c.energy),
        ("degradation", |c| c.degradation),
        ("discomfort", |c| c.discomfort),
        ("shedding", |c| c.shedding),
        ("demand_charge", |c| c.demand_charge),
        ("operation", |c| c.operation()),
        ("total", |c| c.total()),
    ];
    let row = |quantity: &str, a: Option<f64>, b: Option<f64>| ComparisonRow {
        quantity: quantity.to_string(),
        simple: a,
        surrogate: b,
        difference: a.zip(b).map(|(a, b)| b - a),
    };
    let mut rows: Vec<ComparisonRow> = components
        .iter()
        .map(|&(name, f)| row(name, simple.costs.as_ref().map(f), surrogate.costs.as_ref().map(f)))
        .collect();
    let count = |r: &RunReport| r.succeeded().then(|| r.installations.iter().filter(|u| u.installed).count() as f64);
    rows.push(row("installed_units", count(simple), count(surrogate)));
    rows
}

#[derive(Serialize)]
struct CaseRow {
    case: String,
    mode: ControlKind,
    budget: f64,
    status: SolveStatus,
    installed: String,
    investment: Option<f64>,
    operation: Option<f64>,
    total: Option<f64>,
}

fn case_rows(columns: &[CaseColumn]) -> Vec<CaseRow> {
    columns
        .iter()
        .map(|c| CaseRow {
            case: c.case.clone(),
            mode: c.mode,
            budget: c.budget,
            status: c.status,
            installed: c.counts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "),
            investment: c.investment,
            operation: c.operation,
            total: c.total,
        })
        .collect()
}

pub struct Sweep {
    pub report: SweepReport,
    pub runs: Vec<PlanRun>,
}

/// One solve per budget, at most `jobs` at a time. Rows come back sorted by budget.
pub fn cmd_sweep_budget(
    input: &ScenarioInput,
    budgets: &[f64],
    kind: ControlKind,
    jobs: usize,
    settings: &RunSettings,
    out_dir: &Path,
) -> Result<Sweep> {
    if budgets.is_empty() {
        bail!("no budgets given");
    }
    if let Some(b) = budgets.iter().find(|b| !b.is_finite() || **b < 0.0) {
        bail!("budget {b} must be finite and non-negative");
    }
    let mut budgets = budgets.to_vec();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    let options = settings.solve_options(&input.problem)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let runs: Vec<Result<PlanRun>> = pool.install(|| {
        budgets
            .par_iter()
            .map(|&b| {
                let problem = input.with_budget(Some(b));
                let seed = match kind {
                    ControlKind::Surrogate => simple_seed(&problem, &options),
                    ControlKind::Simple => None,
                };
                run_case(&problem, kind, &options, seed.as_ref())
            })
            .collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<SweepRow> = Vec::with_capacity(runs.len());
    for (&b, run) in budgets.iter().zip(&runs) {
        let problem = input.with_budget(Some(b));
        let column = CaseColumn::new(&case_name(&problem, kind), &problem, run);
        let marginal_saving = rows.last().and_then(|prev| prev.total.zip(column.total).map(|(p, c)| p - c));
        rows.push(SweepRow {
            budget: b,
            status: column.status,
            investment: column.investment,
            operation: column.operation,
            total: column.total,
            relative_gap: run.status().has_solution().then(|| run.outcome.relative_gap()),
            marginal_saving,
            counts: column.counts,
        });
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_rows(&out_dir.join(SWEEP_CSV), &sweep_csv_rows(&rows))?;
    let mut files = BTreeMap::new();
    files.insert("sweep".into(), SWEEP_CSV.into());
    let report = SweepReport {
        schema: SWEEP_SCHEMA,
        scenario: input.summary.clone(),
        mode: kind,
        options,
        rows,
        files,
    };
    write_json(&out_dir.join(SWEEP_JSON), &report)?;
    Ok(Sweep { report, runs })
}

#[derive(Serialize)]
struct SweepCsvRow {
    budget: f64,
    status: SolveStatus,
    investment: Option<f64>,
    operation: Option<f64>,
    total: Option<f64>,
    relative_gap: Option<f64>,
    marginal_saving: Option<f64>,
}

fn sweep_csv_rows(rows: &[SweepRow]) -> Vec<SweepCsvRow> {
    rows.iter()
        .map(|r| SweepCsvRow {
            budget: r.budget,
            status: r.status,
            investment: r.investment,
            operation: r.operation,
            total: r.total,
            relative_gap: r.relative_gap,
            marginal_saving: r.marginal_saving,
        })
        .collect()
}

pub fn cmd_dump_mps(input: &ScenarioInput, budget: Option<f64>, kind: ControlKind, out: &Path) -> Result<()> {
    let problem = input.with_budget(budget);
    let mode = match kind {
        ControlKind::Surrogate => ControlMode::Surrogate,
        ControlKind::Simple => ControlMode::simple_for(&problem),
    };
    let (model, index) = build(&problem, &mode)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = std::io::BufWriter::new(file);
    write_mps(&model, Some(&index), &mut w)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

/// Runs a parsed command. `Ok(false)` means a solve finished without a usable solution.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Synth { seed, out } => {
            synthesize_default_scenario(seed).write_to(&out)?;
            println!("wrote scenario to {}", out.display());
            Ok(true)
        }
        Command::Solve { common, budget, mode } => {
            let input = ScenarioInput::resolve(common.scenario.as_deref(), common.seed)?;
            let (report, _) = cmd_solve(&input, budget, mode, &RunSettings::from_common(&common), &common.out)?;
            print_case(&report.case_table[0], report.relative_gap);
            Ok(report.succeeded())
        }
        Command::CompareControl { common, budget } => {
            let input = ScenarioInput::resolve(common.scenario.as_deref(), common.seed)?;
            let c = cmd_compare_control(&input, budget, &RunSettings::from_common(&common), &common.out)?;
            print_case(&c.report.case_table[0], c.report.simple.relative_gap);
            print_case(&c.report.case_table[1], c.report.surrogate.relative_gap);
            if let Some(s) = c.report.surrogate_saving {
                println!("surrogate saving: {s:.2}");
            }
            Ok(c.report.succeeded())
        }
        Command::SweepBudget { common, budget, mode, jobs } => {
            let input = ScenarioInput::resolve(common.scenario.as_deref(), common.seed)?;
            let s = cmd_sweep_budget(&input, &budget, mode, jobs, &RunSettings::from_common(&common), &common.out)?;
            for r in &s.report.rows {
                println!("budget {:>12.2}  {:?}  total {}", r.budget, r.status, fmt_opt(r.total));
            }
            Ok(s.report.succeeded())
        }
        Command::DumpMps { common, budget, mode } => {
            let input = ScenarioInput::resolve(common.scenario.as_deref(), common.seed)?;
            cmd_dump_mps(&input, budget, mode, &common.out)?;
            println!("wrote {}", common.out.display());
            Ok(true)
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn print_case(c: &CaseColumn, gap: Option<f64>) {
    let installed: Vec<String> = c.counts.iter().filter(|(_, n)| **n > 0).map(|(k, n)| format!("{n} {k}")).collect();
    println!(
        "{}: {:?}, gap {}, installed [{}], investment {}, operation {}, total {}",
        c.case,
        c.status,
        gap.map_or_else(|| "-".to_string(), |g| format!("{:.3}%", 100.0 * g)),
        installed.join(", "),
        fmt_opt(c.investment),
        fmt_opt(c.operation),
        fmt_opt(c.total)
    );
}
