//! CSV emitters. Every file has a header row; long formats keep one value per line.

use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use mgplan_core::problem::PlanningProblem;
use mgplan_core::solution::PlanSolution;
use serde::Serialize;

pub const DISPATCH_CSV: &str = "dispatch.csv";
pub const INSTALLATIONS_CSV: &str = "installations.csv";
pub const LOAD_CSV: &str = "load.csv";
pub const REPORT_JSON: &str = "report.json";
pub const TIMING_JSON: &str = "timing.json";
pub const COMPARISON_CSV: &str = "comparison.csv";
pub const LOAD_BY_STRATEGY_CSV: &str = "load_by_strategy.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";
pub const CASES_CSV: &str = "cases.csv";

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct DispatchRow<'a> {
    day: usize,
    day_label: &'a str,
    interval: usize,
    entity: &'a str,
    quantity: &'a str,
    value: f64,
}

/// Long format: `day,day_label,interval,entity,quantity,value`. Only installed
/// units appear; the PCC and every house always do.
pub fn write_dispatch(path: &Path, problem: &PlanningProblem, solution: &PlanSolution) -> Result<()> {
    let mut w = writer(path)?;
    let installed = |label: &str| solution.installed.iter().any(|u| u.installed && u.label == label);
    let house_names: Vec<String> = (0..solution.houses.len()).map(|h| format!("house{h}")).collect();
    for (d, day) in problem.days.iter().enumerate() {
        for t in 0..day.interval_count {
            let mut emit = |entity: &str, quantity: &str, value: f64| {
                w.serialize(DispatchRow {
                    day: d,
                    day_label: &day.label,
                    interval: t,
                    entity,
                    quantity,
                    value,
                })
            };
            emit("pcc", "import_kw", solution.pcc_kw[d][t])?;
            emit("pcc", "price_per_kwh", day.pcc_price_per_kwh[t])?;
            for g in solution.dfg.iter().filter(|g| installed(&g.label)) {
                emit(&g.label, "output_kw", g.output_kw[d][t])?;
                emit(&g.label, "committed", g.committed[d][t])?;
                emit(&g.label, "startup", g.startup[d][t])?;
            }
            for e in solution.ess.iter().filter(|e| installed(&e.label)) {
                emit(&e.label, "charge_kw", e.charge_kw[d][t])?;
                emit(&e.label, "discharge_kw", e.discharge_kw[d][t])?;
                emit(&e.label, "soc_kwh", e.soc_kwh[d][t])?;
            }
            for r in solution.wind.iter().chain(&solution.pv).filter(|r| installed(&r.label)) {
                emit(&r.label, "output_kw", r.output_kw[d][t])?;
            }
            for (name, h) in house_names.iter().zip(&solution.houses) {
                emit(name, "heat_on", h.heat_on[d][t])?;
                emit(name, "cool_on", h.cool_on[d][t])?;
                emit(name, "hvac_kw", h.hvac_kw[d][t])?;
                emit(name, "t_in_c", h.t_in_c[d][t])?;
                emit(name, "t_mass_c", h.t_mass_c[d][t])?;
                emit(name, "t_env_c", h.t_env_c[d][t])?;
                emit(name, "shed_kw", h.shed_kw[d][t])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_installations(path: &Path, solution: &PlanSolution) -> Result<()> {
    let mut w = writer(path)?;
    for unit in &solution.installed {
        w.serialize(unit)?;
    }
    w.flush()?;
    Ok(())
}

/// Community load per interval, split into its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadRow {
    pub day: usize,
    pub interval: usize,
    pub hour: f64,
    pub price_per_kwh: f64,
    pub ambient_c: f64,
    pub non_hvac_kw: f64,
    pub hvac_kw: f64,
    pub shed_kw: f64,
    pub total_load_kw: f64,
    pub pcc_kw: f64,
    pub hvac_units_on: usize,
}

pub fn load_rows(problem: &PlanningProblem, solution: &PlanSolution) -> Vec<LoadRow> {
    let total = solution.community_load_kw(|h, d, t| problem.houses[h].non_hvac_load_kw[d][t]);
    let mut rows = Vec::new();
    for (d, day) in problem.days.iter().enumerate() {
        for t in 0..day.interval_count {
            let non_hvac = problem.houses.iter().map(|h| h.non_hvac_load_kw[d][t]).sum();
            let hvac = solution.houses.iter().map(|h| h.hvac_kw[d][t]).sum();
            let shed = solution.houses.iter().map(|h| h.shed_kw[d][t]).sum();
            let on = solution
                .houses
                .iter()
                .filter(|h| h.heat_on[d][t] > 0.5 || h.cool_on[d][t] > 0.5)
                .count();
            rows.push(LoadRow {
                day: d,
                interval: t,
                hour: t as f64 * day.dt_hours,
                price_per_kwh: day.pcc_price_per_kwh[t],
                ambient_c: day.ambient_temp_c[t],
                non_hvac_kw: non_hvac,
                hvac_kw: hvac,
                shed_kw: shed,
                total_load_kw: total[d][t],
                pcc_kw: solution.pcc_kw[d][t],
                hvac_units_on: on,
            });
        }
    }
    rows
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = writer(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyLoadRow {
    pub day: usize,
    pub interval: usize,
    pub hour: f64,
    pub price_per_kwh: f64,
    pub simple_load_kw: f64,
    pub surrogate_load_kw: f64,
    pub simple_hvac_on: usize,
    pub surrogate_hvac_on: usize,
}

pub fn strategy_rows(simple: &[LoadRow], surrogate: &[LoadRow]) -> Vec<StrategyLoadRow> {
    simple
        .iter()
        .zip(surrogate)
        .map(|(a, b)| StrategyLoadRow {
            day: a.day,
            interval: a.interval,
            hour: a.hour,
            price_per_kwh: a.price_per_kwh,
            simple_load_kw: a.total_load_kw,
            surrogate_load_kw: b.total_load_kw,
            simple_hvac_on: a.hvac_units_on,
            surrogate_hvac_on: b.hvac_units_on,
        })
        .collect()
}
