use std::collections::BTreeMap;

use thiserror::Error;

use super::{ControlMode, VarKey, VariableIndex};
use crate::problem::{DaySeries, DerClass, PlanningProblem};
use crate::solution::{
    CostBreakdown, DfgDispatch, EssDispatch, HouseDispatch, InstalledUnit, PlanSolution, ResDispatch, SimultaneousEss,
};

/// Relative tolerance between the recomputed cost breakdown and the solver objective.
pub const EXTRACTION_REL_TOL: f64 = 1e-6;

/// Charge and discharge both above this value mark an interval as simultaneous.
const SIMULTANEOUS_THRESHOLD_KW: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("solution has {got} values, model has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("recomputed cost {recomputed} disagrees with solver objective {objective}")]
    Integrity { recomputed: f64, objective: f64 },
}

/// Turns raw column values into a [`PlanSolution`], recomputing every cost
/// component from the problem data. Discomfort is taken from the indoor
/// temperature directly, not from the slack columns.
pub fn extract_solution(
    values: &[f64],
    objective: f64,
    index: &VariableIndex,
    problem: &PlanningProblem,
    mode: &ControlMode,
) -> Result<PlanSolution, ExtractError> {
    if values.len() != index.len() {
        return Err(ExtractError::LengthMismatch {
            expected: index.len(),
            got: values.len(),
        });
    }
    let get = |key: VarKey| index.value(values, key).unwrap_or(0.0);
    let series = |f: &dyn Fn(usize, usize) -> f64| -> DaySeries {
        problem
            .days
            .iter()
            .enumerate()
            .map(|(d, day)| (0..day.interval_count).map(|t| f(d, t)).collect())
            .collect()
    };
    let units = problem.units();
    let mut costs = CostBreakdown::default();

    let mut installed = Vec::with_capacity(units.len());
    for class in [DerClass::Wind, DerClass::Pv, DerClass::Dfg, DerClass::Ess] {
        for (unit, u) in units.class(class).iter().enumerate() {
            let delta = get(VarKey::Install { class, unit });
            let annual = problem.unit_investment(u);
            costs.investment += annual * delta;
            installed.push(InstalledUnit {
                label: u.label.clone(),
                class,
                candidate: u.candidate,
                copy: u.copy,
                installed: delta > 0.5,
                annual_cost: annual,
            });
        }
    }

    let weight_dt = |d: usize| problem.day_weight(d) * problem.days[d].dt_hours;

    let mut dfg = Vec::with_capacity(units.dfg.len());
    for (unit, u) in units.dfg.iter().enumerate() {
        let g = &problem.dfg[u.candidate];
        let block_kw: Vec<DaySeries> = (0..g.blocks.len())
            .map(|block| series(&|day, t| get(VarKey::DfgBlock { unit, day, t, block })))
            .collect();
        let committed = series(&|day, t| get(VarKey::DfgCommit { unit, day, t }));
        let startup = series(&|day, t| get(VarKey::DfgStartup { unit, day, t }));
        for (d, day) in problem.days.iter().enumerate() {
            for t in 0..day.interval_count {
                for (l, b) in g.blocks.iter().enumerate() {
                    costs.fuel += weight_dt(d) * b.marginal_cost_per_kwh * block_kw[l][d][t];
                }
                costs.no_load += weight_dt(d) * g.no_load_cost_per_hour * committed[d][t];
                costs.startup += problem.day_weight(d) * g.startup_cost * startup[d][t];
            }
        }
        dfg.push(DfgDispatch {
            label: u.label.clone(),
            output_kw: series(&|day, t| get(VarKey::DfgOutput { unit, day, t })),
            block_kw,
            committed,
            startup,
        });
    }

    let mut ess = Vec::with_capacity(units.ess.len());
    let mut simultaneous_ess = Vec::new();
    for (unit, u) in units.ess.iter().enumerate() {
        let e = &problem.ess[u.candidate];
        let charge_kw = series(&|day, t| get(VarKey::EssCharge { unit, day, t }));
        let discharge_kw = series(&|day, t| get(VarKey::EssDischarge { unit, day, t }));
        for (d, day) in problem.days.iter().enumerate() {
            for t in 0..day.interval_count {
                let (c, dis) = (charge_kw[d][t], discharge_kw[d][t]);
                costs.degradation += weight_dt(d) * e.degradation_cost_per_kwh * (c + dis);
                if c > SIMULTANEOUS_THRESHOLD_KW && dis > SIMULTANEOUS_THRESHOLD_KW {
                    simultaneous_ess.push(SimultaneousEss { unit, day: d, t });
                }
            }
        }
        ess.push(EssDispatch {
            label: u.label.clone(),
            charge_kw,
            discharge_kw,
            soc_kwh: series(&|day, t| get(VarKey::EssSoc { unit, day, t })),
        });
    }

    let wind = units
        .wind
        .iter()
        .enumerate()
        .map(|(unit, u)| ResDispatch {
            label: u.label.clone(),
            output_kw: series(&|day, t| get(VarKey::WindOutput { unit, day, t })),
        })
        .collect();
    let pv = units
        .pv
        .iter()
        .enumerate()
        .map(|(unit, u)| ResDispatch {
            label: u.label.clone(),
            output_kw: series(&|day, t| get(VarKey::PvOutput { unit, day, t })),
        })
        .collect();

    let mut houses = Vec::with_capacity(problem.houses.len());
    for (house, h) in problem.houses.iter().enumerate() {
        let rated = h.thermal.hvac_rated_power_kw;
        let dispatch = match mode {
            ControlMode::Surrogate => HouseDispatch {
                heat_on: series(&|day, t| get(VarKey::HvacHeat { house, day, t })),
                cool_on: series(&|day, t| get(VarKey::HvacCool { house, day, t })),
                hvac_kw: series(&|day, t| {
                    rated * (get(VarKey::HvacHeat { house, day, t }) + get(VarKey::HvacCool { house, day, t }))
                }),
                t_in_c: series(&|day, t| get(VarKey::TempIndoor { house, day, t })),
                t_mass_c: series(&|day, t| get(VarKey::TempMass { house, day, t })),
                t_env_c: series(&|day, t| get(VarKey::TempEnvelope { house, day, t })),
                shed_kw: series(&|day, t| get(VarKey::Shed { house, day, t })),
            },
            ControlMode::Simple(s) => {
                let on = |day: usize, t: usize| if s.is_on(house, day, t) { 1.0 } else { 0.0 };
                let is_heat = |day: usize| problem.days[day].hvac_mode == crate::problem::HvacMode::Heat;
                let state = |day: usize, t: usize| s.runs[house][day].states[t + 1];
                HouseDispatch {
                    heat_on: series(&|day, t| if is_heat(day) { on(day, t) } else { 0.0 }),
                    cool_on: series(&|day, t| if is_heat(day) { 0.0 } else { on(day, t) }),
                    hvac_kw: series(&|day, t| rated * on(day, t)),
                    t_in_c: series(&|day, t| state(day, t).t_in_c),
                    t_mass_c: series(&|day, t| state(day, t).t_mass_c),
                    t_env_c: series(&|day, t| state(day, t).t_env_c),
                    shed_kw: series(&|day, t| get(VarKey::Shed { house, day, t })),
                }
            }
        };
        for (d, day) in problem.days.iter().enumerate() {
            let weight = problem.day_weight(d);
            for t in 0..day.interval_count {
                let dev = (dispatch.t_in_c[d][t] - h.thermal.desired_temp_c[d][t]).abs();
                costs.discomfort += weight * h.thermal.discomfort_cost_per_degc * dev;
                costs.shedding += weight_dt(d) * h.shed_penalty_per_kwh * dispatch.shed_kw[d][t];
            }
        }
        houses.push(dispatch);
    }

    let pcc_kw = series(&|day, t| get(VarKey::Pcc { day, t }));
    for (d, day) in problem.days.iter().enumerate() {
        for t in 0..day.interval_count {
            costs.energy += weight_dt(d) * day.pcc_price_per_kwh[t] * pcc_kw[d][t];
        }
    }

    let mut monthly_peak_kw = BTreeMap::new();
    for month_group in problem.month_groups().into_keys() {
        let peak = get(VarKey::Peak { month_group });
        costs.demand_charge += problem.peak_cost_coefficient(month_group) * peak;
        monthly_peak_kw.insert(month_group, peak);
    }

    let recomputed = costs.total();
    if (recomputed - objective).abs() > EXTRACTION_REL_TOL * objective.abs().max(1.0) {
        return Err(ExtractError::Integrity { recomputed, objective });
    }

    Ok(PlanSolution {
        installed,
        dfg,
        ess,
        wind,
        pv,
        houses,
        pcc_kw,
        monthly_peak_kw,
        costs,
        objective,
        simultaneous_ess,
    })
}
