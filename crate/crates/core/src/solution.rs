//! Structured view of a solved planning model.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::problem::{DaySeries, DerClass};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstalledUnit {
    pub label: String,
    pub class: DerClass,
    pub candidate: usize,
    pub copy: u32,
    pub installed: bool,
    /// Annualized capital cost charged if installed.
    pub annual_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfgDispatch {
    pub label: String,
    pub output_kw: DaySeries,
    /// `block_kw[block][day][t]`
    pub block_kw: Vec<DaySeries>,
    pub committed: DaySeries,
    pub startup: DaySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssDispatch {
    pub label: String,
    pub charge_kw: DaySeries,
    pub discharge_kw: DaySeries,
    pub soc_kwh: DaySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResDispatch {
    pub label: String,
    pub output_kw: DaySeries,
}

/// Per-house trajectories. Temperatures are the states at the end of each interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HouseDispatch {
    pub heat_on: DaySeries,
    pub cool_on: DaySeries,
    pub hvac_kw: DaySeries,
    pub t_in_c: DaySeries,
    pub t_mass_c: DaySeries,
    pub t_env_c: DaySeries,
    pub shed_kw: DaySeries,
}

/// Annualized cost components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub investment: f64,
    pub fuel: f64,
    pub no_load: f64,
    pub startup: f64,
    pub energy: f64,
    pub degradation: f64,
    pub discomfort: f64,
    pub shedding: f64,
    pub demand_charge: f64,
}

impl CostBreakdown {
    pub fn operation(&self) -> f64 {
        self.fuel
            + self.no_load
            + self.startup
            + self.energy
            + self.degradation
            + self.discomfort
            + self.shedding
            + self.demand_charge
    }

    pub fn total(&self) -> f64 {
        self.investment + self.operation()
    }
}

/// An interval where a storage unit both charges and discharges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimultaneousEss {
    pub unit: usize,
    pub day: usize,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSolution {
    pub installed: Vec<InstalledUnit>,
    pub dfg: Vec<DfgDispatch>,
    pub ess: Vec<EssDispatch>,
    pub wind: Vec<ResDispatch>,
    pub pv: Vec<ResDispatch>,
    pub houses: Vec<HouseDispatch>,
    pub pcc_kw: DaySeries,
    pub monthly_peak_kw: BTreeMap<u32, f64>,
    pub costs: CostBreakdown,
    pub objective: f64,
    pub simultaneous_ess: Vec<SimultaneousEss>,
}

impl PlanSolution {
    pub fn installed_count(&self) -> usize {
        self.installed.iter().filter(|u| u.installed).count()
    }

    /// Total electrical demand of all houses after shedding, per day and interval.
    pub fn community_load_kw(&self, non_hvac: impl Fn(usize, usize, usize) -> f64) -> DaySeries {
        let days = self.pcc_kw.len();
        (0..days)
            .map(|d| {
                (0..self.pcc_kw[d].len())
                    .map(|t| {
                        self.houses
                            .iter()
                            .enumerate()
                            .map(|(h, house)| non_hvac(h, d, t) + house.hvac_kw[d][t] - house.shed_kw[d][t])
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}
