use serde::Serialize;
use thiserror::Error;

use super::{MilpModel, ModelError, Relation, VarId, VarKey, VarKind, VariableIndex};
use crate::problem::{validate_problem, DerClass, HvacMode, PlanningProblem, UnitCatalog, Violation};
use crate::thermal::{simulate_simple_control, SimpleControlRun, ThermalState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("problem fails validation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidProblem(Vec<Violation>),
    #[error("variable {name} has empty domain [{lower}, {upper}]")]
    InfeasibleBounds { name: String, lower: f64, upper: f64 },
    #[error("HVAC schedules do not match the problem: {0}")]
    ScheduleMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Hysteresis-thermostat trajectories, one per house and day.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleSchedules {
    /// `runs[house][day]`
    pub runs: Vec<Vec<SimpleControlRun>>,
}

impl SimpleSchedules {
    /// Runs the thermostat for every house on every day in that day's mode.
    pub fn simulate(problem: &PlanningProblem) -> Self {
        let runs = problem
            .houses
            .iter()
            .map(|house| {
                problem
                    .days
                    .iter()
                    .enumerate()
                    .map(|(d, day)| {
                        let init = ThermalState::from_array(house.initial_state(d));
                        simulate_simple_control(&house.thermal, day, d, init, day.hvac_mode)
                    })
                    .collect()
            })
            .collect();
        Self { runs }
    }

    pub fn is_on(&self, house: usize, day: usize, t: usize) -> bool {
        self.runs[house][day].on[t]
    }

    fn check(&self, problem: &PlanningProblem) -> Result<(), BuildError> {
        if self.runs.len() != problem.houses.len() {
            return Err(BuildError::ScheduleMismatch(format!(
                "{} houses scheduled, problem has {}",
                self.runs.len(),
                problem.houses.len()
            )));
        }
        for (h, per_day) in self.runs.iter().enumerate() {
            if per_day.len() != problem.days.len() {
                return Err(BuildError::ScheduleMismatch(format!("house {h} has {} days", per_day.len())));
            }
            for (d, run) in per_day.iter().enumerate() {
                let n = problem.days[d].interval_count;
                if run.on.len() != n || run.states.len() != n + 1 {
                    return Err(BuildError::ScheduleMismatch(format!("house {h} day {d} has wrong length")));
                }
            }
        }
        Ok(())
    }
}

/// How house HVAC units are operated.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlMode {
    /// The optimizer switches each HVAC unit within the comfort band.
    Surrogate,
    /// HVAC switching is fixed by thermostat simulation; temperatures become data.
    Simple(SimpleSchedules),
}

impl ControlMode {
    pub fn simple_for(problem: &PlanningProblem) -> Self {
        ControlMode::Simple(SimpleSchedules::simulate(problem))
    }

    pub fn is_surrogate(&self) -> bool {
        matches!(self, ControlMode::Surrogate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Model generator start-up indicators as binaries instead of `[0, 1]` continuous.
    pub binary_startup: bool,
    /// Pin the HVAC switch of the mode a day does not use to zero.
    pub restrict_hvac_to_day_mode: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            binary_startup: false,
            restrict_hvac_to_day_mode: true,
        }
    }
}

/// Closed-form dimensions of the model [`build_with`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelSize {
    pub variables: usize,
    pub binaries: usize,
    pub constraints: usize,
}

impl ModelSize {
    pub fn predict(problem: &PlanningProblem, mode: &ControlMode, options: BuildOptions) -> Self {
        let units = problem.units();
        let intervals: usize = problem.days.iter().map(|d| d.interval_count).sum();
        let days = problem.days.len();
        let houses = problem.houses.len();
        let months = problem.month_groups().len();
        let dfg_cols: usize = units
            .dfg
            .iter()
            .map(|u| 3 + problem.dfg[u.candidate].blocks.len())
            .sum();
        let (n, b, res) = (units.dfg.len(), units.ess.len(), units.wind.len() + units.pv.len());
        let surrogate = mode.is_surrogate();
        let per_house = if surrogate { 8 } else { 1 };
        Self {
            variables: units.len()
                + intervals * (dfg_cols + 3 * b + res + per_house * houses + 1)
                + months,
            binaries: units.len()
                + n * intervals * if options.binary_startup { 2 } else { 1 }
                + if surrogate { 2 * houses * intervals } else { 0 },
            constraints: 1
                + intervals * (4 * n + 5 * b + res + if surrogate { 5 * houses } else { 0 } + 2)
                + b * days,
        }
    }
}

/// Incrementally assembles the planning MILP. [`ModelBuilder::new`] declares
/// every column with its bounds; the `add_*` methods attach objective terms
/// and constraint families.
pub struct ModelBuilder<'a> {
    problem: &'a PlanningProblem,
    mode: &'a ControlMode,
    options: BuildOptions,
    units: UnitCatalog,
    model: MilpModel,
    index: VariableIndex,
}

impl<'a> ModelBuilder<'a> {
    pub fn new(problem: &'a PlanningProblem, mode: &'a ControlMode, options: BuildOptions) -> Result<Self, BuildError> {
        let violations = validate_problem(problem);
        if !violations.is_empty() {
            return Err(BuildError::InvalidProblem(violations));
        }
        if let ControlMode::Simple(schedules) = mode {
            schedules.check(problem)?;
        }
        let mut builder = Self {
            problem,
            mode,
            options,
            units: problem.units(),
            model: MilpModel::default(),
            index: VariableIndex::default(),
        };
        builder.declare_variables()?;
        Ok(builder)
    }

    pub fn model(&self) -> &MilpModel {
        &self.model
    }

    pub fn index(&self) -> &VariableIndex {
        &self.index
    }

    pub fn units(&self) -> &UnitCatalog {
        &self.units
    }

    pub fn finish(self) -> Result<(MilpModel, VariableIndex), BuildError> {
        self.model.check()?;
        Ok((self.model, self.index))
    }

    fn declare(&mut self, key: VarKey, kind: VarKind, lower: f64, upper: f64) -> Result<VarId, BuildError> {
        if lower > upper {
            return Err(BuildError::InfeasibleBounds {
                name: key.to_string(),
                lower,
                upper,
            });
        }
        let id = self.model.add_variable(kind, lower, upper);
        self.index.insert(key, id);
        Ok(id)
    }

    fn var(&self, key: VarKey) -> VarId {
        self.index
            .id(&key)
            .unwrap_or_else(|| panic!("variable {key} was not declared"))
    }

    fn declare_variables(&mut self) -> Result<(), BuildError> {
        let p = self.problem;
        for class in [DerClass::Wind, DerClass::Pv, DerClass::Dfg, DerClass::Ess] {
            for unit in 0..self.units.class(class).len() {
                self.declare(VarKey::Install { class, unit }, VarKind::Binary, 0.0, 1.0)?;
            }
        }
        let startup_kind = if self.options.binary_startup {
            VarKind::Binary
        } else {
            VarKind::Continuous
        };
        let surrogate = self.mode.is_surrogate();
        for (day, d) in p.days.iter().enumerate() {
            for t in 0..d.interval_count {
                for (unit, u) in self.units.dfg.clone().iter().enumerate() {
                    let g = &p.dfg[u.candidate];
                    self.declare(VarKey::DfgOutput { unit, day, t }, VarKind::Continuous, 0.0, g.p_max_kw)?;
                    for (block, b) in g.blocks.iter().enumerate() {
                        self.declare(
                            VarKey::DfgBlock { unit, day, t, block },
                            VarKind::Continuous,
                            0.0,
                            b.width_kw,
                        )?;
                    }
                    self.declare(VarKey::DfgCommit { unit, day, t }, VarKind::Binary, 0.0, 1.0)?;
                    self.declare(VarKey::DfgStartup { unit, day, t }, startup_kind, 0.0, 1.0)?;
                }
                for (unit, u) in self.units.ess.clone().iter().enumerate() {
                    let e = &p.ess[u.candidate];
                    self.declare(VarKey::EssCharge { unit, day, t }, VarKind::Continuous, 0.0, e.p_max_kw)?;
                    self.declare(VarKey::EssDischarge { unit, day, t }, VarKind::Continuous, 0.0, e.p_max_kw)?;
                    self.declare(
                        VarKey::EssSoc { unit, day, t },
                        VarKind::Continuous,
                        0.0,
                        e.soc_max_frac * e.e_max_kwh,
                    )?;
                }
                for (unit, u) in self.units.wind.clone().iter().enumerate() {
                    let r = &p.res[u.candidate];
                    let cap = r.p_max_kw * r.capacity_factor[day][t];
                    self.declare(VarKey::WindOutput { unit, day, t }, VarKind::Continuous, 0.0, cap)?;
                }
                for (unit, u) in self.units.pv.clone().iter().enumerate() {
                    let r = &p.res[u.candidate];
                    let cap = r.p_max_kw * r.capacity_factor[day][t];
                    self.declare(VarKey::PvOutput { unit, day, t }, VarKind::Continuous, 0.0, cap)?;
                }
                for (house, h) in p.houses.iter().enumerate() {
                    if surrogate {
                        let restrict = self.options.restrict_hvac_to_day_mode;
                        let heat_ub = if restrict && d.hvac_mode != HvacMode::Heat { 0.0 } else { 1.0 };
                        let cool_ub = if restrict && d.hvac_mode != HvacMode::Cool { 0.0 } else { 1.0 };
                        self.declare(VarKey::HvacHeat { house, day, t }, VarKind::Binary, 0.0, heat_ub)?;
                        self.declare(VarKey::HvacCool { house, day, t }, VarKind::Binary, 0.0, cool_ub)?;
                        let desired = h.thermal.desired_temp_c[day][t];
                        let band = h.thermal.band_halfwidth_c[day][t];
                        self.declare(
                            VarKey::TempIndoor { house, day, t },
                            VarKind::Continuous,
                            desired - band,
                            desired + band,
                        )?;
                        let free = (f64::NEG_INFINITY, f64::INFINITY);
                        self.declare(VarKey::TempMass { house, day, t }, VarKind::Continuous, free.0, free.1)?;
                        self.declare(VarKey::TempEnvelope { house, day, t }, VarKind::Continuous, free.0, free.1)?;
                        self.declare(VarKey::SlackBelow { house, day, t }, VarKind::Continuous, 0.0, f64::INFINITY)?;
                        self.declare(VarKey::SlackAbove { house, day, t }, VarKind::Continuous, 0.0, f64::INFINITY)?;
                    }
                    self.declare(
                        VarKey::Shed { house, day, t },
                        VarKind::Continuous,
                        0.0,
                        h.max_shed_kw[day][t],
                    )?;
                }
                self.declare(VarKey::Pcc { day, t }, VarKind::Continuous, -p.pcc_limit_kw, p.pcc_limit_kw)?;
            }
        }
        for month_group in p.month_groups().into_keys() {
            self.declare(VarKey::Peak { month_group }, VarKind::Continuous, 0.0, f64::INFINITY)?;
        }
        Ok(())
    }

    /// Annualized capital cost of each unit in the objective, plus the budget row.
    pub fn add_investment_cost(&mut self) {
        let mut budget_terms = Vec::with_capacity(self.units.len());
        for class in [DerClass::Wind, DerClass::Pv, DerClass::Dfg, DerClass::Ess] {
            for (unit, u) in self.units.class(class).iter().enumerate() {
                let cost = self.problem.unit_investment(u);
                let id = self.var(VarKey::Install { class, unit });
                self.model.add_cost(id, cost);
                budget_terms.push((id, cost));
            }
        }
        self.model
            .add_constraint("budget", budget_terms, Relation::Le, self.problem.budget);
    }

    /// Daily operating costs scaled by each day's weight, and monthly demand charges.
    pub fn add_operation_cost(&mut self) {
        let p = self.problem;
        for (day, d) in p.days.iter().enumerate() {
            let weight = p.day_weight(day);
            let dt = d.dt_hours;
            for t in 0..d.interval_count {
                for (unit, u) in self.units.dfg.iter().enumerate() {
                    let g = &p.dfg[u.candidate];
                    for (block, b) in g.blocks.iter().enumerate() {
                        let id = self.var(VarKey::DfgBlock { unit, day, t, block });
                        self.model.add_cost(id, weight * dt * b.marginal_cost_per_kwh);
                    }
                    let commit = self.var(VarKey::DfgCommit { unit, day, t });
                    self.model.add_cost(commit, weight * dt * g.no_load_cost_per_hour);
                    let start = self.var(VarKey::DfgStartup { unit, day, t });
                    self.model.add_cost(start, weight * g.startup_cost);
                }
                let pcc = self.var(VarKey::Pcc { day, t });
                self.model.add_cost(pcc, weight * dt * d.pcc_price_per_kwh[t]);
                for (unit, u) in self.units.ess.iter().enumerate() {
                    let c = weight * dt * p.ess[u.candidate].degradation_cost_per_kwh;
                    let ch = self.var(VarKey::EssCharge { unit, day, t });
                    let dis = self.var(VarKey::EssDischarge { unit, day, t });
                    self.model.add_cost(ch, c);
                    self.model.add_cost(dis, c);
                }
                for (house, h) in p.houses.iter().enumerate() {
                    let w = weight * h.thermal.discomfort_cost_per_degc;
                    match self.mode {
                        ControlMode::Surrogate => {
                            let below = self.var(VarKey::SlackBelow { house, day, t });
                            let above = self.var(VarKey::SlackAbove { house, day, t });
                            self.model.add_cost(below, w);
                            self.model.add_cost(above, w);
                        }
                        ControlMode::Simple(s) => {
                            let t_in = s.runs[house][day].states[t + 1].t_in_c;
                            self.model.objective_offset += w * (t_in - h.thermal.desired_temp_c[day][t]).abs();
                        }
                    }
                    let shed = self.var(VarKey::Shed { house, day, t });
                    self.model.add_cost(shed, weight * dt * h.shed_penalty_per_kwh);
                }
            }
        }
        for month_group in p.month_groups().into_keys() {
            let id = self.var(VarKey::Peak { month_group });
            self.model.add_cost(id, p.peak_cost_coefficient(month_group));
        }
    }

    /// Output composition, commitment limits, start-up logic and install gating.
    pub fn add_dfg_constraints(&mut self) {
        let p = self.problem;
        for (unit, u) in self.units.dfg.iter().enumerate() {
            let g = &p.dfg[u.candidate];
            let install = self.var(VarKey::Install { class: DerClass::Dfg, unit });
            for (day, d) in p.days.iter().enumerate() {
                for t in 0..d.interval_count {
                    let out = self.var(VarKey::DfgOutput { unit, day, t });
                    let commit = self.var(VarKey::DfgCommit { unit, day, t });
                    let start = self.var(VarKey::DfgStartup { unit, day, t });
                    let tag = format!("n{unit},d{day},t{t}");

                    let mut terms = vec![(out, 1.0), (commit, -g.p_min_kw)];
                    for block in 0..g.blocks.len() {
                        terms.push((self.var(VarKey::DfgBlock { unit, day, t, block }), -1.0));
                    }
                    self.model
                        .add_constraint(format!("dfg_out[{tag}]"), terms, Relation::Eq, 0.0);
                    self.model.add_constraint(
                        format!("dfg_cap[{tag}]"),
                        vec![(out, 1.0), (commit, -g.p_max_kw)],
                        Relation::Le,
                        0.0,
                    );
                    // Every day starts cold, so a commitment at t = 0 is a start-up.
                    let mut startup = vec![(start, 1.0), (commit, -1.0)];
                    if t > 0 {
                        startup.push((self.var(VarKey::DfgCommit { unit, day, t: t - 1 }), 1.0));
                    }
                    self.model
                        .add_constraint(format!("dfg_start[{tag}]"), startup, Relation::Ge, 0.0);
                    self.model.add_constraint(
                        format!("dfg_inst[{tag}]"),
                        vec![(commit, 1.0), (install, -1.0)],
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
    }

    /// Power limits, SOC window, SOC transition and the cyclic day boundary.
    pub fn add_ess_constraints(&mut self) {
        let p = self.problem;
        for (unit, u) in self.units.ess.iter().enumerate() {
            let e = &p.ess[u.candidate];
            let install = self.var(VarKey::Install { class: DerClass::Ess, unit });
            let anchor = e.cyclic_soc_kwh();
            for (day, d) in p.days.iter().enumerate() {
                let dt = d.dt_hours;
                for t in 0..d.interval_count {
                    let ch = self.var(VarKey::EssCharge { unit, day, t });
                    let dis = self.var(VarKey::EssDischarge { unit, day, t });
                    let soc = self.var(VarKey::EssSoc { unit, day, t });
                    let tag = format!("b{unit},d{day},t{t}");
                    self.model.add_constraint(
                        format!("ess_ch[{tag}]"),
                        vec![(ch, 1.0), (install, -e.p_max_kw)],
                        Relation::Le,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("ess_dis[{tag}]"),
                        vec![(dis, 1.0), (install, -e.p_max_kw)],
                        Relation::Le,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("soc_lo[{tag}]"),
                        vec![(soc, 1.0), (install, -e.soc_min_frac * e.e_max_kwh)],
                        Relation::Ge,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("soc_hi[{tag}]"),
                        vec![(soc, 1.0), (install, -e.soc_max_frac * e.e_max_kwh)],
                        Relation::Le,
                        0.0,
                    );
                    let previous = if t == 0 {
                        (install, -anchor)
                    } else {
                        (self.var(VarKey::EssSoc { unit, day, t: t - 1 }), -1.0)
                    };
                    self.model.add_constraint(
                        format!("soc_dyn[{tag}]"),
                        vec![
                            (soc, 1.0),
                            previous,
                            (ch, -e.eta_charge * dt),
                            (dis, dt / e.eta_discharge),
                        ],
                        Relation::Eq,
                        0.0,
                    );
                }
                let last = self.var(VarKey::EssSoc { unit, day, t: d.interval_count - 1 });
                self.model.add_constraint(
                    format!("soc_end[b{unit},d{day}]"),
                    vec![(last, 1.0), (install, -anchor)],
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }

    /// Renewable output bounded by installed capacity times availability.
    pub fn add_res_constraints(&mut self) {
        let p = self.problem;
        for (class, units) in [(DerClass::Wind, &self.units.wind), (DerClass::Pv, &self.units.pv)] {
            for (unit, u) in units.iter().enumerate() {
                let r = &p.res[u.candidate];
                let install = self.var(VarKey::Install { class, unit });
                for (day, d) in p.days.iter().enumerate() {
                    for t in 0..d.interval_count {
                        let key = match class {
                            DerClass::Wind => VarKey::WindOutput { unit, day, t },
                            _ => VarKey::PvOutput { unit, day, t },
                        };
                        let out = self.var(key);
                        self.model.add_constraint(
                            format!("res_cap[{key}]"),
                            vec![(out, 1.0), (install, -r.p_max_kw * r.capacity_factor[day][t])],
                            Relation::Le,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    /// Thermal dynamics as equality rows, heat/cool exclusion, and the
    /// slack pair measuring deviation from the desired temperature. The
    /// comfort band itself is carried by the indoor temperature bounds.
    /// No rows are added in simple-control mode.
    pub fn add_thermal_comfort_constraints(&mut self) {
        if !self.mode.is_surrogate() {
            return;
        }
        let p = self.problem;
        for (house, h) in p.houses.iter().enumerate() {
            let th = &h.thermal;
            let q = th.hvac_thermal_kw();
            for (day, d) in p.days.iter().enumerate() {
                let init = h.initial_state(day);
                for t in 0..d.interval_count {
                    let heat = self.var(VarKey::HvacHeat { house, day, t });
                    let cool = self.var(VarKey::HvacCool { house, day, t });
                    let now = [
                        self.var(VarKey::TempIndoor { house, day, t }),
                        self.var(VarKey::TempMass { house, day, t }),
                        self.var(VarKey::TempEnvelope { house, day, t }),
                    ];
                    let before = (t > 0).then(|| {
                        [
                            self.var(VarKey::TempIndoor { house, day, t: t - 1 }),
                            self.var(VarKey::TempMass { house, day, t: t - 1 }),
                            self.var(VarKey::TempEnvelope { house, day, t: t - 1 }),
                        ]
                    });
                    for k in 0..3 {
                        let mut terms = vec![(now[k], 1.0)];
                        let mut rhs = th.b_matrix[k][0] * d.ambient_temp_c[t] + th.b_matrix[k][1] * d.irradiance_wm2[t];
                        for j in 0..3 {
                            let a = th.a_matrix[k][j];
                            if a == 0.0 {
                                continue;
                            }
                            match before {
                                Some(prev) => terms.push((prev[j], -a)),
                                None => rhs += a * init[j],
                            }
                        }
                        let gain = th.b_matrix[k][2] * q;
                        if gain != 0.0 {
                            terms.push((heat, -gain));
                            terms.push((cool, gain));
                        }
                        self.model.add_constraint(
                            format!("thermal{k}[h{house},d{day},t{t}]"),
                            terms,
                            Relation::Eq,
                            rhs,
                        );
                    }
                    self.model.add_constraint(
                        format!("hvac_excl[h{house},d{day},t{t}]"),
                        vec![(heat, 1.0), (cool, 1.0)],
                        Relation::Le,
                        1.0,
                    );
                    let below = self.var(VarKey::SlackBelow { house, day, t });
                    let above = self.var(VarKey::SlackAbove { house, day, t });
                    self.model.add_constraint(
                        format!("deviation[h{house},d{day},t{t}]"),
                        vec![(now[0], 1.0), (below, 1.0), (above, -1.0)],
                        Relation::Eq,
                        th.desired_temp_c[day][t],
                    );
                }
            }
        }
    }

    /// Single-bus power balance and the monthly peak definition. PCC limits
    /// and shedding limits are carried by variable bounds.
    pub fn add_balance_and_grid_constraints(&mut self) {
        let p = self.problem;
        let groups = p.month_groups();
        for (day, d) in p.days.iter().enumerate() {
            for t in 0..d.interval_count {
                let mut terms = Vec::new();
                for unit in 0..self.units.wind.len() {
                    terms.push((self.var(VarKey::WindOutput { unit, day, t }), 1.0));
                }
                for unit in 0..self.units.pv.len() {
                    terms.push((self.var(VarKey::PvOutput { unit, day, t }), 1.0));
                }
                for unit in 0..self.units.dfg.len() {
                    terms.push((self.var(VarKey::DfgOutput { unit, day, t }), 1.0));
                }
                for unit in 0..self.units.ess.len() {
                    terms.push((self.var(VarKey::EssDischarge { unit, day, t }), 1.0));
                    terms.push((self.var(VarKey::EssCharge { unit, day, t }), -1.0));
                }
                let pcc = self.var(VarKey::Pcc { day, t });
                terms.push((pcc, 1.0));
                let mut demand = 0.0;
                for (house, h) in p.houses.iter().enumerate() {
                    demand += h.non_hvac_load_kw[day][t];
                    let rated = h.thermal.hvac_rated_power_kw;
                    match self.mode {
                        ControlMode::Surrogate => {
                            terms.push((self.var(VarKey::HvacHeat { house, day, t }), -rated));
                            terms.push((self.var(VarKey::HvacCool { house, day, t }), -rated));
                        }
                        ControlMode::Simple(s) => {
                            if s.is_on(house, day, t) {
                                demand += rated;
                            }
                        }
                    }
                    terms.push((self.var(VarKey::Shed { house, day, t }), 1.0));
                }
                self.model
                    .add_constraint(format!("balance[d{day},t{t}]"), terms, Relation::Eq, demand);
            }
        }
        for (month_group, members) in groups {
            let peak = self.var(VarKey::Peak { month_group });
            for day in members {
                for t in 0..p.days[day].interval_count {
                    let pcc = self.var(VarKey::Pcc { day, t });
                    self.model.add_constraint(
                        format!("peak[m{month_group},d{day},t{t}]"),
                        vec![(peak, 1.0), (pcc, -1.0)],
                        Relation::Ge,
                        0.0,
                    );
                }
            }
        }
    }
}

/// Builds the complete planning MILP with default options.
pub fn build(problem: &PlanningProblem, mode: &ControlMode) -> Result<(MilpModel, VariableIndex), BuildError> {
    build_with(problem, mode, BuildOptions::default())
}

pub fn build_with(
    problem: &PlanningProblem,
    mode: &ControlMode,
    options: BuildOptions,
) -> Result<(MilpModel, VariableIndex), BuildError> {
    let mut b = ModelBuilder::new(problem, mode, options)?;
    b.add_investment_cost();
    b.add_operation_cost();
    b.add_dfg_constraints();
    b.add_ess_constraints();
    b.add_res_constraints();
    b.add_thermal_comfort_constraints();
    b.add_balance_and_grid_constraints();
    b.finish()
}
