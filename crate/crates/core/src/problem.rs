//! Planning scenario records and their validation.
//!
//! Units throughout: power in kW, energy in kWh, temperature in °C, money in
//! an abstract currency. Time-varying inputs are stored as [`DaySeries`],
//! indexed `[day][interval]`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::finance::FinanceTerms;
use crate::linalg::{self, Mat3};

/// Values indexed `[day][interval]`.
pub type DaySeries = Vec<Vec<f64>>;

/// Degradation cost applied when a storage candidate does not state one.
pub const DEFAULT_DEGRADATION_COST_PER_KWH: f64 = 0.01;

/// Heating or cooling, fixed per representative day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HvacMode {
    Heat,
    Cool,
}

impl fmt::Display for HvacMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HvacMode::Heat => "heat",
            HvacMode::Cool => "cool",
        })
    }
}

/// Discrete-time building model `x[t+1] = A x[t] + B u[t]` with state
/// `[indoor, inner mass, envelope]` and input `[ambient °C, irradiance W/m², HVAC thermal kW]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    pub a_matrix: Mat3,
    pub b_matrix: Mat3,
    /// Electrical rating of the HVAC unit, kW.
    pub hvac_rated_power_kw: f64,
    pub cop: f64,
    pub desired_temp_c: DaySeries,
    pub band_halfwidth_c: DaySeries,
    /// Cost per °C of deviation from the desired temperature, per interval.
    pub discomfort_cost_per_degc: f64,
}

impl ThermalModel {
    /// Magnitude of the thermal injection when the HVAC runs.
    pub fn hvac_thermal_kw(&self) -> f64 {
        self.cop * self.hvac_rated_power_kw
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseProfile {
    pub thermal: ThermalModel,
    pub non_hvac_load_kw: DaySeries,
    pub max_shed_kw: DaySeries,
    pub shed_penalty_per_kwh: f64,
    /// Thermal state `[indoor, mass, envelope]` at the start of every day.
    /// `None` starts all three nodes at the desired temperature of interval 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state_c: Option<[f64; 3]>,
}

impl HouseProfile {
    pub fn initial_state(&self, day: usize) -> [f64; 3] {
        self.initial_state_c
            .unwrap_or_else(|| [self.thermal.desired_temp_c[day][0]; 3])
    }
}

/// One fuel-cost block: marginal cost and width above minimum output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBlock {
    pub marginal_cost_per_kwh: f64,
    pub width_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfgCandidate {
    pub name: String,
    pub p_min_kw: f64,
    pub p_max_kw: f64,
    pub blocks: Vec<CostBlock>,
    /// Cost per hour while committed.
    pub no_load_cost_per_hour: f64,
    pub startup_cost: f64,
    pub capital_cost_per_kw: f64,
    pub count_limit: u32,
}

impl DfgCandidate {
    /// Splits the range above minimum output into equal-width blocks.
    pub fn with_equal_blocks(
        name: impl Into<String>,
        p_min_kw: f64,
        p_max_kw: f64,
        marginal_costs: &[f64],
    ) -> Self {
        let width = (p_max_kw - p_min_kw) / marginal_costs.len() as f64;
        Self {
            name: name.into(),
            p_min_kw,
            p_max_kw,
            blocks: marginal_costs
                .iter()
                .map(|&c| CostBlock {
                    marginal_cost_per_kwh: c,
                    width_kw: width,
                })
                .collect(),
            no_load_cost_per_hour: 0.0,
            startup_cost: 0.0,
            capital_cost_per_kw: 0.0,
            count_limit: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResKind {
    Wind,
    Pv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResCandidate {
    pub name: String,
    pub kind: ResKind,
    pub p_max_kw: f64,
    pub capacity_factor: DaySeries,
    pub capital_cost_per_kw: f64,
    pub count_limit: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssCandidate {
    pub name: String,
    pub p_max_kw: f64,
    pub e_max_kwh: f64,
    pub soc_min_frac: f64,
    pub soc_max_frac: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    pub power_cost_per_kw: f64,
    pub energy_cost_per_kwh: f64,
    #[serde(default = "default_degradation")]
    pub degradation_cost_per_kwh: f64,
    pub count_limit: u32,
}

fn default_degradation() -> f64 {
    DEFAULT_DEGRADATION_COST_PER_KWH
}

impl EssCandidate {
    /// SOC held at the start and end of every representative day when installed.
    pub fn cyclic_soc_kwh(&self) -> f64 {
        0.5 * (self.soc_min_frac + self.soc_max_frac) * self.e_max_kwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeDay {
    pub label: String,
    pub hvac_mode: HvacMode,
    /// Month group whose peak this day contributes to.
    pub month_group: u32,
    /// Calendar days this profile stands for.
    pub weight_days: f64,
    /// Calendar months billed with this month group's peak.
    pub months_represented: f64,
    pub interval_count: usize,
    pub dt_hours: f64,
    pub ambient_temp_c: Vec<f64>,
    pub irradiance_wm2: Vec<f64>,
    pub pcc_price_per_kwh: Vec<f64>,
    pub demand_charge_per_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningProblem {
    pub houses: Vec<HouseProfile>,
    pub dfg: Vec<DfgCandidate>,
    pub res: Vec<ResCandidate>,
    pub ess: Vec<EssCandidate>,
    pub days: Vec<RepresentativeDay>,
    pub pcc_limit_kw: f64,
    /// Cap on annualized investment.
    pub budget: f64,
    pub finance: FinanceTerms,
    /// Multiplies each day's `weight_days` when scaling daily costs to a year.
    pub pi1: f64,
    /// Multiplies each month group's `months_represented` for demand charges.
    pub pi2: f64,
    pub mip_rel_gap: f64,
}

/// Asset class of an installable unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerClass {
    Wind,
    Pv,
    Dfg,
    Ess,
}

/// One installable copy of a catalog entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub class: DerClass,
    /// Position in the catalog (`res`, `dfg` or `ess`).
    pub candidate: usize,
    /// Copy number within `count_limit`.
    pub copy: u32,
    pub label: String,
}

/// Catalog entries expanded into individual units, one binary each.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnitCatalog {
    pub wind: Vec<Unit>,
    pub pv: Vec<Unit>,
    pub dfg: Vec<Unit>,
    pub ess: Vec<Unit>,
}

impl UnitCatalog {
    pub fn len(&self) -> usize {
        self.wind.len() + self.pv.len() + self.dfg.len() + self.ess.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class(&self, class: DerClass) -> &[Unit] {
        match class {
            DerClass::Wind => &self.wind,
            DerClass::Pv => &self.pv,
            DerClass::Dfg => &self.dfg,
            DerClass::Ess => &self.ess,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Unit> {
        self.wind
            .iter()
            .chain(&self.pv)
            .chain(&self.dfg)
            .chain(&self.ess)
    }
}

fn expand(class: DerClass, candidate: usize, name: &str, count: u32) -> impl Iterator<Item = Unit> + '_ {
    (0..count).map(move |copy| Unit {
        class,
        candidate,
        copy,
        label: format!("{name}#{}", copy + 1),
    })
}

impl PlanningProblem {
    pub fn units(&self) -> UnitCatalog {
        let mut catalog = UnitCatalog::default();
        for (i, c) in self.res.iter().enumerate() {
            let (class, target) = match c.kind {
                ResKind::Wind => (DerClass::Wind, &mut catalog.wind),
                ResKind::Pv => (DerClass::Pv, &mut catalog.pv),
            };
            target.extend(expand(class, i, &c.name, c.count_limit));
        }
        for (i, c) in self.dfg.iter().enumerate() {
            catalog.dfg.extend(expand(DerClass::Dfg, i, &c.name, c.count_limit));
        }
        for (i, c) in self.ess.iter().enumerate() {
            catalog.ess.extend(expand(DerClass::Ess, i, &c.name, c.count_limit));
        }
        catalog
    }

    /// Multiplier turning one day's operating cost into its annual share.
    pub fn day_weight(&self, day: usize) -> f64 {
        self.pi1 * self.days[day].weight_days
    }

    /// Month groups in ascending order with their member days.
    pub fn month_groups(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (d, day) in self.days.iter().enumerate() {
            groups.entry(day.month_group).or_default().push(d);
        }
        groups
    }

    /// Annual multiplier on a month group's peak: `pi2 · months · demand charge`.
    pub fn peak_cost_coefficient(&self, group: u32) -> f64 {
        let first = self
            .days
            .iter()
            .find(|d| d.month_group == group)
            .expect("month group has at least one day");
        self.pi2 * first.months_represented * first.demand_charge_per_kw
    }

    /// Annualized investment cost of one unit, before the install binary.
    pub fn unit_investment(&self, unit: &Unit) -> f64 {
        let af = |f: crate::finance::Financing| f.annuity_factor().unwrap_or(f64::NAN);
        match unit.class {
            DerClass::Wind => {
                let c = &self.res[unit.candidate];
                af(self.finance.wind) * c.capital_cost_per_kw * c.p_max_kw
            }
            DerClass::Pv => {
                let c = &self.res[unit.candidate];
                af(self.finance.pv) * c.capital_cost_per_kw * c.p_max_kw
            }
            DerClass::Dfg => {
                let c = &self.dfg[unit.candidate];
                af(self.finance.dfg) * c.capital_cost_per_kw * c.p_max_kw
            }
            DerClass::Ess => {
                let c = &self.ess[unit.candidate];
                af(self.finance.ess)
                    * (c.power_cost_per_kw * c.p_max_kw + c.energy_cost_per_kwh * c.e_max_kwh)
            }
        }
    }

    pub fn interval_count(&self, day: usize) -> usize {
        self.days[day].interval_count
    }
}

/// What a violation is about, precise enough to locate it in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subject {
    Problem,
    House { house: usize },
    HouseSeries { house: usize, day: usize, interval: Option<usize>, field: HouseField },
    Day { day: usize, interval: Option<usize>, field: DayField },
    Dfg { candidate: usize },
    Res { candidate: usize },
    ResSeries { candidate: usize, day: usize, interval: Option<usize> },
    Ess { candidate: usize },
    Finance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HouseField {
    NonHvacLoad,
    MaxShed,
    DesiredTemp,
    Band,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayField {
    Length,
    Ambient,
    Irradiance,
    Price,
    Meta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    EfficiencyOutOfRange,
    DayLengthMismatch,
    SeriesLengthMismatch,
    NonFiniteValue,
    UnstableThermalModel,
    NonPositiveParameter,
    NegativeParameter,
    FractionOutOfRange,
    ShedExceedsLoad,
    BlockWidthMismatch,
    NonConvexCost,
    InconsistentMonthGroup,
    InvalidFinance,
    NoDays,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json_like_name(*self);
        f.write_str(s)
    }
}

fn serde_json_like_name(kind: ViolationKind) -> &'static str {
    use ViolationKind::*;
    match kind {
        EfficiencyOutOfRange => "efficiency-out-of-range",
        DayLengthMismatch => "day-length-mismatch",
        SeriesLengthMismatch => "series-length-mismatch",
        NonFiniteValue => "non-finite-value",
        UnstableThermalModel => "unstable-thermal-model",
        NonPositiveParameter => "non-positive-parameter",
        NegativeParameter => "negative-parameter",
        FractionOutOfRange => "fraction-out-of-range",
        ShedExceedsLoad => "shed-exceeds-load",
        BlockWidthMismatch => "block-width-mismatch",
        NonConvexCost => "non-convex-cost",
        InconsistentMonthGroup => "inconsistent-month-group",
        InvalidFinance => "invalid-finance",
        NoDays => "no-days",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: Subject,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:?}): {}", self.kind, self.subject, self.detail)
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, kind: ViolationKind, subject: Subject, detail: impl Into<String>) {
        self.out.push(Violation {
            kind,
            subject,
            detail: detail.into(),
        });
    }

    fn positive(&mut self, value: f64, subject: Subject, what: &str) {
        if !(value.is_finite() && value > 0.0) {
            self.push(
                ViolationKind::NonPositiveParameter,
                subject,
                format!("{what} must be positive, got {value}"),
            );
        }
    }

    fn non_negative(&mut self, value: f64, subject: Subject, what: &str) {
        if !(value.is_finite() && value >= 0.0) {
            self.push(
                ViolationKind::NegativeParameter,
                subject,
                format!("{what} must be non-negative, got {value}"),
            );
        }
    }

    fn fraction(&mut self, value: f64, subject: Subject, what: &str) {
        if !(0.0..=1.0).contains(&value) {
            self.push(
                ViolationKind::FractionOutOfRange,
                subject,
                format!("{what} must lie in [0, 1], got {value}"),
            );
        }
    }

    /// Checks the outer length against the day count and each inner length
    /// against that day's interval count. Returns false if the shape is wrong.
    fn day_series(
        &mut self,
        series: &DaySeries,
        days: &[RepresentativeDay],
        subject: impl Fn(usize, Option<usize>) -> Subject,
        what: &str,
    ) -> bool {
        if series.len() != days.len() {
            self.push(
                ViolationKind::SeriesLengthMismatch,
                subject(0, None),
                format!("{what} covers {} days, expected {}", series.len(), days.len()),
            );
            return false;
        }
        let mut ok = true;
        for (d, (values, day)) in series.iter().zip(days).enumerate() {
            if values.len() != day.interval_count {
                self.push(
                    ViolationKind::SeriesLengthMismatch,
                    subject(d, None),
                    format!(
                        "{what} has {} values on day {d}, expected {}",
                        values.len(),
                        day.interval_count
                    ),
                );
                ok = false;
                continue;
            }
            if let Some(t) = values.iter().position(|v| !v.is_finite()) {
                self.push(
                    ViolationKind::NonFiniteValue,
                    subject(d, Some(t)),
                    format!("{what} is not finite"),
                );
                ok = false;
            }
        }
        ok
    }
}

/// Every invariant breach in `problem`; empty when the problem is well formed.
pub fn validate_problem(problem: &PlanningProblem) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    use ViolationKind::*;

    c.positive(problem.pi1, Subject::Problem, "pi1");
    c.positive(problem.pi2, Subject::Problem, "pi2");
    c.non_negative(problem.budget, Subject::Problem, "budget");
    c.positive(problem.pcc_limit_kw, Subject::Problem, "pcc_limit_kw");
    c.fraction(problem.mip_rel_gap, Subject::Problem, "mip_rel_gap");
    for f in [
        problem.finance.wind,
        problem.finance.pv,
        problem.finance.dfg,
        problem.finance.ess,
    ] {
        if let Err(e) = f.annuity_factor() {
            c.push(InvalidFinance, Subject::Finance, e.message);
        }
    }

    if problem.days.is_empty() {
        c.push(NoDays, Subject::Problem, "at least one representative day is required");
    }
    let days = &problem.days;
    for (d, day) in days.iter().enumerate() {
        let meta = Subject::Day { day: d, interval: None, field: DayField::Meta };
        let span = day.interval_count as f64 * day.dt_hours;
        if day.interval_count == 0 || !day.dt_hours.is_finite() || day.dt_hours <= 0.0 || (span - 24.0).abs() > 1e-9 {
            c.push(
                DayLengthMismatch,
                Subject::Day { day: d, interval: None, field: DayField::Length },
                format!(
                    "{} intervals of {} h cover {span} h, not 24 h",
                    day.interval_count, day.dt_hours
                ),
            );
        }
        c.positive(day.weight_days, meta, "weight_days");
        c.positive(day.months_represented, meta, "months_represented");
        c.non_negative(day.demand_charge_per_kw, meta, "demand_charge_per_kw");
        for (values, field, what) in [
            (&day.ambient_temp_c, DayField::Ambient, "ambient_temp_c"),
            (&day.irradiance_wm2, DayField::Irradiance, "irradiance_wm2"),
            (&day.pcc_price_per_kwh, DayField::Price, "pcc_price_per_kwh"),
        ] {
            if values.len() != day.interval_count {
                c.push(
                    SeriesLengthMismatch,
                    Subject::Day { day: d, interval: None, field },
                    format!("{what} has {} values, expected {}", values.len(), day.interval_count),
                );
            } else if let Some(t) = values.iter().position(|v| !v.is_finite()) {
                c.push(
                    NonFiniteValue,
                    Subject::Day { day: d, interval: Some(t), field },
                    format!("{what} is not finite"),
                );
            }
        }
        if let Some(t) = day.irradiance_wm2.iter().position(|&v| v < 0.0) {
            c.push(
                NegativeParameter,
                Subject::Day { day: d, interval: Some(t), field: DayField::Irradiance },
                "irradiance must be non-negative",
            );
        }
    }
    for (group, members) in problem.month_groups() {
        let first = &days[members[0]];
        for &d in &members[1..] {
            if days[d].months_represented != first.months_represented
                || days[d].demand_charge_per_kw != first.demand_charge_per_kw
            {
                c.push(
                    InconsistentMonthGroup,
                    Subject::Day { day: d, interval: None, field: DayField::Meta },
                    format!("days in month group {group} disagree on months or demand charge"),
                );
            }
        }
    }

    for (h, house) in problem.houses.iter().enumerate() {
        let subject = Subject::House { house: h };
        let th = &house.thermal;
        if !linalg::is_finite(&th.a_matrix) || !linalg::is_finite(&th.b_matrix) {
            c.push(NonFiniteValue, subject, "thermal matrices must be finite");
        } else {
            let rho = linalg::spectral_radius(&th.a_matrix);
            if rho >= 1.0 {
                c.push(
                    UnstableThermalModel,
                    subject,
                    format!("state matrix spectral radius {rho:.6} is not below 1"),
                );
            }
        }
        c.positive(th.hvac_rated_power_kw, subject, "hvac_rated_power_kw");
        c.positive(th.cop, subject, "cop");
        c.non_negative(th.discomfort_cost_per_degc, subject, "discomfort_cost_per_degc");
        c.non_negative(house.shed_penalty_per_kwh, subject, "shed_penalty_per_kwh");
        if let Some(init) = house.initial_state_c {
            if init.iter().any(|v| !v.is_finite()) {
                c.push(NonFiniteValue, subject, "initial state must be finite");
            }
        }

        let series = |field: HouseField| {
            move |day: usize, interval: Option<usize>| Subject::HouseSeries { house: h, day, interval, field }
        };
        c.day_series(&th.desired_temp_c, days, series(HouseField::DesiredTemp), "desired_temp_c");
        if c.day_series(&th.band_halfwidth_c, days, series(HouseField::Band), "band_halfwidth_c") {
            for (d, values) in th.band_halfwidth_c.iter().enumerate() {
                if let Some(t) = values.iter().position(|&v| v < 0.0) {
                    c.push(
                        NegativeParameter,
                        series(HouseField::Band)(d, Some(t)),
                        "band half-width must be non-negative",
                    );
                }
            }
        }
        let load_ok = c.day_series(&house.non_hvac_load_kw, days, series(HouseField::NonHvacLoad), "non_hvac_load_kw");
        let shed_ok = c.day_series(&house.max_shed_kw, days, series(HouseField::MaxShed), "max_shed_kw");
        if load_ok && shed_ok {
            'outer: for (d, (load, shed)) in house.non_hvac_load_kw.iter().zip(&house.max_shed_kw).enumerate() {
                for (t, (&l, &s)) in load.iter().zip(shed).enumerate() {
                    if s < 0.0 || s > l + 1e-12 {
                        c.push(
                            ShedExceedsLoad,
                            series(HouseField::MaxShed)(d, Some(t)),
                            format!("max shed {s} must lie in [0, load {l}]"),
                        );
                        break 'outer;
                    }
                }
            }
        }
    }

    for (i, g) in problem.dfg.iter().enumerate() {
        let subject = Subject::Dfg { candidate: i };
        c.non_negative(g.p_min_kw, subject, "p_min_kw");
        c.positive(g.p_max_kw, subject, "p_max_kw");
        if g.p_min_kw > g.p_max_kw {
            c.push(
                NonPositiveParameter,
                subject,
                format!("p_min_kw {} exceeds p_max_kw {}", g.p_min_kw, g.p_max_kw),
            );
        }
        let widths: f64 = g.blocks.iter().map(|b| b.width_kw).sum();
        if g.blocks.iter().any(|b| !(b.width_kw >= 0.0)) || (widths - (g.p_max_kw - g.p_min_kw)).abs() > 1e-6 {
            c.push(
                BlockWidthMismatch,
                subject,
                format!("block widths sum to {widths}, expected {}", g.p_max_kw - g.p_min_kw),
            );
        }
        if g.blocks.windows(2).any(|w| w[1].marginal_cost_per_kwh < w[0].marginal_cost_per_kwh) {
            c.push(NonConvexCost, subject, "block marginal costs must be non-decreasing");
        }
        for b in &g.blocks {
            c.non_negative(b.marginal_cost_per_kwh, subject, "marginal_cost_per_kwh");
        }
        c.non_negative(g.no_load_cost_per_hour, subject, "no_load_cost_per_hour");
        c.non_negative(g.startup_cost, subject, "startup_cost");
        c.non_negative(g.capital_cost_per_kw, subject, "capital_cost_per_kw");
    }

    for (i, r) in problem.res.iter().enumerate() {
        let subject = Subject::Res { candidate: i };
        c.positive(r.p_max_kw, subject, "p_max_kw");
        c.non_negative(r.capital_cost_per_kw, subject, "capital_cost_per_kw");
        let cf_subject = |day, interval| Subject::ResSeries { candidate: i, day, interval };
        if c.day_series(&r.capacity_factor, days, cf_subject, "capacity_factor") {
            'cf: for (d, values) in r.capacity_factor.iter().enumerate() {
                for (t, &v) in values.iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) {
                        c.push(
                            FractionOutOfRange,
                            cf_subject(d, Some(t)),
                            format!("capacity factor {v} outside [0, 1]"),
                        );
                        break 'cf;
                    }
                }
            }
        }
    }

    for (i, e) in problem.ess.iter().enumerate() {
        let subject = Subject::Ess { candidate: i };
        c.positive(e.p_max_kw, subject, "p_max_kw");
        c.positive(e.e_max_kwh, subject, "e_max_kwh");
        c.fraction(e.soc_min_frac, subject, "soc_min_frac");
        c.fraction(e.soc_max_frac, subject, "soc_max_frac");
        if e.soc_min_frac > e.soc_max_frac {
            c.push(
                FractionOutOfRange,
                subject,
                format!("soc_min_frac {} exceeds soc_max_frac {}", e.soc_min_frac, e.soc_max_frac),
            );
        }
        for (eta, what) in [(e.eta_charge, "eta_charge"), (e.eta_discharge, "eta_discharge")] {
            if !(eta > 0.0 && eta <= 1.0) {
                c.push(EfficiencyOutOfRange, subject, format!("{what} {eta} outside (0, 1]"));
            }
        }
        c.non_negative(e.power_cost_per_kw, subject, "power_cost_per_kw");
        c.non_negative(e.energy_cost_per_kwh, subject, "energy_cost_per_kwh");
        c.non_negative(e.degradation_cost_per_kwh, subject, "degradation_cost_per_kwh");
    }

    c.out
}
