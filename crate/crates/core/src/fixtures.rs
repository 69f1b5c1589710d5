//! Small, fully specified planning problems for tests, examples and oracle checks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finance::FinanceTerms;
use crate::problem::{
    DaySeries, DfgCandidate, EssCandidate, HouseProfile, HvacMode, PlanningProblem, RepresentativeDay, ResCandidate,
    ResKind, ThermalModel,
};
use crate::thermal::{build_thermal_model, RcParameters};

/// Step length the reference house parameters are tuned for.
pub const REFERENCE_DT_HOURS: f64 = 0.25;

/// A day with constant ambient temperature, no sun and a flat price.
pub fn flat_day(intervals: usize, ambient_c: f64) -> RepresentativeDay {
    RepresentativeDay {
        label: "flat".into(),
        hvac_mode: HvacMode::Cool,
        month_group: 0,
        weight_days: 1.0,
        months_represented: 1.0,
        interval_count: intervals,
        dt_hours: 24.0 / intervals as f64,
        ambient_temp_c: vec![ambient_c; intervals],
        irradiance_wm2: vec![0.0; intervals],
        pcc_price_per_kwh: vec![0.1; intervals],
        demand_charge_per_kw: 0.0,
    }
}

/// Thermal model of the reference house at `dt_hours`, with capacitances
/// rescaled so each step has the dynamics of a 15-minute step.
pub fn reference_thermal(days: &[RepresentativeDay]) -> ThermalModel {
    let dt = days[0].dt_hours;
    let rc = RcParameters::reference_house().rescaled_for_step(REFERENCE_DT_HOURS, dt);
    let (a, b) = build_thermal_model(&rc, dt).expect("reference house is stable");
    ThermalModel {
        a_matrix: a,
        b_matrix: b,
        hvac_rated_power_kw: 5.0,
        cop: 4.0,
        desired_temp_c: days.iter().map(|d| vec![21.0; d.interval_count]).collect(),
        band_halfwidth_c: days.iter().map(|d| vec![2.0; d.interval_count]).collect(),
        discomfort_cost_per_degc: 0.05,
    }
}

fn hour_of(t: usize, dt: f64) -> f64 {
    (t as f64 + 0.5) * dt
}

fn day_profile(days: &[RepresentativeDay], f: impl Fn(usize, f64) -> f64) -> DaySeries {
    days.iter()
        .enumerate()
        .map(|(d, day)| (0..day.interval_count).map(|t| f(d, hour_of(t, day.dt_hours))).collect())
        .collect()
}

/// A microgrid with `houses` houses, `days` representative days of
/// `intervals` intervals, and one candidate each of generator, PV and storage.
/// Even days cool, odd days heat.
pub fn small_problem(houses: usize, days: usize, intervals: usize) -> PlanningProblem {
    let dt = 24.0 / intervals as f64;
    let day_list: Vec<RepresentativeDay> = (0..days)
        .map(|d| {
            let cooling = d % 2 == 0;
            let mean = if cooling { 29.0 } else { 6.0 };
            let hours: Vec<f64> = (0..intervals).map(|t| hour_of(t, dt)).collect();
            RepresentativeDay {
                label: format!("day{d}"),
                hvac_mode: if cooling { HvacMode::Cool } else { HvacMode::Heat },
                month_group: d as u32,
                weight_days: 1.0,
                months_represented: 1.0,
                interval_count: intervals,
                dt_hours: dt,
                ambient_temp_c: hours.iter().map(|h| mean + 5.0 * ((h - 9.0) * PI / 12.0).sin()).collect(),
                irradiance_wm2: hours
                    .iter()
                    .map(|h| (800.0 * ((h - 6.0) * PI / 12.0).sin()).max(0.0))
                    .collect(),
                pcc_price_per_kwh: hours
                    .iter()
                    .map(|h| 0.15 + 0.1 * ((h - 8.0) * PI / 12.0).sin())
                    .collect(),
                demand_charge_per_kw: 1.0,
            }
        })
        .collect();

    let thermal = reference_thermal(&day_list);
    let house_list = (0..houses)
        .map(|h| {
            let load = day_profile(&day_list, |_, hour| {
                6.0 + h as f64 + 2.0 * ((hour - 12.0) * PI / 12.0).sin().abs()
            });
            let shed = load.iter().map(|v| v.iter().map(|x| 0.1 * x).collect()).collect();
            HouseProfile {
                thermal: thermal.clone(),
                non_hvac_load_kw: load,
                max_shed_kw: shed,
                shed_penalty_per_kwh: 10.0,
                initial_state_c: None,
            }
        })
        .collect();

    let mut mt = DfgCandidate::with_equal_blocks("MT", 10.0, 80.0, &[0.2392, 0.3163, 0.3936]);
    mt.no_load_cost_per_hour = 4.0;
    mt.startup_cost = 8.0;
    mt.capital_cost_per_kw = 810.0;

    PlanningProblem {
        res: vec![ResCandidate {
            name: "PV".into(),
            kind: ResKind::Pv,
            p_max_kw: 80.0,
            capacity_factor: day_profile(&day_list, |_, hour| ((hour - 6.0) * PI / 12.0).sin().max(0.0)),
            capital_cost_per_kw: 2100.0,
            count_limit: 1,
        }],
        dfg: vec![mt],
        ess: vec![es1()],
        houses: house_list,
        days: day_list,
        pcc_limit_kw: 500.0,
        budget: 100_000.0,
        finance: FinanceTerms::default(),
        pi1: 1.0,
        pi2: 1.0,
        mip_rel_gap: 0.005,
    }
}

pub(crate) fn es1() -> EssCandidate {
    EssCandidate {
        name: "ES1".into(),
        p_max_kw: 90.0,
        e_max_kwh: 150.0,
        soc_min_frac: 0.1,
        soc_max_frac: 0.9,
        eta_charge: 0.95,
        eta_discharge: 0.95,
        power_cost_per_kw: 324.0,
        energy_cost_per_kwh: 180.0,
        degradation_cost_per_kwh: 0.01,
        count_limit: 1,
    }
}

/// Randomized instance small enough for exhaustive enumeration: one generator
/// unit, one storage unit, two houses, one cooling day of four intervals.
/// Its free binaries number 2 + 4 + 8 = 14.
pub fn random_tiny_instance(seed: u64) -> PlanningProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = small_problem(2, 1, 4);
    p.res.clear();
    let day = &mut p.days[0];
    day.weight_days = 365.0;
    day.months_represented = 12.0;
    day.demand_charge_per_kw = rng.random_range(0.0..3.0);
    for t in 0..4 {
        day.pcc_price_per_kwh[t] = rng.random_range(0.05..0.5);
        day.ambient_temp_c[t] = rng.random_range(24.0..36.0);
        day.irradiance_wm2[t] = rng.random_range(0.0..900.0);
    }
    for house in &mut p.houses {
        for t in 0..4 {
            let load = rng.random_range(4.0..15.0);
            house.non_hvac_load_kw[0][t] = load;
            house.max_shed_kw[0][t] = 0.1 * load;
        }
        house.thermal.discomfort_cost_per_degc = rng.random_range(0.01..0.5);
        house.initial_state_c = Some([
            rng.random_range(20.0..23.0),
            rng.random_range(21.0..24.0),
            rng.random_range(22.0..28.0),
        ]);
    }
    let g = &mut p.dfg[0];
    g.startup_cost = rng.random_range(0.0..50.0);
    g.no_load_cost_per_hour = rng.random_range(0.0..10.0);
    p.budget = rng.random_range(4_000.0..20_000.0);
    p
}
