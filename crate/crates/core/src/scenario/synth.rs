//! Synthetic desk-scale study: 20 houses, a winter, spring and summer day
//! at 15-minute resolution, and the published candidate catalogs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::io::ScenarioFileSet;
use crate::finance::FinanceTerms;
use crate::problem::{
    DaySeries, DfgCandidate, EssCandidate, HouseProfile, HvacMode, PlanningProblem, RepresentativeDay, ResCandidate,
    ResKind, ThermalModel,
};
use crate::thermal::{build_thermal_model, perturb_houses, RcParameters};

pub const DEFAULT_SEED: u64 = 2016;
/// Peak of the summed non-HVAC load over all houses, days and intervals.
pub const NON_HVAC_PEAK_KW: f64 = 213.47;

/// Knobs of the synthesizer. [`Default`] is the bundled study.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSettings {
    pub seed: u64,
    pub houses: usize,
    pub intervals_per_day: usize,
    /// Relative standard deviation of each house's RC parameters.
    pub rc_std_frac: f64,
    /// Population peak of non-HVAC load; scaled with the house count when
    /// `houses` differs from 20 if built through [`SynthSettings::scaled`].
    pub non_hvac_peak_kw: f64,
    pub budget: f64,
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            houses: 20,
            intervals_per_day: 96,
            rc_std_frac: 0.1,
            non_hvac_peak_kw: NON_HVAC_PEAK_KW,
            budget: 100_000.0,
        }
    }
}

impl SynthSettings {
    /// A smaller community with per-house load kept at the default level.
    pub fn scaled(houses: usize, seed: u64) -> Self {
        Self {
            seed,
            houses,
            non_hvac_peak_kw: NON_HVAC_PEAK_KW * houses as f64 / 20.0,
            ..Self::default()
        }
    }

    pub fn problem(&self) -> PlanningProblem {
        build(self)
    }
}

struct Season {
    label: &'static str,
    mode: HvacMode,
    month_group: u32,
    demand_charge: f64,
    temp_mean: f64,
    temp_swing: f64,
    sunrise: f64,
    sunset: f64,
    irradiance_peak: f64,
    wind_mean: f64,
    load_scale: f64,
    price_base: f64,
    price_morning: f64,
    price_evening: f64,
}

const SEASONS: [Season; 3] = [
    Season {
        label: "winter",
        mode: HvacMode::Heat,
        month_group: 0,
        demand_charge: 1.0,
        temp_mean: 3.0,
        temp_swing: 5.0,
        sunrise: 7.5,
        sunset: 17.5,
        irradiance_peak: 500.0,
        wind_mean: 0.42,
        load_scale: 1.0,
        price_base: 0.09,
        price_morning: 0.14,
        price_evening: 0.20,
    },
    Season {
        label: "spring",
        mode: HvacMode::Heat,
        month_group: 1,
        demand_charge: 1.0,
        temp_mean: 14.0,
        temp_swing: 6.0,
        sunrise: 6.5,
        sunset: 19.5,
        irradiance_peak: 800.0,
        wind_mean: 0.38,
        load_scale: 0.85,
        price_base: 0.08,
        price_morning: 0.08,
        price_evening: 0.14,
    },
    Season {
        label: "summer",
        mode: HvacMode::Cool,
        month_group: 2,
        demand_charge: 2.0,
        temp_mean: 28.5,
        temp_swing: 5.5,
        sunrise: 6.0,
        sunset: 20.5,
        irradiance_peak: 900.0,
        wind_mean: 0.25,
        load_scale: 1.1,
        price_base: 0.10,
        price_morning: 0.08,
        price_evening: 0.35,
    },
];

fn bump(h: f64, center: f64, width: f64) -> f64 {
    (-0.5 * ((h - center) / width).powi(2)).exp()
}

fn price_curve(s: &Season, h: f64) -> f64 {
    s.price_base + s.price_morning * bump(h, 8.5, 1.5) + s.price_evening * bump(h, 18.5, 2.0)
}

fn household_shape(h: f64) -> f64 {
    0.4 + 0.35 * bump(h, 7.5, 1.2) + 0.15 * bump(h, 13.0, 3.0) + 0.6 * bump(h, 19.5, 2.0)
}

/// Candidate catalogs for the bundled study. Fuel curves split the range above minimum
/// output into three equal blocks.
fn catalogs(days: &[RepresentativeDay], wind_cf: DaySeries, pv_cf: DaySeries) -> (Vec<ResCandidate>, Vec<DfgCandidate>, Vec<EssCandidate>) {
    debug_assert_eq!(wind_cf.len(), days.len());
    let res = vec![
        ResCandidate {
            name: "WT".into(),
            kind: ResKind::Wind,
            p_max_kw: 120.0,
            capacity_factor: wind_cf,
            capital_cost_per_kw: 2700.0,
            count_limit: 2,
        },
        ResCandidate {
            name: "PV".into(),
            kind: ResKind::Pv,
            p_max_kw: 80.0,
            capacity_factor: pv_cf,
            capital_cost_per_kw: 2100.0,
            count_limit: 2,
        },
    ];
    let mut de = DfgCandidate::with_equal_blocks("DE", 10.0, 60.0, &[0.2822, 0.3732, 0.4643]);
    de.capital_cost_per_kw = 540.0;
    de.count_limit = 2;
    de.no_load_cost_per_hour = 3.0;
    de.startup_cost = 6.0;
    let mut mt = DfgCandidate::with_equal_blocks("MT", 10.0, 80.0, &[0.2392, 0.3163, 0.3936]);
    mt.capital_cost_per_kw = 810.0;
    mt.count_limit = 2;
    mt.no_load_cost_per_hour = 4.0;
    mt.startup_cost = 9.0;
    let ess = |name: &str, p: f64, e: f64, cp: f64, ce: f64, eta: f64| EssCandidate {
        name: name.into(),
        p_max_kw: p,
        e_max_kwh: e,
        soc_min_frac: 0.1,
        soc_max_frac: 0.9,
        eta_charge: eta,
        eta_discharge: eta,
        power_cost_per_kw: cp,
        energy_cost_per_kwh: ce,
        degradation_cost_per_kwh: crate::problem::DEFAULT_DEGRADATION_COST_PER_KWH,
        count_limit: 2,
    };
    (
        res,
        vec![de, mt],
        vec![ess("ES1", 90.0, 150.0, 324.0, 180.0, 0.95), ess("ES2", 100.0, 200.0, 240.0, 216.0, 0.85)],
    )
}

fn build(settings: &SynthSettings) -> PlanningProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let n = settings.intervals_per_day;
    let dt = 24.0 / n as f64;
    let hour = |t: usize| (t as f64 + 0.5) * dt;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let mut days = Vec::with_capacity(SEASONS.len());
    let mut pv_cf = Vec::with_capacity(SEASONS.len());
    let mut wind_cf = Vec::with_capacity(SEASONS.len());
    for s in &SEASONS {
        let mut ambient = Vec::with_capacity(n);
        let mut irradiance = Vec::with_capacity(n);
        let mut wind = Vec::with_capacity(n);
        let mut temp_noise = 0.0;
        let mut wind_noise = 0.0;
        for t in 0..n {
            let h = hour(t);
            temp_noise = 0.9 * temp_noise + 0.25 * unit.sample(&mut rng);
            ambient.push(s.temp_mean + s.temp_swing * ((h - 9.0) * PI / 12.0).sin() + temp_noise);
            let daylight = (h - s.sunrise) / (s.sunset - s.sunrise);
            let clear = if (0.0..=1.0).contains(&daylight) {
                (PI * daylight).sin()
            } else {
                0.0
            };
            let cloud = 1.0 - 0.2 * rng.random::<f64>();
            irradiance.push(s.irradiance_peak * clear * cloud);
            wind_noise = 0.85 * wind_noise + 0.04 * unit.sample(&mut rng);
            wind.push((s.wind_mean + 0.1 * ((h - 3.0) * PI / 12.0).cos() + wind_noise).clamp(0.0, 1.0));
        }
        pv_cf.push(irradiance.iter().map(|g| (g / 1000.0).clamp(0.0, 1.0)).collect());
        wind_cf.push(wind);
        days.push(RepresentativeDay {
            label: s.label.into(),
            hvac_mode: s.mode,
            month_group: s.month_group,
            weight_days: 365.0 / 3.0,
            months_represented: 4.0,
            interval_count: n,
            dt_hours: dt,
            ambient_temp_c: ambient,
            irradiance_wm2: irradiance,
            pcc_price_per_kwh: (0..n).map(|t| price_curve(s, hour(t))).collect(),
            demand_charge_per_kw: s.demand_charge,
        });
    }

    let rc = RcParameters::reference_house().rescaled_for_step(crate::fixtures::REFERENCE_DT_HOURS, dt);
    let (a, b) = build_thermal_model(&rc, dt).expect("reference house is stable");
    let per_day = |v: f64| -> DaySeries { days.iter().map(|d| vec![v; d.interval_count]).collect() };
    let base = HouseProfile {
        thermal: ThermalModel {
            a_matrix: a,
            b_matrix: b,
            hvac_rated_power_kw: 5.0,
            cop: 4.0,
            desired_temp_c: per_day(21.0),
            band_halfwidth_c: per_day(2.0),
            discomfort_cost_per_degc: 0.05,
        },
        non_hvac_load_kw: per_day(0.0),
        max_shed_kw: per_day(0.0),
        shed_penalty_per_kwh: 10.0,
        initial_state_c: None,
    };
    let population = perturb_houses(&base, &rc, dt, settings.houses, settings.rc_std_frac, settings.seed)
        .expect("reference house perturbations stay stable");

    let mut loads: Vec<DaySeries> = Vec::with_capacity(settings.houses);
    for _ in 0..settings.houses {
        let scale = rng.random_range(0.7..1.3);
        let shift = 0.5 * unit.sample(&mut rng);
        let series = SEASONS
            .iter()
            .map(|s| {
                (0..n)
                    .map(|t| {
                        let noise = (1.0 + 0.08 * unit.sample(&mut rng)).max(0.05);
                        scale * s.load_scale * household_shape(hour(t) - shift) * noise
                    })
                    .collect()
            })
            .collect();
        loads.push(series);
    }
    let peak = (0..days.len())
        .flat_map(|d| (0..n).map(move |t| (d, t)))
        .map(|(d, t)| loads.iter().map(|l| l[d][t]).sum::<f64>())
        .fold(0.0, f64::max);
    let factor = settings.non_hvac_peak_kw / peak;

    let houses = population
        .into_iter()
        .zip(loads)
        .map(|(p, load)| {
            let load: DaySeries = load
                .into_iter()
                .map(|day| day.into_iter().map(|x| x * factor).collect())
                .collect();
            let shed = load.iter().map(|day| day.iter().map(|x| 0.1 * x).collect()).collect();
            HouseProfile {
                non_hvac_load_kw: load,
                max_shed_kw: shed,
                ..p.profile
            }
        })
        .collect();

    let (res, dfg, ess) = catalogs(&days, wind_cf, pv_cf);
    PlanningProblem {
        houses,
        dfg,
        res,
        ess,
        days,
        pcc_limit_kw: 500.0,
        budget: settings.budget,
        finance: FinanceTerms::default(),
        pi1: 1.0,
        pi2: 1.0,
        mip_rel_gap: 0.005,
    }
}

/// The bundled study for `seed`, as a problem.
pub fn synthesize_default_problem(seed: u64) -> PlanningProblem {
    SynthSettings {
        seed,
        ..SynthSettings::default()
    }
    .problem()
}

/// The bundled study for `seed`, as scenario files. Byte-identical per seed.
pub fn synthesize_default_scenario(seed: u64) -> ScenarioFileSet {
    ScenarioFileSet::from_problem(&synthesize_default_problem(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::validate_problem;

    #[test]
    fn default_study_shape() {
        let p = synthesize_default_problem(DEFAULT_SEED);
        assert!(validate_problem(&p).is_empty(), "{:?}", validate_problem(&p));
        assert_eq!(p.houses.len(), 20);
        assert_eq!(p.days.len(), 3);
        assert!(p.days.iter().all(|d| d.interval_count == 96));
        // Two of each of the six catalog entries.
        assert_eq!(p.units().len(), 12);
    }

    #[test]
    fn population_peak_is_pinned() {
        let p = synthesize_default_problem(7);
        let peak = (0..3)
            .flat_map(|d| (0..96).map(move |t| (d, t)))
            .map(|(d, t)| p.houses.iter().map(|h| h.non_hvac_load_kw[d][t]).sum::<f64>())
            .fold(0.0, f64::max);
        assert!((peak - NON_HVAC_PEAK_KW).abs() < 0.01);
    }

    #[test]
    fn pv_is_dark_at_midnight() {
        let p = synthesize_default_problem(DEFAULT_SEED);
        let pv = p.res.iter().find(|r| r.kind == ResKind::Pv).unwrap();
        for day in &pv.capacity_factor {
            assert_eq!(day[0], 0.0);
            assert_eq!(day[95], 0.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(synthesize_default_scenario(3), synthesize_default_scenario(3));
        assert_ne!(synthesize_default_scenario(3), synthesize_default_scenario(4));
    }
}
