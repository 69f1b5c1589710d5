use mgplan_core::fixtures::small_problem;
use mgplan_core::linalg::spectral_radius;
use mgplan_core::milp::SimpleSchedules;
use mgplan_core::scenario::{ScenarioFileSet, SynthSettings};
use mgplan_core::thermal::{build_thermal_model, perturb_houses, step, RcParameters, ThermalInput, ThermalState};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = ThermalState> {
    (-10.0f64..40.0, -10.0f64..40.0, -10.0f64..40.0).prop_map(|(a, b, c)| ThermalState::from_array([a, b, c]))
}

fn input() -> impl Strategy<Value = ThermalInput> {
    (-20.0f64..45.0, 0.0f64..1000.0, -15.0f64..15.0).prop_map(|(a, i, q)| ThermalInput::new(a, i, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_is_linear(x1 in state(), x2 in state(), u1 in input(), u2 in input(), k in -3.0f64..3.0) {
        let p = small_problem(1, 1, 4);
        let m = &p.houses[0].thermal;
        let combine = |a: [f64; 3], b: [f64; 3]| [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]];
        let x = ThermalState::from_array(combine(x1.to_array(), x2.to_array()));
        let u = ThermalInput::new(
            u1.ambient_c + k * u2.ambient_c,
            u1.irradiance_wm2 + k * u2.irradiance_wm2,
            u1.hvac_thermal_kw + k * u2.hvac_thermal_kw,
        );
        let lhs = step(m, x, u).to_array();
        let rhs = combine(step(m, x1, u1).to_array(), step(m, x2, u2).to_array());
        for i in 0..3 {
            prop_assert!((lhs[i] - rhs[i]).abs() <= 1e-9 * (1.0 + rhs[i].abs()));
        }
    }

    #[test]
    fn stable_steps_are_accepted(dt in 0.01f64..0.5) {
        let rc = RcParameters::reference_house();
        let (a, _) = build_thermal_model(&rc, dt).unwrap();
        prop_assert!(spectral_radius(&a) < 1.0);
    }

    #[test]
    fn thermostat_ignores_prices(scale in 0.0f64..10.0, shift in -0.05f64..0.5) {
        let p = small_problem(2, 2, 12);
        let mut q = p.clone();
        for day in &mut q.days {
            for price in &mut day.pcc_price_per_kwh {
                *price = *price * scale + shift;
            }
        }
        let a = SimpleSchedules::simulate(&p);
        let b = SimpleSchedules::simulate(&q);
        for h in 0..2 {
            for d in 0..2 {
                for t in 0..12 {
                    prop_assert_eq!(a.is_on(h, d, t), b.is_on(h, d, t));
                }
            }
        }
    }

    #[test]
    fn scenario_files_round_trip(houses in 1usize..4, days in 1usize..4, intervals in prop::sample::select(vec![4usize, 8, 24])) {
        let p = small_problem(houses, days, intervals);
        let files = ScenarioFileSet::from_problem(&p);
        let back = files.to_problem().unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(ScenarioFileSet::from_problem(&back), files);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn perturbed_houses_are_stable(seed in any::<u64>(), std_frac in 0.0f64..0.3) {
        let base = small_problem(1, 1, 4).houses.remove(0);
        let rc = RcParameters::reference_house();
        let houses = perturb_houses(&base, &rc, 0.25, 10, std_frac, seed).unwrap();
        prop_assert_eq!(houses.len(), 10);
        for h in &houses {
            prop_assert!(spectral_radius(&h.profile.thermal.a_matrix) < 1.0);
        }
        prop_assert_eq!(perturb_houses(&base, &rc, 0.25, 10, std_frac, seed).unwrap(), houses);
    }
}

#[test]
fn synthesis_is_deterministic_and_seed_sensitive() {
    let a = ScenarioFileSet::from_problem(&SynthSettings::scaled(3, 5).problem());
    let b = ScenarioFileSet::from_problem(&SynthSettings::scaled(3, 5).problem());
    let c = ScenarioFileSet::from_problem(&SynthSettings::scaled(3, 6).problem());
    assert_eq!(a, b);
    assert_ne!(a, c);
}
