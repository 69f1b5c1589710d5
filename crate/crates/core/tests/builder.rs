use mgplan_core::finance::annuity_factor;
use mgplan_core::fixtures::small_problem;
use mgplan_core::milp::{build, build_with, BuildOptions, ControlMode, ModelSize, Relation, VarKey, VarKind};
use mgplan_core::problem::{DerClass, PlanningProblem};
use proptest::prelude::*;

fn no_der(houses: usize, days: usize, intervals: usize) -> PlanningProblem {
    let mut p = small_problem(houses, days, intervals);
    p.res.clear();
    p.dfg.clear();
    p.ess.clear();
    p
}

fn cost_of(problem: &PlanningProblem, key: VarKey) -> f64 {
    let (model, index) = build(problem, &ControlMode::Surrogate).unwrap();
    model.variables[index.id(&key).unwrap().0].cost
}

#[test]
fn one_house_four_intervals_counts() {
    let p = no_der(1, 1, 4);
    let (model, index) = build(&p, &ControlMode::Surrogate).unwrap();
    // 4 x (2 switches + shed + 3 temperatures + 2 slacks) + 4 PCC + 1 peak
    assert_eq!(model.variables.len(), 37);
    assert_eq!(index.len(), 37);

    let simple = ControlMode::simple_for(&p);
    let (model, _) = build(&p, &simple).unwrap();
    assert_eq!(model.variables.len(), 9);
    assert_eq!(model.binary_count(), 0);
}

#[test]
fn simple_mode_discomfort_is_a_constant() {
    let p = no_der(1, 1, 4);
    let simple = ControlMode::simple_for(&p);
    let (model, _) = build(&p, &simple).unwrap();
    let ControlMode::Simple(s) = &simple else { unreachable!() };
    let house = &p.houses[0].thermal;
    let expected: f64 = s.runs[0][0]
        .indoor_after()
        .enumerate()
        .map(|(t, x)| house.discomfort_cost_per_degc * (x - house.desired_temp_c[0][t]).abs())
        .sum::<f64>()
        * p.day_weight(0);
    assert!((model.objective_offset - expected).abs() < 1e-12 * expected.max(1.0));
}

#[test]
fn key_round_trip() {
    let p = small_problem(2, 2, 6);
    let (_, index) = build(&p, &ControlMode::Surrogate).unwrap();
    for (i, key) in index.keys().iter().enumerate() {
        let id = index.id(key).unwrap();
        assert_eq!(id.0, i);
        assert_eq!(index.key(id), *key);
    }
}

#[test]
fn investment_coefficients() {
    let mut p = small_problem(1, 1, 4);
    p.res[0].name = "WT".into();
    p.res[0].kind = mgplan_core::problem::ResKind::Wind;
    p.res[0].p_max_kw = 120.0;
    p.res[0].capital_cost_per_kw = 2700.0;
    let af = annuity_factor(0.05, 10.0).unwrap();
    let wt = cost_of(&p, VarKey::Install { class: DerClass::Wind, unit: 0 });
    assert!((wt - af * 2700.0 * 120.0).abs() < 1e-9);
    assert!((wt - 41_959.49).abs() < 0.01);
    let es1 = cost_of(&p, VarKey::Install { class: DerClass::Ess, unit: 0 });
    assert!((es1 - 7_273.0).abs() < 0.05, "ES1 annual cost {es1}");
}

#[test]
fn zero_candidates_leave_an_empty_budget_row() {
    let p = no_der(1, 1, 4);
    let (model, _) = build(&p, &ControlMode::Surrogate).unwrap();
    let row = model.constraints.iter().find(|c| c.name == "budget").unwrap();
    assert!(row.terms.is_empty());
    assert_eq!(row.relation, Relation::Le);
    assert_eq!(row.rhs, p.budget);
}

#[test]
fn operation_cost_coefficients() {
    let mut p = small_problem(1, 1, 4);
    p.days[0].pcc_price_per_kwh = vec![0.10; 4];
    let dt = p.days[0].dt_hours;
    let w = p.day_weight(0);
    // 100 kW bought for one six-hour interval, weight one day.
    let pcc = cost_of(&p, VarKey::Pcc { day: 0, t: 1 });
    assert!((pcc - 0.10 * dt * w).abs() < 1e-12);

    let mut q = small_problem(1, 1, 96);
    q.days[0].pcc_price_per_kwh = vec![0.10; 96];
    let pcc = cost_of(&q, VarKey::Pcc { day: 0, t: 5 });
    assert!((100.0 * pcc - 2.5).abs() < 1e-12);
    let block = cost_of(&q, VarKey::DfgBlock { unit: 0, day: 0, t: 5, block: 0 });
    assert!((block - 0.2392 * 0.25).abs() < 1e-12);
    let slack = cost_of(&q, VarKey::SlackAbove { house: 0, day: 0, t: 5 });
    assert!((2.0 * slack - 0.1).abs() < 1e-12);
}

#[test]
fn storage_dynamics_arithmetic() {
    let p = small_problem(1, 1, 96);
    let (model, index) = build(&p, &ControlMode::Surrogate).unwrap();
    let row = model
        .constraints
        .iter()
        .find(|c| c.name == "soc_dyn[b0,d0,t5]")
        .expect("dynamics row");
    let id = |k| index.id(&k).unwrap().0;
    let mut values = vec![0.0; model.variables.len()];
    values[id(VarKey::EssSoc { unit: 0, day: 0, t: 4 })] = 60.0;
    values[id(VarKey::EssCharge { unit: 0, day: 0, t: 5 })] = 90.0;
    values[id(VarKey::EssSoc { unit: 0, day: 0, t: 5 })] = 60.0 + 21.375;
    assert!(row.is_satisfied(&values, 1e-9));

    values[id(VarKey::EssCharge { unit: 0, day: 0, t: 5 })] = 0.0;
    values[id(VarKey::EssDischarge { unit: 0, day: 0, t: 5 })] = 90.0;
    values[id(VarKey::EssSoc { unit: 0, day: 0, t: 5 })] = 60.0 - 90.0 * 0.25 / 0.95;
    assert!(row.is_satisfied(&values, 1e-9));
    assert!((90.0_f64 * 0.25 / 0.95 - 23.684).abs() < 1e-3);
}

#[test]
fn renewable_cap_follows_capacity_factor() {
    let mut p = small_problem(1, 1, 4);
    p.res[0].kind = mgplan_core::problem::ResKind::Wind;
    p.res[0].p_max_kw = 120.0;
    p.res[0].capacity_factor[0] = vec![0.0, 0.5, 1.0, 0.25];
    let (model, index) = build(&p, &ControlMode::Surrogate).unwrap();
    let ub = |t| model.variables[index.id(&VarKey::WindOutput { unit: 0, day: 0, t }).unwrap().0].upper;
    assert_eq!(ub(0), 0.0);
    assert_eq!(ub(1), 60.0);
}

#[test]
fn comfort_band_becomes_bounds() {
    let p = small_problem(1, 1, 4);
    let (model, index) = build(&p, &ControlMode::Surrogate).unwrap();
    let v = &model.variables[index.id(&VarKey::TempIndoor { house: 0, day: 0, t: 2 }).unwrap().0];
    assert_eq!((v.lower, v.upper), (19.0, 23.0));
}

#[test]
fn binary_startup_option_counts() {
    let p = small_problem(2, 2, 8);
    for binary_startup in [false, true] {
        let options = BuildOptions {
            binary_startup,
            ..BuildOptions::default()
        };
        let (model, index) = build_with(&p, &ControlMode::Surrogate, options).unwrap();
        let beta = model.variables[index.id(&VarKey::DfgStartup { unit: 0, day: 1, t: 3 }).unwrap().0].kind;
        let expected = if binary_startup { VarKind::Binary } else { VarKind::Continuous };
        assert_eq!(beta, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn size_formula_matches_built_model(
        houses in 1usize..4,
        days in 1usize..4,
        intervals in prop::sample::select(vec![4usize, 6, 8, 12]),
        surrogate in any::<bool>(),
        binary_startup in any::<bool>(),
        restrict in any::<bool>(),
        drop_der in any::<bool>(),
    ) {
        let mut p = small_problem(houses, days, intervals);
        if drop_der {
            p.dfg.clear();
            p.res.clear();
        }
        let mode = if surrogate { ControlMode::Surrogate } else { ControlMode::simple_for(&p) };
        let options = BuildOptions { binary_startup, restrict_hvac_to_day_mode: restrict };
        let (model, _) = build_with(&p, &mode, options).unwrap();
        let predicted = ModelSize::predict(&p, &mode, options);
        prop_assert_eq!(predicted.variables, model.variables.len());
        prop_assert_eq!(predicted.binaries, model.binary_count());
        prop_assert_eq!(predicted.constraints, model.constraints.len());
    }
}
