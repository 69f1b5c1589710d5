use std::ffi::CString;

use mgplan_core::fixtures::{random_tiny_instance, small_problem};
use mgplan_core::milp::mps::write_mps;
use mgplan_core::milp::{build, ControlMode, MilpModel};
use mgplan_core::solver::{solve, SolveOptions};

/// Reads an MPS file with HiGHS's own parser and returns its optimal objective.
fn highs_objective_from_file(path: &std::path::Path) -> f64 {
    let file = CString::new(path.to_str().unwrap()).unwrap();
    let flag = CString::new("output_flag").unwrap();
    let gap = CString::new("mip_rel_gap").unwrap();
    unsafe {
        let h = highs_sys::Highs_create();
        highs_sys::Highs_setBoolOptionValue(h, flag.as_ptr(), 0);
        highs_sys::Highs_setDoubleOptionValue(h, gap.as_ptr(), 0.0);
        let read = highs_sys::Highs_readModel(h, file.as_ptr());
        // A warning is fine: the reader drops round-off sized coefficients.
        assert_ne!(read, highs_sys::kHighsStatusError as _, "readModel");
        highs_sys::Highs_run(h);
        let objective = highs_sys::Highs_getObjectiveValue(h);
        highs_sys::Highs_destroy(h);
        objective
    }
}

fn round_trip(model: &MilpModel, named: bool, index: &mgplan_core::milp::VariableIndex) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.mps");
    let file = std::fs::File::create(&path).unwrap();
    write_mps(model, named.then_some(index), std::io::BufWriter::new(file)).unwrap();
    let direct = solve(model, &SolveOptions::with_gap(0.0)).unwrap().objective;
    let read = highs_objective_from_file(&path);
    assert!((direct - read).abs() <= 1e-6 * direct.abs().max(1.0), "direct {direct} read back {read}");
}

#[test]
fn surrogate_model_survives_mps() {
    let p = small_problem(1, 2, 6);
    let (model, index) = build(&p, &ControlMode::Surrogate).unwrap();
    round_trip(&model, true, &index);
    round_trip(&model, false, &index);
}

#[test]
fn simple_model_keeps_its_offset() {
    let p = small_problem(2, 1, 8);
    let (model, index) = build(&p, &ControlMode::simple_for(&p)).unwrap();
    assert!(model.objective_offset > 0.0);
    round_trip(&model, true, &index);
}

#[test]
fn random_instances_survive_mps() {
    for seed in [1, 2] {
        let (model, index) = build(&random_tiny_instance(seed), &ControlMode::Surrogate).unwrap();
        round_trip(&model, true, &index);
    }
}
