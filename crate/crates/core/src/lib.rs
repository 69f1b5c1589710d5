//! Community microgrid capacity planning with building thermal dynamics.
//!
//! A [`problem::PlanningProblem`] describes candidate generators, storage and
//! renewables together with a set of houses whose HVAC units can either follow
//! a local thermostat or be scheduled centrally. [`milp::build`] turns it into
//! a mixed-integer program, [`solver`] solves it with HiGHS, and
//! [`planner::plan`] runs the whole pipeline.

pub mod error;
pub mod finance;
pub mod fixtures;
pub mod linalg;
pub mod milp;
pub mod oracle;
pub mod planner;
pub mod problem;
pub mod scenario;
pub mod solution;
pub mod solver;
pub mod thermal;

pub use error::InvalidArgument;
pub use planner::{plan, ControlKind, PlanRun};
pub use problem::PlanningProblem;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/thermal.md")]
    mod thermal {}
    #[doc = include_str!("../../../book/src/costs.md")]
    mod costs {}
    #[doc = include_str!("../../../book/src/control.md")]
    mod control {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
