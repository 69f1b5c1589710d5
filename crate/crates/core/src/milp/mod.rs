//! Solver-agnostic sparse MILP and the translation of a planning problem into one.

mod builder;
mod extract;
mod index;
pub mod mps;

use std::fmt;

use thiserror::Error;

pub use builder::{build, build_with, BuildError, BuildOptions, ControlMode, ModelBuilder, ModelSize, SimpleSchedules};
pub use extract::{extract_solution, ExtractError, EXTRACTION_REL_TOL};
pub use index::{VarKey, VariableIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => lhs <= self.rhs + tol,
            Relation::Ge => lhs >= self.rhs - tol,
            Relation::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("constraint {row} references undefined variable {var}")]
    UndefinedVariable { row: String, var: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("binary variable {0} must have bounds within {{0, 1}}")]
    BadBinaryBounds(usize),
    #[error("variable {var} has lower bound {lower} above upper bound {upper}")]
    CrossedBounds { var: usize, lower: f64, upper: f64 },
}

/// A minimization problem `min cᵀx + offset` over sparse rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Constant added to the objective; carries costs fixed by the inputs.
    pub objective_offset: f64,
}

impl MilpModel {
    pub fn add_variable(&mut self, kind: VarKind, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable {
            kind,
            lower,
            upper,
            cost: 0.0,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_cost(&mut self, var: VarId, coefficient: f64) {
        self.variables[var.0].cost += coefficient;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    pub fn binary_count(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn objective(&self, values: &[f64]) -> f64 {
        self.objective_offset
            + self
                .variables
                .iter()
                .zip(values)
                .map(|(v, x)| v.cost * x)
                .sum::<f64>()
    }

    /// Checks bounds, rows and integrality of `values` within `tol`.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(v, &x)| {
                x >= v.lower - tol
                    && x <= v.upper + tol
                    && (v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol)
            })
            && self.constraints.iter().all(|c| c.is_satisfied(values, tol))
    }

    /// Structural invariants: defined references, finite data, binary bounds.
    pub fn check(&self) -> Result<(), ModelError> {
        for (i, v) in self.variables.iter().enumerate() {
            if v.cost.is_nan() || v.cost.is_infinite() || v.lower.is_nan() || v.upper.is_nan() {
                return Err(ModelError::NonFinite(format!("variable {i}")));
            }
            if v.lower > v.upper {
                return Err(ModelError::CrossedBounds {
                    var: i,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if v.kind == VarKind::Binary && !(v.lower >= 0.0 && v.upper <= 1.0) {
                return Err(ModelError::BadBinaryBounds(i));
            }
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() {
                return Err(ModelError::NonFinite(c.name.clone()));
            }
            for &(var, coef) in &c.terms {
                if var.0 >= self.variables.len() {
                    return Err(ModelError::UndefinedVariable {
                        row: c.name.clone(),
                        var: var.0,
                    });
                }
                if !coef.is_finite() {
                    return Err(ModelError::NonFinite(c.name.clone()));
                }
            }
        }
        if !self.objective_offset.is_finite() {
            return Err(ModelError::NonFinite("objective offset".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}
