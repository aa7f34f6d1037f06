//! Small dense linear programs.
//!
//! Every problem in this crate has at most a dozen variables and a couple of
//! dozen constraints, so the solver is a plain two-phase tableau simplex with
//! Bland's pivot rule. All variables are implicitly nonnegative.

mod region;
mod simplex;

pub use region::{trace_region, RegionModel, RegionPoint, Weights, DEDUP_DISTANCE};
pub use simplex::solve_lp;

use serde::Serialize;
use thiserror::Error;

/// Feasibility tolerance used by [`LpSolution`] self-checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {index} has {found} coefficients, expected {expected}")]
    Malformed {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("objective has {found} coefficients, expected {expected}")]
    MalformedObjective { expected: usize, found: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded (objective {objective:?})")]
    Unbounded { objective: Vec<f64> },
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        Self { coeffs, sense, rhs }
    }

    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum()
    }

    /// Signed violation: positive when the point breaks the constraint.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let lhs = self.lhs(point);
        match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A maximization problem over nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn with_objective(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn push(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint::new(coeffs, sense, rhs));
    }

    /// Pins variable `var` to `value` with an equality row.
    pub fn fix(&mut self, var: usize, value: f64) {
        let mut coeffs = vec![0.0; self.num_vars];
        coeffs[var] = 1.0;
        self.push(coeffs, Sense::Eq, value);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars {
            return Err(LpError::MalformedObjective {
                expected: self.num_vars,
                found: self.objective.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        for (index, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::Malformed {
                    index,
                    expected: self.num_vars,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite(format!("constraint {index}")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Converts non-optimal outcomes into errors, keeping the status
    /// diagnostics for the caller.
    pub fn into_optimal(self, lp: &LinearProgram) -> Result<Self, LpError> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(LpError::Infeasible),
            LpStatus::Unbounded => Err(LpError::Unbounded {
                objective: lp.objective.clone(),
            }),
        }
    }
}

/// True iff every constraint and every nonnegativity bound holds within `tol`.
pub fn check_feasible(lp: &LinearProgram, point: &[f64], tol: f64) -> bool {
    if point.len() != lp.num_vars {
        return false;
    }
    point.iter().all(|&x| x >= -tol)
        && lp.constraints.iter().all(|c| c.violation(point) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_constraint_list_is_feasible() {
        let lp = LinearProgram::new(3);
        assert!(check_feasible(&lp, &[0.0, 1.5, 7.0], 1e-9));
    }

    #[test]
    fn violated_upper_bound() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![1.0], Sense::Le, 0.5);
        assert!(!check_feasible(&lp, &[0.6], 1e-9));
        assert!(check_feasible(&lp, &[0.5], 1e-9));
    }

    #[test]
    fn negative_coordinate_is_infeasible() {
        let lp = LinearProgram::new(2);
        assert!(!check_feasible(&lp, &[0.1, -1e-6], 1e-9));
    }

    #[test]
    fn wrong_length_point_is_infeasible() {
        let lp = LinearProgram::new(2);
        assert!(!check_feasible(&lp, &[0.1], 1e-9));
    }

    #[test]
    fn validate_catches_ragged_rows() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(lp.validate(), Err(LpError::Malformed { index: 0, .. })));
    }
}
