//! Generic bounded integer linear program, shared by the exact solver
//! and the QUBO transformation.
//!
//! Coefficients are exact rationals. Builders convert measured rates to
//! fixed-point rationals so feasibility checks stay exact.

use num::rational::Ratio;
use num::Signed;
use std::fmt::Write as _;
use thiserror::Error;

/// Exact coefficient type.
pub type Rat = Ratio<i128>;

/// Fixed-point conversion: `round(x * denom) / denom`.
pub fn rat_fixed(x: f64, denom: i128) -> Rat {
    debug_assert!(x.is_finite());
    Rat::new((x * denom as f64).round() as i128, denom)
}

pub fn rat_int(x: i128) -> Rat {
    Rat::from_integer(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum VarKind {
    Binary,
    Integer { lo: i64, hi: i64 },
    Continuous { lo: Rat, hi: Rat },
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

impl Variable {
    pub fn is_integral(&self) -> bool {
        !matches!(self.kind, VarKind::Continuous { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient); one entry per variable at most.
    pub terms: Vec<(usize, Rat)>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

/// A linear program over binary, bounded-integer and bounded-continuous
/// variables, with `<=` and `=` constraints and a minimization objective.
#[derive(Debug, Clone, Default)]
pub struct IlpProblem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Objective coefficients (minimize); variables absent are zero.
    pub objective: Vec<(usize, Rat)>,
}

#[derive(Debug, Error)]
pub enum IlpError {
    #[error("constraint {0:?} references undeclared variable {1}")]
    UndeclaredVariable(String, usize),
    #[error("variable {0:?} has an empty domain")]
    EmptyDomain(String),
    #[error("variable {0:?} has non-finite bounds")]
    UnboundedVariable(String),
    #[error("constraint {0:?} names variable {1} twice")]
    DuplicateTerm(String, usize),
}

/// One assigned variable value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(Rat),
}

impl Value {
    pub fn as_rat(&self) -> Rat {
        match self {
            Value::Int(i) => Rat::from_integer(*i as i128),
            Value::Real(r) => *r,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Int(i) => *i as f64,
            Value::Real(r) => rat_to_f64(*r),
        }
    }
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A complete variable assignment with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub values: Vec<Value>,
    pub objective: Rat,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub constraint: String,
    /// How far the left-hand side exceeds (Le) or misses (Eq) the
    /// right-hand side.
    pub amount: Rat,
}

impl IlpProblem {
    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.variables.push(Variable { name: name.into(), kind: VarKind::Binary });
        self.variables.len() - 1
    }

    pub fn add_integer(&mut self, name: impl Into<String>, lo: i64, hi: i64) -> usize {
        self.variables
            .push(Variable { name: name.into(), kind: VarKind::Integer { lo, hi } });
        self.variables.len() - 1
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lo: Rat, hi: Rat) -> usize {
        self.variables
            .push(Variable { name: name.into(), kind: VarKind::Continuous { lo, hi } });
        self.variables.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, Rat)>,
        cmp: Cmp,
        rhs: Rat,
    ) {
        self.constraints.push(Constraint { name: name.into(), terms, cmp, rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, Rat)>) {
        self.objective = terms;
    }

    pub fn validate(&self) -> Result<(), IlpError> {
        for c in &self.constraints {
            let mut seen = vec![false; self.variables.len()];
            for &(v, _) in &c.terms {
                if v >= self.variables.len() {
                    return Err(IlpError::UndeclaredVariable(c.name.clone(), v));
                }
                if seen[v] {
                    return Err(IlpError::DuplicateTerm(c.name.clone(), v));
                }
                seen[v] = true;
            }
        }
        for &(v, _) in &self.objective {
            if v >= self.variables.len() {
                return Err(IlpError::UndeclaredVariable("objective".into(), v));
            }
        }
        for var in &self.variables {
            match &var.kind {
                VarKind::Binary => {}
                VarKind::Integer { lo, hi } => {
                    if lo > hi {
                        return Err(IlpError::EmptyDomain(var.name.clone()));
                    }
                }
                VarKind::Continuous { lo, hi } => {
                    if lo > hi {
                        return Err(IlpError::EmptyDomain(var.name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact objective value of a full assignment.
    pub fn objective_value(&self, values: &[Value]) -> Rat {
        self.objective
            .iter()
            .map(|&(v, c)| c * values[v].as_rat())
            .sum()
    }

    /// Exact constraint check; returns all violations with magnitudes.
    pub fn check_assignment(&self, values: &[Value]) -> Vec<Violation> {
        let mut out = Vec::new();
        for c in &self.constraints {
            let lhs: Rat = c.terms.iter().map(|&(v, a)| a * values[v].as_rat()).sum();
            let violated = match c.cmp {
                Cmp::Le => lhs > c.rhs,
                Cmp::Eq => lhs != c.rhs,
            };
            if violated {
                out.push(Violation { constraint: c.name.clone(), amount: (lhs - c.rhs).abs() });
            }
        }
        out
    }

    /// Checks that every value lies within its variable's declared domain.
    pub fn values_in_bounds(&self, values: &[Value]) -> bool {
        self.variables.iter().zip(values).all(|(var, val)| match (&var.kind, val) {
            (VarKind::Binary, Value::Int(i)) => *i == 0 || *i == 1,
            (VarKind::Integer { lo, hi }, Value::Int(i)) => lo <= i && i <= hi,
            (VarKind::Continuous { lo, hi }, v) => {
                let r = v.as_rat();
                *lo <= r && r <= *hi
            }
            _ => false,
        })
    }

    /// Human-readable LP-style dump for cross-checking with external
    /// tools.
    pub fn to_lp_text(&self) -> String {
        let fmt_rat = |r: Rat| -> String {
            let v = rat_to_f64(r);
            format!("{v}")
        };
        let fmt_terms = |terms: &[(usize, Rat)]| -> String {
            let mut s = String::new();
            for (i, &(v, c)) in terms.iter().enumerate() {
                let cf = rat_to_f64(c);
                if i == 0 {
                    let _ = write!(s, "{cf} {}", self.variables[v].name);
                } else if cf < 0.0 {
                    let _ = write!(s, " - {} {}", -cf, self.variables[v].name);
                } else {
                    let _ = write!(s, " + {cf} {}", self.variables[v].name);
                }
            }
            s
        };

        let mut out = String::new();
        out.push_str("Minimize\n obj: ");
        out.push_str(&fmt_terms(&self.objective));
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let op = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Eq => "=",
            };
            let _ = writeln!(out, " {}: {} {} {}", c.name, fmt_terms(&c.terms), op, fmt_rat(c.rhs));
        }
        out.push_str("Bounds\n");
        for v in &self.variables {
            match &v.kind {
                VarKind::Binary => {}
                VarKind::Integer { lo, hi } => {
                    let _ = writeln!(out, " {} <= {} <= {}", lo, v.name, hi);
                }
                VarKind::Continuous { lo, hi } => {
                    let _ = writeln!(out, " {} <= {} <= {}", fmt_rat(*lo), v.name, fmt_rat(*hi));
                }
            }
        }
        let binaries: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Binary))
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            out.push_str("Binaries\n");
            for b in binaries {
                let _ = writeln!(out, " {b}");
            }
        }
        let generals: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Integer { .. }))
            .map(|v| v.name.as_str())
            .collect();
        if !generals.is_empty() {
            out.push_str("Generals\n");
            for g in generals {
                let _ = writeln!(out, " {g}");
            }
        }
        out.push_str("End\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{One, Zero};

    #[test]
    fn fixed_point_conversion_is_exact() {
        assert_eq!(rat_fixed(319.0, 1000), Rat::new(319000, 1000));
        assert_eq!(rat_fixed(0.1, 1_000_000), Rat::new(100_000, 1_000_000));
        assert_eq!(rat_to_f64(rat_fixed(0.1, 10)), 0.1);
    }

    #[test]
    fn check_assignment_reports_violations() {
        let mut p = IlpProblem::default();
        let a = p.add_binary("a");
        let b = p.add_binary("b");
        p.add_constraint("one", vec![(a, Rat::one()), (b, Rat::one())], Cmp::Eq, Rat::one());
        p.validate().unwrap();
        let ok = vec![Value::Int(1), Value::Int(0)];
        assert!(p.check_assignment(&ok).is_empty());
        let bad = vec![Value::Int(1), Value::Int(1)];
        let v = p.check_assignment(&bad);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].amount, Rat::one());
    }

    #[test]
    fn lp_text_contains_sections() {
        let mut p = IlpProblem::default();
        let g = p.add_binary("g[0]");
        let w = p.add_integer("w[0]", 0, 31);
        p.add_constraint(
            "load",
            vec![(w, rat_int(-100)), (g, rat_fixed(319.0, 1000))],
            Cmp::Le,
            Rat::zero(),
        );
        p.set_objective(vec![(w, Rat::one())]);
        let text = p.to_lp_text();
        assert!(text.contains("Minimize"));
        assert!(text.contains("Subject To"));
        assert!(text.contains("Binaries"));
        assert!(text.contains("Generals"));
        assert!(text.contains("w[0]"));
    }
}
