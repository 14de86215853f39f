//! Exact branch-and-bound solver.
//!
//! Depth-first search over the integer variables in declaration order,
//! values ascending. Interval propagation on floating-point domains
//! guides the search; every candidate leaf is re-verified with exact
//! rational arithmetic before it can become the incumbent, so the
//! reported optimum satisfies every constraint exactly.
//!
//! Because leaves are visited in lexicographic order and the incumbent
//! is only replaced on strict improvement, the returned optimum is the
//! lexicographically smallest among all optimal assignments.
//!
//! Two structural devices keep the search tree small:
//!
//! * equality rows of the form `sum of binaries = 1` are detected as
//!   selection groups, and row bounding uses the fact that exactly one
//!   member of each group will be chosen;
//! * a constraint row whose coefficients on the objective's support are
//!   proportional to the objective acts as an objective cut: it yields
//!   an objective lower bound from the loads committed so far.

use num::{Signed, Zero};
use thiserror::Error;

use super::problem::{
    rat_to_f64, Assignment, Cmp, IlpProblem, Rat, Value, VarKind,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("node budget of {budget} exhausted after exploring {explored} nodes")]
    NodeBudgetExceeded { budget: u64, explored: u64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Optimal(Assignment),
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_budget: 10_000_000 }
    }
}

#[derive(Debug, Default)]
pub struct Solver {
    pub config: SolverConfig,
}

const FEAS_TOL: f64 = 1e-7;
const BOUND_GUARD: f64 = 1e-9;

struct Row {
    terms: Vec<(usize, f64)>,
    cmp: Cmp,
    rhs: f64,
    /// Group lookup: (group id, member coefficients in this row).
    groups: Vec<(usize, Vec<(usize, f64)>)>,
    /// Terms on variables that belong to no group.
    free_terms: Vec<(usize, f64)>,
}

struct Cut {
    row: usize,
    /// Row = rest - scale * objective <= rhs.
    scale: f64,
}

struct Search<'a> {
    problem: &'a IlpProblem,
    rows: Vec<Row>,
    rows_of_var: Vec<Vec<usize>>,
    obj_coef: Vec<f64>,
    integral: Vec<bool>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    trail: Vec<(usize, f64, f64)>,
    /// Variable -> group id.
    group_of: Vec<Option<usize>>,
    /// Chosen member per group, if any.
    group_chosen: Vec<Option<usize>>,
    group_members: Vec<Vec<usize>>,
    cuts: Vec<Cut>,
    objective_integral: bool,
    branch_order: Vec<usize>,
    incumbent: Option<Assignment>,
    incumbent_obj: f64,
    nodes: u64,
    budget: u64,
    /// Exact lower bound over the declared domains; once an incumbent
    /// attains it, the search can stop.
    root_floor: Rat,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config }
    }

    pub fn solve(&self, problem: &IlpProblem) -> Result<SolveOutcome, SolveError> {
        problem
            .validate()
            .map_err(|e| SolveError::InvalidProblem(e.to_string()))?;

        let n = problem.variables.len();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        let mut integral = vec![false; n];
        for (i, v) in problem.variables.iter().enumerate() {
            match &v.kind {
                VarKind::Binary => {
                    lo[i] = 0.0;
                    hi[i] = 1.0;
                    integral[i] = true;
                }
                VarKind::Integer { lo: l, hi: h } => {
                    lo[i] = *l as f64;
                    hi[i] = *h as f64;
                    integral[i] = true;
                }
                VarKind::Continuous { lo: l, hi: h } => {
                    lo[i] = rat_to_f64(*l);
                    hi[i] = rat_to_f64(*h);
                }
            }
        }

        let mut obj_coef = vec![0.0; n];
        for &(v, c) in &problem.objective {
            obj_coef[v] = rat_to_f64(c);
        }
        let objective_integral = problem.objective.iter().all(|&(v, c)| {
            c.denom().abs() == 1 && problem.variables[v].is_integral()
        });

        // Selection groups: equality rows "sum of binaries = 1".
        let mut group_of = vec![None; n];
        let mut group_members: Vec<Vec<usize>> = Vec::new();
        for c in &problem.constraints {
            let is_gub = c.cmp == Cmp::Eq
                && c.rhs == Rat::from_integer(1)
                && c.terms.len() >= 2
                && c.terms.iter().all(|&(v, a)| {
                    a == Rat::from_integer(1)
                        && matches!(problem.variables[v].kind, VarKind::Binary)
                        && group_of[v].is_none()
                });
            if is_gub {
                let gid = group_members.len();
                for &(v, _) in &c.terms {
                    group_of[v] = Some(gid);
                }
                group_members.push(c.terms.iter().map(|&(v, _)| v).collect());
            }
        }

        let mut rows = Vec::with_capacity(problem.constraints.len());
        let mut rows_of_var: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ri, c) in problem.constraints.iter().enumerate() {
            let terms: Vec<(usize, f64)> =
                c.terms.iter().map(|&(v, a)| (v, rat_to_f64(a))).collect();
            for &(v, _) in &terms {
                rows_of_var[v].push(ri);
            }
            let mut groups: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
            let mut free_terms = Vec::new();
            for &(v, a) in &terms {
                match group_of[v] {
                    Some(g) => match groups.iter_mut().find(|(gid, _)| *gid == g) {
                        Some((_, members)) => members.push((v, a)),
                        None => groups.push((g, vec![(v, a)])),
                    },
                    None => free_terms.push((v, a)),
                }
            }
            rows.push(Row { terms, cmp: c.cmp, rhs: rat_to_f64(c.rhs), groups, free_terms });
        }

        // Objective cuts: Le rows whose coefficients on the objective
        // support equal -scale * objective, with the rest disjoint.
        let obj_support: Vec<usize> = (0..n).filter(|&v| obj_coef[v] != 0.0).collect();
        let support_groupfree = obj_support.iter().all(|&v| group_of[v].is_none());
        let mut cuts = Vec::new();
        if !obj_support.is_empty() && support_groupfree {
            'rows: for (ri, row) in rows.iter().enumerate() {
                if row.cmp != Cmp::Le {
                    continue;
                }
                let mut scale: Option<f64> = None;
                for &v in &obj_support {
                    let a = row
                        .terms
                        .iter()
                        .find(|&&(tv, _)| tv == v)
                        .map(|&(_, a)| a)
                        .unwrap_or(0.0);
                    if a >= 0.0 {
                        continue 'rows;
                    }
                    let s = -a / obj_coef[v];
                    if s <= 0.0 {
                        continue 'rows;
                    }
                    match scale {
                        None => scale = Some(s),
                        Some(prev) if (prev - s).abs() <= 1e-12 * prev.abs() => {}
                        _ => continue 'rows,
                    }
                }
                if let Some(s) = scale {
                    cuts.push(Cut { row: ri, scale: s });
                }
            }
        }

        // Exact floor of the objective over the declared boxes.
        let root_floor: Rat = problem
            .objective
            .iter()
            .map(|&(v, c)| {
                let (l, h) = match &problem.variables[v].kind {
                    VarKind::Binary => (Rat::zero(), Rat::from_integer(1)),
                    VarKind::Integer { lo, hi } => {
                        (Rat::from_integer(*lo as i128), Rat::from_integer(*hi as i128))
                    }
                    VarKind::Continuous { lo, hi } => (*lo, *hi),
                };
                if c.is_negative() {
                    c * h
                } else {
                    c * l
                }
            })
            .sum();

        let branch_order: Vec<usize> = (0..n).filter(|&v| integral[v]).collect();

        let mut search = Search {
            problem,
            rows,
            rows_of_var,
            obj_coef,
            integral,
            lo,
            hi,
            trail: Vec::new(),
            group_of,
            group_chosen: vec![None; group_members.len()],
            group_members,
            cuts,
            objective_integral,
            branch_order,
            incumbent: None,
            incumbent_obj: f64::INFINITY,
            nodes: 0,
            budget: self.config.node_budget,
            root_floor,
        };

        search.dfs()?;
        match search.incumbent.take() {
            Some(a) => Ok(SolveOutcome::Optimal(a)),
            None => Ok(SolveOutcome::Infeasible),
        }
    }
}

/// Signals from a node visit: whether to keep searching siblings.
enum Flow {
    Continue,
    /// The incumbent reached the exact root floor: unwind everything.
    StopAll,
}

impl<'a> Search<'a> {
    fn dfs(&mut self) -> Result<Flow, SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::NodeBudgetExceeded {
                budget: self.budget,
                explored: self.nodes,
            });
        }

        let mark = self.trail.len();
        if !self.propagate() {
            self.rewind(mark);
            return Ok(Flow::Continue);
        }

        // Objective lower bound.
        let mut lb = self.objective_box_bound();
        for ci in 0..self.cuts.len() {
            lb = lb.max(self.cut_bound(ci));
        }
        if self.objective_integral {
            lb = (lb - BOUND_GUARD).ceil();
        }
        if self.incumbent.is_some() {
            // The incumbent was found earlier in lexicographic order, so
            // a subtree that cannot strictly improve may be pruned.
            let prune = if self.objective_integral {
                lb >= self.incumbent_obj - 0.5
            } else {
                lb >= self.incumbent_obj - 1e-12 * (1.0 + self.incumbent_obj.abs())
            };
            if prune {
                self.rewind(mark);
                return Ok(Flow::Continue);
            }
        }

        let branch_var = self
            .branch_order
            .iter()
            .copied()
            .find(|&v| self.hi[v] - self.lo[v] > 0.5);

        let flow = match branch_var {
            None => {
                let improved = self.try_leaf();
                if improved && self.stop_reached() {
                    Flow::StopAll
                } else {
                    Flow::Continue
                }
            }
            Some(v) => {
                let lo = self.lo[v] as i64;
                let hi = self.hi[v] as i64;
                let mut flow = Flow::Continue;
                for val in lo..=hi {
                    let mark_child = self.trail.len();
                    self.set_lo(v, val as f64);
                    self.set_hi(v, val as f64);
                    let f = self.dfs()?;
                    self.rewind(mark_child);
                    if matches!(f, Flow::StopAll) {
                        flow = Flow::StopAll;
                        break;
                    }
                }
                flow
            }
        };

        self.rewind(mark);
        Ok(flow)
    }

    fn stop_reached(&self) -> bool {
        match &self.incumbent {
            Some(inc) => inc.objective <= self.root_floor,
            None => false,
        }
    }

    // --- domains and trail ---

    fn set_lo(&mut self, v: usize, new_lo: f64) {
        if new_lo > self.lo[v] {
            self.trail.push((v, self.lo[v], f64::NAN));
            self.lo[v] = new_lo;
            self.on_domain_change(v);
        }
    }

    fn set_hi(&mut self, v: usize, new_hi: f64) {
        if new_hi < self.hi[v] {
            self.trail.push((v, f64::NAN, self.hi[v]));
            self.hi[v] = new_hi;
            self.on_domain_change(v);
        }
    }

    fn on_domain_change(&mut self, v: usize) {
        if let Some(g) = self.group_of[v] {
            if self.lo[v] > 0.5 {
                self.group_chosen[g] = Some(v);
            }
        }
    }

    fn rewind(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, old_lo, old_hi) = self.trail.pop().unwrap();
            if old_lo.is_nan() {
                self.hi[v] = old_hi;
            } else {
                self.lo[v] = old_lo;
            }
            if let Some(g) = self.group_of[v] {
                if self.group_chosen[g] == Some(v) && self.lo[v] < 0.5 {
                    self.group_chosen[g] = None;
                }
            }
        }
    }

    // --- propagation ---

    fn propagate(&mut self) -> bool {
        let mut queue: Vec<usize> = (0..self.rows.len()).collect();
        let mut queued = vec![true; self.rows.len()];
        let mut head = 0;
        while head < queue.len() {
            let ri = queue[head];
            queued[ri] = false;
            head += 1;
            if head > 64 * self.rows.len() + 1024 {
                // Propagation is converging too slowly; the node bound
                // still guarantees correctness without a fixpoint.
                break;
            }

            let row = &self.rows[ri];
            let mut min_sum = 0.0;
            let mut max_sum = 0.0;
            for &(v, a) in &row.terms {
                if a >= 0.0 {
                    min_sum += a * self.lo[v];
                    max_sum += a * self.hi[v];
                } else {
                    min_sum += a * self.hi[v];
                    max_sum += a * self.lo[v];
                }
            }
            let tol = FEAS_TOL * (1.0 + row.rhs.abs());
            if min_sum > row.rhs + tol {
                return false;
            }
            if row.cmp == Cmp::Eq && max_sum < row.rhs - tol {
                return false;
            }
            // Group-aware infeasibility: exactly one member per group
            // will be 1, so the committed minimum can be sharper.
            if !row.groups.is_empty() {
                let gmin = self.row_group_min(ri);
                if gmin > row.rhs + tol {
                    return false;
                }
            }

            // Bound tightening from both directions.
            let row = &self.rows[ri];
            let rhs = row.rhs;
            let cmp = row.cmp;
            let terms = row.terms.clone();
            let mut changed_vars: Vec<usize> = Vec::new();
            for &(v, a) in &terms {
                let own_min = if a >= 0.0 { a * self.lo[v] } else { a * self.hi[v] };
                let others_min = min_sum - own_min;
                // a*v <= rhs - others_min
                let bound = (rhs - others_min) / a;
                if a > 0.0 {
                    let mut new_hi = bound + BOUND_GUARD * (1.0 + bound.abs());
                    if self.integral[v] {
                        new_hi = new_hi.floor();
                    }
                    if new_hi < self.hi[v] {
                        self.set_hi(v, new_hi);
                        changed_vars.push(v);
                    }
                } else {
                    let mut new_lo = bound - BOUND_GUARD * (1.0 + bound.abs());
                    if self.integral[v] {
                        new_lo = new_lo.ceil();
                    }
                    if new_lo > self.lo[v] {
                        self.set_lo(v, new_lo);
                        changed_vars.push(v);
                    }
                }
                if cmp == Cmp::Eq {
                    let own_max = if a >= 0.0 { a * self.hi[v] } else { a * self.lo[v] };
                    let others_max = max_sum - own_max;
                    // a*v >= rhs - others_max
                    let bound = (rhs - others_max) / a;
                    if a > 0.0 {
                        let mut new_lo = bound - BOUND_GUARD * (1.0 + bound.abs());
                        if self.integral[v] {
                            new_lo = new_lo.ceil();
                        }
                        if new_lo > self.lo[v] {
                            self.set_lo(v, new_lo);
                            changed_vars.push(v);
                        }
                    } else {
                        let mut new_hi = bound + BOUND_GUARD * (1.0 + bound.abs());
                        if self.integral[v] {
                            new_hi = new_hi.floor();
                        }
                        if new_hi < self.hi[v] {
                            self.set_hi(v, new_hi);
                            changed_vars.push(v);
                        }
                    }
                }
                if self.lo[v] > self.hi[v] + 1e-12 {
                    return false;
                }
            }
            for v in changed_vars {
                for &r in &self.rows_of_var[v] {
                    if !queued[r] {
                        queued[r] = true;
                        queue.push(r);
                    }
                }
            }
        }
        true
    }

    /// Row minimum that accounts for selection groups: exactly one
    /// member of each group will be 1.
    fn row_group_min(&self, ri: usize) -> f64 {
        let row = &self.rows[ri];
        let mut sum = 0.0;
        for &(v, a) in &row.free_terms {
            sum += if a >= 0.0 { a * self.lo[v] } else { a * self.hi[v] };
        }
        for (gid, members) in &row.groups {
            match self.group_chosen[*gid] {
                Some(chosen) => {
                    if let Some(&(_, a)) = members.iter().find(|&&(v, _)| v == chosen) {
                        sum += a;
                    }
                }
                None => {
                    let present_active: Vec<f64> = members
                        .iter()
                        .filter(|&&(v, _)| self.hi[v] > 0.5)
                        .map(|&(_, a)| a)
                        .collect();
                    let absent_exists = self.group_members[*gid]
                        .iter()
                        .any(|&v| self.hi[v] > 0.5 && !members.iter().any(|&(m, _)| m == v));
                    let mut m = if absent_exists { 0.0 } else { f64::INFINITY };
                    for a in present_active {
                        m = m.min(a);
                    }
                    if m.is_finite() {
                        sum += m;
                    }
                }
            }
        }
        sum
    }

    fn objective_box_bound(&self) -> f64 {
        let mut lb = 0.0;
        for (v, &c) in self.obj_coef.iter().enumerate() {
            if c > 0.0 {
                lb += c * self.lo[v];
            } else if c < 0.0 {
                lb += c * self.hi[v];
            }
        }
        lb
    }

    fn cut_bound(&self, ci: usize) -> f64 {
        let cut = &self.cuts[ci];
        let row = &self.rows[cut.row];
        // rest(x) - scale * O(x) <= rhs  =>  O >= (rest_min - rhs) / scale
        let mut rest_min = 0.0;
        for &(v, a) in &row.free_terms {
            if self.obj_coef[v] != 0.0 {
                continue;
            }
            rest_min += if a >= 0.0 { a * self.lo[v] } else { a * self.hi[v] };
        }
        for (gid, members) in &row.groups {
            match self.group_chosen[*gid] {
                Some(chosen) => {
                    if let Some(&(_, a)) = members.iter().find(|&&(v, _)| v == chosen) {
                        rest_min += a;
                    }
                }
                None => {
                    let absent_exists = self.group_members[*gid]
                        .iter()
                        .any(|&v| self.hi[v] > 0.5 && !members.iter().any(|&(m, _)| m == v));
                    let mut m = if absent_exists { 0.0 } else { f64::INFINITY };
                    for &(v, a) in members {
                        if self.hi[v] > 0.5 {
                            m = m.min(a);
                        }
                    }
                    if m.is_finite() {
                        rest_min += m;
                    }
                }
            }
        }
        (rest_min - row.rhs) / cut.scale
    }

    // --- exact leaf handling ---

    /// All integer variables are fixed; resolve continuous variables
    /// exactly, verify every constraint and update the incumbent.
    /// Returns true when the incumbent improved.
    fn try_leaf(&mut self) -> bool {
        let n = self.problem.variables.len();
        let mut values: Vec<Value> = Vec::with_capacity(n);
        let mut cont_ivals: Vec<Option<(Rat, Rat)>> = vec![None; n];
        for (v, var) in self.problem.variables.iter().enumerate() {
            match &var.kind {
                VarKind::Binary | VarKind::Integer { .. } => {
                    values.push(Value::Int(self.lo[v].round() as i64));
                }
                VarKind::Continuous { lo, hi } => {
                    cont_ivals[v] = Some((*lo, *hi));
                    values.push(Value::Real(*lo));
                }
            }
        }

        // Exact interval propagation for continuous variables.
        for _ in 0..20 {
            let mut changed = false;
            for c in &self.problem.constraints {
                for &(v, a) in &c.terms {
                    let Some((clo, chi)) = cont_ivals[v] else { continue };
                    if a.is_zero() {
                        continue;
                    }
                    // Bounds of the other terms.
                    let mut others_min = Rat::zero();
                    let mut others_max = Rat::zero();
                    for &(w, b) in &c.terms {
                        if w == v {
                            continue;
                        }
                        match cont_ivals[w] {
                            None => {
                                let t = b * values[w].as_rat();
                                others_min += t;
                                others_max += t;
                            }
                            Some((wlo, whi)) => {
                                if b.is_positive() {
                                    others_min += b * wlo;
                                    others_max += b * whi;
                                } else {
                                    others_min += b * whi;
                                    others_max += b * wlo;
                                }
                            }
                        }
                    }
                    let mut new_lo = clo;
                    let mut new_hi = chi;
                    // a*v <= rhs - others_min
                    let b1 = (c.rhs - others_min) / a;
                    if a.is_positive() {
                        if b1 < new_hi {
                            new_hi = b1;
                        }
                    } else if b1 > new_lo {
                        new_lo = b1;
                    }
                    if c.cmp == Cmp::Eq {
                        // a*v >= rhs - others_max
                        let b2 = (c.rhs - others_max) / a;
                        if a.is_positive() {
                            if b2 > new_lo {
                                new_lo = b2;
                            }
                        } else if b2 < new_hi {
                            new_hi = b2;
                        }
                    }
                    if new_lo > new_hi {
                        return false;
                    }
                    if (new_lo, new_hi) != (clo, chi) {
                        cont_ivals[v] = Some((new_lo, new_hi));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        // Pick the objective-optimal end of each continuous interval.
        for (v, ival) in cont_ivals.iter().enumerate() {
            if let Some((clo, chi)) = ival {
                let c = self
                    .problem
                    .objective
                    .iter()
                    .find(|&&(ov, _)| ov == v)
                    .map(|&(_, c)| c)
                    .unwrap_or_else(Rat::zero);
                values[v] = Value::Real(if c.is_negative() { *chi } else { *clo });
            }
        }

        if !self.problem.values_in_bounds(&values) {
            return false;
        }
        if !self.problem.check_assignment(&values).is_empty() {
            return false;
        }
        let objective = self.problem.objective_value(&values);
        let better = match &self.incumbent {
            Some(inc) => objective < inc.objective,
            None => true,
        };
        if better {
            self.incumbent_obj = rat_to_f64(objective);
            self.incumbent = Some(Assignment { values, objective });
        }
        better
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::problem::{rat_fixed, rat_int};
    use num::One;

    fn solve(p: &IlpProblem) -> SolveOutcome {
        Solver::default().solve(p).unwrap()
    }

    #[test]
    fn single_demand_allocation_toy() {
        // One demand, h_avg 290 with pi 1.1 -> 319; one single-segment
        // configuration. The solver must pick w = 4.
        let mut p = IlpProblem::default();
        let g = p.add_binary("g");
        let w = p.add_integer("w", 0, 31);
        p.add_constraint("choice", vec![(g, Rat::one())], Cmp::Eq, Rat::one());
        p.add_constraint(
            "load",
            vec![(w, rat_int(-100)), (g, rat_fixed(319.0, 1000))],
            Cmp::Le,
            Rat::zero(),
        );
        p.set_objective(vec![(w, Rat::one())]);
        match solve(&p) {
            SolveOutcome::Optimal(a) => {
                assert_eq!(a.values[w], Value::Int(4));
                assert_eq!(a.objective, rat_int(4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tight_boundary_needs_exactly_one() {
        // pi = 1, h = 100, xi = 100 -> w = 1 exactly.
        let mut p = IlpProblem::default();
        let g = p.add_binary("g");
        let w = p.add_integer("w", 0, 31);
        p.add_constraint("choice", vec![(g, Rat::one())], Cmp::Eq, Rat::one());
        p.add_constraint(
            "load",
            vec![(w, rat_int(-100)), (g, rat_int(100))],
            Cmp::Le,
            Rat::zero(),
        );
        p.set_objective(vec![(w, Rat::one())]);
        match solve(&p) {
            SolveOutcome::Optimal(a) => assert_eq!(a.values[w], Value::Int(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_transceiver_budget_is_infeasible() {
        let mut p = IlpProblem::default();
        let g = p.add_binary("g");
        let w = p.add_integer("w", 0, 31);
        p.add_constraint("choice", vec![(g, Rat::one())], Cmp::Eq, Rat::one());
        p.add_constraint(
            "load",
            vec![(w, rat_int(-100)), (g, rat_int(319))],
            Cmp::Le,
            Rat::zero(),
        );
        p.add_constraint("eta", vec![(w, Rat::one())], Cmp::Le, Rat::zero());
        p.set_objective(vec![(w, Rat::one())]);
        assert_eq!(solve(&p), SolveOutcome::Infeasible);
    }

    #[test]
    fn continuous_minimax_variable_is_resolved_exactly() {
        // min q s.t. 3 - q <= 0 and 5 - q <= 0 -> q = 5.
        let mut p = IlpProblem::default();
        let q = p.add_continuous("q", Rat::zero(), rat_int(100));
        p.add_constraint("a", vec![(q, rat_int(-1))], Cmp::Le, rat_int(-3));
        p.add_constraint("b", vec![(q, rat_int(-1))], Cmp::Le, rat_int(-5));
        p.set_objective(vec![(q, Rat::one())]);
        match solve(&p) {
            SolveOutcome::Optimal(a) => {
                assert_eq!(a.values[q], Value::Real(rat_int(5)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lexicographic_tie_breaking() {
        // Two symmetric binaries, one must be chosen, objective indifferent:
        // the lexicographically smallest optimum sets the first variable
        // that yields vector (0, 1)? No: vectors are compared in
        // declaration order, (0,1) < (1,0).
        let mut p = IlpProblem::default();
        let a = p.add_binary("a");
        let b = p.add_binary("b");
        p.add_constraint(
            "one",
            vec![(a, Rat::one()), (b, Rat::one())],
            Cmp::Eq,
            Rat::one(),
        );
        p.set_objective(vec![]);
        match solve(&p) {
            SolveOutcome::Optimal(sol) => {
                assert_eq!(sol.values[a], Value::Int(0));
                assert_eq!(sol.values[b], Value::Int(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn node_budget_is_a_hard_error() {
        // Reaching any leaf needs 16 branch levels, more than the budget.
        let mut p = IlpProblem::default();
        let mut vars = Vec::new();
        for i in 0..16 {
            vars.push(p.add_binary(format!("x{i}")));
        }
        let terms: Vec<(usize, Rat)> = vars.iter().map(|&v| (v, Rat::one())).collect();
        p.add_constraint("sum", terms, Cmp::Eq, rat_int(8));
        p.set_objective(vec![]);
        let solver = Solver::new(SolverConfig { node_budget: 10 });
        match solver.solve(&p) {
            Err(SolveError::NodeBudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_repeat_solves() {
        let mut p = IlpProblem::default();
        let xs: Vec<usize> = (0..6).map(|i| p.add_binary(format!("x{i}"))).collect();
        p.add_constraint(
            "pick2",
            xs.iter().map(|&v| (v, Rat::one())).collect(),
            Cmp::Eq,
            rat_int(2),
        );
        p.set_objective(vec![(xs[0], rat_int(3)), (xs[1], rat_int(1)), (xs[2], rat_int(1))]);
        let a = solve(&p);
        let b = solve(&p);
        assert_eq!(a, b);
    }
}
