//! Exact rational linear programming.
//!
//! Two-phase tableau simplex with Bland's pivoting rule over nonnegative
//! variables, computed in [`ExactRational`] arithmetic. Every optimal
//! assignment is substituted back into the original constraints before it is
//! returned.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub terms: Vec<(VarId, ExactRational)>,
    pub relation: Relation,
    pub rhs: ExactRational,
}

impl Constraint {
    pub fn lhs_at(&self, assignment: &[ExactRational]) -> ExactRational {
        self.terms.iter().map(|(v, a)| a * &assignment[v.0]).sum()
    }

    pub fn holds_at(&self, assignment: &[ExactRational]) -> bool {
        let lhs = self.lhs_at(assignment);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint references undeclared variable {0}")]
    UndeclaredVariable(usize),
}

/// Maximize a rational linear form over nonnegative variables subject to
/// linear constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    names: Vec<String>,
    objective: Vec<(VarId, ExactRational)>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> VarId {
        self.names.push(name.into());
        VarId(self.names.len() - 1)
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn variable_name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn variable_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(VarId)
    }

    pub fn objective(&self) -> &[(VarId, ExactRational)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn check_vars(&self, terms: &[(VarId, ExactRational)]) -> Result<(), LpError> {
        match terms.iter().find(|(v, _)| v.0 >= self.names.len()) {
            Some((v, _)) => Err(LpError::UndeclaredVariable(v.0)),
            None => Ok(()),
        }
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, ExactRational)>) -> Result<(), LpError> {
        self.check_vars(&terms)?;
        self.objective = terms;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(VarId, ExactRational)>,
        relation: Relation,
        rhs: ExactRational,
    ) -> Result<(), LpError> {
        self.check_vars(&terms)?;
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn objective_at(&self, assignment: &[ExactRational]) -> ExactRational {
        self.objective
            .iter()
            .map(|(v, a)| a * &assignment[v.0])
            .sum()
    }

    /// Nonnegativity plus every constraint, checked exactly.
    pub fn is_feasible(&self, assignment: &[ExactRational]) -> bool {
        assignment.len() == self.names.len()
            && assignment.iter().all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| c.holds_at(assignment))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; `None` unless optimal.
    pub optimum: Option<ExactRational>,
    /// One value per variable; empty unless optimal.
    pub assignment: Vec<ExactRational>,
}

impl LpSolution {
    pub fn value(&self, v: VarId) -> &ExactRational {
        &self.assignment[v.0]
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    let solution = run_simplex(lp);
    if solution.status == LpStatus::Optimal {
        assert!(
            lp.is_feasible(&solution.assignment),
            "simplex returned an infeasible assignment"
        );
        assert_eq!(
            Some(lp.objective_at(&solution.assignment)),
            solution.optimum,
            "objective mismatch at returned assignment"
        );
    }
    solution
}

type Q = ExactRational;

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Q>>,
    /// Reduced costs `z_j - c_j`; last entry is the objective value.
    obj: Vec<Q>,
    basis: Vec<usize>,
    ncols: usize,
    enterable: Vec<bool>,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Q {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let piv = self.rows[r][s].clone();
        if piv != 1 {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &piv;
                }
            }
        }
        let support: Vec<(usize, Q)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x.clone()))
            .collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][s].is_zero() {
                continue;
            }
            let f = self.rows[i][s].clone();
            let row = &mut self.rows[i];
            for (j, a) in &support {
                row[*j] = &row[*j] - &(&f * a);
            }
        }
        if !self.obj[s].is_zero() {
            let f = self.obj[s].clone();
            for (j, a) in &support {
                self.obj[*j] = &self.obj[*j] - &(&f * a);
            }
        }
        self.basis[r] = s;
    }

    /// Bland's rule: lowest-index improving column, lowest-index leaving
    /// basic variable among minimum-ratio ties.
    fn optimize(&mut self) -> PivotOutcome {
        loop {
            let entering =
                (0..self.ncols).find(|&j| self.enterable[j] && self.obj[j].is_negative());
            let Some(s) = entering else {
                return PivotOutcome::Optimal;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return PivotOutcome::Unbounded;
            };
            self.pivot(r, s);
        }
    }

    fn set_objective(&mut self, costs: &[Q]) {
        let mut obj: Vec<Q> = costs.iter().map(|c| -c.clone()).collect();
        obj.push(Q::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    obj[j] = &obj[j] + &(cb * a);
                }
            }
        }
        self.obj = obj;
    }
}

fn run_simplex(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_variables();

    // Normalize to nonnegative right-hand sides.
    let mut dense: Vec<(Vec<Q>, Relation, Q)> = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let mut row = vec![Q::zero(); n];
        for (v, a) in &c.terms {
            row[v.0] += a;
        }
        let mut rhs = c.rhs.clone();
        let mut rel = c.relation;
        if rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        dense.push((row, rel, rhs));
    }

    let n_slack = dense.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let n_art = dense.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let ncols = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut rows = Vec::with_capacity(dense.len());
    let mut basis = Vec::with_capacity(dense.len());
    let mut next_slack = n;
    let mut next_art = art_start;
    for (coeffs, rel, rhs) in dense {
        let mut row = coeffs;
        row.resize(ncols + 1, Q::zero());
        row[ncols] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = Q::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Q::one();
                next_slack += 1;
                row[next_art] = Q::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Q::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        ncols,
        enterable: vec![true; ncols],
    };

    if n_art > 0 {
        let mut costs = vec![Q::zero(); ncols];
        for c in costs.iter_mut().skip(art_start) {
            *c = -Q::one();
        }
        t.set_objective(&costs);
        t.optimize();
        if t.obj[ncols].is_negative() {
            return LpSolution {
                status: LpStatus::Infeasible,
                optimum: None,
                assignment: Vec::new(),
            };
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        for e in t.enterable.iter_mut().skip(art_start) {
            *e = false;
        }
    }

    let mut costs = vec![Q::zero(); ncols];
    for (v, a) in &lp.objective {
        costs[v.0] += a;
    }
    t.set_objective(&costs);
    match t.optimize() {
        PivotOutcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            optimum: None,
            assignment: Vec::new(),
        },
        PivotOutcome::Optimal => {
            let mut assignment = vec![Q::zero(); n];
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n {
                    assignment[b] = t.rhs(i).clone();
                }
            }
            LpSolution {
                status: LpStatus::Optimal,
                optimum: Some(t.obj[ncols].clone()),
                assignment,
            }
        }
    }
}
