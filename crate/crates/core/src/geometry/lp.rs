//! Dense two-phase simplex over exact rationals.
//!
//! Problems are in standard form: `A x = b`, `x >= 0`, optionally minimizing
//! `c·x`. Bland's rule is used for both the entering and the leaving
//! variable, so the method terminates on degenerate problems.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLp {
    num_vars: usize,
    rows: Vec<(Vec<Q>, Q)>,
    objective: Option<Vec<Q>>,
}

impl RationalLp {
    pub fn new(num_vars: usize) -> Self {
        RationalLp { num_vars, rows: Vec::new(), objective: None }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[(Vec<Q>, Q)] {
        &self.rows
    }

    pub fn objective(&self) -> Option<&[Q]> {
        self.objective.as_deref()
    }

    /// Adds `row · x = rhs`.
    ///
    /// Panics if the row length differs from the variable count.
    pub fn add_equality(&mut self, row: Vec<Q>, rhs: Q) {
        assert_eq!(row.len(), self.num_vars, "constraint row has wrong length");
        self.rows.push((row, rhs));
    }

    pub fn set_objective(&mut self, objective: Vec<Q>) {
        assert_eq!(objective.len(), self.num_vars, "objective row has wrong length");
        self.objective = Some(objective);
    }

    pub fn with_objective(mut self, objective: Vec<Q>) -> Self {
        self.set_objective(objective);
        self
    }

    /// Appends `extra` fresh variables (with zero coefficients everywhere)
    /// and returns the index of the first one.
    pub fn add_variables(&mut self, extra: usize) -> usize {
        let first = self.num_vars;
        self.num_vars += extra;
        for (row, _) in &mut self.rows {
            row.resize(self.num_vars, Q::zero());
        }
        if let Some(obj) = &mut self.objective {
            obj.resize(self.num_vars, Q::zero());
        }
        first
    }

    /// Exact check that `x` satisfies every constraint.
    pub fn is_satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|xi| !xi.is_negative())
            && self.rows.iter().all(|(row, rhs)| dot(row, x) == *rhs)
    }

    /// Exact check of an infeasibility certificate `y`: `yᵀA <= 0` and
    /// `yᵀb > 0`, which rules out any `x >= 0` with `Ax = b`.
    pub fn is_farkas_certificate(&self, y: &[Q]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let yb: Q = y.iter().zip(&self.rows).map(|(yi, (_, b))| yi * b).sum();
        if !yb.is_positive() {
            return false;
        }
        (0..self.num_vars).all(|j| {
            let s: Q = y.iter().zip(&self.rows).map(|(yi, (row, _))| yi * &row[j]).sum();
            !s.is_positive()
        })
    }
}

pub(crate) fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Q>),
    /// Farkas certificate `y` with `yᵀA <= 0` and `yᵀb > 0`.
    Infeasible(Vec<Q>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Q]> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpSolution {
    Optimal { point: Vec<Q>, value: Q },
    Infeasible { certificate: Vec<Q> },
    Unbounded,
}

/// Decides feasibility, ignoring any objective.
pub fn lp_feasible(lp: &RationalLp) -> Feasibility {
    let mut tab = Tableau::new(lp);
    match tab.phase_one() {
        Err(certificate) => Feasibility::Infeasible(certificate),
        Ok(()) => Feasibility::Feasible(tab.point()),
    }
}

/// Minimizes the objective (zero objective if none was set).
pub fn lp_minimize(lp: &RationalLp) -> LpSolution {
    let mut tab = Tableau::new(lp);
    if let Err(certificate) = tab.phase_one() {
        return LpSolution::Infeasible { certificate };
    }
    let cost = lp.objective.clone().unwrap_or_else(|| vec![Q::zero(); lp.num_vars]);
    if !tab.phase_two(&cost) {
        return LpSolution::Unbounded;
    }
    let point = tab.point();
    let value = dot(&cost, &point);
    LpSolution::Optimal { point, value }
}

/// Minimizes `form · x` over the feasible region of `lp`.
pub fn minimize_form(lp: &RationalLp, form: &[Q]) -> LpSolution {
    let mut tab = Tableau::new(lp);
    if let Err(certificate) = tab.phase_one() {
        return LpSolution::Infeasible { certificate };
    }
    if !tab.phase_two(form) {
        return LpSolution::Unbounded;
    }
    let point = tab.point();
    let value = dot(form, &point);
    LpSolution::Optimal { point, value }
}

/// `(min, max)` of `form · x`; `None` when infeasible. Unbounded sides are
/// reported as `None` inside the tuple.
pub fn form_range(lp: &RationalLp, form: &[Q]) -> Option<(Option<Q>, Option<Q>)> {
    let mut tab = Tableau::new(lp);
    if tab.phase_one().is_err() {
        return None;
    }
    let after_phase_one = tab.clone();
    let lo = if tab.phase_two(form) { Some(dot(form, &tab.point())) } else { None };
    let mut tab = after_phase_one;
    let neg: Vec<Q> = form.iter().map(|c| -c).collect();
    let hi = if tab.phase_two(&neg) { Some(dot(form, &tab.point())) } else { None };
    Some((lo, hi))
}

#[derive(Clone)]
struct Tableau {
    num_vars: usize,
    num_rows: usize,
    /// `num_rows` rows of `num_vars + num_rows + 1` entries; artificial
    /// columns follow the original ones, the right-hand side comes last.
    cells: Vec<Vec<Q>>,
    basis: Vec<usize>,
    row_sign: Vec<bool>,
    /// Rows found redundant after phase one.
    active: Vec<bool>,
}

impl Tableau {
    fn new(lp: &RationalLp) -> Self {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let mut cells = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for (i, (row, rhs)) in lp.rows.iter().enumerate() {
            let flip = rhs.is_negative();
            let mut r: Vec<Q> = Vec::with_capacity(n + m + 1);
            if flip {
                r.extend(row.iter().map(|a| -a));
            } else {
                r.extend(row.iter().cloned());
            }
            r.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
            r.push(if flip { -rhs } else { rhs.clone() });
            cells.push(r);
            row_sign.push(flip);
        }
        Tableau {
            num_vars: n,
            num_rows: m,
            cells,
            basis: (n..n + m).collect(),
            row_sign,
            active: vec![true; m],
        }
    }

    fn width(&self) -> usize {
        self.num_vars + self.num_rows
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let inv = self.cells[row][col].recip();
        for k in 0..=w {
            let v = &self.cells[row][k] * &inv;
            self.cells[row][k] = v;
        }
        let pivot_row = self.cells[row].clone();
        for i in 0..self.num_rows {
            if i == row || !self.active[i] || self.cells[i][col].is_zero() {
                continue;
            }
            let factor = self.cells[i][col].clone();
            for k in 0..=w {
                if !pivot_row[k].is_zero() {
                    let v = &self.cells[i][k] - &factor * &pivot_row[k];
                    self.cells[i][k] = v;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations with cost vector over columns `< allowed`.
    /// Returns false when unbounded.
    fn iterate(&mut self, cost: &[Q], allowed: usize) -> bool {
        let w = self.width();
        loop {
            // reduced costs d_j = c_j - c_B · column_j, Bland: first negative
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for i in 0..self.num_rows {
                    if self.active[i] && !self.cells[i][j].is_zero() {
                        d -= &cost[self.basis[i]] * &self.cells[i][j];
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return true };

            let mut leaving: Option<(usize, Q)> = None;
            for i in 0..self.num_rows {
                if !self.active[i] || !self.cells[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.cells[i][w] / &self.cells[i][col];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }

    /// Phase one; on infeasibility returns a Farkas certificate for the
    /// original (unflipped) rows.
    fn phase_one(&mut self) -> Result<(), Vec<Q>> {
        let n = self.num_vars;
        let m = self.num_rows;
        let w = self.width();
        let cost: Vec<Q> = (0..w).map(|j| if j >= n { Q::one() } else { Q::zero() }).collect();
        let bounded = self.iterate(&cost, w);
        debug_assert!(bounded, "phase one objective is bounded below");

        let value: Q = (0..m)
            .filter(|&i| self.basis[i] >= n)
            .map(|i| self.cells[i][w].clone())
            .sum();
        if value.is_positive() {
            // y = c_B B^{-1}; B^{-1} sits in the artificial columns
            let mut y = vec![Q::zero(); m];
            for i in 0..m {
                if self.basis[i] >= n {
                    for (k, yk) in y.iter_mut().enumerate() {
                        *yk += &self.cells[i][n + k];
                    }
                }
            }
            for (k, yk) in y.iter_mut().enumerate() {
                if self.row_sign[k] {
                    *yk = -yk.clone();
                }
            }
            return Err(y);
        }

        // drive zero-level artificials out of the basis
        for i in 0..m {
            if self.basis[i] < n {
                continue;
            }
            match (0..n).find(|&j| !self.cells[i][j].is_zero()) {
                Some(j) => self.pivot(i, j),
                None => self.active[i] = false,
            }
        }
        Ok(())
    }

    fn phase_two(&mut self, cost: &[Q]) -> bool {
        let mut full = cost.to_vec();
        full.resize(self.width(), Q::zero());
        self.iterate(&full, self.num_vars)
    }

    fn point(&self) -> Vec<Q> {
        let w = self.width();
        let mut x = vec![Q::zero(); self.num_vars];
        for i in 0..self.num_rows {
            if self.active[i] && self.basis[i] < self.num_vars {
                x[self.basis[i]] = self.cells[i][w].clone();
            }
        }
        x
    }
}
