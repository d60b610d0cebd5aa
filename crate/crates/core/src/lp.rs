//! Exact two-phase primal simplex over [`Rat`].
//!
//! Programs are given in row form (`≤`, `≥`, `=`) over non-negative variables.
//! Internally each row gets a slack, a surplus plus artificial, or an
//! artificial, and a dense tableau is pivoted with Bland's rule, so the method
//! terminates on every input without tolerances.

use std::fmt::Write as _;

use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// `Σ coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rat)>,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: Rat) -> Row {
        Row { coeffs, relation, rhs }
    }

    pub fn lhs(&self, point: &[Rat]) -> Rat {
        self.coeffs.iter().map(|(j, c)| c * &point[*j]).sum()
    }

    pub fn is_satisfied(&self, point: &[Rat]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, Rat)>,
    pub sense: Sense,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> LinearProgram {
        LinearProgram { num_vars, rows: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: Rat) -> &mut Self {
        self.rows.push(Row::new(coeffs, relation, rhs));
        self
    }

    pub fn objective_value(&self, point: &[Rat]) -> Rat {
        self.objective.iter().map(|(j, c)| c * &point[*j]).sum()
    }

    fn validate(&self) -> Result<(), LpError> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(LpError::MalformedProgram(format!(
                    "row {} references variable {} of {}",
                    i, j, self.num_vars
                )));
            }
        }
        if let Some((j, _)) = self.objective.iter().find(|(j, _)| *j >= self.num_vars) {
            return Err(LpError::MalformedProgram(format!("objective references variable {} of {}", j, self.num_vars)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("pivot limit of {0} exceeded")]
    IterationLimitExceeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexOptions {
    pub max_pivots: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_pivots: 1_000_000 }
    }
}

/// A row violated by a candidate point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatedRow {
    pub index: usize,
    pub lhs: Rat,
}

/// Returns the first row `point` violates, comparing exactly.
pub fn verify_solution(lp: &LinearProgram, point: &[Rat]) -> Option<ViolatedRow> {
    lp.rows
        .iter()
        .enumerate()
        .find_map(|(index, row)| (!row.is_satisfied(point)).then(|| ViolatedRow { index, lhs: row.lhs(point) }))
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, options: &SimplexOptions) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let mut tableau = Tableau::build(lp);
    tableau.max_pivots = options.max_pivots;

    if tableau.num_artificial > 0 {
        tableau.set_phase_one_objective();
        if tableau.optimize()? == Step::Unbounded {
            unreachable!("phase one is bounded above by zero");
        }
        if tableau.value.is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        tableau.drive_out_artificials();
    }

    // Phase two maximizes; a minimization is solved as max of the negation.
    let mut cost = vec![Rat::zero(); tableau.num_cols];
    for (j, c) in &lp.objective {
        cost[*j] += c;
    }
    if lp.sense == Sense::Minimize {
        for c in &mut cost {
            *c = -&*c;
        }
    }
    tableau.set_objective(cost);
    if tableau.optimize()? == Step::Unbounded {
        return Ok(LpOutcome::Unbounded);
    }

    let point = tableau.primal(lp.num_vars);
    let value = lp.objective_value(&point);
    debug_assert!(verify_solution(lp, &point).is_none());
    Ok(LpOutcome::Optimal { point, value })
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

/// Dense tableau for `max c·x, A x = b, x ≥ 0` with `b ≥ 0`.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - z_j`; entering columns have a positive entry.
    reduced: Vec<Rat>,
    value: Rat,
    num_cols: usize,
    /// Artificial columns occupy the tail `[num_cols - num_artificial, num_cols)`.
    num_artificial: usize,
    pivots: u64,
    max_pivots: u64,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let m = lp.rows.len();
        // Normalize to a non-negative right-hand side.
        let normalized: Vec<(Vec<Rat>, Relation, Rat)> = lp
            .rows
            .iter()
            .map(|row| {
                let mut dense = vec![Rat::zero(); n];
                for (j, c) in &row.coeffs {
                    dense[*j] += c;
                }
                if row.rhs.is_negative() {
                    let flipped = match row.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (dense.iter().map(|c| -c).collect(), flipped, -&row.rhs)
                } else {
                    (dense, row.relation, row.rhs.clone())
                }
            })
            .collect();

        let num_slack = normalized.iter().filter(|r| r.1 != Relation::Eq).count();
        let num_artificial = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let num_cols = n + num_slack + num_artificial;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_artificial = n + num_slack;
        for (mut dense, relation, b) in normalized {
            dense.resize(num_cols, Rat::zero());
            match relation {
                Relation::Le => {
                    dense[next_slack] = Rat::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    dense[next_slack] = Rat::from_integer(-1);
                    next_slack += 1;
                    dense[next_artificial] = Rat::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    dense[next_artificial] = Rat::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(dense);
            rhs.push(b);
        }

        Tableau {
            rows,
            rhs,
            basis,
            reduced: vec![Rat::zero(); num_cols],
            value: Rat::zero(),
            num_cols,
            num_artificial,
            pivots: 0,
            max_pivots: SimplexOptions::default().max_pivots,
        }
    }

    fn first_artificial(&self) -> usize {
        self.num_cols - self.num_artificial
    }

    fn set_phase_one_objective(&mut self) {
        let first = self.first_artificial();
        let cost: Vec<Rat> =
            (0..self.num_cols).map(|j| if j >= first { Rat::from_integer(-1) } else { Rat::zero() }).collect();
        self.set_objective(cost);
    }

    /// Installs `cost` and prices it out against the current basis.
    fn set_objective(&mut self, cost: Vec<Rat>) {
        let mut reduced = cost.clone();
        let mut value = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn optimize(&mut self) -> Result<Step, LpError> {
        loop {
            // Bland: lowest-index improving column.
            let entering = match (0..self.num_cols).find(|&j| self.reduced[j].is_positive()) {
                Some(j) => j,
                None => return Ok(Step::Optimal),
            };
            // Minimum ratio, ties to the lowest basic variable index.
            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leaving {
                    None => true,
                    Some((k, best)) => match ratio.cmp(best) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => self.basis[i] < self.basis[*k],
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, entering)?,
                None => return Ok(Step::Unbounded),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(LpError::IterationLimitExceeded(self.max_pivots));
        }
        self.pivot_unchecked(r, c);
        Ok(())
    }

    fn pivot_unchecked(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let support: Vec<usize> = (0..self.num_cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &factor * &pivot_rhs;
            }
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for &j in &support {
                self.reduced[j] -= &factor * &pivot_row[j];
            }
            self.value += &factor * &pivot_rhs;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// After a feasible phase one, pivots zero-level artificials out of the
    /// basis, drops redundant rows, and removes the artificial columns.
    fn drive_out_artificials(&mut self) {
        let first = self.first_artificial();
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= first {
                debug_assert!(self.rhs[i].is_zero());
                match (0..first).find(|&j| !self.rows[i][j].is_zero()) {
                    // Degenerate pivot; not counted toward the limit.
                    Some(j) => self.pivot_unchecked(i, j),
                    None => {
                        self.rows.swap_remove(i);
                        self.rhs.swap_remove(i);
                        self.basis.swap_remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in &mut self.rows {
            row.truncate(first);
        }
        self.num_cols = first;
        self.num_artificial = 0;
        self.reduced.truncate(first);
    }

    fn primal(&self, num_vars: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < num_vars {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }

    #[allow(dead_code)]
    fn dump(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "x{} = {} | {}", self.basis[i], self.rhs[i], cells.join(" "));
        }
        let cells: Vec<String> = self.reduced.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(out, "z = {} | {}", self.value, cells.join(" "));
        out
    }
}

/// Renders the initial standard-form tableau of `lp`, for troubleshooting.
pub fn debug_tableau(lp: &LinearProgram) -> String {
    Tableau::build(lp).dump()
}
