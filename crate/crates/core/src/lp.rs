//! Dense two-phase simplex for the small linear programs used by the region
//! queries (hull membership, decompositions, rate and overlap problems).
//!
//! All variables are nonnegative. Problems are maximizations.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_ITERS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    rel: Relation,
    rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
    feas_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible { residual: f64 },
    Unbounded,
}

impl LinearProgram {
    /// Feasibility problem over `n` nonnegative variables (zero objective).
    pub fn new(n: usize) -> Self {
        LinearProgram {
            n,
            objective: vec![0.0; n],
            rows: Vec::new(),
            feas_tol: 1e-9,
        }
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.n);
        self.objective = objective;
        self
    }

    /// Phase-one residual (sum of artificials) accepted as feasible.
    pub fn feasibility_tol(mut self, tol: f64) -> Self {
        self.feas_tol = tol;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.n;
        let r = self.rows.len();
        // column layout: originals | slack/surplus (one per row) | artificials (one per row)
        let slack0 = n;
        let art0 = n + r;
        let width = n + 2 * r;
        let mut t = Tableau {
            a: Vec::with_capacity(r),
            rhs: Vec::with_capacity(r),
            obj: vec![0.0; width],
            obj_rhs: 0.0,
            basis: Vec::with_capacity(r),
        };
        for (i, row) in self.rows.iter().enumerate() {
            let flip = row.rhs < 0.0;
            let sign = if flip { -1.0 } else { 1.0 };
            let rel = match (row.rel, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (rel, _) => rel,
            };
            let mut a = vec![0.0; width];
            for (j, &c) in row.coeffs.iter().enumerate() {
                a[j] = sign * c;
            }
            let basic = match rel {
                Relation::Le => {
                    a[slack0 + i] = 1.0;
                    slack0 + i
                }
                Relation::Ge => {
                    a[slack0 + i] = -1.0;
                    a[art0 + i] = 1.0;
                    art0 + i
                }
                Relation::Eq => {
                    a[art0 + i] = 1.0;
                    art0 + i
                }
            };
            t.a.push(a);
            t.rhs.push(sign * row.rhs);
            t.basis.push(basic);
        }

        // phase one: maximize -Σ artificials
        for i in 0..r {
            if t.basis[i] >= art0 {
                for j in 0..width {
                    t.obj[j] -= t.a[i][j];
                }
                t.obj_rhs -= t.rhs[i];
                t.obj[t.basis[i]] = 0.0;
            }
        }
        let is_art = |j: usize| j >= art0;
        if t.run(|_| true)?.is_none() {
            return Err(Error::Lp("phase one unbounded".into()));
        }
        let residual = -t.obj_rhs;
        if residual > self.feas_tol {
            return Ok(LpOutcome::Infeasible { residual });
        }
        // drive remaining artificials out of the basis where possible
        for i in 0..r {
            if is_art(t.basis[i]) {
                if let Some(j) = (0..art0).find(|&j| t.a[i][j].abs() > 1e-9) {
                    t.pivot(i, j);
                }
            }
        }

        // phase two
        t.obj = vec![0.0; width];
        t.obj_rhs = 0.0;
        for j in 0..n {
            t.obj[j] = -self.objective[j];
        }
        for i in 0..r {
            let b = t.basis[i];
            let cb = t.obj[b];
            if cb != 0.0 {
                for j in 0..width {
                    t.obj[j] -= cb * t.a[i][j];
                }
                t.obj_rhs -= cb * t.rhs[i];
            }
        }
        if t.run(|j| !is_art(j))?.is_none() {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[i].max(0.0);
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    obj_rhs: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f != 0.0 {
                for (v, pv) in self.a[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.a[i][col] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-13 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[col] = 0.0;
            self.obj_rhs -= f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Iterate to optimality. `Ok(None)` signals an unbounded direction.
    /// Dantzig pricing, switching to Bland's rule after a run of degenerate
    /// pivots.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Result<Option<()>> {
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERS {
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = -PIVOT_EPS * 10.0;
            for (j, &c) in self.obj.iter().enumerate() {
                if !allowed(j) || c >= -PIVOT_EPS * 10.0 {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if c < best {
                    best = c;
                    enter = Some(j);
                }
            }
            let Some(col) = enter else {
                return Ok(Some(()));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let aij = self.a[i][col];
                if aij > PIVOT_EPS {
                    let ratio = self.rhs[i] / aij;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(None);
            };
            if ratio <= 1e-15 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col);
        }
        Err(Error::Lp("iteration limit reached".into()))
    }
}
