//! Dense two-phase primal simplex.
//!
//! Solves `min cᵀz` subject to `rows · z (≤ | = | ≥) rhs` with every variable
//! either nonnegative or free. Besides the primal point it reports row duals
//! `y` (so that `c − Aᵀy` are the reduced costs and `rhsᵀy` is the optimal
//! value), a Farkas ray on infeasibility and a primal ray on unboundedness.
//!
//! The tableau keeps one artificial column per row for the whole solve; their
//! columns hold `B⁻¹`, which is where the duals are read from.

use crate::linalg::{dot, norm_inf, solve as solve_square};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    /// Variables without the `z ≥ 0` bound. Empty means "none free".
    pub free: Vec<bool>,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>) -> Self {
        LinearProgram {
            cost,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_row(&mut self, row: Vec<f64>, sense: RowSense, rhs: f64) {
        debug_assert_eq!(row.len(), self.cost.len());
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    pub fn set_free(&mut self, var: usize) {
        if self.free.is_empty() {
            self.free = vec![false; self.cost.len()];
        }
        self.free[var] = true;
    }

    fn is_free(&self, var: usize) -> bool {
        self.free.get(var).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub primal: Vec<f64>,
    /// Row multipliers; meaningful when `status == Optimal`.
    pub dual: Vec<f64>,
    /// Infeasible: `y` with `Aᵀy ≤ 0` on nonnegative columns (`= 0` on free
    /// ones), sign-compatible with the row senses, and `rhsᵀy > 0`.
    /// Unbounded: primal direction `d` with `cᵀd < 0`.
    pub ray: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub max_iter: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-9,
            pivot_tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpSolution {
    solve_with(lp, &SimplexOptions::default())
}

struct Tableau {
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for all columns.
    d: Vec<f64>,
    /// Current objective value (of the phase objective).
    obj: f64,
    n_cols: usize,
    art_start: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        let inv = 1.0 / p;
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        self.t[r][c] = 1.0;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][c];
            if f != 0.0 {
                for (v, pv) in self.t[i].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.t[i][c] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for (v, pv) in self.d.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.d[c] = 0.0;
            self.obj += f * prhs;
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[f64]) {
        self.d = cost.to_vec();
        self.obj = 0.0;
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (v, tv) in self.d.iter_mut().zip(&self.t[r]) {
                    *v -= cb * tv;
                }
                self.obj += cb * self.rhs[r];
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    /// Runs simplex iterations on the current objective. Columns at or beyond
    /// `enter_limit` never enter. Returns `Err(col)` on an unbounded column.
    fn iterate(&mut self, enter_limit: usize, opts: &SimplexOptions) -> Result<(), usize> {
        let mut degenerate_run = 0usize;
        let scale = 1.0 + norm_inf(&self.d[..enter_limit]);
        for _ in 0..opts.max_iter {
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = -opts.optimality_tol * scale;
            for j in 0..enter_limit {
                let dj = self.d[j];
                if dj < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > opts.pivot_tol {
                    let ratio = self.rhs[i].max(0.0) / a;
                    match leave {
                        None => {
                            leave = Some(i);
                            best_ratio = ratio;
                        }
                        Some(li) => {
                            let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio);
                            if ratio < best_ratio && !tie {
                                leave = Some(i);
                                best_ratio = ratio;
                            } else if tie {
                                let better = if bland {
                                    self.basis[i] < self.basis[li]
                                } else {
                                    a > self.t[li][c]
                                };
                                if better {
                                    leave = Some(i);
                                    best_ratio = best_ratio.min(ratio);
                                }
                            }
                        }
                    }
                }
            }
            let Some(r) = leave else { return Err(c) };
            if best_ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        Ok(())
    }
}

/// Recomputes the basic values from the original rows, discarding drift
/// accumulated in the tableau rhs.
fn refresh_basics(tab: &mut Tableau, a0: &[Vec<f64>], rhs0: &[f64]) {
    let b: Vec<Vec<f64>> = a0
        .iter()
        .map(|row| tab.basis.iter().map(|&c| row[c]).collect())
        .collect();
    let residual = |xb: &[f64]| {
        a0.iter()
            .zip(rhs0)
            .map(|(row, &r)| (dot(&tab.basis.iter().map(|&c| row[c]).collect::<Vec<_>>(), xb) - r).abs())
            .fold(0.0_f64, f64::max)
    };
    if let Some(xb) = solve_square(&b, rhs0, 1e-13) {
        if residual(&xb) < residual(&tab.rhs) {
            tab.rhs = xb;
        }
    }
}

pub fn solve_with(lp: &LinearProgram, opts: &SimplexOptions) -> LpSolution {
    let n = lp.num_vars();
    let m = lp.rows.len();

    // Column layout: [structural (+ negated copies of free vars) | slacks | artificials]
    let mut col_of_var = Vec::with_capacity(n);
    let mut neg_col = vec![None; n];
    let mut n_struct = 0;
    for (j, nc) in neg_col.iter_mut().enumerate() {
        col_of_var.push(n_struct);
        n_struct += 1;
        if lp.is_free(j) {
            *nc = Some(n_struct);
            n_struct += 1;
        }
    }
    let slack_rows: Vec<usize> = (0..m).filter(|&i| lp.senses[i] != RowSense::Eq).collect();
    let slack_start = n_struct;
    let art_start = slack_start + slack_rows.len();
    let n_cols = art_start + m;

    let mut t = vec![vec![0.0; n_cols]; m];
    let mut rhs = vec![0.0; m];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        let s = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        sign[i] = s;
        rhs[i] = s * lp.rhs[i];
        for j in 0..n {
            let a = s * lp.rows[i][j];
            t[i][col_of_var[j]] = a;
            if let Some(nc) = neg_col[j] {
                t[i][nc] = -a;
            }
        }
        t[i][art_start + i] = 1.0;
    }
    for (k, &i) in slack_rows.iter().enumerate() {
        let unit = if lp.senses[i] == RowSense::Le { 1.0 } else { -1.0 };
        t[i][slack_start + k] = sign[i] * unit;
    }

    let a0 = t.clone();
    let rhs0 = rhs.clone();
    let mut tab = Tableau {
        t,
        rhs,
        basis: (art_start..art_start + m).collect(),
        d: vec![0.0; n_cols],
        obj: 0.0,
        n_cols,
        art_start,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![0.0; n_cols];
    for c in phase1_cost.iter_mut().skip(art_start) {
        *c = 1.0;
    }
    tab.set_objective(&phase1_cost);
    let _ = tab.iterate(art_start, opts);
    let rhs_scale = 1.0 + norm_inf(&lp.rhs);
    if tab.obj > opts.feasibility_tol * rhs_scale {
        // Phase-1 duals: d_art_i = 1 − y'_i.
        let ray: Vec<f64> = (0..m).map(|i| sign[i] * (1.0 - tab.d[art_start + i])).collect();
        return LpSolution {
            status: LpStatus::Infeasible,
            value: f64::NAN,
            primal: vec![],
            dual: vec![],
            ray: Some(ray),
        };
    }

    // Drive remaining artificials out of the basis.
    for r in 0..m {
        if tab.basis[r] >= art_start {
            let best = (0..art_start)
                .map(|j| (j, tab.t[r][j].abs()))
                .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.1 > 1e-9 {
                tab.pivot(r, best.0);
            }
        }
    }

    // Phase 2.
    let mut cost = vec![0.0; tab.n_cols];
    for j in 0..n {
        cost[col_of_var[j]] = lp.cost[j];
        if let Some(nc) = neg_col[j] {
            cost[nc] = -lp.cost[j];
        }
    }
    tab.set_objective(&cost);
    let unbounded_col = tab.iterate(tab.art_start, opts).err();

    let read_primal = |tab: &Tableau, extra: Option<(usize, f64)>| -> Vec<f64> {
        let mut cols = vec![0.0; tab.n_cols];
        for (r, &b) in tab.basis.iter().enumerate() {
            cols[b] = tab.rhs[r].max(0.0);
        }
        if let Some((c, _)) = extra {
            // Direction: entering column goes up, basics move along −t[:, c].
            cols = vec![0.0; tab.n_cols];
            cols[c] = 1.0;
            for (r, &b) in tab.basis.iter().enumerate() {
                cols[b] = -tab.t[r][c];
            }
        }
        (0..n)
            .map(|j| {
                let mut v = cols[col_of_var[j]];
                if let Some(nc) = neg_col[j] {
                    v -= cols[nc];
                }
                v
            })
            .collect()
    };

    if let Some(c) = unbounded_col {
        let dir = read_primal(&tab, Some((c, 1.0)));
        return LpSolution {
            status: LpStatus::Unbounded,
            value: f64::NEG_INFINITY,
            primal: read_primal(&tab, None),
            dual: vec![],
            ray: Some(dir),
        };
    }

    refresh_basics(&mut tab, &a0, &rhs0);
    let primal = read_primal(&tab, None);
    let dual: Vec<f64> = (0..m).map(|i| -sign[i] * tab.d[art_start + i]).collect();
    LpSolution {
        status: LpStatus::Optimal,
        value: dot(&lp.cost, &primal),
        primal,
        dual,
        ray: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp_le(cost: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> LinearProgram {
        let mut lp = LinearProgram::new(cost);
        for (r, b) in rows.into_iter().zip(rhs) {
            lp.add_row(r, RowSense::Le, b);
        }
        lp
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  → 36 at (2, 6)
        let lp = lp_le(
            vec![-3.0, -5.0],
            vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            vec![4.0, 12.0, 18.0],
        );
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.primal[0] - 2.0).abs() < 1e-9 && (s.primal[1] - 6.0).abs() < 1e-9);
        // duals: (0, -1.5, -1) for ≤ rows of a min problem
        assert!((s.dual[0]).abs() < 1e-9);
        assert!((s.dual[1] + 1.5).abs() < 1e-9);
        assert!((s.dual[2] + 1.0).abs() < 1e-9);
        assert!((dot(&s.dual, &lp.rhs) - s.value).abs() < 1e-9);
    }

    #[test]
    fn equality_and_free_variable() {
        // min x + y, x - y = -3, x ≥ -10, y ≥ 0, x free → x = -3, y = 0
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, -1.0], RowSense::Eq, -3.0);
        lp.add_row(vec![1.0, 0.0], RowSense::Ge, -10.0);
        lp.set_free(0);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 3.0).abs() < 1e-9, "{s:?}");
        assert!((s.primal[0] + 3.0).abs() < 1e-9);
        assert!((dot(&s.dual, &lp.rhs) - s.value).abs() < 1e-9);
    }

    #[test]
    fn infeasible_has_farkas_ray() {
        // y1 - y2 = -1 with y ≥ 0 is feasible; y1 + y2 = -1 is not.
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Eq, -1.0);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Infeasible);
        let ray = s.ray.unwrap();
        // Aᵀray ≤ 0 and rhsᵀray > 0
        assert!(ray[0] < 0.0);
        assert!(dot(&ray, &lp.rhs) > 0.0);
    }

    #[test]
    fn unbounded_reports_direction() {
        let lp = lp_le(vec![-1.0, 0.0], vec![vec![0.0, 1.0]], vec![1.0]);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Unbounded);
        let d = s.ray.unwrap();
        assert!(dot(&lp.cost, &d) < 0.0);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Eq, 2.0);
        lp.add_row(vec![2.0, 2.0], RowSense::Eq, 4.0);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-9);
        assert!((dot(&s.dual, &lp.rhs) - s.value).abs() < 1e-9);
    }
}
