//! Two-stage problem data, second-stage LPs and the aggregated master.
//!
//! For a cell with conditional mean `(T̄, h̄)` the recourse value is
//! `Q(x, T̄, h̄) = min { qᵀy : W y = h̄ − T̄ x, y ≥ 0 }`; its dual solution is a
//! vertex of `D = {λ : Wᵀλ ≤ q}`.

pub mod lp;

pub use lp::{LinearProgram, LpSolution, LpStatus, RowSense, SimplexOptions};

use crate::linalg::{dot, mat_t_vec, Matrix};
use crate::measure::{CellStats, Entry, MeasureError, Scenario, XiDistribution};
use crate::polytope::{normal_fan, Fan, GeometryError, HRep};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecourseError {
    #[error("invalid problem at {path}: {msg}")]
    Structural { path: String, msg: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("recourse scenario {scenario}: dual feasible set {{λ : Wᵀλ ≤ q}} is empty, recourse is unbounded")]
    DualInfeasible { scenario: usize },
    #[error("master problem is infeasible")]
    MasterInfeasible,
    #[error("master problem is unbounded along {ray:?}")]
    MasterUnbounded { ray: Vec<f64> },
    #[error("recourse infeasible on cell {cell} (recourse scenario {scenario}); certificate {ray:?}")]
    RecourseInfeasible {
        cell: usize,
        scenario: usize,
        ray: Vec<f64>,
    },
}

fn structural(path: impl Into<String>, msg: impl Into<String>) -> RecourseError {
    RecourseError::Structural {
        path: path.into(),
        msg: msg.into(),
    }
}

fn one() -> f64 {
    1.0
}

/// A recourse matrix and cost, with probability `weight` (independent of `ξ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecourseScenario {
    #[serde(rename = "W")]
    pub w: Matrix,
    pub q: Vec<f64>,
    #[serde(default = "one")]
    pub weight: f64,
}

/// `min cᵀx + E[Q(x, ξ)]  s.t.  A x = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageProblem {
    pub c: Vec<f64>,
    pub a: Matrix,
    pub b: Vec<f64>,
    pub recourse: Vec<RecourseScenario>,
    pub dist: XiDistribution,
}

/// Affine cut `g·x + v` (optimality) with `θ ≥ g·x + v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCut {
    pub g: Vec<f64>,
    pub v: f64,
}

/// Linear constraint `f·x ≤ fbar` on the first stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityCut {
    pub f: Vec<f64>,
    pub fbar: f64,
}

impl TwoStageProblem {
    /// Fixed recourse `(W, q)`.
    pub fn new(
        c: Vec<f64>,
        a: Matrix,
        b: Vec<f64>,
        w: Matrix,
        q: Vec<f64>,
        dist: XiDistribution,
    ) -> Result<Self, RecourseError> {
        Self::with_scenarios(c, a, b, vec![RecourseScenario { w, q, weight: 1.0 }], dist)
    }

    pub fn with_scenarios(
        c: Vec<f64>,
        a: Matrix,
        b: Vec<f64>,
        recourse: Vec<RecourseScenario>,
        dist: XiDistribution,
    ) -> Result<Self, RecourseError> {
        let p = TwoStageProblem {
            c,
            a,
            b,
            recourse,
            dist,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RecourseError> {
        let n = self.c.len();
        if n == 0 {
            return Err(structural("first_stage.c", "no first-stage variables"));
        }
        if self.a.len() != self.b.len() {
            return Err(structural(
                "first_stage.b",
                format!("{} rows in A but {} entries in b", self.a.len(), self.b.len()),
            ));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(structural(
                    format!("first_stage.A[{i}]"),
                    format!("expected {n} columns, got {}", row.len()),
                ));
            }
        }
        if self.recourse.is_empty() {
            return Err(structural("recourse", "no recourse data"));
        }
        let l = self.recourse[0].w.len();
        if l == 0 {
            return Err(structural("recourse.W", "no second-stage rows"));
        }
        let mut wsum = 0.0;
        for (s, r) in self.recourse.iter().enumerate() {
            if r.w.len() != l {
                return Err(structural(
                    format!("recourse[{s}].W"),
                    format!("expected {l} rows, got {}", r.w.len()),
                ));
            }
            let m = r.q.len();
            for (i, row) in r.w.iter().enumerate() {
                if row.len() != m {
                    return Err(structural(
                        format!("recourse[{s}].W[{i}]"),
                        format!("expected {m} columns to match q, got {}", row.len()),
                    ));
                }
            }
            if !(r.weight >= 0.0) {
                return Err(structural(format!("recourse[{s}].weight"), "negative weight"));
            }
            wsum += r.weight;
        }
        if (wsum - 1.0).abs() > 1e-9 {
            return Err(structural("recourse", format!("weights sum to {wsum}, expected 1")));
        }
        self.dist.validate(l, n)?;
        for s in 0..self.recourse.len() {
            if !self.dual_is_nonempty(s) {
                return Err(RecourseError::DualInfeasible { scenario: s });
            }
        }
        Ok(())
    }

    fn dual_is_nonempty(&self, s: usize) -> bool {
        let d = self.dual_polyhedron(s);
        let mut lp = LinearProgram::new(vec![0.0; d.dim]);
        for v in 0..d.dim {
            lp.set_free(v);
        }
        for (row, &rhs) in d.a.iter().zip(&d.b) {
            lp.add_row(row.clone(), RowSense::Le, rhs);
        }
        lp::solve(&lp).status == LpStatus::Optimal
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn l(&self) -> usize {
        self.recourse[0].w.len()
    }

    /// `D_s = {λ : W_sᵀ λ ≤ q_s}` as an H-representation over `R^l`.
    pub fn dual_polyhedron(&self, s: usize) -> HRep {
        let r = &self.recourse[s];
        let m = r.q.len();
        let a: Matrix = (0..m).map(|j| r.w.iter().map(|row| row[j]).collect()).collect();
        HRep {
            a,
            b: r.q.clone(),
            eqs: vec![],
            dim: self.l(),
        }
    }

    /// Normal fan of each `D_s`.
    pub fn fans(&self) -> Result<Vec<Fan>, RecourseError> {
        (0..self.recourse.len())
            .map(|s| {
                normal_fan(&self.dual_polyhedron(s)).map_err(|e| match e {
                    GeometryError::DualInfeasible => RecourseError::DualInfeasible { scenario: s },
                    other => other.into(),
                })
            })
            .collect()
    }

    /// Deterministic variant with `ξ ≡ E[ξ]`.
    pub fn mean_value_problem(&self) -> TwoStageProblem {
        let m = self.dist.mean_scenario();
        TwoStageProblem {
            dist: XiDistribution::atoms(vec![crate::measure::Atom {
                t: m.t,
                h: m.h,
                weight: 1.0,
            }]),
            ..self.clone()
        }
    }
}

/// `min { qᵀy : W y = h − T x, y ≥ 0 }`; duals are in `D`.
pub fn solve_recourse(prob: &TwoStageProblem, s: usize, x: &[f64], xi: &Scenario) -> LpSolution {
    let r = &prob.recourse[s];
    let psi = xi.residual(x);
    let mut lp = LinearProgram::new(r.q.clone());
    for (row, &p) in r.w.iter().zip(&psi) {
        lp.add_row(row.clone(), RowSense::Eq, p);
    }
    lp::solve(&lp)
}

/// Value and dual multipliers of `V_P(x) = Σ_P p_P Σ_s w_s Q_s(x, ξ̄_P)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VpEvaluation {
    pub value: f64,
    /// `cell_values[p] = Σ_s w_s Q_s(x, ξ̄_p)` (zero for null cells).
    pub cell_values: Vec<f64>,
    /// `duals[p][s]`, empty for null cells.
    pub duals: Vec<Vec<Vec<f64>>>,
}

pub fn eval_vp(prob: &TwoStageProblem, x: &[f64], cells: &[CellStats]) -> Result<VpEvaluation, RecourseError> {
    let mut value = 0.0;
    let mut cell_values = Vec::with_capacity(cells.len());
    let mut duals = Vec::with_capacity(cells.len());
    for (p, st) in cells.iter().enumerate() {
        let Some(mean) = st.mean.as_ref().filter(|_| st.prob > 0.0) else {
            cell_values.push(0.0);
            duals.push(vec![]);
            continue;
        };
        let mut cv = 0.0;
        let mut ds = Vec::with_capacity(prob.recourse.len());
        for (s, r) in prob.recourse.iter().enumerate() {
            let sol = solve_recourse(prob, s, x, mean);
            match sol.status {
                LpStatus::Optimal => {
                    cv += r.weight * sol.value;
                    ds.push(sol.dual);
                }
                LpStatus::Infeasible => {
                    return Err(RecourseError::RecourseInfeasible {
                        cell: p,
                        scenario: s,
                        ray: sol.ray.unwrap_or_default(),
                    })
                }
                LpStatus::Unbounded => return Err(RecourseError::DualInfeasible { scenario: s }),
            }
        }
        value += st.prob * cv;
        cell_values.push(cv);
        duals.push(ds);
    }
    Ok(VpEvaluation {
        value,
        cell_values,
        duals,
    })
}

/// `Σ_P p_P Σ_s w_s (−T̄_Pᵀ λ_{P,s})`, a subgradient of `V_P` at the
/// point `eval` was computed for.
pub fn subgradient_vp(prob: &TwoStageProblem, cells: &[CellStats], eval: &VpEvaluation) -> Vec<f64> {
    let n = prob.n();
    let mut g = vec![0.0; n];
    for (st, ds) in cells.iter().zip(&eval.duals) {
        let Some(mean) = st.mean.as_ref() else { continue };
        for (r, lam) in prob.recourse.iter().zip(ds) {
            let tl = mat_t_vec(&mean.t, lam, n);
            crate::linalg::axpy(&mut g, -st.prob * r.weight, &tl);
        }
    }
    g
}

/// Optimality cut `θ ≥ g·x + v` supporting `V_P` at `x`.
pub fn optimality_cut(prob: &TwoStageProblem, x: &[f64], cells: &[CellStats], eval: &VpEvaluation) -> OptimalityCut {
    let g = subgradient_vp(prob, cells, eval);
    OptimalityCut {
        v: eval.value - dot(&g, x),
        g,
    }
}

/// Induced constraints: `h − T x` must stay in the coverage of every fan for
/// all `ξ` in the support. One cut per coverage row (two per equality row).
pub fn induced_feasibility_cuts(prob: &TwoStageProblem, fans: &[Fan]) -> Vec<FeasibilityCut> {
    let n = prob.n();
    let mut cuts: Vec<FeasibilityCut> = Vec::new();
    for fan in fans {
        let cov = &fan.coverage;
        for (i, row) in cov.a.iter().enumerate() {
            let dirs: Vec<Vec<f64>> = if cov.is_eq(i) {
                vec![row.clone(), row.iter().map(|v| -v).collect()]
            } else {
                vec![row.clone()]
            };
            for a in dirs {
                // need aᵀ(h − T x) ≤ 0 for every ξ, i.e. −(Tᵀa)·x ≤ −aᵀh
                let cut = match &prob.dist {
                    XiDistribution::Atoms(d) => d
                        .atoms
                        .iter()
                        .filter(|at| at.weight > 0.0)
                        .map(|at| FeasibilityCut {
                            f: mat_t_vec(&at.t, &a, n).iter().map(|v| -v).collect(),
                            fbar: -dot(&a, &at.h),
                        })
                        .collect::<Vec<_>>(),
                    XiDistribution::UniformBox(u) => {
                        let bounds = |e: &Entry| match *e {
                            Entry::Constant(v) => (v, v),
                            Entry::Uniform([lo, hi]) => (lo, hi),
                        };
                        // x ≥ 0, so the worst case picks each coefficient's minimum
                        let f = (0..n)
                            .map(|j| {
                                u.t.iter()
                                    .zip(&a)
                                    .map(|(row, &ai)| {
                                        let (lo, hi) = bounds(&row[j]);
                                        -(ai * lo).min(ai * hi)
                                    })
                                    .sum()
                            })
                            .collect();
                        let fbar =
                            u.h.iter()
                                .zip(&a)
                                .map(|(e, &ai)| {
                                    let (lo, hi) = bounds(e);
                                    -(ai * lo).max(ai * hi)
                                })
                                .sum();
                        vec![FeasibilityCut { f, fbar }]
                    }
                };
                for c in cut {
                    if c.f.iter().all(|v| v.abs() < 1e-14) && c.fbar >= -1e-12 {
                        continue;
                    }
                    if !cuts.contains(&c) {
                        cuts.push(c);
                    }
                }
            }
        }
    }
    cuts
}

/// The induced constraints violated at `x` by more than `tol` (scaled).
pub fn violated_feasibility_cuts(prob: &TwoStageProblem, fans: &[Fan], x: &[f64], tol: f64) -> Vec<FeasibilityCut> {
    induced_feasibility_cuts(prob, fans)
        .into_iter()
        .filter(|c| dot(&c.f, x) - c.fbar > tol * (1.0 + c.fbar.abs()))
        .collect()
}

/// Solution of the aggregated master LP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasterSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// `Σ_P p_P Σ_s w_s q_sᵀ y_{P,s}`
    pub recourse_value: f64,
}

/// `min cᵀx + Σ_P p_P Σ_s w_s q_sᵀ y_{P,s}` subject to `A x = b`,
/// `T̄_P x + W_s y_{P,s} = h̄_P`, `f·x ≤ fbar` for each cut, and `x, y ≥ 0`.
pub fn solve_master(
    prob: &TwoStageProblem,
    cells: &[CellStats],
    feas_cuts: &[FeasibilityCut],
) -> Result<MasterSolution, RecourseError> {
    let n = prob.n();
    let live: Vec<&CellStats> = cells.iter().filter(|s| s.prob > 0.0 && s.mean.is_some()).collect();
    let ms: Vec<usize> = prob.recourse.iter().map(|r| r.q.len()).collect();
    let block: usize = ms.iter().sum();
    let nv = n + live.len() * block;

    let mut cost = vec![0.0; nv];
    cost[..n].copy_from_slice(&prob.c);
    let mut offset = n;
    for st in &live {
        for (r, &m) in prob.recourse.iter().zip(&ms) {
            for j in 0..m {
                cost[offset + j] = st.prob * r.weight * r.q[j];
            }
            offset += m;
        }
    }
    let mut lp = LinearProgram::new(cost);
    for (row, &bi) in prob.a.iter().zip(&prob.b) {
        let mut full = vec![0.0; nv];
        full[..n].copy_from_slice(row);
        lp.add_row(full, RowSense::Eq, bi);
    }
    for cut in feas_cuts {
        let mut full = vec![0.0; nv];
        full[..n].copy_from_slice(&cut.f);
        lp.add_row(full, RowSense::Le, cut.fbar);
    }
    let mut offset = n;
    for st in &live {
        let mean = st.mean.as_ref().unwrap();
        for (r, &m) in prob.recourse.iter().zip(&ms) {
            for i in 0..prob.l() {
                let mut full = vec![0.0; nv];
                full[..n].copy_from_slice(&mean.t[i]);
                full[offset..offset + m].copy_from_slice(&r.w[i]);
                lp.add_row(full, RowSense::Eq, mean.h[i]);
            }
            offset += m;
        }
    }
    let sol = lp::solve(&lp);
    match sol.status {
        LpStatus::Optimal => {
            let x = sol.primal[..n].to_vec();
            let recourse_value = sol.value - dot(&prob.c, &x);
            Ok(MasterSolution {
                value: sol.value,
                x,
                recourse_value,
            })
        }
        LpStatus::Infeasible => Err(RecourseError::MasterInfeasible),
        LpStatus::Unbounded => Err(RecourseError::MasterUnbounded {
            ray: sol.ray.map(|r| r[..n].to_vec()).unwrap_or_default(),
        }),
    }
}
