//! Adaptive partition solver and an L-shaped reference solver.
//!
//! The partition solver alternates between an aggregated master LP over a
//! partition of the support (a lower bound, by Jensen's inequality) and
//! refining that partition with the cells adapted to the master's solution,
//! which makes the aggregated recourse exact at that point (an upper bound).

use crate::clock::Instant;
use crate::linalg::dot;
use crate::partition::{adapted_partition, common_refinement, Partition, PartitionError, MASS_TOL};
use crate::polytope::Fan;
use crate::recourse::{
    self, eval_vp, optimality_cut, solve_master, violated_feasibility_cuts, FeasibilityCut, LinearProgram, LpStatus,
    OptimalityCut, RecourseError, RowSense, TwoStageProblem,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Recourse(#[from] RecourseError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("invalid option {name}: {msg}")]
    InvalidOption { name: &'static str, msg: String },
}

/// Handling of first-stage points whose recourse is infeasible for some `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityMode {
    /// Stop with an error naming the offending cell.
    #[default]
    Error,
    /// On an infeasible iterate, add the violated induced constraints
    /// (`h − T x` in the recourse domain for every `ξ`) and re-solve.
    Cuts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseTimings {
    pub master_ms: f64,
    pub partition_ms: f64,
    pub refine_ms: f64,
    pub evaluate_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub z_lower: f64,
    pub z_upper: f64,
    pub gap: f64,
    /// Cells of the partition after this iteration's refinement
    /// (L-shaped: cells of the adapted partition used for the cut).
    pub cells: usize,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: Status,
    /// Best first-stage point found (attains `z_upper`).
    pub x: Vec<f64>,
    pub z_lower: f64,
    pub z_upper: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
}

impl SolveReport {
    pub fn gap(&self) -> f64 {
        self.z_upper - self.z_lower
    }
}

fn converged(lo: f64, hi: f64, eps: f64, relative: bool) -> bool {
    let tol = if relative { eps * hi.abs().max(1.0) } else { eps };
    hi - lo <= tol
}

fn check_eps(eps: f64, max_iter: usize) -> Result<(), SolverError> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(SolverError::InvalidOption {
            name: "eps",
            msg: format!("must be finite and nonnegative, got {eps}"),
        });
    }
    if max_iter == 0 {
        return Err(SolverError::InvalidOption {
            name: "max_iter",
            msg: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// Bounds that cross by rounding are merged at a value keeping both monotone.
fn settle(prev_lower: f64, lo: &mut f64, hi: &mut f64) {
    if *lo > *hi {
        let m = prev_lower.max(*hi);
        *lo = m;
        *hi = m;
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Feasibility-cut repair: on an iterate outside the recourse domain, add
/// the violated induced constraints, or fail if there are none (or the mode
/// says to fail).
fn repair(
    prob: &TwoStageProblem,
    fans: &[Fan],
    x: &[f64],
    mode: FeasibilityMode,
    cuts: &mut Vec<FeasibilityCut>,
    err: PartitionError,
) -> Result<(), SolverError> {
    if mode == FeasibilityMode::Error || !matches!(err, PartitionError::OutsideCoverage { .. }) {
        return Err(err.into());
    }
    let fresh: Vec<FeasibilityCut> = violated_feasibility_cuts(prob, fans, x, 1e-9)
        .into_iter()
        .filter(|c| !cuts.contains(c))
        .collect();
    if fresh.is_empty() {
        return Err(err.into());
    }
    cuts.extend(fresh);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct G2apmOptions {
    pub eps: f64,
    /// Gap measured relative to `max(1, |z_U|)`.
    pub relative: bool,
    pub max_iter: usize,
    pub feasibility: FeasibilityMode,
    /// Starting partition; `{Ξ}` when `None`.
    pub initial: Option<Partition>,
}

impl Default for G2apmOptions {
    fn default() -> Self {
        G2apmOptions {
            eps: 1e-6,
            relative: false,
            max_iter: 100,
            feasibility: FeasibilityMode::Error,
            initial: None,
        }
    }
}

/// Solver state after a run, for inspection and dumps.
#[derive(Debug, Clone)]
pub struct G2apmRun {
    pub report: SolveReport,
    pub partition: Partition,
}

pub fn g2apm(prob: &TwoStageProblem, opts: &G2apmOptions) -> Result<G2apmRun, SolverError> {
    g2apm_with_observer(prob, opts, |_, _| {})
}

/// Like [`g2apm`], calling `observe(record, partition)` after every iteration.
pub fn g2apm_with_observer(
    prob: &TwoStageProblem,
    opts: &G2apmOptions,
    mut observe: impl FnMut(&IterationRecord, &Partition),
) -> Result<G2apmRun, SolverError> {
    check_eps(opts.eps, opts.max_iter)?;
    let fans: Vec<Fan> = prob.fans()?;
    let mut cuts: Vec<FeasibilityCut> = vec![];
    let mut part = match &opts.initial {
        Some(p) => {
            let mass = p.total_prob();
            if (mass - 1.0).abs() > MASS_TOL {
                return Err(SolverError::InvalidOption {
                    name: "initial",
                    msg: format!("cells carry total probability {mass}, expected 1"),
                });
            }
            p.clone()
        }
        None => Partition::trivial(&prob.dist),
    };

    let mut z_lower = f64::NEG_INFINITY;
    let mut z_upper = f64::INFINITY;
    let mut best_x: Vec<f64> = vec![];
    let mut history = Vec::new();
    for k in 1..=opts.max_iter {
        let mut timings = PhaseTimings::default();

        let (master, adapted) = loop {
            let t = Instant::now();
            let master = solve_master(prob, &part.stats(), &cuts)?;
            timings.master_ms += ms(t);
            let t = Instant::now();
            let adapted = adapted_partition(prob, &master.x, &fans);
            timings.partition_ms += ms(t);
            match adapted {
                Ok(a) => break (master, a),
                Err(e) => repair(prob, &fans, &master.x, opts.feasibility, &mut cuts, e)?,
            }
        };
        let prev_lower = z_lower;
        z_lower = z_lower.max(master.value);
        let x = master.x;

        let t = Instant::now();
        part = common_refinement(&part, &adapted, &prob.dist)?;
        timings.refine_ms = ms(t);

        let t = Instant::now();
        let v = eval_vp(prob, &x, &part.stats())?;
        timings.evaluate_ms = ms(t);
        let upper = dot(&prob.c, &x) + v.value;
        if upper < z_upper {
            z_upper = upper;
            best_x = x.clone();
        }
        settle(prev_lower, &mut z_lower, &mut z_upper);

        let rec = IterationRecord {
            k,
            x,
            z_lower,
            z_upper,
            gap: z_upper - z_lower,
            cells: part.len(),
            timings,
        };
        observe(&rec, &part);
        history.push(rec);
        if converged(z_lower, z_upper, opts.eps, opts.relative) {
            return Ok(G2apmRun {
                report: SolveReport {
                    status: Status::Converged,
                    x: best_x,
                    z_lower,
                    z_upper,
                    iterations: k,
                    history,
                },
                partition: part,
            });
        }
    }
    Ok(G2apmRun {
        report: SolveReport {
            status: Status::IterationLimit,
            x: best_x,
            z_lower,
            z_upper,
            iterations: opts.max_iter,
            history,
        },
        partition: part,
    })
}

/// Lower model for `θ` before any optimality cut exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaInit {
    /// `θ ≥ V_{Ξ}(x)`: the recourse at the overall mean, kept as LP rows.
    MeanValue,
    /// `θ ≥ bound`
    Constant(f64),
}

#[derive(Debug, Clone)]
pub struct LShapedOptions {
    pub eps: f64,
    pub relative: bool,
    pub max_iter: usize,
    pub feasibility: FeasibilityMode,
    pub theta: ThetaInit,
}

impl Default for LShapedOptions {
    fn default() -> Self {
        LShapedOptions {
            eps: 1e-6,
            relative: false,
            max_iter: 500,
            feasibility: FeasibilityMode::Error,
            theta: ThetaInit::MeanValue,
        }
    }
}

/// Cuts collected by the L-shaped method.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CutPool {
    pub optimality: Vec<OptimalityCut>,
    pub feasibility: Vec<FeasibilityCut>,
}

#[derive(Debug, Clone)]
pub struct LShapedRun {
    pub report: SolveReport,
    pub cuts: CutPool,
}

fn lshaped_master(prob: &TwoStageProblem, pool: &CutPool, theta: ThetaInit) -> Result<(f64, Vec<f64>), SolverError> {
    let n = prob.n();
    let mean = prob.dist.mean_scenario();
    let jensen = matches!(theta, ThetaInit::MeanValue);
    let ms: Vec<usize> = prob.recourse.iter().map(|r| r.q.len()).collect();
    let extra: usize = if jensen { ms.iter().sum() } else { 0 };
    let nv = n + 1 + extra;
    let mut cost = vec![0.0; nv];
    cost[..n].copy_from_slice(&prob.c);
    cost[n] = 1.0;
    let mut lp = LinearProgram::new(cost);
    lp.set_free(n);
    let row = |xpart: &[f64], th: f64| {
        let mut r = vec![0.0; nv];
        r[..n].copy_from_slice(xpart);
        r[n] = th;
        r
    };
    for (a, &b) in prob.a.iter().zip(&prob.b) {
        lp.add_row(row(a, 0.0), RowSense::Eq, b);
    }
    for c in &pool.feasibility {
        lp.add_row(row(&c.f, 0.0), RowSense::Le, c.fbar);
    }
    for c in &pool.optimality {
        let g: Vec<f64> = c.g.iter().map(|v| -v).collect();
        lp.add_row(row(&g, 1.0), RowSense::Ge, c.v);
    }
    match theta {
        ThetaInit::Constant(bound) => lp.add_row(row(&vec![0.0; n], 1.0), RowSense::Ge, bound),
        ThetaInit::MeanValue => {
            // θ − Σ_s w_s q_sᵀ y_s ≥ 0,  T̄ x + W_s y_s = h̄
            let mut link = row(&vec![0.0; n], 1.0);
            let mut off = n + 1;
            for (r, &m) in prob.recourse.iter().zip(&ms) {
                for j in 0..m {
                    link[off + j] = -r.weight * r.q[j];
                }
                for i in 0..prob.l() {
                    let mut e = row(&mean.t[i], 0.0);
                    e[off..off + m].copy_from_slice(&r.w[i]);
                    lp.add_row(e, RowSense::Eq, mean.h[i]);
                }
                off += m;
            }
            lp.add_row(link, RowSense::Ge, 0.0);
        }
    }
    let sol = recourse::lp::solve(&lp);
    match sol.status {
        LpStatus::Optimal => Ok((sol.value, sol.primal[..n].to_vec())),
        LpStatus::Infeasible => Err(RecourseError::MasterInfeasible.into()),
        LpStatus::Unbounded => Err(RecourseError::MasterUnbounded {
            ray: sol.ray.map(|r| r[..n].to_vec()).unwrap_or_default(),
        }
        .into()),
    }
}

/// Kelley cutting planes on `cᵀx + θ` with exact expected-recourse cuts
/// from the partition adapted to each iterate.
pub fn lshaped(prob: &TwoStageProblem, opts: &LShapedOptions) -> Result<LShapedRun, SolverError> {
    check_eps(opts.eps, opts.max_iter)?;
    let fans = prob.fans()?;
    let mut pool = CutPool::default();
    let mut z_lower = f64::NEG_INFINITY;
    let mut z_upper = f64::INFINITY;
    let mut best_x = vec![];
    let mut history = Vec::new();
    for k in 1..=opts.max_iter {
        let mut timings = PhaseTimings::default();
        let (lb, x, part) = loop {
            let t = Instant::now();
            let (lb, x) = lshaped_master(prob, &pool, opts.theta)?;
            timings.master_ms += ms(t);
            let t = Instant::now();
            let part = adapted_partition(prob, &x, &fans);
            timings.partition_ms += ms(t);
            match part {
                Ok(p) => break (lb, x, p),
                Err(e) => repair(prob, &fans, &x, opts.feasibility, &mut pool.feasibility, e)?,
            }
        };
        let prev_lower = z_lower;
        z_lower = z_lower.max(lb);
        let t = Instant::now();
        let stats = part.stats();
        let v = eval_vp(prob, &x, &stats)?;
        timings.evaluate_ms = ms(t);
        let upper = dot(&prob.c, &x) + v.value;
        if upper < z_upper {
            z_upper = upper;
            best_x = x.clone();
        }
        settle(prev_lower, &mut z_lower, &mut z_upper);
        pool.optimality.push(optimality_cut(prob, &x, &stats, &v));
        history.push(IterationRecord {
            k,
            x,
            z_lower,
            z_upper,
            gap: z_upper - z_lower,
            cells: part.len(),
            timings,
        });
        if converged(z_lower, z_upper, opts.eps, opts.relative) {
            return Ok(LShapedRun {
                report: SolveReport {
                    status: Status::Converged,
                    x: best_x,
                    z_lower,
                    z_upper,
                    iterations: k,
                    history,
                },
                cuts: pool,
            });
        }
    }
    Ok(LShapedRun {
        report: SolveReport {
            status: Status::IterationLimit,
            x: best_x,
            z_lower,
            z_upper,
            iterations: opts.max_iter,
            history,
        },
        cuts: pool,
    })
}

/// Worst-case iteration count `⌈(√n·L·M/ε + 1)^n⌉` of the partition solver
/// for an `L`-Lipschitz objective on a feasible set of diameter `M`.
/// Saturates at `u64::MAX`.
pub fn iteration_bound(n: usize, lipschitz: f64, diameter: f64, eps: f64) -> Result<u64, SolverError> {
    let bad = |name, v: f64| SolverError::InvalidOption {
        name,
        msg: format!("must be finite and positive, got {v}"),
    };
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(bad("eps", eps));
    }
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(bad("lipschitz", lipschitz));
    }
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(bad("diameter", diameter));
    }
    if n == 0 {
        return Err(SolverError::InvalidOption {
            name: "n",
            msg: "must be positive".into(),
        });
    }
    let base = (n as f64).sqrt() * lipschitz * diameter / eps + 1.0;
    let v = (base.powi(n.min(i32::MAX as usize) as i32) * (1.0 - 1e-12)).ceil();
    Ok(if v.is_finite() && v < u64::MAX as f64 {
        v as u64
    } else {
        u64::MAX
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(iteration_bound(1, 1.0, 1.0, 1.0).unwrap(), 2);
        assert_eq!(iteration_bound(2, 1.0, 1.0, 1.0).unwrap(), 6);
        assert_eq!(iteration_bound(2, 1.0, 2.0_f64.sqrt(), 1.0).unwrap(), 9);
        assert!(iteration_bound(0, 1.0, 1.0, 1.0).is_err());
        assert!(iteration_bound(1, 0.0, 1.0, 1.0).is_err());
        assert_eq!(iteration_bound(50, 1e6, 1e6, 1e-9).unwrap(), u64::MAX);
        assert!(iteration_bound(2, 1.0, 1.0, 0.0).is_err());
        assert!(iteration_bound(2, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn crossed_bounds_settle() {
        let (mut lo, mut hi) = (3.0 + 1e-15, 3.0);
        settle(f64::NEG_INFINITY, &mut lo, &mut hi);
        assert_eq!((lo, hi), (3.0, 3.0));
        let (mut lo, mut hi) = (3.0 + 2e-15, 3.0);
        settle(3.0 + 1e-15, &mut lo, &mut hi);
        assert_eq!((lo, hi), (3.0 + 1e-15, 3.0 + 1e-15));
    }

    #[test]
    fn convergence_test() {
        assert!(converged(1.0, 1.0 + 1e-7, 1e-6, false));
        assert!(!converged(1.0, 1.1, 1e-6, false));
        assert!(converged(1000.0, 1000.5, 1e-3, true));
    }
}
