//! Run modes and reports.

use crate::clock::Instant;
use crate::measure::{Atom, XiDistribution};
use crate::partition::{adapted_partition, Partition, PartitionError};
use crate::recourse::{eval_vp, solve_master, TwoStageProblem};
use crate::solver::{
    g2apm, lshaped, FeasibilityMode, G2apmOptions, IterationRecord, LShapedOptions, PhaseTimings, SolverError, Status,
};
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    G2apm,
    Lshaped,
    Meanvalue,
    SaaRef,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        <Mode as ValueEnum>::from_str(s, true).ok()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub eps: f64,
    pub relative: bool,
    pub max_iter: usize,
    pub seed: u64,
    pub feasibility: FeasibilityMode,
    pub samples: usize,
    pub replications: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::G2apm,
            eps: 1e-6,
            relative: false,
            max_iter: 100,
            seed: 0,
            feasibility: FeasibilityMode::Error,
            samples: 10_000,
            replications: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaaSummary {
    pub samples: usize,
    pub replications: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    /// Half-width of the 95% Student-t interval for the mean.
    pub half_width: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub mode: Mode,
    pub status: Status,
    pub x: Vec<f64>,
    pub z_lower: f64,
    pub z_upper: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub timings: PhaseTimings,
    pub saa: Option<SaaSummary>,
    pub partition: Option<Partition>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Recourse(#[from] crate::recourse::RecourseError),
    #[error("invalid option {name}: {msg}")]
    InvalidOption { name: &'static str, msg: String },
}

fn total_timings(h: &[IterationRecord]) -> PhaseTimings {
    h.iter().fold(PhaseTimings::default(), |mut acc, r| {
        acc.master_ms += r.timings.master_ms;
        acc.partition_ms += r.timings.partition_ms;
        acc.refine_ms += r.timings.refine_ms;
        acc.evaluate_ms += r.timings.evaluate_ms;
        acc
    })
}

pub fn run(prob: &TwoStageProblem, cfg: &RunConfig) -> Result<RunReport, RunError> {
    match cfg.mode {
        Mode::G2apm => {
            let out = g2apm(
                prob,
                &G2apmOptions {
                    eps: cfg.eps,
                    relative: cfg.relative,
                    max_iter: cfg.max_iter,
                    feasibility: cfg.feasibility,
                    initial: None,
                },
            )?;
            let r = out.report;
            Ok(RunReport {
                mode: cfg.mode,
                status: r.status,
                timings: total_timings(&r.history),
                x: r.x,
                z_lower: r.z_lower,
                z_upper: r.z_upper,
                iterations: r.iterations,
                history: r.history,
                saa: None,
                partition: Some(out.partition),
            })
        }
        Mode::Lshaped => {
            let out = lshaped(prob, &lshaped_options(cfg))?;
            let r = out.report;
            Ok(RunReport {
                mode: cfg.mode,
                status: r.status,
                timings: total_timings(&r.history),
                x: r.x,
                z_lower: r.z_lower,
                z_upper: r.z_upper,
                iterations: r.iterations,
                history: r.history,
                saa: None,
                partition: None,
            })
        }
        Mode::Meanvalue => mean_value(prob),
        Mode::SaaRef => saa_reference(prob, cfg),
    }
}

fn lshaped_options(cfg: &RunConfig) -> LShapedOptions {
    LShapedOptions {
        eps: cfg.eps,
        relative: cfg.relative,
        max_iter: cfg.max_iter.max(1),
        feasibility: cfg.feasibility,
        ..Default::default()
    }
}

/// Master over `{Ξ}` (a lower bound) and the exact objective at its solution.
fn mean_value(prob: &TwoStageProblem) -> Result<RunReport, RunError> {
    let mut timings = PhaseTimings::default();
    let t = Instant::now();
    let trivial = Partition::trivial(&prob.dist);
    let m = solve_master(prob, &trivial.stats(), &[])?;
    timings.master_ms = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let fans = prob.fans()?;
    let upper = match adapted_partition(prob, &m.x, &fans) {
        Ok(p) => crate::linalg::dot(&prob.c, &m.x) + eval_vp(prob, &m.x, &p.stats())?.value,
        Err(PartitionError::OutsideCoverage { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    timings.evaluate_ms = t.elapsed().as_secs_f64() * 1e3;
    let rec = IterationRecord {
        k: 1,
        x: m.x.clone(),
        z_lower: m.value,
        z_upper: upper,
        gap: upper - m.value,
        cells: 1,
        timings,
    };
    Ok(RunReport {
        mode: Mode::Meanvalue,
        status: Status::Converged,
        x: m.x,
        z_lower: m.value,
        z_upper: upper,
        iterations: 1,
        history: vec![rec],
        timings,
        saa: None,
        partition: Some(trivial),
    })
}

/// Independent sample-average problems solved to optimality; reports the
/// spread of their optimal values.
fn saa_reference(prob: &TwoStageProblem, cfg: &RunConfig) -> Result<RunReport, RunError> {
    if cfg.samples == 0 || cfg.replications < 2 {
        return Err(RunError::InvalidOption {
            name: "samples/replications",
            msg: "need at least one sample and two replications".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut values = Vec::with_capacity(cfg.replications);
    let mut history = Vec::with_capacity(cfg.replications);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut timings = PhaseTimings::default();
    for rep in 0..cfg.replications {
        let w = 1.0 / cfg.samples as f64;
        let atoms = (0..cfg.samples)
            .map(|_| {
                let s = prob.dist.sample(&mut rng);
                Atom {
                    t: s.t,
                    h: s.h,
                    weight: w,
                }
            })
            .collect();
        let sample = TwoStageProblem {
            dist: XiDistribution::atoms(atoms),
            ..prob.clone()
        };
        let out = lshaped(&sample, &lshaped_options(cfg))?;
        let r = out.report;
        let t = total_timings(&r.history);
        timings.master_ms += t.master_ms;
        timings.partition_ms += t.partition_ms;
        timings.evaluate_ms += t.evaluate_ms;
        values.push(r.z_upper);
        if best.as_ref().is_none_or(|(v, _)| r.z_upper < *v) {
            best = Some((r.z_upper, r.x.clone()));
        }
        history.push(IterationRecord {
            k: rep + 1,
            x: r.x,
            z_lower: r.z_lower,
            z_upper: r.z_upper,
            gap: r.z_upper - r.z_lower,
            cells: r.iterations,
            timings: t,
        });
    }
    let nrep = values.len() as f64;
    let mean = values.iter().sum::<f64>() / nrep;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nrep - 1.0);
    let std_dev = var.sqrt();
    let tq = StudentsT::new(0.0, 1.0, nrep - 1.0)
        .expect("valid degrees of freedom")
        .inverse_cdf(0.975);
    let half_width = tq * std_dev / nrep.sqrt();
    Ok(RunReport {
        mode: Mode::SaaRef,
        status: Status::Converged,
        x: best.map(|b| b.1).unwrap_or_default(),
        z_lower: mean - half_width,
        z_upper: mean + half_width,
        iterations: cfg.replications,
        history,
        timings,
        saa: Some(SaaSummary {
            samples: cfg.samples,
            replications: cfg.replications,
            values,
            mean,
            std_dev,
            half_width,
        }),
        partition: None,
    })
}

/// Newline-delimited records: one per iteration (per replication for
/// `saa-ref`) and a closing summary. Wall-clock times are left out so equal
/// inputs give identical bytes.
pub fn ndjson(report: &RunReport) -> String {
    let mut out = String::new();
    for r in &report.history {
        let rec = if report.mode == Mode::SaaRef {
            json!({
                "record": "replication",
                "replication": r.k,
                "x": r.x,
                "value": r.z_upper,
                "lshaped_iterations": r.cells,
            })
        } else {
            json!({
                "record": "iteration",
                "k": r.k,
                "x": r.x,
                "z_lower": r.z_lower,
                "z_upper": r.z_upper,
                "gap": r.gap,
                "cells": r.cells,
            })
        };
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    let mut summary = json!({
        "record": "summary",
        "mode": report.mode,
        "status": report.status,
        "x": report.x,
        "z_lower": report.z_lower,
        "z_upper": report.z_upper,
        "gap": report.z_upper - report.z_lower,
        "iterations": report.iterations,
    });
    if let Some(p) = &report.partition {
        summary["cells"] = json!(p.len());
    }
    if let Some(s) = &report.saa {
        summary["saa"] = serde_json::to_value(s).expect("summary serializes");
    }
    out.push_str(&summary.to_string());
    out.push('\n');
    out
}

fn fmt_x(x: &[f64]) -> String {
    format!(
        "({})",
        x.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(", ")
    )
}

/// Iteration table with bounds to two decimals, then totals and timings.
pub fn render_table(report: &RunReport) -> String {
    let mut s = String::new();
    if report.mode == Mode::SaaRef {
        let _ = writeln!(s, "{:>4}  {:>14}  {:>6}  x", "rep", "value", "iters");
        for r in &report.history {
            let _ = writeln!(s, "{:>4}  {:>14.2}  {:>6}  {}", r.k, r.z_upper, r.cells, fmt_x(&r.x));
        }
        if let Some(a) = &report.saa {
            let _ = writeln!(
                s,
                "SAA mean {:.2} ± {:.2} (95%, {} replications × {} samples)",
                a.mean, a.half_width, a.replications, a.samples
            );
        }
    } else {
        let _ = writeln!(
            s,
            "{:>4}  {:>14}  {:>14}  {:>10}  {:>6}  x_k",
            "k", "z_L", "z_U", "gap", "|P|"
        );
        for r in &report.history {
            let _ = writeln!(
                s,
                "{:>4}  {:>14.2}  {:>14.2}  {:>10.4}  {:>6}  {}",
                r.k,
                r.z_lower,
                r.z_upper,
                r.gap,
                r.cells,
                fmt_x(&r.x)
            );
        }
    }
    let status = match report.status {
        Status::Converged => "converged",
        Status::IterationLimit => "iteration limit reached",
    };
    let _ = writeln!(s, "status: {status} after {} iterations", report.iterations);
    let _ = writeln!(s, "incumbent x = {}", fmt_x(&report.x));
    let _ = writeln!(s, "bounds: [{:.2}, {:.2}]", report.z_lower, report.z_upper);
    let t = &report.timings;
    let _ = writeln!(
        s,
        "time (ms): master {:.1}, partition {:.1}, refinement {:.1}, upper bound {:.1}",
        t.master_ms, t.partition_ms, t.refine_ms, t.evaluate_ms
    );
    s
}

/// Partition cells as newline-delimited records.
pub fn partition_ndjson(p: &Partition) -> String {
    p.records()
        .iter()
        .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
        .collect()
}
