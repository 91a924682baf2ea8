//! Browser bindings for three small views of the solver.
//!
//! Each export takes plain numbers or text and returns a JSON string; the
//! `*_report` functions underneath are ordinary Rust and carry the logic.

use apm_core::cli::builtins::{cvar, prodmix, CVAR_ALPHA};
use apm_core::linalg::dot;
use apm_core::partition::adapted_partition;
use apm_core::polytope::{normal_fan, Classification, HRep, TOL_GEOM};
use apm_core::recourse::eval_vp;
use apm_core::solver::{g2apm, G2apmOptions, IterationRecord, Status};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct CvarCell {
    pub prob: f64,
    /// Conditional mean of the three returns.
    pub mean_returns: Vec<f64>,
    /// `"tail"` when the loss exceeds the threshold on the cell, `"body"` below it.
    pub side: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CvarReport {
    pub weights: Vec<f64>,
    pub threshold: f64,
    pub cells: Vec<CvarCell>,
    /// `τ + E[(loss − τ)₊] / (1 − α)`, exact on the adapted partition.
    pub cvar: f64,
    pub alpha: f64,
}

/// Adapted partition of the continuous portfolio model at `(w, τ)`.
/// Weights are rescaled onto the simplex.
pub fn cvar_report(w: [f64; 3], tau: f64) -> Result<CvarReport, String> {
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) || !tau.is_finite() {
        return Err("weights must be finite and nonnegative, threshold finite".into());
    }
    let s: f64 = w.iter().sum();
    if s <= 0.0 {
        return Err("weights sum to zero".into());
    }
    let weights: Vec<f64> = w.iter().map(|v| v / s).collect();
    let p = cvar();
    let x = vec![weights[0], weights[1], weights[2], tau.max(0.0), (-tau).max(0.0)];
    let fans = p.fans().map_err(|e| e.to_string())?;
    let part = adapted_partition(&p, &x, &fans).map_err(|e| e.to_string())?;
    let v = eval_vp(&p, &x, &part.stats()).map_err(|e| e.to_string())?;
    let cells = part
        .cells
        .iter()
        .filter_map(|c| {
            let m = c.stats.mean.as_ref()?;
            let residual = m.h[0] - dot(&m.t[0], &x);
            Some(CvarCell {
                prob: c.prob(),
                mean_returns: m.t[0][..3].to_vec(),
                side: if residual > 0.0 { "tail" } else { "body" },
            })
        })
        .collect();
    Ok(CvarReport {
        weights,
        threshold: tau,
        cells,
        cvar: (dot(&p.c, &x) + v.value) / (1.0 - CVAR_ALPHA),
        alpha: CVAR_ALPHA,
    })
}

#[derive(Debug, Serialize)]
pub struct HistoryReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

/// Bound history of the production-mix model.
pub fn prodmix_report(eps: f64, max_iter: usize) -> Result<HistoryReport, String> {
    let run = g2apm(
        &prodmix(),
        &G2apmOptions {
            eps,
            max_iter,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    Ok(HistoryReport {
        converged: run.report.status == Status::Converged,
        records: run.report.history,
    })
}

#[derive(Debug, Serialize)]
pub struct ConeView {
    pub dim: usize,
    /// Vertices of the face of `D` the cone is normal to.
    pub face: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct FanReport {
    /// Vertices of `D`, counter-clockwise.
    pub vertices: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
    pub cones: Vec<ConeView>,
    /// Index into `cones`, `None` outside the coverage.
    pub cone: Option<usize>,
    pub support: Option<f64>,
}

/// Parses `a₁ a₂ b` rows (one per line, `#` comments) of `D = {λ : aᵀλ ≤ b}`.
pub fn parse_rows(text: &str) -> Result<HRep, String> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", i + 1))?;
        if v.len() != 3 {
            return Err(format!("line {}: expected `a1 a2 b`, got {} numbers", i + 1, v.len()));
        }
        a.push(vec![v[0], v[1]]);
        b.push(v[2]);
    }
    if a.is_empty() {
        return Err("no constraints".into());
    }
    HRep::new(a, b, 2).map_err(|e| e.to_string())
}

/// Normal fan of a planar `D` and the cone containing `ψ`.
pub fn fan_report(rows: &str, psi: [f64; 2]) -> Result<FanReport, String> {
    let d = parse_rows(rows)?;
    let fan = normal_fan(&d).map_err(|e| e.to_string())?;
    let verts = &fan.dual_vrep.vertices;
    let c = [
        verts.iter().map(|v| v[0]).sum::<f64>() / verts.len().max(1) as f64,
        verts.iter().map(|v| v[1]).sum::<f64>() / verts.len().max(1) as f64,
    ];
    let mut vertices = verts.clone();
    vertices.sort_by(|p, q| {
        (p[1] - c[1])
            .atan2(p[0] - c[0])
            .total_cmp(&(q[1] - c[1]).atan2(q[0] - c[0]))
    });
    let cones = (0..fan.len())
        .map(|k| {
            let g = &fan.cones[k].generators;
            let mut rays = g.rays.clone();
            for l in &g.lineality {
                rays.push(l.clone());
                rays.push(l.iter().map(|v| -v).collect());
            }
            ConeView {
                dim: fan.cones[k].dim,
                face: fan.face_vertices(k).iter().map(|&i| verts[i].clone()).collect(),
                rays,
            }
        })
        .collect();
    let cone = match fan.classify_point(&psi, TOL_GEOM) {
        Ok(Classification::Cone(k)) => Some(k),
        Ok(Classification::OutsideCoverage) => None,
        Err(e) => return Err(e.to_string()),
    };
    Ok(FanReport {
        vertices,
        rays: fan.dual_vrep.rays.clone(),
        cones,
        cone,
        support: fan.support(&psi, TOL_GEOM),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cvar_partition(w1: f64, w2: f64, w3: f64, tau: f64) -> Result<String, JsValue> {
    to_js(cvar_report([w1, w2, w3], tau))
}

#[wasm_bindgen]
pub fn prodmix_history(eps: f64, max_iter: usize) -> Result<String, JsValue> {
    to_js(prodmix_report(eps, max_iter))
}

#[wasm_bindgen]
pub fn classify_2d(rows: &str, psi1: f64, psi2: f64) -> Result<String, JsValue> {
    to_js(fan_report(rows, [psi1, psi2]))
}
