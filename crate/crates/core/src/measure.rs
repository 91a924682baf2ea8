//! Law of `ξ = (T, h)` and conditional moments over polyhedral cells.
//!
//! `ξ` is flattened to `(vec(T), h)` with `vec` row-major, so `T[i][j]` sits
//! at index `i·n + j` and `h[i]` at `l·n + i`. Only the coordinates that are
//! actually random take part in cell geometry; constant coordinates are
//! substituted into the constraint right-hand sides (see [`XiDistribution::reduce_row`]).

use crate::linalg::{axpy, norm, Matrix};
use crate::polytope::{self, GeometryError, HRep, TOL_GEOM};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("dimension mismatch at {path}: expected {expected}, got {got}")]
    DimensionMismatch { path: String, expected: usize, got: usize },
    #[error("atom weights must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },
    #[error("interval at {path} has lo > hi ({lo} > {hi})")]
    InvalidInterval { path: String, lo: f64, hi: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A realization (or conditional mean) of `ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "T")]
    pub t: Matrix,
    pub h: Vec<f64>,
}

impl Scenario {
    /// `h − T x`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.h
            .iter()
            .zip(&self.t)
            .map(|(hi, row)| hi - crate::linalg::dot(row, x))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "T")]
    pub t: Matrix,
    pub h: Vec<f64>,
    pub weight: f64,
}

/// One entry of a uniform-box law: a constant or an independent `U[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Constant(f64),
    Uniform([f64; 2]),
}

impl Entry {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Entry::Constant(v) => (v, v),
            Entry::Uniform([lo, hi]) => (lo, hi),
        }
    }

    fn is_random(&self) -> bool {
        let (lo, hi) = self.bounds();
        hi > lo
    }

    fn mean(&self) -> f64 {
        let (lo, hi) = self.bounds();
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBoxLaw {
    #[serde(rename = "T")]
    pub t: Vec<Vec<Entry>>,
    pub h: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum XiDistribution {
    Atoms(DiscreteLaw),
    UniformBox(UniformBoxLaw),
}

/// Probability and conditional mean of a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub prob: f64,
    /// `None` when `prob == 0` (conditional mean undefined).
    pub mean: Option<Scenario>,
}

impl CellStats {
    pub fn zero() -> Self {
        CellStats { prob: 0.0, mean: None }
    }
}

impl XiDistribution {
    pub fn atoms(atoms: Vec<Atom>) -> Self {
        XiDistribution::Atoms(DiscreteLaw { atoms })
    }

    pub fn uniform_box(t: Vec<Vec<Entry>>, h: Vec<Entry>) -> Self {
        XiDistribution::UniformBox(UniformBoxLaw { t, h })
    }

    /// `(l, n)`: rows of `T` / entries of `h`, and columns of `T`.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            XiDistribution::Atoms(d) => {
                let a = &d.atoms[0];
                (a.h.len(), a.t.first().map_or(0, |r| r.len()))
            }
            XiDistribution::UniformBox(u) => (u.h.len(), u.t.first().map_or(0, |r| r.len())),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, XiDistribution::Atoms(_))
    }

    pub fn validate(&self, l: usize, n: usize) -> Result<(), MeasureError> {
        let mismatch = |path: String, expected, got| MeasureError::DimensionMismatch { path, expected, got };
        match self {
            XiDistribution::Atoms(d) => {
                if d.atoms.is_empty() {
                    return Err(MeasureError::InvalidWeights { sum: 0.0 });
                }
                let mut sum = 0.0;
                for (k, a) in d.atoms.iter().enumerate() {
                    if a.h.len() != l {
                        return Err(mismatch(format!("atoms[{k}].h"), l, a.h.len()));
                    }
                    if a.t.len() != l {
                        return Err(mismatch(format!("atoms[{k}].T"), l, a.t.len()));
                    }
                    for (i, row) in a.t.iter().enumerate() {
                        if row.len() != n {
                            return Err(mismatch(format!("atoms[{k}].T[{i}]"), n, row.len()));
                        }
                    }
                    if !(a.weight >= 0.0) {
                        return Err(MeasureError::InvalidWeights { sum: a.weight });
                    }
                    sum += a.weight;
                }
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(MeasureError::InvalidWeights { sum });
                }
            }
            XiDistribution::UniformBox(u) => {
                if u.h.len() != l {
                    return Err(mismatch("h".into(), l, u.h.len()));
                }
                if u.t.len() != l {
                    return Err(mismatch("T".into(), l, u.t.len()));
                }
                for (i, row) in u.t.iter().enumerate() {
                    if row.len() != n {
                        return Err(mismatch(format!("T[{i}]"), n, row.len()));
                    }
                }
                let entries =
                    u.t.iter()
                        .enumerate()
                        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, e)| (format!("T[{i}][{j}]"), e)))
                        .chain(u.h.iter().enumerate().map(|(i, e)| (format!("h[{i}]"), e)));
                for (path, e) in entries {
                    let (lo, hi) = e.bounds();
                    if !(lo <= hi) {
                        return Err(MeasureError::InvalidInterval { path, lo, hi });
                    }
                }
            }
        }
        Ok(())
    }

    /// Length of the flattened `(vec(T), h)` vector.
    pub fn full_dim(&self) -> usize {
        let (l, n) = self.dims();
        l * n + l
    }

    pub fn t_index(&self, i: usize, j: usize) -> usize {
        let (_, n) = self.dims();
        i * n + j
    }

    pub fn h_index(&self, i: usize) -> usize {
        let (l, n) = self.dims();
        l * n + i
    }

    pub fn flatten(&self, s: &Scenario) -> Vec<f64> {
        let mut v: Vec<f64> = s.t.iter().flatten().copied().collect();
        v.extend_from_slice(&s.h);
        v
    }

    pub fn unflatten(&self, full: &[f64]) -> Scenario {
        let (l, n) = self.dims();
        Scenario {
            t: (0..l).map(|i| full[i * n..(i + 1) * n].to_vec()).collect(),
            h: full[l * n..].to_vec(),
        }
    }

    fn full_entries(&self) -> Vec<(f64, f64)> {
        match self {
            XiDistribution::Atoms(d) => {
                let flat: Vec<Vec<f64>> = d
                    .atoms
                    .iter()
                    .map(|a| {
                        self.flatten(&Scenario {
                            t: a.t.clone(),
                            h: a.h.clone(),
                        })
                    })
                    .collect();
                (0..self.full_dim())
                    .map(|k| {
                        let lo = flat.iter().map(|f| f[k]).fold(f64::INFINITY, f64::min);
                        let hi = flat.iter().map(|f| f[k]).fold(f64::NEG_INFINITY, f64::max);
                        (lo, hi)
                    })
                    .collect()
            }
            XiDistribution::UniformBox(u) => u.t.iter().flatten().chain(&u.h).map(|e| e.bounds()).collect(),
        }
    }

    /// Flattened indices of the coordinates that are not almost surely constant.
    pub fn random_coords(&self) -> Vec<usize> {
        match self {
            XiDistribution::UniformBox(u) => {
                u.t.iter()
                    .flatten()
                    .chain(&u.h)
                    .enumerate()
                    .filter(|(_, e)| e.is_random())
                    .map(|(k, _)| k)
                    .collect()
            }
            XiDistribution::Atoms(_) => self
                .full_entries()
                .into_iter()
                .enumerate()
                .filter(|(_, (lo, hi))| hi > lo)
                .map(|(k, _)| k)
                .collect(),
        }
    }

    /// Values of the constant coordinates (random ones hold their mean).
    fn constant_values(&self) -> Vec<f64> {
        let (t, h) = self.total_mean();
        self.flatten(&Scenario { t, h })
    }

    /// Restricts a constraint `row · ξ ≤ rhs` on the flattened space to the
    /// random coordinates by moving constant terms to the right-hand side.
    pub fn reduce_row(&self, full_row: &[f64], rhs: f64) -> (Vec<f64>, f64) {
        let rc = self.random_coords();
        let consts = self.constant_values();
        let mut is_random = vec![false; self.full_dim()];
        for &k in &rc {
            is_random[k] = true;
        }
        let mut b = rhs;
        for (k, &a) in full_row.iter().enumerate() {
            if !is_random[k] {
                b -= a * consts[k];
            }
        }
        (rc.iter().map(|&k| full_row[k]).collect(), b)
    }

    /// A flattened scenario restricted to the random coordinates.
    pub fn project(&self, s: &Scenario) -> Vec<f64> {
        let full = self.flatten(s);
        self.random_coords().iter().map(|&k| full[k]).collect()
    }

    /// Builds a full scenario from random-coordinate values.
    pub fn lift(&self, z: &[f64]) -> Scenario {
        let mut full = self.constant_values();
        for (&k, &v) in self.random_coords().iter().zip(z) {
            full[k] = v;
        }
        self.unflatten(&full)
    }

    /// `(E[T], E[h])`
    pub fn total_mean(&self) -> (Matrix, Vec<f64>) {
        match self {
            XiDistribution::Atoms(d) => {
                let (l, n) = self.dims();
                let mut t = vec![vec![0.0; n]; l];
                let mut h = vec![0.0; l];
                for a in &d.atoms {
                    for (tr, ar) in t.iter_mut().zip(&a.t) {
                        axpy(tr, a.weight, ar);
                    }
                    axpy(&mut h, a.weight, &a.h);
                }
                (t, h)
            }
            XiDistribution::UniformBox(u) => (
                u.t.iter().map(|row| row.iter().map(Entry::mean).collect()).collect(),
                u.h.iter().map(Entry::mean).collect(),
            ),
        }
    }

    pub fn mean_scenario(&self) -> Scenario {
        let (t, h) = self.total_mean();
        Scenario { t, h }
    }

    /// Statistics of the atoms with the given indices.
    pub fn atom_stats(&self, members: &[usize]) -> CellStats {
        let XiDistribution::Atoms(d) = self else {
            return CellStats::zero();
        };
        let (l, n) = self.dims();
        let mut prob = 0.0;
        let mut t = vec![vec![0.0; n]; l];
        let mut h = vec![0.0; l];
        for &k in members {
            let a = &d.atoms[k];
            prob += a.weight;
            for (tr, ar) in t.iter_mut().zip(&a.t) {
                axpy(tr, a.weight, ar);
            }
            axpy(&mut h, a.weight, &a.h);
        }
        if prob <= 0.0 {
            return CellStats::zero();
        }
        for row in t.iter_mut() {
            row.iter_mut().for_each(|v| *v /= prob);
        }
        h.iter_mut().for_each(|v| *v /= prob);
        CellStats {
            prob,
            mean: Some(Scenario { t, h }),
        }
    }

    /// Atoms (by index) lying in the cell; `strict` rows must hold strictly.
    pub fn atoms_in(&self, cell: &HRep, strict: &[usize]) -> Vec<usize> {
        let XiDistribution::Atoms(d) = self else {
            return vec![];
        };
        d.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| {
                let z = self.project(&Scenario {
                    t: a.t.clone(),
                    h: a.h.clone(),
                });
                cell.contains_strict(&z, strict, TOL_GEOM)
            })
            .map(|(k, _)| k)
            .collect()
    }

    /// `P[ξ ∈ cell]`, `E[T | cell]`, `E[h | cell]`. The cell lives on the
    /// random coordinates. Strict rows matter only for discrete laws.
    pub fn cell_stats(&self, cell: &HRep, strict: &[usize]) -> Result<CellStats, MeasureError> {
        let k = self.random_coords().len();
        if cell.dim != k {
            return Err(MeasureError::DimensionMismatch {
                path: "cell".into(),
                expected: k,
                got: cell.dim,
            });
        }
        cell.validate()?;
        match self {
            XiDistribution::Atoms(_) => Ok(self.atom_stats(&self.atoms_in(cell, strict))),
            XiDistribution::UniformBox(_) => self.uniform_cell_stats(cell),
        }
    }

    fn uniform_cell_stats(&self, cell: &HRep) -> Result<CellStats, MeasureError> {
        let rc = self.random_coords();
        let entries = self.full_entries();
        let lo: Vec<f64> = rc.iter().map(|&c| entries[c].0).collect();
        let width: Vec<f64> = rc.iter().map(|&c| entries[c].1 - entries[c].0).collect();
        let k = rc.len();

        // Map the support box onto [0, 1]^k: z = lo + width ⊙ u.
        let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
        for (i, (a, &b)) in cell.a.iter().zip(&cell.b).enumerate() {
            let scaled: Vec<f64> = a.iter().zip(&width).map(|(ai, wi)| ai * wi).collect();
            let rhs = b - crate::linalg::dot(a, &lo);
            let na = norm(&scaled);
            let eq = cell.is_eq(i);
            if na <= TOL_GEOM * (1.0 + rhs.abs()) {
                let violated = if eq { rhs.abs() > TOL_GEOM } else { rhs < -TOL_GEOM };
                if violated {
                    return Ok(CellStats::zero());
                }
                continue;
            }
            if eq {
                // A hyperplane through a full-dimensional box is a null set.
                return Ok(CellStats::zero());
            }
            rows.push((scaled.iter().map(|v| v / na).collect(), rhs / na, eq));
        }

        // Independent blocks: coordinates linked through a shared row.
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut c = i;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for (a, _, _) in &rows {
            let support: Vec<usize> = (0..k).filter(|&j| a[j].abs() > 1e-14).collect();
            for w in support.windows(2) {
                let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[x] = y;
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = vec![usize::MAX; k];
        for j in 0..k {
            let r = find(&mut parent, j);
            if block_of[r] == usize::MAX {
                block_of[r] = blocks.len();
                blocks.push(vec![]);
            }
            blocks[block_of[r]].push(j);
        }

        let mut prob = 1.0;
        let mut u_mean = vec![0.5; k];
        for block in &blocks {
            let block_rows: Vec<&(Vec<f64>, f64, bool)> = rows
                .iter()
                .filter(|(a, _, _)| block.iter().any(|&j| a[j].abs() > 1e-14))
                .collect();
            if block_rows.is_empty() {
                continue;
            }
            let bd = block.len();
            let mut h = HRep::bounding_box(&vec![0.0; bd], &vec![1.0; bd]);
            for (a, b, _) in block_rows {
                h.push(block.iter().map(|&j| a[j]).collect(), *b);
            }
            let v = polytope::h_to_v(&h)?;
            if v.is_empty() {
                return Ok(CellStats::zero());
            }
            let vc = polytope::volume::volume_from_parts(&v.vertices, &h, bd);
            if vc.volume <= 0.0 {
                return Ok(CellStats::zero());
            }
            prob *= vc.volume;
            let c = vc.centroid.expect("nonempty block has a centroid");
            for (&j, cj) in block.iter().zip(c) {
                u_mean[j] = cj;
            }
        }
        let z: Vec<f64> = (0..k).map(|j| lo[j] + width[j] * u_mean[j]).collect();
        Ok(CellStats {
            prob: prob.min(1.0),
            mean: Some(self.lift(&z)),
        })
    }

    /// One draw of `ξ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Scenario {
        match self {
            XiDistribution::Atoms(d) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for a in &d.atoms {
                    acc += a.weight;
                    if u < acc {
                        return Scenario {
                            t: a.t.clone(),
                            h: a.h.clone(),
                        };
                    }
                }
                let a = d.atoms.last().unwrap();
                Scenario {
                    t: a.t.clone(),
                    h: a.h.clone(),
                }
            }
            XiDistribution::UniformBox(u) => {
                let mut draw = |e: &Entry| match *e {
                    Entry::Constant(v) => v,
                    Entry::Uniform([lo, hi]) if hi > lo => rng.gen_range(lo..hi),
                    Entry::Uniform([lo, _]) => lo,
                };
                let t = u.t.iter().map(|row| row.iter().map(&mut draw).collect()).collect();
                let h = u.h.iter().map(&mut draw).collect();
                Scenario { t, h }
            }
        }
    }
}
