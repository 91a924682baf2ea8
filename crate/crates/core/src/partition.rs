//! Partitions of the support of `ξ` into polyhedral cells.
//!
//! The partition adapted to a first-stage point `x` has one cell per cone
//! `N` of the normal fan: `E_{N,x} = {ξ : h − T x ∈ ri N}`. On each such cell
//! the recourse function is linear in `ξ`, so conditioning on the cell loses
//! nothing. Cells carry lineage tags `(anchor, scenario, cone)` recording
//! which adapted partitions they were cut from.

use crate::linalg::{norm, Matrix};
use crate::measure::{CellStats, MeasureError, Scenario, XiDistribution};
use crate::polytope::{h_to_v, intersect, Classification, ClassifyError, Fan, GeometryError, HRep, TOL_GEOM};
use crate::recourse::TwoStageProblem;
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

/// Cells with probability at or below this are dropped.
pub const PROB_EPS: f64 = 1e-12;
/// Allowed total probability lost by a refinement.
pub const MASS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error(
        "probability {mass} of ξ maps outside the domain of recourse scenario {scenario}: recourse infeasible at x"
    )]
    OutsideCoverage { scenario: usize, mass: f64 },
    #[error("refinement lost probability mass: kept {kept}, expected {expected}")]
    MassLost { kept: f64, expected: f64 },
    #[error("dimension mismatch: x has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Tag {
    /// Index into [`Partition::anchors`].
    pub anchor: usize,
    pub scenario: usize,
    /// Cone index in the scenario's fan.
    pub cone: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Constraints over the random coordinates of `ξ`.
    pub geom: HRep,
    /// Rows of `geom` that hold strictly on the cell.
    pub strict: Vec<usize>,
    pub tags: Vec<Tag>,
    pub stats: CellStats,
    /// Member atoms for discrete laws.
    pub atoms: Option<Vec<usize>>,
}

impl Cell {
    pub fn prob(&self) -> f64 {
        self.stats.prob
    }

    pub fn signature(&self) -> String {
        if self.tags.is_empty() {
            return "-".into();
        }
        self.tags
            .iter()
            .map(|t| format!("a{}s{}c{}", t.anchor, t.scenario, t.cone))
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub cells: Vec<Cell>,
    /// First-stage points whose adapted partitions were merged in.
    pub anchors: Vec<Vec<f64>>,
}

/// Row of a partition dump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub cell: usize,
    pub prob: f64,
    pub signature: String,
    pub mean: Option<Scenario>,
}

impl Partition {
    /// `{Ξ}`
    pub fn trivial(dist: &XiDistribution) -> Self {
        let k = dist.random_coords().len();
        let atoms = match dist {
            XiDistribution::Atoms(d) => Some((0..d.atoms.len()).filter(|&i| d.atoms[i].weight > 0.0).collect()),
            XiDistribution::UniformBox(_) => None,
        };
        Partition {
            cells: vec![Cell {
                geom: HRep::universe(k),
                strict: vec![],
                tags: vec![],
                stats: CellStats {
                    prob: 1.0,
                    mean: Some(dist.mean_scenario()),
                },
                atoms,
            }],
            anchors: vec![],
        }
    }

    /// Builds a partition from explicit cells (e.g. user supplied), computing
    /// their statistics and dropping null cells.
    pub fn from_cells(dist: &XiDistribution, cells: Vec<(HRep, Vec<usize>)>) -> Result<Self, PartitionError> {
        let mut out = Vec::new();
        for (geom, strict) in cells {
            let (stats, atoms) = if dist.is_discrete() {
                let a = dist.atoms_in(&geom, &strict);
                (dist.atom_stats(&a), Some(a))
            } else {
                (dist.cell_stats(&geom, &strict)?, None)
            };
            if stats.prob > PROB_EPS {
                out.push(Cell {
                    geom,
                    strict,
                    tags: vec![],
                    stats,
                    atoms,
                });
            }
        }
        Ok(Partition {
            cells: out,
            anchors: vec![],
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn stats(&self) -> Vec<CellStats> {
        self.cells.iter().map(|c| c.stats.clone()).collect()
    }

    pub fn total_prob(&self) -> f64 {
        self.cells.iter().map(Cell::prob).sum()
    }

    pub fn records(&self) -> Vec<CellRecord> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| CellRecord {
                cell: i,
                prob: c.prob(),
                signature: c.signature(),
                mean: c.stats.mean.clone(),
            })
            .collect()
    }

    /// Human-readable table: probability, lineage and conditional mean.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>5}  {:>10}  {:<24}  conditional mean (T | h)",
            "cell", "prob", "lineage"
        );
        for r in self.records() {
            let mean = r.mean.map_or_else(String::new, |m| {
                let t =
                    m.t.iter()
                        .map(|row| row.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" "))
                        .collect::<Vec<_>>()
                        .join("; ");
                let h = m.h.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ");
                format!("[{t}] | [{h}]")
            });
            let _ = writeln!(s, "{:>5}  {:>10.6}  {:<24}  {}", r.cell, r.prob, r.signature, mean);
        }
        s
    }
}

/// How the preimage of a cone under `ξ ↦ h − T x` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreimageRoute {
    /// Translation when `T` is constant, the general map otherwise.
    Auto,
    /// Constraints `M h − M T x` with coefficients on every entry of `(T, h)`.
    General,
    /// `M h ≤ M T x` for constant `T` (falls back to `General` otherwise).
    Translate,
}

/// `{ξ : h − T x ∈ ri N}` over the random coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimage {
    pub geom: HRep,
    pub strict: Vec<usize>,
    /// Some constant constraint fails: the preimage is empty.
    pub empty: bool,
}

fn t_is_constant(dist: &XiDistribution) -> bool {
    let (l, n) = dist.dims();
    let rc = dist.random_coords();
    rc.iter().all(|&k| k >= l * n)
}

pub fn cone_preimage(dist: &XiDistribution, x: &[f64], fan: &Fan, cone: usize, route: PreimageRoute) -> Preimage {
    let (l, n) = dist.dims();
    let k = dist.random_coords().len();
    let c = &fan.cones[cone];
    let translate = matches!(route, PreimageRoute::Auto | PreimageRoute::Translate) && t_is_constant(dist);
    let t_const = dist.mean_scenario().t;
    let tx: Vec<f64> = t_const.iter().map(|row| crate::linalg::dot(row, x)).collect();

    let mut geom = HRep::universe(k);
    let mut strict = Vec::new();
    let mut empty = false;
    for (r, m) in c.hrep.a.iter().enumerate() {
        let eq = c.hrep.is_eq(r);
        let mut full = vec![0.0; l * n + l];
        let mut rhs = 0.0;
        for i in 0..l {
            full[l * n + i] = m[i];
            if translate {
                rhs += m[i] * tx[i];
            } else {
                for j in 0..n {
                    full[i * n + j] = -m[i] * x[j];
                }
            }
        }
        let scale = norm(&full).max(rhs.abs()).max(1.0);
        let (a, b) = dist.reduce_row(&full, rhs);
        if norm(&a) <= 1e-12 * scale {
            let t = TOL_GEOM * scale;
            let ok = if eq { b.abs() <= t } else { b > t };
            if !ok {
                empty = true;
            }
            continue;
        }
        if eq {
            geom.push_eq(a, b);
        } else {
            strict.push(geom.len());
            geom.push(a, b);
        }
    }
    Preimage { geom, strict, empty }
}

/// Preimages of every cone of `fan`, in fan order (null ones included).
pub fn cone_preimages(dist: &XiDistribution, x: &[f64], fan: &Fan, route: PreimageRoute) -> Vec<Preimage> {
    (0..fan.cones.len())
        .map(|c| cone_preimage(dist, x, fan, c, route))
        .collect()
}

/// The partition of the support adapted to `x`, merged over recourse scenarios.
pub fn adapted_partition(prob: &TwoStageProblem, x: &[f64], fans: &[Fan]) -> Result<Partition, PartitionError> {
    adapted_partition_with(prob, x, fans, PreimageRoute::Auto)
}

pub fn adapted_partition_with(
    prob: &TwoStageProblem,
    x: &[f64],
    fans: &[Fan],
    route: PreimageRoute,
) -> Result<Partition, PartitionError> {
    if x.len() != prob.n() {
        return Err(PartitionError::DimensionMismatch {
            expected: prob.n(),
            got: x.len(),
        });
    }
    let mut acc: Option<Partition> = None;
    for (s, fan) in fans.iter().enumerate() {
        let part = adapted_single(&prob.dist, x, fan, s, route)?;
        acc = Some(match acc {
            None => part,
            Some(p) => common_refinement(&p, &part, &prob.dist)?,
        });
    }
    Ok(acc.expect("at least one recourse scenario"))
}

fn adapted_single(
    dist: &XiDistribution,
    x: &[f64],
    fan: &Fan,
    s: usize,
    route: PreimageRoute,
) -> Result<Partition, PartitionError> {
    let tag = |cone| Tag {
        anchor: 0,
        scenario: s,
        cone,
    };
    let mut cells = Vec::new();
    match dist {
        XiDistribution::Atoms(d) => {
            let mut members: Vec<Vec<usize>> = vec![vec![]; fan.cones.len()];
            let mut outside = 0.0;
            for (k, a) in d.atoms.iter().enumerate() {
                if a.weight <= 0.0 {
                    continue;
                }
                let psi = Scenario {
                    t: a.t.clone(),
                    h: a.h.clone(),
                }
                .residual(x);
                let cls = match fan.classify_point(&psi, TOL_GEOM) {
                    Ok(c) => c,
                    Err(ClassifyError::Degenerate { first, .. }) => first,
                    Err(e) => return Err(e.into()),
                };
                match cls {
                    Classification::Cone(c) => members[c].push(k),
                    Classification::OutsideCoverage => outside += a.weight,
                }
            }
            if outside > 0.0 {
                return Err(PartitionError::OutsideCoverage {
                    scenario: s,
                    mass: outside,
                });
            }
            for (c, m) in members.into_iter().enumerate() {
                if m.is_empty() {
                    continue;
                }
                let p = cone_preimage(dist, x, fan, c, route);
                cells.push(Cell {
                    geom: p.geom,
                    strict: p.strict,
                    tags: vec![tag(c)],
                    stats: dist.atom_stats(&m),
                    atoms: Some(m),
                });
            }
        }
        XiDistribution::UniformBox(_) => {
            for (c, p) in cone_preimages(dist, x, fan, route).into_iter().enumerate() {
                if p.empty {
                    continue;
                }
                let stats = dist.cell_stats(&p.geom, &p.strict)?;
                if stats.prob <= PROB_EPS {
                    continue;
                }
                cells.push(Cell {
                    geom: p.geom,
                    strict: p.strict,
                    tags: vec![tag(c)],
                    stats,
                    atoms: None,
                });
            }
            let mass: f64 = cells.iter().map(Cell::prob).sum();
            if mass < 1.0 - MASS_TOL {
                return Err(PartitionError::OutsideCoverage {
                    scenario: s,
                    mass: 1.0 - mass,
                });
            }
        }
    }
    Ok(Partition {
        cells,
        anchors: vec![x.to_vec()],
    })
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(u, v)| (u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs())))
}

enum PairKind {
    Empty,
    Same,
    Geometric,
}

fn classify_pair(p: &Cell, r_tags: &[Tag], known: &[bool]) -> PairKind {
    let mut all_implied = !r_tags.is_empty();
    for t in r_tags {
        if !known[t.anchor] {
            all_implied = false;
            continue;
        }
        match p.tags.iter().find(|u| u.anchor == t.anchor && u.scenario == t.scenario) {
            Some(u) if u.cone != t.cone => return PairKind::Empty,
            Some(_) => {}
            None => all_implied = false,
        }
    }
    if all_implied {
        PairKind::Same
    } else {
        PairKind::Geometric
    }
}

fn merge_tags(a: &[Tag], b: &[Tag]) -> Vec<Tag> {
    let mut t: Vec<Tag> = a.iter().chain(b).copied().collect();
    t.sort();
    t.dedup();
    t
}

/// `{P ∩ R : P ∈ p, R ∈ r, P[P ∩ R] > 0}`
pub fn common_refinement(p: &Partition, r: &Partition, dist: &XiDistribution) -> Result<Partition, PartitionError> {
    let mut anchors = p.anchors.clone();
    let mut known = vec![false; p.anchors.len() + r.anchors.len()];
    let remap: Vec<usize> = r
        .anchors
        .iter()
        .map(|x| match anchors.iter().position(|y| same_point(x, y)) {
            Some(i) => i,
            None => {
                anchors.push(x.clone());
                anchors.len() - 1
            }
        })
        .collect();
    for k in known.iter_mut().take(p.anchors.len()) {
        *k = true;
    }
    let mut cells = Vec::new();
    for rc in &r.cells {
        let r_tags: Vec<Tag> = rc
            .tags
            .iter()
            .map(|t| Tag {
                anchor: remap[t.anchor],
                ..*t
            })
            .collect();
        for pc in &p.cells {
            match classify_pair(pc, &r_tags, &known) {
                PairKind::Empty => continue,
                PairKind::Same => {
                    cells.push(pc.clone());
                    continue;
                }
                PairKind::Geometric => {}
            }
            let geom = intersect(&pc.geom, &rc.geom)?;
            let mut strict = pc.strict.clone();
            strict.extend(rc.strict.iter().map(|i| i + pc.geom.len()));
            let (stats, atoms) = match (&pc.atoms, &rc.atoms) {
                (Some(a), Some(b)) => {
                    let both: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
                    if both.is_empty() {
                        continue;
                    }
                    (dist.atom_stats(&both), Some(both))
                }
                _ => (dist.cell_stats(&geom, &strict)?, None),
            };
            if stats.prob <= PROB_EPS {
                continue;
            }
            cells.push(Cell {
                geom,
                strict,
                tags: merge_tags(&pc.tags, &r_tags),
                stats,
                atoms,
            });
        }
    }
    let kept: f64 = cells.iter().map(Cell::prob).sum();
    let expected = p.total_prob();
    if kept < expected - MASS_TOL {
        return Err(PartitionError::MassLost { kept, expected });
    }
    Ok(Partition { cells, anchors })
}

/// Every cell of `p` lies (up to a null set) inside a single cell of `r`.
pub fn is_refinement(p: &Partition, r: &Partition, dist: &XiDistribution) -> Result<bool, PartitionError> {
    for pc in &p.cells {
        let mut found = false;
        for rc in &r.cells {
            let inside = match (&pc.atoms, &rc.atoms) {
                (Some(a), Some(b)) => a.iter().all(|i| b.contains(i)),
                _ => {
                    let g = intersect(&pc.geom, &rc.geom)?;
                    let s = dist.cell_stats(&g, &[])?;
                    s.prob >= pc.prob() - 1e-9 * pc.prob().max(1e-3)
                }
            };
            if inside {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every cell of `p` is (up to a null set) inside the closure of
/// one maximal-cone cell of the partition adapted to `x`, for every recourse
/// scenario. On such a partition `V_P(x)` equals the true expected recourse.
pub fn check_adapted(prob: &TwoStageProblem, x: &[f64], p: &Partition, fans: &[Fan]) -> Result<bool, PartitionError> {
    let dist = &prob.dist;
    for cell in &p.cells {
        for fan in fans {
            let ok = match (&cell.atoms, dist) {
                (Some(atoms), XiDistribution::Atoms(d)) => {
                    let mut common: Option<Vec<usize>> = None;
                    for &k in atoms {
                        let a = &d.atoms[k];
                        if a.weight <= 0.0 {
                            continue;
                        }
                        let psi = Scenario {
                            t: a.t.clone(),
                            h: a.h.clone(),
                        }
                        .residual(x);
                        let Some(vs) = fan.argmax_vertices(&psi, TOL_GEOM) else {
                            return Ok(false);
                        };
                        common = Some(match common {
                            None => vs,
                            Some(c) => c.into_iter().filter(|v| vs.contains(v)).collect(),
                        });
                    }
                    common.is_none_or(|c| !c.is_empty())
                }
                _ => continuous_cell_adapted(dist, x, cell, fan)?,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn support_box(dist: &XiDistribution) -> HRep {
    let rc = dist.random_coords();
    let (lo, hi): (Vec<f64>, Vec<f64>) = match dist {
        XiDistribution::UniformBox(u) => {
            let all: Vec<(f64, f64)> =
                u.t.iter()
                    .flatten()
                    .chain(&u.h)
                    .map(|e| match *e {
                        crate::measure::Entry::Constant(v) => (v, v),
                        crate::measure::Entry::Uniform([a, b]) => (a, b),
                    })
                    .collect();
            rc.iter().map(|&k| all[k]).unzip()
        }
        XiDistribution::Atoms(d) => {
            let pts: Matrix = d
                .atoms
                .iter()
                .map(|a| {
                    dist.project(&Scenario {
                        t: a.t.clone(),
                        h: a.h.clone(),
                    })
                })
                .collect();
            (0..rc.len())
                .map(|j| {
                    let lo = pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
                    let hi = pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi)
                })
                .unzip()
        }
    };
    HRep::bounding_box(&lo, &hi)
}

fn continuous_cell_adapted(dist: &XiDistribution, x: &[f64], cell: &Cell, fan: &Fan) -> Result<bool, PartitionError> {
    let body = intersect(&cell.geom, &support_box(dist))?;
    let v = h_to_v(&body)?;
    if v.is_empty() {
        return Ok(true);
    }
    for &m in &fan.maximal {
        let pre = cone_preimage(dist, x, fan, m, PreimageRoute::General);
        if pre.empty {
            continue;
        }
        let closure = HRep {
            eqs: pre.geom.eqs.clone(),
            ..pre.geom.clone()
        };
        if v.vertices.iter().all(|z| closure.contains(z, 1e-7)) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Entry};

    fn box_problem(dist: XiDistribution) -> TwoStageProblem {
        // D = [−5, 0] × [−10, 0]
        TwoStageProblem::new(
            vec![-12.0, -40.0],
            vec![],
            vec![],
            vec![vec![-1.0, 0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0, 1.0]],
            vec![5.0, 10.0, 0.0, 0.0],
            dist,
        )
        .unwrap()
    }

    fn h_box() -> XiDistribution {
        XiDistribution::uniform_box(
            vec![
                vec![Entry::Constant(1.0), Entry::Constant(0.0)],
                vec![Entry::Constant(0.0), Entry::Constant(1.0)],
            ],
            vec![Entry::Uniform([0.0, 2.0]), Entry::Uniform([0.0, 4.0])],
        )
    }

    #[test]
    fn adapted_partition_of_translated_quadrants() {
        let p = box_problem(h_box());
        let fans = p.fans().unwrap();
        let part = adapted_partition(&p, &[1.0, 1.0], &fans).unwrap();
        assert_eq!(part.len(), 4);
        let mut probs: Vec<f64> = part.cells.iter().map(Cell::prob).collect();
        probs.sort_by(f64::total_cmp);
        // P[h1 < 1] = 1/2, P[h2 < 1] = 1/4
        let want = [0.125, 0.125, 0.375, 0.375];
        for (a, b) in probs.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(check_adapted(&p, &[1.0, 1.0], &part, &fans).unwrap());
        assert!(!check_adapted(&p, &[1.0, 1.0], &Partition::trivial(&p.dist), &fans).unwrap());
    }

    #[test]
    fn routes_agree() {
        let p = box_problem(h_box());
        let fans = p.fans().unwrap();
        let a = adapted_partition_with(&p, &[0.5, 3.0], &fans, PreimageRoute::Translate).unwrap();
        let b = adapted_partition_with(&p, &[0.5, 3.0], &fans, PreimageRoute::General).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.cells.iter().zip(&b.cells) {
            assert_eq!(x.tags, y.tags);
            assert!((x.prob() - y.prob()).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_anchor_does_not_split() {
        let p = box_problem(h_box());
        let fans = p.fans().unwrap();
        let r = adapted_partition(&p, &[1.0, 1.0], &fans).unwrap();
        let once = common_refinement(&Partition::trivial(&p.dist), &r, &p.dist).unwrap();
        let twice = common_refinement(&once, &r, &p.dist).unwrap();
        assert_eq!(once.len(), twice.len());
        assert!(is_refinement(&twice, &once, &p.dist).unwrap());
        assert!(is_refinement(&once, &Partition::trivial(&p.dist), &p.dist).unwrap());
    }

    #[test]
    fn discrete_cells_group_atoms() {
        let atoms = [(0.5, 0.5), (1.5, 0.5), (1.7, 3.0), (0.1, 2.0)]
            .iter()
            .map(|&(h1, h2)| Atom {
                t: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                h: vec![h1, h2],
                weight: 0.25,
            })
            .collect();
        let p = box_problem(XiDistribution::atoms(atoms));
        let fans = p.fans().unwrap();
        let part = adapted_partition(&p, &[1.0, 1.0], &fans).unwrap();
        assert_eq!(part.len(), 4);
        for c in &part.cells {
            assert_eq!(c.atoms.as_ref().unwrap().len(), 1);
        }
        assert!(check_adapted(&p, &[1.0, 1.0], &part, &fans).unwrap());
        let part = adapted_partition(&p, &[2.0, 4.0], &fans).unwrap();
        assert_eq!(part.len(), 1);
    }

    #[test]
    fn outside_coverage_is_reported() {
        // y = ψ, y ≥ 0: coverage is ψ ≥ 0
        let p = TwoStageProblem::new(vec![0.0], vec![], vec![], vec![vec![1.0]], vec![1.0], {
            XiDistribution::uniform_box(vec![vec![Entry::Constant(1.0)]], vec![Entry::Uniform([0.0, 1.0])])
        })
        .unwrap();
        let fans = p.fans().unwrap();
        assert!(adapted_partition(&p, &[0.0], &fans).is_ok());
        assert!(matches!(
            adapted_partition(&p, &[0.5], &fans),
            Err(PartitionError::OutsideCoverage { .. })
        ));
    }

    #[test]
    fn table_lists_cells() {
        let p = box_problem(h_box());
        let fans = p.fans().unwrap();
        let part = adapted_partition(&p, &[1.0, 1.0], &fans).unwrap();
        let t = part.table();
        assert_eq!(t.lines().count(), 5);
        assert!(t.contains("a0s0c"));
    }
}
