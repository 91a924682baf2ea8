//! Normal fan of a polyhedron `D = {λ : G λ ≤ q}`.
//!
//! Every nonempty face `F` of `D` is identified by its active set `I(F)`: the
//! constraint rows tight on all of `F`. Its normal cone is generated by those
//! rows, `N_F = cone{g_i : i ∈ I(F)}`. Faces are enumerated breadth-first
//! from `D` itself by adding one more tight row at a time and closing the
//! active set, which reaches every face.
//!
//! A direction `ψ` is classified by the face of `D` that maximizes `ψᵀλ`
//! (its face signature), computed from the generators of `D`. That is the
//! unique cone with `ψ ∈ ri(N)`.

use super::{h_to_v, v_to_h, GeometryError, HRep, VRep, TOL_GEOM};
use crate::linalg::{dot, norm, norm_inf, rank, sub};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct Cone {
    /// Homogeneous constraints (`b = 0`), irredundant; equality rows carry
    /// the lineality of `D` and any implicit equalities.
    pub hrep: HRep,
    pub generators: VRep,
    pub dim: usize,
    /// Active set of the face of `D` this cone is normal to.
    pub face: Vec<usize>,
    pub face_dim: usize,
}

impl Cone {
    pub fn is_pointed_origin(&self) -> bool {
        self.dim == 0
    }

    /// Indices of inequality rows of `hrep` (strict on the relative interior).
    pub fn strict_rows(&self) -> Vec<usize> {
        (0..self.hrep.len()).filter(|&i| !self.hrep.is_eq(i)).collect()
    }

    /// `ψ ∈ ri(N)` by sign tests on the irredundant H-representation.
    pub fn relint_contains(&self, psi: &[f64], tol: f64) -> bool {
        let t = tol * (1.0 + norm_inf(psi));
        self.hrep.a.iter().enumerate().all(|(i, row)| {
            let s = dot(row, psi);
            if self.hrep.is_eq(i) {
                s.abs() <= t
            } else {
                s < -t
            }
        })
    }

    pub fn closure_contains(&self, psi: &[f64], tol: f64) -> bool {
        let t = tol * (1.0 + norm_inf(psi));
        self.hrep.a.iter().enumerate().all(|(i, row)| {
            let s = dot(row, psi);
            if self.hrep.is_eq(i) {
                s.abs() <= t
            } else {
                s <= t
            }
        })
    }
}

#[derive(Debug, Clone)]
struct FaceRecord {
    vertices: Vec<usize>,
    rays: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Fan {
    pub cones: Vec<Cone>,
    pub maximal: Vec<usize>,
    /// `dom σ_D = (rec D)°`, the closure of the union of all cones.
    pub coverage: HRep,
    /// The polyhedron the fan was built from.
    pub dual: HRep,
    pub dual_vrep: VRep,
    faces: Vec<FaceRecord>,
    incidence: Incidence,
    by_face: HashMap<Vec<usize>, usize>,
    /// For each vertex of `dual_vrep`, the maximal cone normal to it.
    vertex_cone: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Cone(usize),
    /// `ψ` is not in the domain of the support function (recourse infeasible).
    OutsideCoverage,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("ambiguous classification within tolerance: candidates {first:?} and {second:?}")]
    Degenerate {
        first: Classification,
        second: Classification,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
struct Incidence {
    vert: Vec<Vec<bool>>,
    ray: Vec<Vec<bool>>,
}

fn incidence(d: &HRep, v: &VRep) -> Incidence {
    let vert = v
        .vertices
        .iter()
        .map(|p| {
            (0..d.len())
                .map(|i| {
                    let s = dot(&d.a[i], p) - d.b[i];
                    let t = TOL_GEOM * (1.0 + norm(&d.a[i]) * norm_inf(p) + d.b[i].abs());
                    s.abs() <= t
                })
                .collect()
        })
        .collect();
    let ray = v
        .rays
        .iter()
        .map(|r| {
            (0..d.len())
                .map(|i| dot(&d.a[i], r).abs() <= TOL_GEOM * (1.0 + norm(&d.a[i])))
                .collect()
        })
        .collect();
    Incidence { vert, ray }
}

fn closure(inc: &Incidence, rows: usize, verts: &[usize], rays: &[usize]) -> Vec<usize> {
    (0..rows)
        .filter(|&i| verts.iter().all(|&v| inc.vert[v][i]) && rays.iter().all(|&r| inc.ray[r][i]))
        .collect()
}

/// All normal cones of the nonempty faces of `d`.
pub fn normal_fan(d: &HRep) -> Result<Fan, GeometryError> {
    let vrep = h_to_v(d)?;
    if vrep.is_empty() {
        return Err(GeometryError::DualInfeasible);
    }
    let l = d.dim;
    let inc = incidence(d, &vrep);
    let rows = d.len();

    let all_v: Vec<usize> = (0..vrep.vertices.len()).collect();
    let all_r: Vec<usize> = (0..vrep.rays.len()).collect();
    let root = closure(&inc, rows, &all_v, &all_r);

    let mut faces: Vec<(Vec<usize>, FaceRecord)> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(root.clone(), 0);
    faces.push((
        root.clone(),
        FaceRecord {
            vertices: all_v,
            rays: all_r,
        },
    ));
    queue.push_back(0usize);
    while let Some(fi) = queue.pop_front() {
        let (active, rec) = faces[fi].clone();
        for j in (0..rows).filter(|j| !active.contains(j)) {
            let vs: Vec<usize> = rec.vertices.iter().copied().filter(|&v| inc.vert[v][j]).collect();
            if vs.is_empty() {
                continue;
            }
            let rs: Vec<usize> = rec.rays.iter().copied().filter(|&r| inc.ray[r][j]).collect();
            let sub_active = closure(&inc, rows, &vs, &rs);
            if !seen.contains_key(&sub_active) {
                seen.insert(sub_active.clone(), faces.len());
                faces.push((sub_active, FaceRecord { vertices: vs, rays: rs }));
                queue.push_back(faces.len() - 1);
            }
        }
    }

    let mut cones = Vec::with_capacity(faces.len());
    for (active, rec) in &faces {
        let mut gens = VRep::empty(l);
        gens.vertices.push(vec![0.0; l]);
        for &i in active {
            if d.is_eq(i) {
                gens.lineality.push(d.a[i].clone());
            } else {
                gens.rays.push(d.a[i].clone());
            }
        }
        let hrep = v_to_h(&gens)?;
        let span: Vec<Vec<f64>> = gens.rays.iter().chain(&gens.lineality).cloned().collect();
        let dim = rank(&span, TOL_GEOM);
        let face_dim = {
            let p0 = &vrep.vertices[rec.vertices[0]];
            let mut dirs: Vec<Vec<f64>> = rec.vertices[1..].iter().map(|&v| sub(&vrep.vertices[v], p0)).collect();
            dirs.extend(rec.rays.iter().map(|&r| vrep.rays[r].clone()));
            dirs.extend(vrep.lineality.iter().cloned());
            rank(&dirs, TOL_GEOM)
        };
        cones.push(Cone {
            hrep,
            generators: gens,
            dim,
            face: active.clone(),
            face_dim,
        });
    }

    // Deterministic order: by cone dimension, then by active set.
    let mut order: Vec<usize> = (0..cones.len()).collect();
    order.sort_by(|&a, &b| {
        cones[a]
            .dim
            .cmp(&cones[b].dim)
            .then_with(|| cones[a].face.cmp(&cones[b].face))
    });
    let cones: Vec<Cone> = order.iter().map(|&i| cones[i].clone()).collect();
    let face_recs: Vec<FaceRecord> = order.iter().map(|&i| faces[i].1.clone()).collect();
    let by_face: HashMap<Vec<usize>, usize> = cones.iter().enumerate().map(|(i, c)| (c.face.clone(), i)).collect();

    let max_dim = cones.iter().map(|c| c.dim).max().unwrap_or(0);
    let maximal: Vec<usize> = (0..cones.len()).filter(|&i| cones[i].dim == max_dim).collect();

    let vertex_cone = (0..vrep.vertices.len())
        .map(|v| {
            let active = closure(&inc, rows, &[v], &[]);
            by_face[&active]
        })
        .collect();

    let mut cov = VRep::empty(l);
    cov.vertices.push(vec![0.0; l]);
    for i in 0..rows {
        if d.is_eq(i) {
            cov.lineality.push(d.a[i].clone());
        } else {
            cov.rays.push(d.a[i].clone());
        }
    }
    let coverage = v_to_h(&cov)?;

    Ok(Fan {
        cones,
        maximal,
        coverage,
        dual: d.clone(),
        dual_vrep: vrep,
        faces: face_recs,
        incidence: inc,
        by_face,
        vertex_cone,
    })
}

impl Fan {
    pub fn ambient_dim(&self) -> usize {
        self.dual.dim
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn cone_by_face(&self, face: &[usize]) -> Option<usize> {
        self.by_face.get(face).copied()
    }

    /// Vertex indices of `D` that the cone's face contains.
    pub fn face_vertices(&self, cone: usize) -> &[usize] {
        &self.faces[cone].vertices
    }

    /// Maximal cone normal to vertex `v` of `dual_vrep`.
    pub fn vertex_cone(&self, v: usize) -> usize {
        self.vertex_cone[v]
    }

    /// `σ_D(ψ) = max_{λ∈D} ψᵀλ`, `None` outside the coverage.
    pub fn support(&self, psi: &[f64], tol: f64) -> Option<f64> {
        let scale = norm_inf(psi).max(1.0);
        if self.dual_vrep.lineality.iter().any(|l| dot(l, psi).abs() > tol * scale)
            || self.dual_vrep.rays.iter().any(|r| dot(r, psi) > tol * scale)
        {
            return None;
        }
        self.dual_vrep
            .vertices
            .iter()
            .map(|v| dot(v, psi))
            .max_by(f64::total_cmp)
    }

    /// Vertices of `D` maximizing `ψᵀλ` within `tol` (relative), or `None`
    /// when `ψ` is outside the coverage.
    pub fn argmax_vertices(&self, psi: &[f64], tol: f64) -> Option<Vec<usize>> {
        self.signature(psi, tol).map(|(vs, _)| vs)
    }

    fn signature(&self, psi: &[f64], tol: f64) -> Option<(Vec<usize>, Vec<usize>)> {
        let sigma = self.support(psi, tol)?;
        let vmax = self
            .dual_vrep
            .vertices
            .iter()
            .map(|v| norm_inf(v))
            .fold(0.0_f64, f64::max);
        let scale = norm_inf(psi).max(1.0) * (1.0 + vmax);
        let vs = (0..self.dual_vrep.vertices.len())
            .filter(|&v| dot(&self.dual_vrep.vertices[v], psi) >= sigma - tol * scale)
            .collect();
        let rs = (0..self.dual_vrep.rays.len())
            .filter(|&r| dot(&self.dual_vrep.rays[r], psi) >= -tol * norm_inf(psi).max(1.0))
            .collect();
        Some((vs, rs))
    }

    fn classify_once(&self, psi: &[f64], tol: f64) -> Classification {
        let Some((vs, rs)) = self.signature(psi, tol) else {
            return Classification::OutsideCoverage;
        };
        let active = closure(&self.incidence, self.dual.len(), &vs, &rs);
        match self.by_face.get(&active) {
            Some(&c) => Classification::Cone(c),
            // A noisy tight set whose closure is not a face: fall back to the
            // smallest enclosing face, found among faces containing all of vs.
            None => {
                let best = (0..self.cones.len())
                    .filter(|&c| {
                        vs.iter().all(|v| self.faces[c].vertices.contains(v))
                            && rs.iter().all(|r| self.faces[c].rays.contains(r))
                    })
                    .max_by_key(|&c| self.cones[c].face.len());
                best.map_or(Classification::OutsideCoverage, Classification::Cone)
            }
        }
    }

    /// The unique cone whose relative interior contains `ψ`, decided by the
    /// face signature of `argmax_{λ∈D} ψᵀλ`.
    ///
    /// Values inside the band `(tol, 10·tol]` around a tie are reported as
    /// [`ClassifyError::Degenerate`] when the two readings disagree.
    pub fn classify_point(&self, psi: &[f64], tol: f64) -> Result<Classification, ClassifyError> {
        if psi.len() != self.ambient_dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: psi.len(),
            });
        }
        let tight = self.classify_once(psi, tol);
        let loose = self.classify_once(psi, 10.0 * tol);
        if tight != loose {
            return Err(ClassifyError::Degenerate {
                first: tight,
                second: loose,
            });
        }
        Ok(tight)
    }

    /// Cones whose relative interior contains `ψ`, by H-representation sign
    /// tests. Used to cross-check [`Fan::classify_point`].
    pub fn relint_candidates(&self, psi: &[f64], tol: f64) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&c| self.cones[c].relint_contains(psi, tol))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> HRep {
        HRep::new(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0], 1).unwrap()
    }

    #[test]
    fn interval_fan_is_two_half_lines_and_origin() {
        let fan = normal_fan(&unit_interval()).unwrap();
        assert_eq!(fan.len(), 3);
        assert_eq!(fan.maximal.len(), 2);
        let origin = fan.cones.iter().filter(|c| c.dim == 0).count();
        assert_eq!(origin, 1);
        let neg = fan.classify_point(&[-3.0], 1e-9).unwrap();
        let Classification::Cone(c) = neg else { panic!() };
        assert!(fan.cones[c].closure_contains(&[-1.0], 1e-12));
        assert!(!fan.cones[c].closure_contains(&[1.0], 1e-12));
        let zero = fan.classify_point(&[0.0], 1e-9).unwrap();
        assert_eq!(
            zero,
            Classification::Cone(fan.cones.iter().position(|c| c.dim == 0).unwrap())
        );
    }

    #[test]
    fn single_point_has_one_cone() {
        // λ ≤ (1, 2) and −λ ≤ (−1, −2): D = {(1, 2)}
        let d = HRep::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            vec![1.0, 2.0, -1.0, -2.0],
            2,
        )
        .unwrap();
        let fan = normal_fan(&d).unwrap();
        assert_eq!(fan.len(), 1);
        assert_eq!(fan.maximal, vec![0]);
        assert_eq!(fan.cones[0].dim, 2);
        for psi in [[1.0, -4.0], [0.0, 0.0], [-3.0, 2.0]] {
            assert_eq!(fan.classify_point(&psi, 1e-9).unwrap(), Classification::Cone(0));
        }
    }

    #[test]
    fn box_fan_and_coverage() {
        let d = HRep::bounding_box(&[-5.0, -10.0], &[0.0, 0.0]);
        let fan = normal_fan(&d).unwrap();
        assert_eq!(fan.len(), 9);
        assert_eq!(fan.maximal.len(), 4);
        assert!(fan.coverage.is_empty() || fan.coverage.contains(&[3.0, -7.0], 1e-12));
    }

    #[test]
    fn unbounded_dual_limits_coverage() {
        // D = {λ ≤ 1} in R: coverage is ψ ≥ 0.
        let d = HRep::new(vec![vec![1.0]], vec![1.0], 1).unwrap();
        let fan = normal_fan(&d).unwrap();
        assert_eq!(
            fan.classify_point(&[-1.0], 1e-9).unwrap(),
            Classification::OutsideCoverage
        );
        assert!(matches!(
            fan.classify_point(&[2.0], 1e-9).unwrap(),
            Classification::Cone(_)
        ));
        assert!(!fan.coverage.contains(&[-1.0], 1e-12));
    }

    #[test]
    fn empty_dual_is_error() {
        let d = HRep::new(vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0], 1).unwrap();
        assert_eq!(normal_fan(&d).unwrap_err(), GeometryError::DualInfeasible);
    }

    #[test]
    fn near_tie_is_degenerate() {
        let fan = normal_fan(&unit_interval()).unwrap();
        let err = fan.classify_point(&[5e-9], 1e-9).unwrap_err();
        assert!(matches!(err, ClassifyError::Degenerate { .. }));
    }
}
