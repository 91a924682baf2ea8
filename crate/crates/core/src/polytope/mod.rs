//! Exact-in-structure, floating-point-in-arithmetic polyhedral geometry.
//!
//! Polyhedra are held either as constraint systems ([`HRep`]) or as
//! generator lists ([`VRep`]); the double description method converts
//! between them. On top of that sit the normal fan of a polyhedron
//! ([`fan`]) and exact volume/centroid by triangulation ([`volume`]).
//!
//! All rank decisions, tightness tests and strict-inequality checks use the
//! single tolerance [`TOL_GEOM`] unless a caller passes its own.

mod dd;
pub mod fan;
pub mod volume;

pub use dd::{h_to_v, v_to_h};
pub use fan::{normal_fan, Classification, ClassifyError, Cone, Fan};
pub use volume::{triangulate, volume_and_centroid, Simplex, VolumeCentroid};

use crate::linalg::dot;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TOL_GEOM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("dual infeasible: the dual feasible set is empty")]
    DualInfeasible,
}

/// `{ z : a_i·z ≤ b_i (i ∉ eqs), a_j·z = b_j (j ∈ eqs) }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRep {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Sorted indices of rows that are equalities.
    #[serde(default)]
    pub eqs: Vec<usize>,
    pub dim: usize,
}

impl HRep {
    /// The whole space `R^dim`.
    pub fn universe(dim: usize) -> Self {
        HRep {
            a: vec![],
            b: vec![],
            eqs: vec![],
            dim,
        }
    }

    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, dim: usize) -> Result<Self, GeometryError> {
        let h = HRep { a, b, eqs: vec![], dim };
        h.validate()?;
        Ok(h)
    }

    pub fn with_eqs(mut self, eqs: Vec<usize>) -> Self {
        self.eqs = eqs;
        self.eqs.sort_unstable();
        self.eqs.dedup();
        self
    }

    /// Axis-aligned box `lo ≤ z ≤ hi`.
    pub fn bounding_box(lo: &[f64], hi: &[f64]) -> Self {
        let d = lo.len();
        let mut h = HRep::universe(d);
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            h.push(e.clone(), hi[i]);
            e[i] = -1.0;
            h.push(e, -lo[i]);
        }
        h
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.a.len() != self.b.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.a.len(),
                got: self.b.len(),
            });
        }
        for row in &self.a {
            if row.len() != self.dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: self.dim,
                    got: row.len(),
                });
            }
        }
        if let Some(&e) = self.eqs.iter().find(|&&e| e >= self.a.len()) {
            return Err(GeometryError::DimensionMismatch {
                expected: self.a.len(),
                got: e + 1,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_eq(&self, row: usize) -> bool {
        self.eqs.binary_search(&row).is_ok()
    }

    pub fn push(&mut self, row: Vec<f64>, rhs: f64) {
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn push_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eqs.push(self.a.len());
        self.push(row, rhs);
    }

    /// Membership with tolerance `tol` (scaled by each row's norm).
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.a.iter().zip(&self.b).enumerate().all(|(i, (row, &bi))| {
            let s = dot(row, z) - bi;
            let t = tol * (1.0 + crate::linalg::norm(row) * crate::linalg::norm_inf(z) + bi.abs());
            if self.is_eq(i) {
                s.abs() <= t
            } else {
                s <= t
            }
        })
    }

    /// Membership where the rows in `strict` must hold with slack `> tol`.
    pub fn contains_strict(&self, z: &[f64], strict: &[usize], tol: f64) -> bool {
        self.a.iter().zip(&self.b).enumerate().all(|(i, (row, &bi))| {
            let s = dot(row, z) - bi;
            let t = tol * (1.0 + crate::linalg::norm(row) * crate::linalg::norm_inf(z) + bi.abs());
            if self.is_eq(i) {
                s.abs() <= t
            } else if strict.contains(&i) {
                s < -t
            } else {
                s <= t
            }
        })
    }
}

/// `Conv(vertices) + Cone(rays) + Span(lineality)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VRep {
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub rays: Vec<Vec<f64>>,
    #[serde(default)]
    pub lineality: Vec<Vec<f64>>,
    pub dim: usize,
}

impl VRep {
    pub fn empty(dim: usize) -> Self {
        VRep {
            vertices: vec![],
            rays: vec![],
            lineality: vec![],
            dim,
        }
    }

    pub fn from_points(vertices: Vec<Vec<f64>>) -> Self {
        let dim = vertices.first().map_or(0, |v| v.len());
        VRep {
            vertices,
            rays: vec![],
            lineality: vec![],
            dim,
        }
    }

    /// A polyhedron is empty exactly when it has no vertex.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }
}

/// `p ∩ q`: concatenated constraints, equality indices shifted.
pub fn intersect(p: &HRep, q: &HRep) -> Result<HRep, GeometryError> {
    if p.dim != q.dim {
        return Err(GeometryError::DimensionMismatch {
            expected: p.dim,
            got: q.dim,
        });
    }
    let mut a = p.a.clone();
    a.extend(q.a.iter().cloned());
    let mut b = p.b.clone();
    b.extend(q.b.iter().copied());
    let mut eqs = p.eqs.clone();
    eqs.extend(q.eqs.iter().map(|e| e + p.len()));
    Ok(HRep { a, b, eqs, dim: p.dim })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersect_intervals() {
        let p = HRep::new(vec![vec![1.0], vec![-1.0]], vec![2.0, 0.0], 1).unwrap();
        let q = HRep::new(vec![vec![1.0], vec![-1.0]], vec![3.0, -1.0], 1).unwrap();
        let r = intersect(&p, &q).unwrap();
        let v = h_to_v(&r).unwrap();
        let mut xs: Vec<f64> = v.vertices.iter().map(|v| v[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - 1.0).abs() < 1e-12 && (xs[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn intersect_with_universe_is_identity() {
        let p = HRep::bounding_box(&[0.0, 0.0], &[1.0, 2.0]);
        let r = intersect(&p, &HRep::universe(2)).unwrap();
        for z in [[0.5, 1.0], [1.5, 1.0], [0.0, 2.0], [-0.1, 0.0]] {
            assert_eq!(p.contains(&z, 1e-12), r.contains(&z, 1e-12));
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            HRep::new(vec![vec![1.0, 2.0]], vec![1.0, 2.0], 2),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert!(intersect(&HRep::universe(2), &HRep::universe(3)).is_err());
    }
}
