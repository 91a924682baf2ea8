//! Triangulation, volume and centroid of bounded polyhedra.
//!
//! Pulling triangulation: take the lexicographically smallest vertex `v0`,
//! triangulate every facet not containing it (recursively, same rule), and
//! cone each facet simplex over `v0`. Facets of a face are read off the
//! vertex/constraint incidence, so redundant constraint rows are harmless.

use super::{v_to_h, GeometryError, HRep, VRep, TOL_GEOM};
use crate::linalg::{affine_dim, det, dot, lex_cmp, norm, norm_inf, sub};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<Vec<f64>>,
}

impl Simplex {
    /// Affine dimension, `vertices.len() − 1`.
    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// k-dimensional volume, `sqrt(det(E Eᵀ)) / k!` with `E` the edge matrix.
    pub fn volume(&self) -> f64 {
        let k = self.dim();
        if k == 0 {
            return 1.0;
        }
        let v0 = &self.vertices[0];
        let edges: Vec<Vec<f64>> = self.vertices[1..].iter().map(|v| sub(v, v0)).collect();
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        if k == v0.len() {
            return det(&edges).abs() / fact;
        }
        let gram: Vec<Vec<f64>> = edges
            .iter()
            .map(|a| edges.iter().map(|b| dot(a, b)).collect())
            .collect();
        det(&gram).max(0.0).sqrt() / fact
    }

    pub fn centroid(&self) -> Vec<f64> {
        let d = self.vertices[0].len();
        let n = self.vertices.len() as f64;
        (0..d)
            .map(|i| self.vertices.iter().map(|v| v[i]).sum::<f64>() / n)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeCentroid {
    /// Ambient (Lebesgue) volume; zero for lower-dimensional polytopes.
    pub volume: f64,
    /// Volume in the polytope's own affine hull.
    pub relative_volume: f64,
    pub affine_dim: usize,
    /// `None` only for the empty polytope.
    pub centroid: Option<Vec<f64>>,
}

fn tight_sets(points: &[Vec<f64>], h: &HRep) -> Vec<Vec<bool>> {
    // incidence[row][vertex]
    (0..h.len())
        .map(|i| {
            points
                .iter()
                .map(|p| {
                    let s = dot(&h.a[i], p) - h.b[i];
                    let t = TOL_GEOM * (1.0 + norm(&h.a[i]) * norm_inf(p) + h.b[i].abs());
                    s.abs() <= t
                })
                .collect()
        })
        .collect()
}

fn pull(points: &[Vec<f64>], inc: &[Vec<bool>], face: &[usize], dim: usize, out: &mut Vec<Vec<usize>>) {
    if face.len() == dim + 1 {
        out.push(face.to_vec());
        return;
    }
    let apex = *face.iter().min_by(|&&a, &&b| lex_cmp(&points[a], &points[b])).unwrap();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for row in inc {
        if row[apex] {
            continue;
        }
        let facet: Vec<usize> = face.iter().copied().filter(|&v| row[v]).collect();
        if facet.len() < dim || seen.contains(&facet) {
            continue;
        }
        let pts: Vec<&[f64]> = facet.iter().map(|&v| points[v].as_slice()).collect();
        if affine_dim(&pts, TOL_GEOM) != dim as isize - 1 {
            continue;
        }
        let mut sub_simplices = Vec::new();
        pull(points, inc, &facet, dim - 1, &mut sub_simplices);
        for mut s in sub_simplices {
            s.push(apex);
            out.push(s);
        }
        seen.insert(facet);
    }
}

/// Triangulates the polytope with vertex list `points` whose constraint
/// system (possibly redundant) is `h`. Returns vertex-index simplices.
pub(crate) fn triangulate_indices(points: &[Vec<f64>], h: &HRep) -> (usize, Vec<Vec<usize>>) {
    if points.is_empty() {
        return (0, vec![]);
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let dim = affine_dim(&refs, TOL_GEOM).max(0) as usize;
    let inc = tight_sets(points, h);
    let all: Vec<usize> = (0..points.len()).collect();
    let mut out = Vec::new();
    pull(points, &inc, &all, dim, &mut out);
    (dim, out)
}

/// Simplices with disjoint interiors whose union is `p`.
pub fn triangulate(p: &VRep) -> Result<Vec<Simplex>, GeometryError> {
    if !p.is_bounded() {
        return Err(GeometryError::Unbounded);
    }
    if p.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let h = v_to_h(p)?;
    let (_, idx) = triangulate_indices(&p.vertices, &h);
    Ok(idx
        .into_iter()
        .map(|s| Simplex {
            vertices: s.into_iter().map(|i| p.vertices[i].clone()).collect(),
        })
        .collect())
}

pub(crate) fn volume_from_parts(points: &[Vec<f64>], h: &HRep, ambient: usize) -> VolumeCentroid {
    if points.is_empty() {
        return VolumeCentroid {
            volume: 0.0,
            relative_volume: 0.0,
            affine_dim: 0,
            centroid: None,
        };
    }
    let (dim, simplices) = triangulate_indices(points, h);
    let mut total = 0.0;
    let mut acc = vec![0.0; ambient];
    for s in simplices {
        let simplex = Simplex {
            vertices: s.iter().map(|&i| points[i].clone()).collect(),
        };
        let vol = simplex.volume();
        total += vol;
        crate::linalg::axpy(&mut acc, vol, &simplex.centroid());
    }
    let centroid = if total > 0.0 {
        acc.iter().map(|x| x / total).collect()
    } else {
        // Numerically flat: fall back to the vertex average.
        let n = points.len() as f64;
        (0..ambient)
            .map(|i| points.iter().map(|p| p[i]).sum::<f64>() / n)
            .collect()
    };
    VolumeCentroid {
        volume: if dim == ambient { total } else { 0.0 },
        relative_volume: total,
        affine_dim: dim,
        centroid: Some(centroid),
    }
}

/// Exact (up to floating point) volume and uniform-measure centroid.
pub fn volume_and_centroid(p: &VRep) -> Result<VolumeCentroid, GeometryError> {
    if !p.is_bounded() {
        return Err(GeometryError::Unbounded);
    }
    if p.is_empty() {
        return Ok(volume_from_parts(&[], &HRep::universe(p.dim), p.dim));
    }
    let h = v_to_h(p)?;
    Ok(volume_from_parts(&p.vertices, &h, p.dim))
}
