//! Double description method.
//!
//! Both conversions reduce to computing generators of a polyhedral cone
//! `{w : a_i·w ≤ 0, e_j·w = 0}` incrementally: start from the whole space
//! (all lineality), then add one constraint at a time. A constraint that cuts
//! the current lineality space turns one lineality direction into a ray;
//! otherwise rays are split into positive/zero/negative sides and adjacent
//! (positive, negative) pairs are combined. Adjacency uses the combinatorial
//! zero-set test.

use super::{GeometryError, HRep, VRep, TOL_GEOM};
use crate::linalg::{axpy, dot, norm, scale};

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64).max(1)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset_of(&self, o: &BitSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vec<f64>,
    zero: BitSet,
}

pub(crate) struct ConeGenerators {
    pub rays: Vec<Vec<f64>>,
    pub lineality: Vec<Vec<f64>>,
}

fn normalized(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    (n > 1e-14).then(|| scale(&v, 1.0 / n))
}

/// Generators of `{w ∈ R^dim : a·w ≤ 0 (or = 0 when flagged)}`.
pub(crate) fn cone_generators(constraints: &[(Vec<f64>, bool)], dim: usize) -> ConeGenerators {
    let n_cons = constraints.len();
    let mut lineality: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, (raw, is_eq)) in constraints.iter().enumerate() {
        let Some(a) = normalized(raw.clone()) else {
            continue;
        };
        // Step 1: does the constraint cut the lineality space?
        let best = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(&a, l)))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));
        if let Some((li, al)) = best.filter(|&(_, al)| al.abs() > TOL_GEOM) {
            let pivot = lineality.swap_remove(li);
            for l in lineality.iter_mut() {
                let f = dot(&a, l) / al;
                axpy(l, -f, &pivot);
            }
            for r in rays.iter_mut() {
                let f = dot(&a, &r.v) / al;
                axpy(&mut r.v, -f, &pivot);
                r.v = normalized(r.v.clone()).unwrap_or_else(|| r.v.clone());
                r.zero.insert(k);
            }
            lineality = crate::linalg::gram_schmidt(lineality, 1e-12);
            if !is_eq {
                let dir = if al > 0.0 { -1.0 } else { 1.0 };
                let mut zero = BitSet::new(n_cons);
                for j in 0..k {
                    zero.insert(j);
                }
                rays.push(Ray {
                    v: scale(&pivot, dir),
                    zero,
                });
            }
            continue;
        }

        // Step 2: classic DD update on the pointed part.
        let vals: Vec<f64> = rays.iter().map(|r| dot(&a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > TOL_GEOM).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -TOL_GEOM).collect();
        if pos.is_empty() && (!is_eq || neg.is_empty()) {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i].abs() <= TOL_GEOM {
                    r.zero.insert(k);
                }
            }
            continue;
        }
        let d_eff = dim - lineality.len();
        let mut new_rays: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.and(&rays[n].zero);
                if d_eff >= 2 && common.count() + 2 < d_eff {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != n)
                    .all(|r| !common.is_subset_of(&rays[r].zero));
                if !adjacent {
                    continue;
                }
                let mut w = scale(&rays[n].v, vals[p]);
                axpy(&mut w, -vals[n], &rays[p].v);
                if let Some(w) = normalized(w) {
                    let mut zero = common;
                    zero.insert(k);
                    new_rays.push(Ray { v: w, zero });
                }
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].abs() <= TOL_GEOM {
                r.zero.insert(k);
                kept.push(r);
            } else if vals[i] < 0.0 && !is_eq {
                kept.push(r);
            }
        }
        kept.extend(new_rays);
        rays = kept;
    }

    ConeGenerators {
        rays: rays.into_iter().map(|r| r.v).collect(),
        lineality,
    }
}

/// Vertex/ray/lineality generators of an H-described polyhedron.
///
/// An empty polyhedron comes back with no vertices ([`VRep::is_empty`]).
pub fn h_to_v(h: &HRep) -> Result<VRep, GeometryError> {
    h.validate()?;
    let d = h.dim;
    // Homogenize: (z, t) with a·z − b t ≤ 0 and t ≥ 0.
    let mut cons: Vec<(Vec<f64>, bool)> = Vec::with_capacity(h.len() + 1);
    let mut t_row = vec![0.0; d + 1];
    t_row[d] = -1.0;
    cons.push((t_row, false));
    for (i, (row, &bi)) in h.a.iter().zip(&h.b).enumerate() {
        let mut w = row.clone();
        w.push(-bi);
        cons.push((w, h.is_eq(i)));
    }
    let gens = cone_generators(&cons, d + 1);

    let mut out = VRep::empty(d);
    for l in gens.lineality {
        if let Some(z) = normalized(l[..d].to_vec()) {
            out.lineality.push(z);
        }
    }
    for r in gens.rays {
        let t = r[d];
        if t > TOL_GEOM {
            out.vertices.push(r[..d].iter().map(|x| x / t).collect());
        } else if let Some(z) = normalized(r[..d].to_vec()) {
            out.rays.push(z);
        }
    }
    if out.vertices.is_empty() {
        return Ok(VRep::empty(d));
    }
    Ok(out)
}

/// Irredundant H-representation of a nonempty V-described polyhedron.
///
/// Each inequality row supports a facet; the affine hull comes back as
/// equality rows.
pub fn v_to_h(v: &VRep) -> Result<HRep, GeometryError> {
    if v.vertices.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let d = v.dim;
    for g in v.vertices.iter().chain(&v.rays).chain(&v.lineality) {
        if g.len() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: g.len(),
            });
        }
    }
    // Valid inequalities a·z ≤ β ⇔ (a, −β)·(v, 1) ≤ 0 and (a, −β)·(r, 0) ≤ 0.
    let mut cons: Vec<(Vec<f64>, bool)> = Vec::new();
    for p in &v.vertices {
        let mut w = p.clone();
        w.push(1.0);
        cons.push((w, false));
    }
    for r in &v.rays {
        let mut w = r.clone();
        w.push(0.0);
        cons.push((w, false));
    }
    for l in &v.lineality {
        let mut w = l.clone();
        w.push(0.0);
        cons.push((w, true));
    }
    let gens = cone_generators(&cons, d + 1);

    let is_cone = v.vertices.iter().all(|p| crate::linalg::norm_inf(p) <= TOL_GEOM);
    let mut h = HRep::universe(d);
    let mut push_row = |w: &[f64], eq: bool| {
        let a = &w[..d];
        let na = norm(a);
        if na <= 1e-10 {
            return;
        }
        let row = scale(a, 1.0 / na);
        let rhs = if is_cone { 0.0 } else { w[d] / na };
        if eq {
            h.push_eq(row, rhs);
        } else {
            h.push(row, rhs);
        }
    };
    // Rays of the polar cone are facets. Ray (a, −β) ⇒ a·z ≤ β; note w[d] = −β
    // so rhs = −w[d]. Flip the sign via a negated copy.
    for r in &gens.rays {
        let mut w = r.clone();
        w[d] = -w[d];
        push_row(&w, false);
    }
    for l in &gens.lineality {
        let mut w = l.clone();
        w[d] = -w[d];
        push_row(&w, true);
    }
    Ok(h)
}
