#![allow(dead_code)]

use apm_core::cli::builtins::random_discrete;
use apm_core::linalg::{dot, mat_vec, sub};
use apm_core::measure::{Atom, CellStats, Scenario, XiDistribution};
use apm_core::recourse::TwoStageProblem;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atoms(prob: &TwoStageProblem) -> &[Atom] {
    match &prob.dist {
        XiDistribution::Atoms(d) => &d.atoms,
        _ => panic!("discrete law expected"),
    }
}

pub fn scenario(a: &Atom) -> Scenario {
    Scenario {
        t: a.t.clone(),
        h: a.h.clone(),
    }
}

/// Deterministic equivalent over all atoms and recourse scenarios, solved
/// with an independent LP code. Returns `(value, x)`.
pub fn extensive_form(prob: &TwoStageProblem) -> (f64, Vec<f64>) {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<_> = prob.c.iter().map(|&c| lp.add_var(c, (0.0, f64::INFINITY))).collect();
    for (row, &b) in prob.a.iter().zip(&prob.b) {
        let terms: Vec<_> = x.iter().zip(row).map(|(&v, &a)| (v, a)).collect();
        lp.add_constraint(&terms[..], ComparisonOp::Eq, b);
    }
    for atom in atoms(prob) {
        for r in &prob.recourse {
            let y: Vec<_> =
                r.q.iter()
                    .map(|&q| lp.add_var(atom.weight * r.weight * q, (0.0, f64::INFINITY)))
                    .collect();
            for i in 0..prob.l() {
                let mut terms: Vec<_> = x.iter().zip(&atom.t[i]).map(|(&v, &a)| (v, a)).collect();
                terms.extend(y.iter().zip(&r.w[i]).map(|(&v, &a)| (v, a)));
                lp.add_constraint(&terms[..], ComparisonOp::Eq, atom.h[i]);
            }
        }
    }
    let sol = lp.solve().expect("extensive form solves");
    (sol.objective(), x.iter().map(|&v| sol[v]).collect())
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, m, k, &mut vec![], &mut out);
    out
}

#[allow(clippy::needless_range_loop)]
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Vertices of a bounded `D = {λ : Wᵀλ ≤ q}` by trying every basis.
pub fn dual_vertices(w: &[Vec<f64>], q: &[f64]) -> Vec<Vec<f64>> {
    let l = w.len();
    let m = q.len();
    let cols: Vec<Vec<f64>> = (0..m).map(|j| (0..l).map(|i| w[i][j]).collect()).collect();
    let mut out: Vec<Vec<f64>> = vec![];
    for basis in combinations(m, l) {
        let a = basis.iter().map(|&j| cols[j].clone()).collect();
        let b = basis.iter().map(|&j| q[j]).collect();
        let Some(lam) = gauss(a, b) else { continue };
        if (0..m).all(|j| dot(&cols[j], &lam) <= q[j] + 1e-9)
            && !out.iter().any(|v| sub(v, &lam).iter().all(|d| d.abs() < 1e-9))
        {
            out.push(lam);
        }
    }
    out
}

/// `Q(x, ξ) = max_v (h − T x)ᵀ v` over dual vertices (bounded `D`).
pub fn q_brute(verts: &[Vec<f64>], x: &[f64], xi: &Scenario) -> f64 {
    let psi = sub(&xi.h, &mat_vec(&xi.t, x));
    verts.iter().map(|v| dot(v, &psi)).fold(f64::NEG_INFINITY, f64::max)
}

/// `E[Q(x, ξ)]` by enumeration over atoms and recourse scenarios.
pub fn v_brute(prob: &TwoStageProblem, x: &[f64]) -> f64 {
    let verts: Vec<_> = prob.recourse.iter().map(|r| dual_vertices(&r.w, &r.q)).collect();
    atoms(prob)
        .iter()
        .map(|a| {
            let xi = scenario(a);
            a.weight
                * prob
                    .recourse
                    .iter()
                    .zip(&verts)
                    .map(|(r, v)| r.weight * q_brute(v, x, &xi))
                    .sum::<f64>()
        })
        .sum()
}

/// Fifty seeded random instances with `n, m, l ≤ 6` and at most 12 atoms.
pub fn random_instances() -> Vec<(String, TwoStageProblem)> {
    let mut g = rng(20240917);
    (0..50u64)
        .map(|seed| {
            let n = g.gen_range(1..=6);
            let l = g.gen_range(1..=5);
            let m = g.gen_range(l + 1..=6);
            let k = g.gen_range(2..=12);
            let name = format!("random-discrete:{seed}:{n},{m},{l},{k}");
            (name, random_discrete(seed, n, m, l, k).unwrap())
        })
        .collect()
}

/// Uniform-ish point of `{x ≥ 0 : Σ x = b}`, strictly positive.
pub fn random_x(prob: &TwoStageProblem, g: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..prob.n()).map(|_| -(g.gen_range(1e-3..1.0f64)).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s * prob.b[0]).collect()
}

/// Cell statistics for explicit groups of atom indices.
pub fn group_stats(dist: &XiDistribution, groups: &[Vec<usize>]) -> Vec<CellStats> {
    groups.iter().map(|g| dist.atom_stats(g)).collect()
}

/// Random grouping of `0..k` into nonempty blocks.
pub fn random_groups(k: usize, g: &mut impl Rng) -> Vec<Vec<usize>> {
    let blocks = g.gen_range(1..=k);
    let mut out = vec![vec![]; blocks];
    for i in 0..k {
        let b = if i < blocks { i } else { g.gen_range(0..blocks) };
        out[b].push(i);
    }
    out
}

/// Splits every block of `groups` at random.
pub fn refine_groups(groups: &[Vec<usize>], g: &mut impl Rng) -> Vec<Vec<usize>> {
    groups
        .iter()
        .flat_map(|b| {
            let sub = random_groups(b.len(), g);
            sub.into_iter()
                .map(|s| s.iter().map(|&i| b[i]).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
