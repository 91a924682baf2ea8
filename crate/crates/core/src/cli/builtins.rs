//! Built-in problem instances.

use super::file::ProblemFile;
use crate::linalg::Matrix;
use crate::measure::{Atom, Entry, XiDistribution};
use crate::recourse::TwoStageProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuiltinError {
    #[error("unknown builtin {0:?} (known: prodmix, cvar, cvar-discrete, lands-mini, deterministic, random-discrete:<seed>:<n>,<m>,<l>[,<atoms>])")]
    Unknown(String),
    #[error("bad generator arguments in {name:?}: {msg}")]
    BadArgs { name: String, msg: String },
}

pub const NAMES: &[&str] = &[
    "prodmix",
    "cvar",
    "cvar-discrete",
    "lands-mini",
    "deterministic",
    "random-discrete",
];

fn u(lo: f64, hi: f64) -> Entry {
    Entry::Uniform([lo, hi])
}

fn k(v: f64) -> Entry {
    Entry::Constant(v)
}

/// Product mix: maximize `12 x₁ + 40 x₂` minus expected overtime
/// `5 y₁ + 10 y₂` where `T x − y ≤ h`. Written as a minimization with slack
/// columns: `T x − y + s = h`.
pub fn prodmix() -> TwoStageProblem {
    TwoStageProblem::new(
        vec![-12.0, -40.0],
        vec![],
        vec![],
        vec![vec![-1.0, 0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0, 1.0]],
        vec![5.0, 10.0, 0.0, 0.0],
        XiDistribution::uniform_box(
            vec![vec![u(3.5, 4.5), u(9.0, 11.0)], vec![u(0.8, 1.2), u(36.0, 44.0)]],
            vec![u(5970.0, 6030.0), u(3979.0, 4021.0)],
        ),
    )
    .expect("prodmix data is consistent")
}

pub const CVAR_ALPHA: f64 = 0.9;

fn cvar_with(t_rows: XiDistribution) -> TwoStageProblem {
    // x̃ = (x₁, x₂, x₃, τ⁺, τ⁻);  ψ = −rᵀx − τ;  Q = max_{0≤λ≤1} ψλ = (ψ)₊
    let a = 1.0 - CVAR_ALPHA;
    TwoStageProblem::new(
        vec![0.0, 0.0, 0.0, a, -a],
        vec![vec![1.0, 1.0, 1.0, 0.0, 0.0]],
        vec![1.0],
        vec![vec![1.0, -1.0]],
        vec![1.0, 0.0],
        t_rows,
    )
    .expect("cvar data is consistent")
}

/// `(1 − α)·CVaR_α` of the portfolio loss `−rᵀx` over the simplex, returns
/// independent and uniform.
pub fn cvar() -> TwoStageProblem {
    cvar_with(XiDistribution::uniform_box(
        vec![vec![u(-0.05, 0.15), u(0.0, 0.08), u(0.02, 0.04), k(1.0), k(-1.0)]],
        vec![k(0.0)],
    ))
}

/// The same portfolio model with eight equally likely return scenarios.
pub fn cvar_discrete() -> TwoStageProblem {
    let returns = [
        [0.12, 0.05, 0.03],
        [-0.04, 0.06, 0.03],
        [0.08, 0.01, 0.02],
        [0.15, 0.07, 0.04],
        [-0.02, 0.02, 0.03],
        [0.05, 0.04, 0.02],
        [0.10, 0.00, 0.03],
        [0.01, 0.03, 0.04],
    ];
    let atoms = returns
        .iter()
        .map(|r| Atom {
            t: vec![vec![r[0], r[1], r[2], 1.0, -1.0]],
            h: vec![0.0],
            weight: 1.0 / returns.len() as f64,
        })
        .collect();
    cvar_with(XiDistribution::atoms(atoms))
}

/// Small capacity-expansion model: three technologies, three demand blocks,
/// random base-load demand. Illustrative data.
pub fn lands_mini() -> TwoStageProblem {
    // first stage: x₁..x₃ capacities, e₁ surplus over the minimum, e₂ unused budget
    let c = vec![10.0, 7.0, 16.0, 0.0, 0.0];
    let a = vec![vec![1.0, 1.0, 1.0, -1.0, 0.0], vec![10.0, 7.0, 16.0, 0.0, 1.0]];
    let b = vec![12.0, 120.0];
    let op_cost = [[40.0, 24.0, 4.0], [45.0, 27.0, 4.5], [32.0, 19.2, 3.2]];
    // second stage columns: y_ij (9), capacity slack s_i (3), unmet u_j (3), excess v_j (3)
    let m = 18;
    let mut w: Matrix = vec![vec![0.0; m]; 6];
    let mut q = vec![0.0; m];
    for i in 0..3 {
        for j in 0..3 {
            let col = 3 * i + j;
            w[i][col] = 1.0;
            w[3 + j][col] = 1.0;
            q[col] = op_cost[i][j];
        }
        w[i][9 + i] = 1.0;
    }
    for j in 0..3 {
        w[3 + j][12 + j] = 1.0;
        q[12 + j] = 1000.0;
        w[3 + j][15 + j] = -1.0;
    }
    let mut t: Matrix = vec![vec![0.0; 5]; 6];
    for (i, row) in t.iter_mut().enumerate().take(3) {
        row[i] = -1.0;
    }
    let atoms = [(3.0, 0.3), (5.0, 0.4), (7.0, 0.3)]
        .iter()
        .map(|&(d1, wgt)| Atom {
            t: t.clone(),
            h: vec![0.0, 0.0, 0.0, d1, 3.0, 2.0],
            weight: wgt,
        })
        .collect();
    TwoStageProblem::new(c, a, b, w, q, XiDistribution::atoms(atoms)).expect("lands-mini data is consistent")
}

/// One scenario, so the first master is already exact.
pub fn deterministic() -> TwoStageProblem {
    TwoStageProblem::new(
        vec![1.0, 2.0],
        vec![vec![1.0, 1.0]],
        vec![2.0],
        vec![vec![1.0, -1.0]],
        vec![3.0, 1.0],
        XiDistribution::atoms(vec![Atom {
            t: vec![vec![1.0, -1.0]],
            h: vec![1.5],
            weight: 1.0,
        }]),
    )
    .expect("deterministic data is consistent")
}

/// Random instance with complete recourse and bounded first stage:
/// `W = [I, −𝟙, R]`, `q > 0` (so `D` is a bounded simplex-like polytope),
/// `Σ x = b`, and `atoms` scenarios with random `T` and `h`.
pub fn random_discrete(seed: u64, n: usize, m: usize, l: usize, atoms: usize) -> Result<TwoStageProblem, BuiltinError> {
    let name = format!("random-discrete:{seed}:{n},{m},{l},{atoms}");
    let bad = |msg: &str| BuiltinError::BadArgs {
        name: name.clone(),
        msg: msg.into(),
    };
    if n == 0 || l == 0 || n > 10 || m > 10 || l > 10 {
        return Err(bad("need 1 ≤ n, l and n, m, l ≤ 10"));
    }
    if m < l + 1 {
        return Err(bad("need m ≥ l + 1 for complete recourse"));
    }
    if atoms == 0 || atoms > 64 {
        return Err(bad("need 1 ≤ atoms ≤ 64"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = vec![vec![1.0; n]];
    let b = vec![rng.gen_range(1.0..3.0)];
    let mut w: Matrix = vec![vec![0.0; m]; l];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 1.0;
        row[l] = -1.0;
        for row_val in row.iter_mut().skip(l + 1) {
            *row_val = rng.gen_range(-1.0..1.0);
        }
    }
    let q: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    let raw: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw
        .iter()
        .map(|&r| Atom {
            t: (0..l)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect(),
            h: (0..l).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            weight: r / total,
        })
        .collect();
    TwoStageProblem::new(c, a, b, w, q, XiDistribution::atoms(atoms)).map_err(|e| bad(&e.to_string()))
}

fn parse_random(name: &str) -> Result<TwoStageProblem, BuiltinError> {
    let bad = |msg: &str| BuiltinError::BadArgs {
        name: name.into(),
        msg: msg.into(),
    };
    let rest = name.strip_prefix("random-discrete").unwrap();
    let rest = rest
        .strip_prefix(':')
        .ok_or_else(|| bad("expected random-discrete:<seed>:<n>,<m>,<l>[,<atoms>]"))?;
    let (seed, sizes) = rest.split_once(':').ok_or_else(|| bad("missing sizes"))?;
    let seed: u64 = seed.parse().map_err(|_| bad("seed is not an integer"))?;
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("sizes must be integers"))?;
    match sizes[..] {
        [n, m, l] => random_discrete(seed, n, m, l, 6),
        [n, m, l, a] => random_discrete(seed, n, m, l, a),
        _ => Err(bad("expected three or four sizes")),
    }
}

pub fn builtin_problem(name: &str) -> Result<TwoStageProblem, BuiltinError> {
    match name {
        "prodmix" => Ok(prodmix()),
        "cvar" => Ok(cvar()),
        "cvar-discrete" => Ok(cvar_discrete()),
        "lands-mini" => Ok(lands_mini()),
        "deterministic" => Ok(deterministic()),
        s if s.starts_with("random-discrete") => parse_random(s),
        other => Err(BuiltinError::Unknown(other.into())),
    }
}

pub fn builtin(name: &str) -> Result<ProblemFile, BuiltinError> {
    let p = builtin_problem(name)?;
    Ok(ProblemFile::from_problem(Some(name), &p))
}
