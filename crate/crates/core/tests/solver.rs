mod common;

use apm_core::cli::builtins::{builtin_problem, cvar, cvar_discrete, deterministic, lands_mini, prodmix};
use apm_core::linalg::dot;
use apm_core::measure::{Atom, XiDistribution};
use apm_core::partition::{adapted_partition, PartitionError};
use apm_core::recourse::TwoStageProblem;
use apm_core::solver::{
    g2apm, g2apm_with_observer, lshaped, FeasibilityMode, G2apmOptions, LShapedOptions, SolverError, Status, ThetaInit,
};
use approx::assert_abs_diff_eq;
use common::*;

fn tight() -> G2apmOptions {
    G2apmOptions {
        eps: 1e-8,
        ..Default::default()
    }
}

fn tight_ls() -> LShapedOptions {
    LShapedOptions {
        eps: 1e-8,
        ..Default::default()
    }
}

#[test]
fn deterministic_converges_at_once() {
    let p = deterministic();
    let r = g2apm(&p, &G2apmOptions::default()).unwrap().report;
    assert_eq!(r.iterations, 1);
    assert_eq!(r.status, Status::Converged);
    assert_abs_diff_eq!(r.z_lower, 2.25, epsilon = 1e-9);
    assert_abs_diff_eq!(r.z_upper, 2.25, epsilon = 1e-9);
    let l = lshaped(&p, &LShapedOptions::default()).unwrap().report;
    assert!(l.iterations <= 2);
    assert_abs_diff_eq!(l.z_upper, 2.25, epsilon = 1e-9);
}

#[test]
fn named_random_instance_matches_extensive_form() {
    let p = builtin_problem("random-discrete:7:2,3,2").unwrap();
    let (ef, _) = extensive_form(&p);
    let r = g2apm(&p, &tight()).unwrap().report;
    assert!(close(r.z_upper, ef, 1e-6), "{} vs {ef}", r.z_upper);
}

#[test]
fn builtins_match_extensive_form() {
    for (name, p) in [("lands-mini", lands_mini()), ("cvar-discrete", cvar_discrete())] {
        let (ef, x) = extensive_form(&p);
        let g = g2apm(&p, &tight()).unwrap().report;
        let l = lshaped(&p, &tight_ls()).unwrap().report;
        assert!(close(g.z_upper, ef, 1e-6), "{name}: g2apm {} vs {ef}", g.z_upper);
        assert!(close(l.z_upper, ef, 1e-6), "{name}: lshaped {} vs {ef}", l.z_upper);
        // the reported point attains the upper bound
        assert!(close(dot(&p.c, &g.x) + v_brute(&p, &g.x), g.z_upper, 1e-7), "{name}");
        assert!(close(dot(&p.c, &x) + v_brute(&p, &x), ef, 1e-7), "{name}");
    }
}

#[test]
fn solvers_agree_on_random_instances() {
    for (name, p) in random_instances().into_iter().step_by(3) {
        let g = g2apm(&p, &tight()).unwrap().report;
        let l = lshaped(&p, &tight_ls()).unwrap().report;
        assert!(
            close(g.z_upper, l.z_upper, 1e-5),
            "{name}: {} vs {}",
            g.z_upper,
            l.z_upper
        );
        let c = lshaped(
            &p,
            &LShapedOptions {
                theta: ThetaInit::Constant(-1e6),
                ..tight_ls()
            },
        )
        .unwrap()
        .report;
        assert!(close(c.z_upper, l.z_upper, 1e-5), "{name}: constant seed {}", c.z_upper);
    }
}

#[test]
fn repeated_iterate_means_convergence() {
    for (name, p) in random_instances() {
        let mut seen: Vec<Vec<f64>> = vec![];
        let mut stalled = None;
        let r = g2apm_with_observer(&p, &tight(), |rec, _| {
            if seen
                .iter()
                .any(|y| y.iter().zip(&rec.x).all(|(a, b)| (a - b).abs() < 1e-9))
            {
                stalled = Some(rec.gap);
            }
            seen.push(rec.x.clone());
        })
        .unwrap();
        if let Some(gap) = stalled {
            assert!(gap <= 1e-8, "{name}: revisited an anchor with gap {gap}");
            assert_eq!(r.report.status, Status::Converged);
        }
    }
}

#[test]
fn prodmix_upper_bound_matches_monte_carlo() {
    let p = prodmix();
    let r = g2apm(
        &p,
        &G2apmOptions {
            eps: 0.05,
            ..Default::default()
        },
    )
    .unwrap()
    .report;
    assert_abs_diff_eq!(r.z_upper, -17711.56, epsilon = 1.0);
    let x = &r.x;
    let mut g = rng(41);
    let n = 1_000_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let xi = p.dist.sample(&mut g);
        // overtime beyond the available hours, priced at 5 and 10
        let q = 5.0 * (dot(&xi.t[0], x) - xi.h[0]).max(0.0) + 10.0 * (dot(&xi.t[1], x) - xi.h[1]).max(0.0);
        s += q;
        s2 += q * q;
    }
    let mean = s / n as f64;
    let sd = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let z = dot(&p.c, x) + mean;
    assert!((z - r.z_upper).abs() <= 3.0 * sd, "MC {z} ± {sd} vs {}", r.z_upper);
}

#[test]
fn lshaped_on_prodmix() {
    let r = lshaped(
        &prodmix(),
        &LShapedOptions {
            eps: 0.05,
            ..Default::default()
        },
    )
    .unwrap()
    .report;
    assert_eq!(r.status, Status::Converged);
    assert_abs_diff_eq!(r.z_upper, -17711.56, epsilon = 1.0);
}

#[test]
fn continuous_cvar_solvers_agree() {
    let p = cvar();
    let g = g2apm(&p, &tight()).unwrap().report;
    let l = lshaped(&p, &tight_ls()).unwrap().report;
    assert!(close(g.z_upper, l.z_upper, 1e-6), "{} vs {}", g.z_upper, l.z_upper);
    // the weights stay on the simplex
    assert_abs_diff_eq!(g.x[..3].iter().sum::<f64>(), 1.0, epsilon = 1e-9);
}

/// `x₁ + x₂ = 2`, recourse `y = h − x₁ ≥ 0` with `h ∈ {1, 1.5}`.
fn not_complete() -> TwoStageProblem {
    TwoStageProblem::new(
        vec![-1.0, 0.0],
        vec![vec![1.0, 1.0]],
        vec![2.0],
        vec![vec![1.0]],
        vec![1.0],
        XiDistribution::atoms(
            [1.0, 1.5]
                .iter()
                .map(|&h| Atom {
                    t: vec![vec![1.0, 0.0]],
                    h: vec![h],
                    weight: 0.5,
                })
                .collect(),
        ),
    )
    .unwrap()
}

#[test]
fn infeasible_iterate_is_an_error_by_default() {
    let err = g2apm(&not_complete(), &G2apmOptions::default()).unwrap_err();
    assert!(
        matches!(err, SolverError::Partition(PartitionError::OutsideCoverage { .. })),
        "{err}"
    );
    assert!(lshaped(&not_complete(), &LShapedOptions::default()).is_err());
}

#[test]
fn feasibility_cuts_repair_the_master() {
    let p = not_complete();
    let (ef, _) = extensive_form(&p);
    assert_abs_diff_eq!(ef, -0.75, epsilon = 1e-9);
    let g = g2apm(
        &p,
        &G2apmOptions {
            feasibility: FeasibilityMode::Cuts,
            ..tight()
        },
    )
    .unwrap()
    .report;
    assert_abs_diff_eq!(g.z_upper, -0.75, epsilon = 1e-8);
    assert_abs_diff_eq!(g.x[0], 1.0, epsilon = 1e-9);
    let l = lshaped(
        &p,
        &LShapedOptions {
            feasibility: FeasibilityMode::Cuts,
            ..tight_ls()
        },
    )
    .unwrap();
    assert_abs_diff_eq!(l.report.z_upper, -0.75, epsilon = 1e-8);
    assert!(!l.cuts.feasibility.is_empty());
}

#[test]
fn invalid_options_are_rejected() {
    let p = deterministic();
    for (eps, iters) in [(-1.0, 10), (f64::NAN, 10), (1e-6, 0)] {
        let e = g2apm(
            &p,
            &G2apmOptions {
                eps,
                max_iter: iters,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(e, SolverError::InvalidOption { .. }));
    }
    let mut half = apm_core::partition::Partition::trivial(&p.dist);
    half.cells[0].stats.prob = 0.5;
    let e = g2apm(
        &p,
        &G2apmOptions {
            initial: Some(half),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(e, SolverError::InvalidOption { name: "initial", .. }));
}

#[test]
fn warm_start_from_an_adapted_partition() {
    let p = cvar_discrete();
    let fans = p.fans().unwrap();
    let start = adapted_partition(&p, &[0.2, 0.3, 0.5, 0.0, 0.0], &fans).unwrap();
    let cold = g2apm(&p, &tight()).unwrap().report;
    let warm = g2apm(
        &p,
        &G2apmOptions {
            initial: Some(start),
            ..tight()
        },
    )
    .unwrap()
    .report;
    assert!(close(cold.z_upper, warm.z_upper, 1e-8));
}

#[test]
fn relative_gap_and_iteration_limit() {
    let p = prodmix();
    let rel = g2apm(
        &p,
        &G2apmOptions {
            eps: 1e-5,
            relative: true,
            ..Default::default()
        },
    )
    .unwrap()
    .report;
    assert!(rel.gap() <= 1e-5 * rel.z_upper.abs());
    let capped = g2apm(
        &p,
        &G2apmOptions {
            eps: 0.0,
            max_iter: 2,
            ..Default::default()
        },
    )
    .unwrap()
    .report;
    assert_eq!(capped.status, Status::IterationLimit);
    assert_eq!(capped.iterations, 2);
    assert!(capped.z_lower < capped.z_upper);
}
