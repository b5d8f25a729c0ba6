/*
Copyright 2026 The l1pda Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

mod common;

use common::{gauss_jordan_inverse, max_abs_diff, random_stats};
use l1pda::admm::objective;
use l1pda::path::solve_sequence;
use l1pda::{lambda_max, make_grid, solve, solve_path, ClassStats, Config, SymMatrix};

fn tight() -> Config {
    Config { abs_tol: 1e-11, rel_tol: 1e-10, max_iter: 200_000, ..Config::default() }
}

/// Minimizer of the one-dimensional problem in closed form.
fn scalar_oracle(n1: f64, n2: f64, s1: f64, s2: f64, lambda: f64) -> (f64, f64) {
    let n = n1 + n2;
    let pooled = (n1 * s1 + n2 * s2) / n;
    if lambda >= n1 * n2 * (s1 - s2).abs() / n {
        (1.0 / pooled, 1.0 / pooled)
    } else if s1 < s2 {
        (n1 / (n1 * s1 + lambda), n2 / (n2 * s2 - lambda))
    } else {
        (n1 / (n1 * s1 - lambda), n2 / (n2 * s2 + lambda))
    }
}

fn diag_stats(n1: usize, n2: usize, d1: &[f64], d2: &[f64]) -> ClassStats<f64> {
    let p = d1.len();
    ClassStats::from_moments(
        n1,
        n2,
        vec![0.0; p],
        vec![0.0; p],
        SymMatrix::from_diagonal(d1),
        SymMatrix::from_diagonal(d2),
    )
    .unwrap()
}

#[test]
fn scalar_problem_matches_closed_form() {
    for (s1, s2) in [(1.0, 2.0), (3.0, 0.5), (1.0, 1.0001)] {
        let st = diag_stats(20, 30, &[s1], &[s2]);
        let lmax = lambda_max(&st);
        for frac in [2.0, 1.0, 0.7, 0.3, 0.05, 0.001] {
            let lambda = frac * lmax;
            let r = solve(&st, lambda, &tight(), None).unwrap();
            let (a, b) = scalar_oracle(20.0, 30.0, s1, s2, lambda);
            assert!((r.a.get(0, 0) - a).abs() <= 1e-7 * a, "s=({s1},{s2}) frac {frac}: {} vs {a}", r.a.get(0, 0));
            assert!((r.b.get(0, 0) - b).abs() <= 1e-7 * b);
        }
    }
}

#[test]
fn diagonal_problem_separates_by_coordinate() {
    let d1 = [1.0, 0.5, 2.0, 1.3, 0.9];
    let d2 = [1.0, 1.5, 0.7, 1.25, 3.0];
    let (n1, n2) = (25usize, 40usize);
    let st = diag_stats(n1, n2, &d1, &d2);
    let lmax = lambda_max(&st);
    let grid = make_grid(lmax, 12, 0.01).unwrap();
    let fit = solve_path(&st, &grid, &tight()).unwrap();
    for r in &fit.results {
        for i in 0..5 {
            let (a, b) = scalar_oracle(n1 as f64, n2 as f64, d1[i], d2[i], r.lambda);
            assert!((r.a.get(i, i) - a).abs() <= 1e-6 * a);
            assert!((r.b.get(i, i) - b).abs() <= 1e-6 * b);
            for j in 0..5 {
                if i != j {
                    assert!(r.a.get(i, j).abs() < 1e-8 && r.b.get(i, j).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn warm_started_path_agrees_with_cold_solves() {
    let st = random_stats(6, 20, 24, 11);
    let grid = make_grid(lambda_max(&st), 10, 0.02).unwrap();
    let fit = solve_path(&st, &grid, &tight()).unwrap();
    for r in &fit.results {
        let cold = solve(&st, r.lambda, &tight(), None).unwrap();
        let rel = (r.objective - cold.objective).abs() / cold.objective.abs();
        assert!(rel < 1e-9, "lambda {}: {rel}", r.lambda);
        assert!(max_abs_diff(r.a.as_slice(), cold.a.as_slice()) < 1e-5 * r.a.max_abs());
    }
}

#[test]
fn pooled_identity_with_independent_inverse() {
    let st = random_stats(5, 18, 22, 3);
    let lambda = 0.2 * lambda_max(&st);
    let r = solve(&st, lambda, &tight(), None).unwrap();
    assert!(r.converged);
    let (n1, n2) = (st.n1 as f64, st.n2 as f64);
    let s1 = gauss_jordan_inverse(&r.a);
    let s2 = gauss_jordan_inverse(&r.b);
    let mix: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| (n1 * x + n2 * y) / (n1 + n2)).collect();
    assert!(max_abs_diff(&mix, st.s_pool.as_slice()) < 1e-8);
}

#[test]
fn objective_is_minimal_against_perturbations() {
    let st = random_stats(4, 15, 15, 21);
    let lambda = 0.4 * lambda_max(&st);
    let r = solve(&st, lambda, &tight(), None).unwrap();
    let f0 = objective(&r.a, &r.b, &st, lambda).unwrap();
    for k in 0..40 {
        let (i, j) = (k % 4, (k / 4) % 4);
        let e = SymMatrix::from_row_major(
            4,
            (0..16).map(|m| if (m / 4, m % 4) == (i, j) || (m / 4, m % 4) == (j, i) { 1e-3 } else { 0.0 }).collect(),
        )
        .unwrap();
        for s in [-1.0, 1.0] {
            let a = &r.a + &e.scale(s);
            let b = &r.b + &e.scale(if k % 2 == 0 { s } else { 0.0 });
            assert!(objective(&a, &b, &st, lambda).unwrap() >= f0 - 1e-9 * f0.abs());
        }
    }
}

#[test]
fn class_swap_swaps_estimates() {
    let st = random_stats(5, 17, 23, 8);
    let swapped =
        ClassStats::from_moments(st.n2, st.n1, st.mu2.clone(), st.mu1.clone(), st.s2.clone(), st.s1.clone()).unwrap();
    let lambda = 0.3 * lambda_max(&st);
    let r = solve(&st, lambda, &tight(), None).unwrap();
    let q = solve(&swapped, lambda, &tight(), None).unwrap();
    assert!(max_abs_diff(r.a.as_slice(), q.b.as_slice()) < 1e-7 * r.a.max_abs());
    assert!(max_abs_diff(r.b.as_slice(), q.a.as_slice()) < 1e-7 * r.b.max_abs());
}

#[test]
fn sparsity_grows_as_lambda_increases() {
    let st = random_stats(8, 30, 30, 5);
    let grid = make_grid(lambda_max(&st), 15, 0.01).unwrap();
    let fit = solve_path(&st, &grid, &tight()).unwrap();
    let nnz: Vec<usize> = fit.results.iter().map(|r| r.state.c.count_above(0.0)).collect();
    assert_eq!(nnz[0], 0);
    assert!(nnz.last().unwrap() > &nnz[0]);
    assert!(nnz[nnz.len() - 1] >= nnz[nnz.len() / 2]);
}

#[test]
fn sequence_accepts_arbitrary_lambdas() {
    let st = random_stats(3, 12, 14, 2);
    let lmax = lambda_max(&st);
    let out = solve_sequence(&st, &[0.1 * lmax, 0.5 * lmax, 0.1 * lmax], &tight()).unwrap();
    assert!(max_abs_diff(out[0].a.as_slice(), out[2].a.as_slice()) < 1e-6 * out[0].a.max_abs());
}
