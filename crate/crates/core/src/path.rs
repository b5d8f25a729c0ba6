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

//! Regularization paths: the lambda grid and warm-started sequential solves.

use crate::admm::{solve, AdmmState, SolveConfig, SolveResult};
use crate::error::{PdaError, Result};
use crate::scalar::Scalar;
use crate::stats::ClassStats;

/// Default number of grid points.
pub const DEFAULT_COUNT: usize = 30;
/// Default ratio of the smallest to the largest lambda.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Strictly decreasing, log-linearly spaced penalties from `lambda_max`
/// down to `epsilon * lambda_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaGrid<T> {
    values: Vec<T>,
    epsilon: T,
}

impl<T: Scalar> LambdaGrid<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A one-point grid, e.g. `lambda_max` alone.
    pub fn single(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(PdaError::DegenerateGrid(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { values: vec![lambda], epsilon: T::one() })
    }
}

/// Smallest penalty at which the pooled (LDA) estimate is optimal:
/// `n1 n2 |S1 - S2|_max / (n1 + n2)`.
pub fn lambda_max<T: Scalar>(stats: &ClassStats<T>) -> T {
    let (w1, w2) = stats.weights();
    w1 * w2 * (&stats.s1 - &stats.s2).max_abs() / (w1 + w2)
}

/// `count` values with equally spaced logarithms from `lmax` to `epsilon * lmax`.
pub fn make_grid<T: Scalar>(lmax: T, count: usize, epsilon: T) -> Result<LambdaGrid<T>> {
    if !(lmax > T::zero() && lmax.is_finite()) {
        return Err(PdaError::DegenerateGrid(format!(
            "lambda_max is {lmax}; the class covariances coincide and only the pooled fit exists"
        )));
    }
    if count < 2 {
        return Err(PdaError::InvalidArgument(format!("grid needs at least 2 points, got {count}")));
    }
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(PdaError::InvalidArgument(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let lo = lmax.ln();
    let step = epsilon.ln() / T::from_count(count - 1);
    let mut values: Vec<T> = (0..count).map(|i| (lo + step * T::from_count(i)).exp()).collect();
    values[0] = lmax;
    values[count - 1] = epsilon * lmax;
    if values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(PdaError::DegenerateGrid(format!(
            "grid from {lmax} with epsilon {epsilon} and {count} points is not strictly decreasing"
        )));
    }
    Ok(LambdaGrid { values, epsilon })
}

/// Solutions along a grid, one per value, in grid order.
#[derive(Clone, Debug)]
pub struct PathFit<T> {
    pub grid: LambdaGrid<T>,
    pub results: Vec<SolveResult<T>>,
    pub stats: ClassStats<T>,
}

impl<T: Scalar> PathFit<T> {
    pub fn total_iterations(&self) -> usize {
        self.results.iter().map(|r| r.iterations).sum()
    }

    pub fn unconverged(&self) -> usize {
        self.results.iter().filter(|r| !r.converged).count()
    }
}

/// Fits every grid value, the first from the pooled start and each later one
/// from the previous solution.
pub fn solve_path<T: Scalar>(stats: &ClassStats<T>, grid: &LambdaGrid<T>, cfg: &SolveConfig<T>) -> Result<PathFit<T>> {
    let results = solve_sequence(stats, grid.values(), cfg)?;
    Ok(PathFit { grid: grid.clone(), results, stats: stats.clone() })
}

/// Warm-started solves over an arbitrary (typically decreasing) list of
/// penalties. Duplicates are allowed.
pub fn solve_sequence<T: Scalar>(
    stats: &ClassStats<T>,
    lambdas: &[T],
    cfg: &SolveConfig<T>,
) -> Result<Vec<SolveResult<T>>> {
    let mut state = AdmmState::pooled_start(stats, cfg.rho)?;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let res = solve(stats, lambda, cfg, Some(&state))?;
        state = res.state.clone();
        out.push(res);
    }
    Ok(out)
}
