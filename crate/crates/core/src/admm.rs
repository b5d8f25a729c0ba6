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

//! Alternating direction method of multipliers for the fused precision problem
//!
//! ```text
//! minimize  -n1 logdet A + n1 tr(A S1) - n2 logdet B + n2 tr(B S2) + lambda |A - B|_1
//! ```
//!
//! split as `C = A - B` with scaled dual `G`. One sweep is
//!
//! 1. `A <- argmin`: eigendecompose `rho (C + B + G) - n1 S1 = U diag(d) U^T`,
//!    then `A = U diag((d + sqrt(d^2 + 4 rho n1)) / (2 rho)) U^T`.
//! 2. `B <- argmin`: same with `rho (A - C - G) - n2 S2` and `n2`.
//! 3. `C <- soft_threshold(A - B - G, lambda / rho)`.
//! 4. `G <- G + rho (C - A + B)`.
//!
//! The A and B steps solve `rho X - n X^{-1} = M` exactly, so both iterates stay
//! positive definite whatever the input.

use crate::error::{PdaError, Result};
use crate::matkernel::{cholesky, log_det, shrink, spd_inverse, sym_eig, sym_eig_named, SymMatrix};
use crate::scalar::Scalar;
use crate::stats::ClassStats;

/// Solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig<T> {
    pub rho: T,
    pub max_iter: usize,
    pub abs_tol: T,
    pub rel_tol: T,
    /// Bound on the duality gap relative to `max(|objective|, 1)`, checked
    /// once both residuals are within tolerance.
    pub gap_tol: T,
}

impl<T: Scalar> Default for SolveConfig<T> {
    fn default() -> Self {
        Self { rho: T::one(), max_iter: 10_000, abs_tol: T::cst(1e-7), rel_tol: T::cst(1e-5), gap_tol: T::cst(1e-7) }
    }
}

impl<T: Scalar> SolveConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.rho) || !positive(self.abs_tol) || !positive(self.rel_tol) || !positive(self.gap_tol) {
            return Err(PdaError::InvalidArgument(format!(
                "rho, abs_tol, rel_tol and gap_tol must be positive and finite: {self:?}"
            )));
        }
        if self.max_iter == 0 {
            return Err(PdaError::InvalidArgument("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Iterates of the splitting: the two precisions, the auxiliary difference and
/// the scaled dual variable.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState<T> {
    pub a: SymMatrix<T>,
    pub b: SymMatrix<T>,
    pub c: SymMatrix<T>,
    pub dual: SymMatrix<T>,
    pub rho: T,
}

impl<T: Scalar> AdmmState<T> {
    /// The pooled start: `A = B = S_pool^{-1}`, `C = 0`, and the dual at its
    /// optimal value for every `lambda >= lambda_max`,
    /// `G = n1 n2 (S1 - S2) / (rho (n1 + n2))`.
    ///
    /// For `lambda >= lambda_max` this state is a fixed point of the iteration.
    pub fn pooled_start(stats: &ClassStats<T>, rho: T) -> Result<Self> {
        let precision = pooled_precision(stats)?;
        let (w1, w2) = stats.weights();
        let dual = (&stats.s1 - &stats.s2).scale(w1 * w2 / (rho * (w1 + w2)));
        Ok(Self { a: precision.clone(), b: precision, c: SymMatrix::zeros(stats.p()), dual, rho })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Same iterate expressed for a different penalty parameter. The unscaled
    /// multiplier `rho * G` is what carries over.
    pub fn with_rho(mut self, rho: T) -> Self {
        if rho != self.rho {
            self.dual = self.dual.scale(self.rho / rho);
            self.rho = rho;
        }
        self
    }

    fn check_dims(&self, p: usize) -> Result<()> {
        for m in [&self.a, &self.b, &self.c, &self.dual] {
            if m.dim() != p {
                return Err(PdaError::DimensionMismatch { expected: p, found: m.dim() });
            }
        }
        Ok(())
    }
}

/// Output of a single-lambda solve.
#[derive(Clone, Debug)]
pub struct SolveResult<T> {
    pub lambda: T,
    /// Class 1 precision estimate.
    pub a: SymMatrix<T>,
    /// Class 2 precision estimate.
    pub b: SymMatrix<T>,
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
    pub converged: bool,
    pub objective: T,
    /// `objective` minus the dual bound from the final multiplier; an upper
    /// bound on the distance to the optimal value. Infinite when the
    /// multiplier gives no bound (singular class covariance).
    pub duality_gap: T,
    /// Final iterate, reusable as a warm start.
    pub state: AdmmState<T>,
}

fn pooled_precision<T: Scalar>(stats: &ClassStats<T>) -> Result<SymMatrix<T>> {
    spd_inverse(&stats.s_pool).map_err(|e| match e {
        PdaError::Singular { min_eigenvalue, .. } => PdaError::IllPosed(format!(
            "pooled covariance is rank deficient (smallest eigenvalue {min_eigenvalue:e}); \
             the estimate is undefined for every lambda"
        )),
        other => other,
    })
}

/// Objective value at `(A, B)`.
pub fn objective<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>, stats: &ClassStats<T>, lambda: T) -> Result<T> {
    let (w1, w2) = stats.weights();
    let fit = -w1 * log_det(a)? + w1 * a.trace_product(&stats.s1) - w2 * log_det(b)? + w2 * b.trace_product(&stats.s2);
    let l1 = (a - b).l1_norm();
    let penalty = if l1 == T::zero() { T::zero() } else { lambda * l1 };
    Ok(fit + penalty)
}

/// Lower bound on the optimal value from a multiplier `Z` for `A - B`.
///
/// Clipping `Z` to `[-lambda, lambda]` makes it dual feasible, and the dual
/// function is `n1 logdet(S1 - Z / n1) + n2 logdet(S2 + Z / n2) + (n1 + n2) p`.
/// Returns `None` when either matrix is not positive definite.
pub fn dual_bound<T: Scalar>(stats: &ClassStats<T>, lambda: T, multiplier: &SymMatrix<T>) -> Option<T> {
    let (w1, w2) = stats.weights();
    let z = multiplier.map(|v| v.max(-lambda).min(lambda));
    let m1 = stats.s1.lin_comb(T::one(), &z, -T::one() / w1);
    let m2 = stats.s2.lin_comb(T::one(), &z, T::one() / w2);
    let l1 = cholesky_log_det(&m1)?;
    let l2 = cholesky_log_det(&m2)?;
    Some(w1 * l1 + w2 * l2 + (w1 + w2) * T::from_count(stats.p()))
}

/// `logdet m` from a Cholesky factor; `None` unless `m` is positive definite.
fn cholesky_log_det<T: Scalar>(m: &SymMatrix<T>) -> Option<T> {
    let p = m.dim();
    let l = cholesky(m).ok()?;
    let half = (0..p).fold(T::zero(), |acc, j| acc + l[j * p + j].ln());
    Some(half + half)
}

/// [`objective`] for iterates already known to be positive definite.
fn fast_objective<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>, stats: &ClassStats<T>, lambda: T) -> Result<T> {
    let (w1, w2) = stats.weights();
    let (Some(la), Some(lb)) = (cholesky_log_det(a), cholesky_log_det(b)) else {
        return objective(a, b, stats, lambda);
    };
    let fit = -w1 * la + w1 * a.trace_product(&stats.s1) - w2 * lb + w2 * b.trace_product(&stats.s2);
    let l1 = (a - b).l1_norm();
    Ok(if l1 == T::zero() { fit } else { fit + lambda * l1 })
}

/// Positive root of `rho x - n / x = d`, written to avoid cancellation for
/// large negative `d`.
#[inline]
fn prox_logdet_root<T: Scalar>(d: T, rho: T, n: T) -> T {
    let disc = (d * d + T::cst(4.0) * rho * n).sqrt();
    if d >= T::zero() {
        (d + disc) / (rho + rho)
    } else {
        (n + n) / (disc - d)
    }
}

fn prox_logdet<T: Scalar>(arg: &SymMatrix<T>, rho: T, n: T, name: &str) -> Result<SymMatrix<T>> {
    let eig = sym_eig_named(arg, name)?;
    Ok(eig.reconstruct_with(|d| prox_logdet_root(d, rho, n)))
}

/// Minimizer over A with B, C and the dual fixed.
pub fn update_a<T: Scalar>(state: &AdmmState<T>, stats: &ClassStats<T>) -> Result<SymMatrix<T>> {
    let rho = state.rho;
    let (w1, _) = stats.weights();
    let sum = &(&state.c + &state.b) + &state.dual;
    let arg = sum.lin_comb(rho, &stats.s1, -w1);
    prox_logdet(&arg, rho, w1, "A-update argument")
}

/// Minimizer over B given the freshly updated A held in `state.a`.
pub fn update_b<T: Scalar>(state: &AdmmState<T>, stats: &ClassStats<T>) -> Result<SymMatrix<T>> {
    let rho = state.rho;
    let (_, w2) = stats.weights();
    let diff = &(&state.a - &state.c) - &state.dual;
    let arg = diff.lin_comb(rho, &stats.s2, -w2);
    prox_logdet(&arg, rho, w2, "B-update argument")
}

/// `soft_threshold(A - B - G, lambda / rho)`.
pub fn update_c<T: Scalar>(state: &AdmmState<T>, lambda: T) -> Result<SymMatrix<T>> {
    check_lambda(lambda)?;
    let t = lambda / state.rho;
    let target = &(&state.a - &state.b) - &state.dual;
    Ok(target.map(|z| shrink(z, t)))
}

/// Dual ascent step `G + rho (C - A + B)`.
pub fn update_dual<T: Scalar>(state: &AdmmState<T>) -> SymMatrix<T> {
    let residual = &(&state.c - &state.a) + &state.b;
    state.dual.lin_comb(T::one(), &residual, state.rho)
}

fn check_lambda<T: Scalar>(lambda: T) -> Result<()> {
    if lambda >= T::zero() {
        Ok(())
    } else {
        Err(PdaError::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")))
    }
}

/// Rejects problems without a unique solution: a rank-deficient pooled
/// covariance for any lambda, and a singular class covariance at `lambda = 0`.
pub fn check_well_posed<T: Scalar>(stats: &ClassStats<T>, lambda: T) -> Result<()> {
    check_lambda(lambda)?;
    let pooled = sym_eig(&stats.s_pool)?;
    if !(pooled.smallest() > pooled.rank_tolerance()) {
        return Err(PdaError::IllPosed(format!(
            "pooled covariance is rank deficient (smallest eigenvalue {:e}); \
             the estimate is undefined for every lambda",
            pooled.smallest().as_f64()
        )));
    }
    if lambda == T::zero() {
        for (k, s) in [(1, &stats.s1), (2, &stats.s2)] {
            let e = sym_eig(s)?;
            if !(e.smallest() > e.rank_tolerance()) {
                return Err(PdaError::IllPosed(format!(
                    "class {k} covariance is singular, so the unpooled estimate at lambda = 0 \
                     does not exist"
                )));
            }
        }
    }
    Ok(())
}

/// Runs the iteration at one lambda, from `init` if given and from the pooled
/// start otherwise.
///
/// Stops once both
/// `|C - A + B|_F <= p abs_tol + rel_tol max(|C|_F, |A - B|_F)` and
/// `rho max(|dC + dB|_F, |dC|_F) <= p abs_tol + rel_tol rho |G|_F`,
/// where `dC`, `dB` are the changes over the last sweep,
/// `rho |2 dC + dB|_max <= abs_tol + 2 rel_tol lambda` (the stationarity
/// defect, so the optimality certificate holds to `rel_tol` relative to
/// the subgradient bound `2 lambda`), and the duality gap
/// from [`dual_bound`] is at most `gap_tol max(|objective|, 1)` (skipped when
/// no bound exists). Running out of iterations is not an error; the result
/// carries `converged = false`.
pub fn solve<T: Scalar>(
    stats: &ClassStats<T>,
    lambda: T,
    cfg: &SolveConfig<T>,
    init: Option<&AdmmState<T>>,
) -> Result<SolveResult<T>> {
    cfg.validate()?;
    check_well_posed(stats, lambda)?;
    let p = stats.p();
    let mut state = match init {
        Some(s) => {
            s.check_dims(p)?;
            s.clone().with_rho(cfg.rho)
        }
        None => AdmmState::pooled_start(stats, cfg.rho)?,
    };
    let rho = cfg.rho;
    let abs_floor = T::from_count(p) * cfg.abs_tol;

    let mut iterations = 0;
    let mut primal = T::infinity();
    let mut dual_res = T::infinity();
    let mut converged = false;
    let mut gap = T::infinity();
    while iterations < cfg.max_iter {
        iterations += 1;
        state.a = update_a(&state, stats)?;
        let b_next = update_b(&state, stats)?;
        let b_prev = std::mem::replace(&mut state.b, b_next);
        let c_next = update_c(&state, lambda)?;
        let c_prev = std::mem::replace(&mut state.c, c_next);
        state.dual = update_dual(&state);

        let a_minus_b = &state.a - &state.b;
        primal = (&state.c - &a_minus_b).frobenius();
        let dc = &state.c - &c_prev;
        let db = &state.b - &b_prev;
        dual_res = rho * (&dc + &db).frobenius().max(dc.frobenius());
        // With W = G_prev + C - A + B, the update equations give exactly
        // n1 (S1 - A^-1) - n2 (S2 - B^-1) = -2 rho W - rho (2 dC + dB),
        // and the C step forces |rho W|_max <= lambda.
        let stationarity = rho * dc.lin_comb(T::cst(2.0), &db, T::one()).max_abs();

        let primal_tol = abs_floor + cfg.rel_tol * state.c.frobenius().max(a_minus_b.frobenius());
        let dual_tol = abs_floor + cfg.rel_tol * rho * state.dual.frobenius();
        if !(primal.is_finite() && dual_res.is_finite()) {
            return Err(PdaError::EigenFailure { matrix: format!("ADMM iterate at lambda = {lambda}"), iterations });
        }
        let stationarity_tol = cfg.abs_tol + cfg.rel_tol * (lambda + lambda);
        if primal <= primal_tol && dual_res <= dual_tol && stationarity <= stationarity_tol {
            let obj = fast_objective(&state.a, &state.b, stats, lambda)?;
            match dual_bound(stats, lambda, &state.dual.scale(rho)) {
                Some(bound) => {
                    gap = obj - bound;
                    if gap <= cfg.gap_tol * obj.abs().max(T::one()) {
                        converged = true;
                        break;
                    }
                }
                None => {
                    converged = true;
                    break;
                }
            }
        }
    }

    let objective = objective(&state.a, &state.b, stats, lambda)?;
    if !converged || gap.is_infinite() {
        gap = dual_bound(stats, lambda, &state.dual.scale(rho)).map_or(T::infinity(), |b| objective - b);
    }
    Ok(SolveResult {
        lambda,
        a: state.a.clone(),
        b: state.b.clone(),
        iterations,
        primal_residual: primal,
        dual_residual: dual_res,
        converged,
        objective,
        duality_gap: gap,
        state,
    })
}

/// Thresholds used by [`kkt_report`] when deciding pass/fail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktTolerance<T> {
    /// Relative slack on the subgradient bound `2 lambda`.
    pub stationarity_rel: T,
    /// Absolute slack on `R`, relative to `n1 |S1|_max + n2 |S2|_max`. At
    /// `lambda = 0` this is all the room rounding gets.
    pub stationarity_floor: T,
    /// Entries of `A - B` at or below `zero_rel * max(|A|_max, |B|_max)` count as zero.
    /// At default solver tolerances entries that are fused at the optimum
    /// still differ by roughly the primal residual, so this sits well above it.
    pub zero_rel: T,
    /// Pooled residual must stay below `pooled_rel * |S_pool|_max`.
    pub pooled_rel: T,
}

impl<T: Scalar> Default for KktTolerance<T> {
    fn default() -> Self {
        Self {
            stationarity_rel: T::cst(1e-4),
            stationarity_floor: T::cst(1e-8),
            zero_rel: T::cst(1e-4),
            pooled_rel: T::cst(1e-5),
        }
    }
}

/// Optimality certificate for a candidate `(A, B)`.
///
/// With `R = n1 (S1 - A^{-1}) - n2 (S2 - B^{-1})`, a minimizer satisfies
/// `R = -2 lambda sign(A - B)` where `A != B` and `|R| <= 2 lambda` elsewhere
/// (the penalty `lambda |A - B|_1` has subgradient `2 lambda` in
/// `Delta = (A - B) / 2`), together with
/// `S_pool = (n1 A^{-1} + n2 B^{-1}) / (n1 + n2)`.
#[derive(Clone, Debug)]
pub struct KktReport<T> {
    pub lambda: T,
    /// `|R|_max`.
    pub stationarity_norm: T,
    /// `max(0, |R|_max - 2 lambda)`.
    pub stationarity_max_violation: T,
    /// Nonzero entries of `A - B` whose `R` misses `-2 lambda sign` by more
    /// than the relative slack.
    pub sign_condition_violations: usize,
    /// `|S_pool - (n1 A^{-1} + n2 B^{-1}) / (n1 + n2)|_max`.
    pub pooled_residual: T,
    /// `(A - B) / 2`.
    pub delta: SymMatrix<T>,
    /// `(A + B) / 2`.
    pub theta: SymMatrix<T>,
    pub nnz_delta: usize,
    pub passed: bool,
}

pub fn kkt_report<T: Scalar>(
    a: &SymMatrix<T>,
    b: &SymMatrix<T>,
    stats: &ClassStats<T>,
    lambda: T,
    tol: &KktTolerance<T>,
) -> Result<KktReport<T>> {
    check_lambda(lambda)?;
    let p = stats.p();
    for m in [a, b] {
        if m.dim() != p {
            return Err(PdaError::DimensionMismatch { expected: p, found: m.dim() });
        }
    }
    let not_pd = |e: PdaError| match e {
        PdaError::Singular { min_eigenvalue, .. } => PdaError::NotPositiveDefinite { min_eigenvalue },
        other => other,
    };
    let sigma1 = spd_inverse(a).map_err(not_pd)?;
    let sigma2 = spd_inverse(b).map_err(not_pd)?;
    let (w1, w2) = stats.weights();
    let r = (&stats.s1 - &sigma1).lin_comb(w1, &(&stats.s2 - &sigma2), -w2);

    let bound = T::cst(2.0) * lambda;
    let scale = w1 * stats.s1.max_abs() + w2 * stats.s2.max_abs();
    let slack = bound * tol.stationarity_rel + scale * tol.stationarity_floor;
    let stationarity_norm = r.max_abs();
    let stationarity_max_violation = (stationarity_norm - bound).max(T::zero());

    let delta = (a - b).scale(T::cst(0.5));
    let theta = (a + b).scale(T::cst(0.5));
    let zero_tol = tol.zero_rel * a.max_abs().max(b.max_abs());
    let mut nnz_delta = 0;
    let mut sign_condition_violations = 0;
    for (&dv, &rv) in delta.as_slice().iter().zip(r.as_slice()) {
        if (dv + dv).abs() > zero_tol {
            nnz_delta += 1;
            let target = -bound * dv.signum();
            if !((rv - target).abs() <= slack) {
                sign_condition_violations += 1;
            }
        }
    }

    let pooled_est = sigma1.lin_comb(w1 / (w1 + w2), &sigma2, w2 / (w1 + w2));
    let pooled_residual = (&stats.s_pool - &pooled_est).max_abs();

    let passed = stationarity_max_violation <= slack
        && sign_condition_violations == 0
        && pooled_residual <= tol.pooled_rel * stats.s_pool.max_abs();
    Ok(KktReport {
        lambda,
        stationarity_norm,
        stationarity_max_violation,
        sign_condition_violations,
        pooled_residual,
        delta,
        theta,
        nnz_delta,
        passed,
    })
}
