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

//! Gaussian two-class classifiers sharing one scoring interface: the l1-fused
//! estimate, LDA, QDA and RDA.
//!
//! The discriminant score is the log posterior odds of class 2,
//!
//! ```text
//! D(x) = log(pi2 / pi1) - (x - mu2)' P2 (x - mu2) / 2 + (x - mu1)' P1 (x - mu1) / 2
//!        + (logdet P2 - logdet P1) / 2
//! ```
//!
//! so `D(x) > 0` predicts class 2 and `P(y = 1 | x) = 1 / (1 + exp(D(x)))`.

use crate::admm::{solve, AdmmState, SolveConfig, SolveResult};
use crate::error::{PdaError, Result};
use crate::matkernel::{log_det, spd_inverse, SymMatrix};
use crate::path::PathFit;
use crate::scalar::Scalar;
use crate::stats::{Class, ClassStats};

/// Which estimator produced a model, with its tuning parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method<T> {
    Lda,
    Qda,
    /// Covariances `alpha S_k + (1 - alpha) S_pool`.
    Rda {
        alpha: T,
    },
    L1pda {
        lambda: T,
    },
}

impl<T: Scalar> Method<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Lda => "lda",
            Method::Qda => "qda",
            Method::Rda { .. } => "rda",
            Method::L1pda { .. } => "l1pda",
        }
    }

    /// Fusion penalty the model corresponds to: infinite for LDA, zero for QDA.
    pub fn lambda(&self) -> Option<T> {
        match *self {
            Method::Lda => Some(T::infinity()),
            Method::Qda => Some(T::zero()),
            Method::L1pda { lambda } => Some(lambda),
            Method::Rda { .. } => None,
        }
    }
}

/// Solver diagnostics attached to fused fits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitDiagnostics<T> {
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
    pub converged: bool,
    pub objective: T,
    pub duality_gap: T,
}

/// A fitted classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct PdaModel<T> {
    pub method: Method<T>,
    pub priors: (T, T),
    pub means: [Vec<T>; 2],
    pub precisions: [SymMatrix<T>; 2],
    pub logdets: [T; 2],
    /// Original label strings for class 1 and class 2.
    pub label_map: Option<[String; 2]>,
    pub diagnostics: Option<FitDiagnostics<T>>,
}

impl<T: Scalar> PdaModel<T> {
    /// Assembles a model, computing log-determinants; fails if a precision is
    /// not positive definite.
    pub fn new(method: Method<T>, priors: (T, T), means: [Vec<T>; 2], precisions: [SymMatrix<T>; 2]) -> Result<Self> {
        let p = precisions[0].dim();
        for len in [precisions[1].dim(), means[0].len(), means[1].len()] {
            if len != p {
                return Err(PdaError::DimensionMismatch { expected: p, found: len });
            }
        }
        let logdets = [log_det(&precisions[0])?, log_det(&precisions[1])?];
        let total = priors.0 + priors.1;
        Ok(Self {
            method,
            priors: (priors.0 / total, priors.1 / total),
            means,
            precisions,
            logdets,
            label_map: None,
            diagnostics: None,
        })
    }

    fn from_stats(method: Method<T>, stats: &ClassStats<T>, p1: SymMatrix<T>, p2: SymMatrix<T>) -> Result<Self> {
        Self::new(method, stats.priors, [stats.mu1.clone(), stats.mu2.clone()], [p1, p2])
    }

    pub fn with_label_map(mut self, labels: Option<[String; 2]>) -> Self {
        self.label_map = labels;
        self
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(PdaError::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// Log posterior odds of class 2 against class 1.
    pub fn discriminant_score(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        let half = T::cst(0.5);
        let quad = |k: usize| {
            let z: Vec<T> = x.iter().zip(&self.means[k]).map(|(&a, &m)| a - m).collect();
            self.precisions[k].quad_form(&z)
        };
        Ok((self.priors.1 / self.priors.0).ln() - half * quad(1)
            + half * quad(0)
            + half * (self.logdets[1] - self.logdets[0]))
    }

    /// Class 2 iff the score is strictly positive.
    pub fn predict(&self, x: &[T]) -> Result<Class> {
        Ok(if self.discriminant_score(x)? > T::zero() { Class::Second } else { Class::First })
    }

    /// `P(y = 1 | x)`.
    pub fn predict_proba(&self, x: &[T]) -> Result<T> {
        Ok(logistic(-self.discriminant_score(x)?))
    }

    /// Coefficients of the equivalent quadratic logistic model for class 1.
    pub fn forward_coefficients(&self) -> ForwardModel<T> {
        let half = T::cst(0.5);
        let [p1, p2] = &self.precisions;
        let [mu1, mu2] = &self.means;
        let beta0 = (self.priors.0 / self.priors.1).ln() + half * p2.quad_form(mu2) - half * p1.quad_form(mu1)
            + half * (self.logdets[0] - self.logdets[1]);
        let beta = p1.mat_vec(mu1).into_iter().zip(p2.mat_vec(mu2)).map(|(a, b)| a - b).collect();
        let interaction_matrix = p2.lin_comb(T::cst(2.0), p1, T::cst(-2.0));
        ForwardModel { beta0, beta, interaction_matrix }
    }
}

/// `1 / (1 + exp(-t))` without overflow.
pub fn logistic<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

/// Logistic model with interactions,
/// `logit P(y = 1 | x) = beta0 + beta' x + x' G x / 4`
/// where `G = interaction_matrix = 2 (P2 - P1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardModel<T> {
    pub beta0: T,
    pub beta: Vec<T>,
    pub interaction_matrix: SymMatrix<T>,
}

impl<T: Scalar> ForwardModel<T> {
    pub fn logit(&self, x: &[T]) -> Result<T> {
        if x.len() != self.beta.len() {
            return Err(PdaError::DimensionMismatch { expected: self.beta.len(), found: x.len() });
        }
        let linear: T = self.beta.iter().zip(x).map(|(&b, &v)| b * v).sum();
        Ok(self.beta0 + linear + self.interaction_matrix.quad_form(x) * T::cst(0.25))
    }
}

fn ill_posed(what: &str) -> impl Fn(PdaError) -> PdaError + '_ {
    move |e| match e {
        PdaError::Singular { min_eigenvalue, .. } => {
            PdaError::IllPosed(format!("{what} is singular (smallest eigenvalue {min_eigenvalue:e})"))
        }
        other => other,
    }
}

/// Shared covariance `S_pool` for both classes.
pub fn fit_lda<T: Scalar>(stats: &ClassStats<T>) -> Result<PdaModel<T>> {
    let p = spd_inverse(&stats.s_pool).map_err(ill_posed("pooled covariance"))?;
    PdaModel::from_stats(Method::Lda, stats, p.clone(), p)
}

/// Separate MLE covariance per class.
pub fn fit_qda<T: Scalar>(stats: &ClassStats<T>) -> Result<PdaModel<T>> {
    let p1 = spd_inverse(&stats.s1).map_err(ill_posed("class 1 covariance"))?;
    let p2 = spd_inverse(&stats.s2).map_err(ill_posed("class 2 covariance"))?;
    PdaModel::from_stats(Method::Qda, stats, p1, p2)
}

/// Covariances `alpha S_k + (1 - alpha) S_pool`; `alpha = 0` is LDA and
/// `alpha = 1` is QDA.
pub fn fit_rda<T: Scalar>(stats: &ClassStats<T>, alpha: T) -> Result<PdaModel<T>> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(PdaError::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mix = |s: &SymMatrix<T>| s.lin_comb(alpha, &stats.s_pool, T::one() - alpha);
    let p1 = spd_inverse(&mix(&stats.s1)).map_err(ill_posed("class 1 regularized covariance"))?;
    let p2 = spd_inverse(&mix(&stats.s2)).map_err(ill_posed("class 2 regularized covariance"))?;
    PdaModel::from_stats(Method::Rda { alpha }, stats, p1, p2)
}

/// `count` equally spaced mixing weights on `[0, 1]`.
pub fn rda_alpha_grid<T: Scalar>(count: usize) -> Vec<T> {
    match count {
        0 => vec![],
        1 => vec![T::zero()],
        _ => (0..count).map(|i| T::from_count(i) / T::from_count(count - 1)).collect(),
    }
}

/// The l1-fused estimate at a single lambda.
pub fn fit_l1pda<T: Scalar>(
    stats: &ClassStats<T>,
    lambda: T,
    cfg: &SolveConfig<T>,
    init: Option<&AdmmState<T>>,
) -> Result<PdaModel<T>> {
    model_from_result(stats, &solve(stats, lambda, cfg, init)?)
}

/// Wraps a solver result with the means and priors of `stats`.
pub fn model_from_result<T: Scalar>(stats: &ClassStats<T>, res: &SolveResult<T>) -> Result<PdaModel<T>> {
    let mut m = PdaModel::from_stats(Method::L1pda { lambda: res.lambda }, stats, res.a.clone(), res.b.clone())?;
    m.diagnostics = Some(FitDiagnostics {
        iterations: res.iterations,
        primal_residual: res.primal_residual,
        dual_residual: res.dual_residual,
        converged: res.converged,
        objective: res.objective,
        duality_gap: res.duality_gap,
    });
    Ok(m)
}

/// One model per path point.
pub fn models_from_path<T: Scalar>(fit: &PathFit<T>) -> Result<Vec<PdaModel<T>>> {
    fit.results.iter().map(|r| model_from_result(&fit.stats, r)).collect()
}
