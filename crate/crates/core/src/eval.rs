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

//! Accuracy, ROC/AUC and stratified cross-validation over a tuning grid.

use crate::admm::SolveConfig;
use crate::discriminant::{fit_lda, fit_qda, fit_rda, model_from_result, PdaModel};
use crate::error::{PdaError, Result};
use crate::path::solve_sequence;
use crate::scalar::Scalar;
use crate::stats::{compute_stats, Class, LabeledDataset};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Fraction of rows classified correctly.
pub fn accuracy<T: Scalar>(model: &PdaModel<T>, test: &LabeledDataset<T>) -> Result<f64> {
    let mut correct = 0usize;
    for (row, &label) in test.rows().zip(test.labels()) {
        if model.predict(row)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.n() as f64)
}

/// Discriminant scores paired with true labels.
pub fn scored<T: Scalar>(model: &PdaModel<T>, data: &LabeledDataset<T>) -> Result<Vec<(T, Class)>> {
    data.rows().zip(data.labels()).map(|(row, &label)| Ok((model.discriminant_score(row)?, label))).collect()
}

/// Empirical ROC curve with class 2 as the positive class.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` from the highest threshold
    /// down, starting at `(0, 0)` and ending at `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps the threshold over the distinct scores (predict class 2 when the
/// score exceeds it). Tied scores move in a single step, so ties contribute
/// half credit to the area.
pub fn roc<T: Scalar>(scores: &[(T, Class)]) -> Result<RocCurve> {
    let positives = scores.iter().filter(|s| s.1 == Class::Second).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(PdaError::UndefinedRoc);
    }
    if scores.iter().any(|s| s.0.is_nan()) {
        return Err(PdaError::InvalidArgument("NaN score in ROC input".into()));
    }
    let mut sorted: Vec<(T, Class)> = scores.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores are not NaN"));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let s = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == s {
            match sorted[i].1 {
                Class::Second => tp += 1,
                Class::First => fp += 1,
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    let auc = trapezoid(&points);
    Ok(RocCurve { points, auc })
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5).sum()
}

/// Tuning grid for cross-validation.
#[derive(Clone, Debug, PartialEq)]
pub enum CvGrid<T> {
    /// Fused penalties, fitted as one warm-started path per fold.
    Lambda(Vec<T>),
    /// RDA mixing weights.
    Alpha(Vec<T>),
    Lda,
    Qda,
}

impl<T: Scalar> CvGrid<T> {
    fn params(&self) -> Vec<Option<T>> {
        match self {
            CvGrid::Lambda(v) | CvGrid::Alpha(v) => v.iter().map(|&x| Some(x)).collect(),
            CvGrid::Lda | CvGrid::Qda => vec![None],
        }
    }

    pub fn method_tag(&self) -> &'static str {
        match self {
            CvGrid::Lambda(_) => "l1pda",
            CvGrid::Alpha(_) => "rda",
            CvGrid::Lda => "lda",
            CvGrid::Qda => "qda",
        }
    }

    /// Whether `a` is the more regularized (more pooled) of two parameters.
    fn more_pooled(&self, a: T, b: T) -> bool {
        match self {
            CvGrid::Lambda(_) => a > b,
            CvGrid::Alpha(_) => a < b,
            CvGrid::Lda | CvGrid::Qda => false,
        }
    }
}

/// Rule used to pick `best_index`.
pub const SELECTION_RULE: &str = "max-mean-accuracy/ties-to-most-pooled";

/// Cross-validated accuracy at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CvPoint<T> {
    pub param: Option<T>,
    pub mean_accuracy: f64,
    pub std_error: f64,
    /// Folds whose fused solve hit the iteration cap at this point.
    pub unconverged_folds: usize,
    /// Folds where the estimate did not exist (e.g. singular covariance).
    pub failed_folds: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvReport<T> {
    pub method: &'static str,
    pub folds: usize,
    pub seed: u64,
    pub points: Vec<CvPoint<T>>,
    pub best_index: usize,
    pub selection_rule: &'static str,
}

/// Fold id per row: each class is shuffled with a seeded generator and dealt
/// round-robin, so class proportions match across folds.
pub fn stratified_folds(labels: &[Class], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(PdaError::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if folds > labels.len() {
        return Err(PdaError::InvalidArgument(format!("{folds} folds requested for {} rows", labels.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut offset = 0;
    for class in [Class::First, Class::Second] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(PdaError::Stratification(format!(
                "class {} has {} rows; every training split needs both classes",
                class.number(),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = (offset + pos) % folds;
        }
        offset += idx.len();
    }
    Ok(assignment)
}

/// Stratified K-fold estimate of accuracy at each grid point.
pub fn cross_validate<T: Scalar>(
    data: &LabeledDataset<T>,
    grid: &CvGrid<T>,
    folds: usize,
    seed: u64,
    cfg: &SolveConfig<T>,
) -> Result<CvReport<T>> {
    let params = grid.params();
    if params.is_empty() {
        return Err(PdaError::InvalidArgument("empty tuning grid".into()));
    }
    let assignment = stratified_folds(data.labels(), folds, seed)?;
    let per_fold: Vec<Vec<FoldOutcome>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..data.n()).filter(|&i| assignment[i] != f).collect();
            let test: Vec<usize> = (0..data.n()).filter(|&i| assignment[i] == f).collect();
            let train =
                data.subset(&train).map_err(|e| PdaError::Stratification(format!("fold {f} training split: {e}")))?;
            let test = subset_any(data, &test);
            evaluate_fold(&train, &test, grid, cfg)
        })
        .collect::<Result<_>>()?;

    let points: Vec<CvPoint<T>> = params
        .iter()
        .enumerate()
        .map(|(j, &param)| {
            let accs: Vec<f64> = per_fold.iter().filter_map(|f| f[j].accuracy).collect();
            let (mean_accuracy, std_error) = mean_and_se(&accs);
            CvPoint {
                param,
                mean_accuracy,
                std_error,
                unconverged_folds: per_fold.iter().filter(|f| !f[j].converged).count(),
                failed_folds: folds - accs.len(),
            }
        })
        .collect();

    let mut best_index = 0;
    for (j, pt) in points.iter().enumerate().skip(1) {
        let best = &points[best_index];
        let better = pt.mean_accuracy > best.mean_accuracy || best.mean_accuracy.is_nan();
        let tie_break = pt.mean_accuracy == best.mean_accuracy
            && matches!((pt.param, best.param), (Some(a), Some(b)) if grid.more_pooled(a, b));
        if better || tie_break {
            best_index = j;
        }
    }
    Ok(CvReport { method: grid.method_tag(), folds, seed, points, best_index, selection_rule: SELECTION_RULE })
}

struct FoldOutcome {
    accuracy: Option<f64>,
    converged: bool,
}

// Held-out rows may contain a single class; accuracy is still defined.
fn subset_any<T: Scalar>(data: &LabeledDataset<T>, idx: &[usize]) -> Vec<(Vec<T>, Class)> {
    idx.iter().map(|&i| (data.row(i).to_vec(), data.labels()[i])).collect()
}

fn rows_accuracy<T: Scalar>(model: &PdaModel<T>, rows: &[(Vec<T>, Class)]) -> Result<f64> {
    let mut correct = 0usize;
    for (x, label) in rows {
        if model.predict(x)? == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / rows.len() as f64)
}

fn evaluate_fold<T: Scalar>(
    train: &LabeledDataset<T>,
    test: &[(Vec<T>, Class)],
    grid: &CvGrid<T>,
    cfg: &SolveConfig<T>,
) -> Result<Vec<FoldOutcome>> {
    let stats = compute_stats(train)?;
    let single = |fit: Result<PdaModel<T>>| -> Result<FoldOutcome> {
        match fit {
            Ok(m) => Ok(FoldOutcome { accuracy: Some(rows_accuracy(&m, test)?), converged: true }),
            Err(e) if e.is_ill_posed() => Ok(FoldOutcome { accuracy: None, converged: true }),
            Err(e) => Err(e),
        }
    };
    match grid {
        CvGrid::Lambda(lambdas) => solve_sequence(&stats, lambdas, cfg)?
            .iter()
            .map(|r| {
                let m = model_from_result(&stats, r)?;
                Ok(FoldOutcome { accuracy: Some(rows_accuracy(&m, test)?), converged: r.converged })
            })
            .collect(),
        CvGrid::Alpha(alphas) => alphas.iter().map(|&a| single(fit_rda(&stats, a))).collect(),
        CvGrid::Lda => Ok(vec![single(fit_lda(&stats))?]),
        CvGrid::Qda => Ok(vec![single(fit_qda(&stats))?]),
    }
}

/// Mean and standard error of the mean (sample standard deviation over `sqrt(k)`).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}
