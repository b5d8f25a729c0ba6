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

use common::{cholesky_logdet, gauss_jordan_inverse, gaussian_dataset, max_abs_diff};
use l1pda::discriminant::logistic;
use l1pda::eval::{scored, stratified_folds};
use l1pda::{
    accuracy, compute_stats, cross_validate, fit_l1pda, fit_lda, fit_qda, fit_rda, lambda_max, make_grid, roc, Class,
    Config, CvGrid, LabeledDataset, Model, PdaError,
};

/// Log-odds of class 2 from Gaussian log densities, with the
/// log-determinants taken from a Cholesky factor.
fn reference_log_odds(m: &Model, x: &[f64]) -> f64 {
    let mut dens = [0.0; 2];
    for (k, dens_k) in dens.iter_mut().enumerate() {
        let d: Vec<f64> = x.iter().zip(&m.means[k]).map(|(a, b)| a - b).collect();
        let p = &m.precisions[k];
        let q: f64 =
            (0..d.len()).flat_map(|i| (0..d.len()).map(move |j| (i, j))).map(|(i, j)| d[i] * p.get(i, j) * d[j]).sum();
        *dens_k = 0.5 * cholesky_logdet(p) - 0.5 * q;
    }
    (m.priors.1 / m.priors.0).ln() + dens[1] - dens[0]
}

#[test]
fn scores_match_gaussian_log_densities() {
    let data = gaussian_dataset(4, 25, 30, 0.8, 1);
    let st = compute_stats(&data).unwrap();
    let cfg = Config::default();
    let models = [
        fit_lda(&st).unwrap(),
        fit_qda(&st).unwrap(),
        fit_rda(&st, 0.4).unwrap(),
        fit_l1pda(&st, 0.2 * lambda_max(&st), &cfg, None).unwrap(),
    ];
    for m in &models {
        for x in data.rows() {
            let d = m.discriminant_score(x).unwrap();
            assert!((d - reference_log_odds(m, x)).abs() < 1e-10 * d.abs().max(1.0));
            let p1 = m.predict_proba(x).unwrap();
            assert!((p1 - 1.0 / (1.0 + d.exp())).abs() < 1e-12);
            let expected = if d > 0.0 { Class::Second } else { Class::First };
            assert_eq!(m.predict(x).unwrap(), expected);
        }
    }
}

#[test]
fn lda_uses_pooled_inverse_and_is_affine() {
    let data = gaussian_dataset(3, 20, 22, 1.0, 2);
    let st = compute_stats(&data).unwrap();
    let m = fit_lda(&st).unwrap();
    let inv = gauss_jordan_inverse(&st.s_pool);
    for k in 0..2 {
        assert!(max_abs_diff(m.precisions[k].as_slice(), &inv) < 1e-10);
    }
    let f = |x: &[f64]| m.discriminant_score(x).unwrap();
    let (x, y) = ([0.3, -1.0, 2.0], [1.5, 0.2, -0.7]);
    let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
    assert!((f(&mid) - 0.5 * (f(&x) + f(&y))).abs() < 1e-10);
    assert!(m.forward_coefficients().interaction_matrix.max_abs() < 1e-10);
}

#[test]
fn rda_endpoints_are_lda_and_qda() {
    let st = compute_stats(&gaussian_dataset(3, 20, 22, 1.0, 3)).unwrap();
    let (lda, qda) = (fit_lda(&st).unwrap(), fit_qda(&st).unwrap());
    let (r0, r1) = (fit_rda(&st, 0.0).unwrap(), fit_rda(&st, 1.0).unwrap());
    for k in 0..2 {
        assert!(max_abs_diff(r0.precisions[k].as_slice(), lda.precisions[k].as_slice()) < 1e-12);
        assert!(max_abs_diff(r1.precisions[k].as_slice(), qda.precisions[k].as_slice()) < 1e-12);
    }
    assert!(fit_rda(&st, 1.5).is_err());
}

#[test]
fn forward_model_reproduces_class_one_logit() {
    let data = gaussian_dataset(5, 30, 26, 0.6, 4);
    let st = compute_stats(&data).unwrap();
    let m = fit_l1pda(&st, 0.1 * lambda_max(&st), &Config::default(), None).unwrap();
    let fwd = m.forward_coefficients();
    for x in data.rows() {
        let p1 = logistic(fwd.logit(x).unwrap());
        assert!((p1 - m.predict_proba(x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn accuracy_counts_correct_rows() {
    let data = LabeledDataset::from_rows(
        &[vec![-1.0], vec![0.4], vec![2.0], vec![3.0]],
        vec![Class::First, Class::First, Class::Second, Class::First],
    )
    .unwrap();
    let st = compute_stats(&data).unwrap();
    let m = fit_lda(&st).unwrap();
    let predicted: Vec<Class> = data.rows().map(|x| m.predict(x).unwrap()).collect();
    let hits = predicted.iter().zip(data.labels()).filter(|(a, b)| a == b).count();
    assert_eq!(accuracy(&m, &data).unwrap(), hits as f64 / 4.0);
}

#[test]
fn roc_hand_examples() {
    let s = |labels: [u8; 4]| -> Vec<(f64, Class)> {
        [1.0, 2.0, 3.0, 4.0].iter().zip(labels).map(|(&v, l)| (v, Class::from_number(l).unwrap())).collect()
    };
    assert_eq!(roc(&s([1, 1, 2, 2])).unwrap().auc, 1.0);
    assert_eq!(roc(&s([1, 2, 1, 2])).unwrap().auc, 0.75);
    assert_eq!(roc(&s([2, 2, 1, 1])).unwrap().auc, 0.0);
    let flat: Vec<(f64, Class)> = [Class::First, Class::Second, Class::Second].iter().map(|&c| (0.0, c)).collect();
    let r = roc(&flat).unwrap();
    assert_eq!(r.auc, 0.5);
    assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
    assert_eq!(roc(&[(1.0, Class::First)]).unwrap_err(), PdaError::UndefinedRoc);
}

#[test]
fn auc_matches_pairwise_count() {
    let data = gaussian_dataset(3, 40, 35, 0.7, 6);
    let st = compute_stats(&data).unwrap();
    let sc = scored(&fit_qda(&st).unwrap(), &data).unwrap();
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (a, ca) in &sc {
        for (b, cb) in &sc {
            if *ca == Class::Second && *cb == Class::First {
                pairs += 1.0;
                wins += if a > b {
                    1.0
                } else if a == b {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    assert!((roc(&sc).unwrap().auc - wins / pairs).abs() < 1e-12);
}

#[test]
fn cross_validation_is_reproducible() {
    let data = gaussian_dataset(4, 24, 20, 0.8, 7);
    let st = compute_stats(&data).unwrap();
    let grid = CvGrid::Lambda(make_grid(lambda_max(&st), 8, 0.05).unwrap().values().to_vec());
    let cfg = Config::default();
    let a = cross_validate(&data, &grid, 4, 9, &cfg).unwrap();
    assert_eq!(a, cross_validate(&data, &grid, 4, 9, &cfg).unwrap());
    assert_eq!(a.points.len(), 8);
    let best = a.points[a.best_index].mean_accuracy;
    assert!(a.points.iter().all(|p| p.mean_accuracy <= best));
    // ties go to the larger lambda, which comes first
    assert!(a.points[..a.best_index].iter().all(|p| p.mean_accuracy < best));
}

#[test]
fn cross_validation_with_repeated_grid_values() {
    let data = gaussian_dataset(3, 18, 18, 0.8, 8);
    let st = compute_stats(&data).unwrap();
    let l = 0.3 * lambda_max(&st);
    let r = cross_validate(&data, &CvGrid::Lambda(vec![l, l, l]), 3, 1, &Config::default()).unwrap();
    assert_eq!(r.points[0].mean_accuracy, r.points[1].mean_accuracy);
    assert_eq!(r.points[1].mean_accuracy, r.points[2].mean_accuracy);
    assert_eq!(r.best_index, 0);
}

#[test]
fn leave_one_out_folds() {
    let data = gaussian_dataset(2, 6, 6, 1.0, 10);
    let folds = stratified_folds(data.labels(), 12, 3).unwrap();
    let mut sorted = folds.clone();
    sorted.sort();
    assert_eq!(sorted, (0..12).collect::<Vec<_>>());
    let r = cross_validate(&data, &CvGrid::Lda, 12, 3, &Config::default()).unwrap();
    assert_eq!(r, cross_validate(&data, &CvGrid::Lda, 12, 3, &Config::default()).unwrap());
}

#[test]
fn stratification_failure() {
    let data = LabeledDataset::from_rows(
        &[vec![0.0], vec![1.0], vec![2.0], vec![5.0]],
        vec![Class::First, Class::First, Class::First, Class::Second],
    )
    .unwrap();
    assert!(matches!(stratified_folds(data.labels(), 2, 0), Err(PdaError::Stratification(_))));
}
