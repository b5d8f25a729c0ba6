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

//! Two-class Gaussian simulation and the train/tune/test comparison of the
//! fused estimate against LDA, QDA and RDA.
//!
//! Class 1 is `N(0, I_p)`. Class 2 has mean `(1, ..., 1, 0, ..., 0)` with ten
//! ones and covariance `blockdiag(C, I_{p-5})`, where `C` is 5 x 5 with unit
//! diagonal and constant off-diagonal `c`. The precision difference is
//! therefore confined to the leading 5 x 5 block.

use crate::admm::SolveConfig;
use crate::discriminant::{fit_lda, fit_qda, fit_rda, model_from_result, rda_alpha_grid, PdaModel};
use crate::error::{PdaError, Result};
use crate::eval::{accuracy, mean_and_se, roc, scored};
use crate::matkernel::{cholesky, SymMatrix};
use crate::path::{lambda_max, make_grid, solve_path, DEFAULT_COUNT, DEFAULT_EPSILON};
use crate::stats::{compute_stats, Class, LabeledDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Size of the correlated block of class 2.
pub const BLOCK: usize = 5;
/// Number of coordinates carrying the mean shift.
pub const MEAN_SHIFT_LEN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimDesign {
    pub p: usize,
    pub n_per_class: usize,
    /// Off-diagonal value of the correlated block.
    pub c: f64,
    pub seed: u64,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self { p: 30, n_per_class: 33, c: 0.9, seed: 0 }
    }
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if self.p < MEAN_SHIFT_LEN {
            return Err(PdaError::InvalidArgument(format!("p must be at least {MEAN_SHIFT_LEN}, got {}", self.p)));
        }
        // eigenvalues of the block are 1 + 4c and 1 - c
        if !(self.c > -0.25 && self.c < 1.0) {
            return Err(PdaError::InvalidArgument(format!(
                "c must lie in (-0.25, 1) for a positive definite block, got {}",
                self.c
            )));
        }
        if self.n_per_class < 2 {
            return Err(PdaError::InvalidArgument("need at least 2 rows per class".into()));
        }
        Ok(())
    }

    /// The correlated 5 x 5 block.
    pub fn block(&self) -> SymMatrix<f64> {
        SymMatrix::from_upper_fn(BLOCK, |i, j| if i == j { 1.0 } else { self.c })
    }

    /// Full class 2 covariance.
    pub fn sigma2(&self) -> SymMatrix<f64> {
        SymMatrix::from_upper_fn(self.p, |i, j| {
            if i == j {
                1.0
            } else if i < BLOCK && j < BLOCK {
                self.c
            } else {
                0.0
            }
        })
    }

    pub fn mu2(&self) -> Vec<f64> {
        (0..self.p).map(|j| if j < MEAN_SHIFT_LEN { 1.0 } else { 0.0 }).collect()
    }
}

/// Draws one dataset from `design.seed`.
pub fn generate(design: &SimDesign) -> Result<LabeledDataset<f64>> {
    design.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(design.seed);
    let factor = cholesky(&design.block())?;
    Ok(draw(design, &factor, &mut rng))
}

/// Class 1 rows first, then class 2 rows. Class 2 applies the block's lower
/// Cholesky factor to standard normals and adds the mean shift.
fn draw<R: Rng>(design: &SimDesign, factor: &[f64], rng: &mut R) -> LabeledDataset<f64> {
    let (p, n) = (design.p, design.n_per_class);
    let mu2 = design.mu2();
    let mut x = Vec::with_capacity(2 * n * p);
    for _ in 0..n {
        x.extend((0..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
    }
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for j in 0..p {
            let v = if j < BLOCK { (0..=j).map(|k| factor[j * BLOCK + k] * z[k]).sum::<f64>() } else { z[j] };
            x.push(v + mu2[j]);
        }
    }
    let mut y = vec![Class::First; n];
    y.extend(std::iter::repeat_n(Class::Second, n));
    LabeledDataset::new(p, x, y).expect("simulated data is finite with both classes")
}

/// Settings of the replicated comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub reps: usize,
    pub nlambda: usize,
    pub epsilon: f64,
    pub nalpha: usize,
    pub solve: SolveConfig<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { reps: 100, nlambda: DEFAULT_COUNT, epsilon: DEFAULT_EPSILON, nalpha: 30, solve: SolveConfig::default() }
    }
}

/// Methods compared, in report order.
pub const METHODS: [&str; 4] = ["l1pda", "lda", "qda", "rda"];

/// Test-set performance of one method in one replication.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodOutcome {
    pub accuracy: f64,
    pub auc: f64,
    /// Selected grid index (0 for untuned methods).
    pub selected: usize,
}

/// Results of one replication, indexed like [`METHODS`]. `None` marks a
/// method whose estimate did not exist for that draw.
#[derive(Clone, Debug, PartialEq)]
pub struct RepOutcome {
    pub rep: usize,
    pub methods: [Option<MethodOutcome>; 4],
    pub unconverged_path_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: &'static str,
    pub reps: usize,
    pub mean_accuracy: f64,
    pub se_accuracy: f64,
    pub mean_auc: f64,
    pub se_auc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub design: SimDesign,
    pub config: ExperimentConfig,
    pub reps: Vec<RepOutcome>,
    pub summary: Vec<MethodSummary>,
}

/// How replication seeds derive from the master seed.
pub const SEED_RULE: &str = "chacha8(seed, stream = rep + 1); draws train, tune, test in order";

/// Generator for replication `rep`.
pub fn replication_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 + 1);
    rng
}

/// Replicates the three-dataset protocol: fit every method on a training
/// draw, pick tuning parameters by accuracy on an independent tuning draw,
/// and score accuracy and AUC on a third draw.
pub fn run_experiment(design: &SimDesign, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    design.validate()?;
    if cfg.reps == 0 {
        return Err(PdaError::InvalidArgument("reps must be at least 1".into()));
    }
    let factor = cholesky(&design.block())?;
    let reps: Vec<RepOutcome> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(design.seed, rep);
            let train = draw(design, &factor, &mut rng);
            let tune = draw(design, &factor, &mut rng);
            let test = draw(design, &factor, &mut rng);
            run_replication(rep, &train, &tune, &test, cfg)
        })
        .collect::<Result<_>>()?;

    let summary = METHODS
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let outs: Vec<MethodOutcome> = reps.iter().filter_map(|r| r.methods[k]).collect();
            let acc: Vec<f64> = outs.iter().map(|o| o.accuracy).collect();
            let auc: Vec<f64> = outs.iter().map(|o| o.auc).collect();
            let (mean_accuracy, se_accuracy) = mean_and_se(&acc);
            let (mean_auc, se_auc) = mean_and_se(&auc);
            MethodSummary { method, reps: outs.len(), mean_accuracy, se_accuracy, mean_auc, se_auc }
        })
        .collect();
    Ok(ExperimentReport { design: *design, config: *cfg, reps, summary })
}

fn outcome(model: &PdaModel<f64>, test: &LabeledDataset<f64>, selected: usize) -> Result<MethodOutcome> {
    Ok(MethodOutcome { accuracy: accuracy(model, test)?, auc: roc(&scored(model, test)?)?.auc, selected })
}

/// Index of the best tuning accuracy; ties go to the earliest (most pooled)
/// candidate.
fn select(models: &[PdaModel<f64>], tune: &LabeledDataset<f64>) -> Result<usize> {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, m) in models.iter().enumerate() {
        let acc = accuracy(m, tune)?;
        if acc > best.1 {
            best = (i, acc);
        }
    }
    Ok(best.0)
}

fn run_replication(
    rep: usize,
    train: &LabeledDataset<f64>,
    tune: &LabeledDataset<f64>,
    test: &LabeledDataset<f64>,
    cfg: &ExperimentConfig,
) -> Result<RepOutcome> {
    let stats = compute_stats(train)?;
    let skip_ill_posed = |r: Result<PdaModel<f64>>| match r {
        Ok(m) => Ok(Some(m)),
        Err(e) if e.is_ill_posed() => Ok(None),
        Err(e) => Err(e),
    };

    let grid = make_grid(lambda_max(&stats), cfg.nlambda, cfg.epsilon)?;
    let path = solve_path(&stats, &grid, &cfg.solve)?;
    let fused: Vec<PdaModel<f64>> = path.results.iter().map(|r| model_from_result(&stats, r)).collect::<Result<_>>()?;
    let k = select(&fused, tune)?;
    let l1pda = Some(outcome(&fused[k], test, k)?);

    let lda = match skip_ill_posed(fit_lda(&stats))? {
        Some(m) => Some(outcome(&m, test, 0)?),
        None => None,
    };
    let qda = match skip_ill_posed(fit_qda(&stats))? {
        Some(m) => Some(outcome(&m, test, 0)?),
        None => None,
    };
    // alpha ascends from LDA, so the first best is the most pooled
    let mut rda_models = Vec::new();
    let mut rda_index = Vec::new();
    for (i, a) in rda_alpha_grid::<f64>(cfg.nalpha).into_iter().enumerate() {
        if let Some(m) = skip_ill_posed(fit_rda(&stats, a))? {
            rda_models.push(m);
            rda_index.push(i);
        }
    }
    let rda = if rda_models.is_empty() {
        None
    } else {
        let k = select(&rda_models, tune)?;
        Some(outcome(&rda_models[k], test, rda_index[k])?)
    };

    Ok(RepOutcome { rep, methods: [l1pda, lda, qda, rda], unconverged_path_points: path.unconverged() })
}
