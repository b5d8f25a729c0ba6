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

//! Two-class discriminant analysis with an `l1` penalty on the difference of
//! the class precision matrices.
//!
//! The estimator interpolates between linear discriminant analysis (large
//! penalty, one shared precision) and quadratic discriminant analysis (zero
//! penalty, separate precisions). It is fitted with an alternating direction
//! method of multipliers over a decreasing, warm-started penalty path.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod discriminant;
pub mod error;
pub mod eval;
pub mod io;
pub mod matkernel;
pub mod path;
pub mod scalar;
pub mod simulate;
pub mod stats;

#[cfg(test)]
mod testutil;

pub use admm::{kkt_report, solve, AdmmState, KktReport, KktTolerance, SolveConfig, SolveResult};
pub use discriminant::{
    fit_l1pda, fit_lda, fit_qda, fit_rda, model_from_result, models_from_path, rda_alpha_grid, ForwardModel, Method,
    PdaModel,
};
pub use error::{PdaError, Result};
pub use eval::{accuracy, cross_validate, roc, stratified_folds, CvGrid, CvReport, RocCurve};
pub use io::{load_csv, load_model, save_model, CsvOptions, ModelFile};
pub use matkernel::{log_det, soft_threshold, spd_inverse, sym_eig, EigDecomp, SymMatrix};
pub use path::{lambda_max, make_grid, solve_path, LambdaGrid, PathFit};
pub use scalar::Scalar;
pub use simulate::{generate, run_experiment, ExperimentConfig, ExperimentReport, SimDesign};
pub use stats::{compute_stats, Class, ClassStats, LabeledDataset};

pub type Matrix = SymMatrix<f64>;
pub type Dataset = LabeledDataset<f64>;
pub type Stats = ClassStats<f64>;
pub type Model = PdaModel<f64>;
pub type Config = SolveConfig<f64>;
pub type Grid = LambdaGrid<f64>;
pub type Fit = PathFit<f64>;
pub type Solution = SolveResult<f64>;
pub type Kkt = KktReport<f64>;
