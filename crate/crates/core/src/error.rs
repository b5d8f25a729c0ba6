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

use thiserror::Error;

/// Errors raised by the solver, the classifiers and the file formats.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdaError {
    #[error("eigensolver failed to converge on {matrix} after {iterations} iterations")]
    EigenFailure { matrix: String, iterations: usize },

    #[error("matrix is singular: smallest eigenvalue {min_eigenvalue:e} is below the rank tolerance {tolerance:e}")]
    Singular { min_eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate lambda grid: {0}")]
    DegenerateGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("ROC curve undefined: scores contain a single class")]
    UndefinedRoc,

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("non-numeric value {value:?} at row {row}, column `{column}`")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("label column has {found} distinct values, expected exactly 2")]
    ClassCount { found: usize },

    #[error("empty input file: {0}")]
    EmptyFile(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("unsupported model format version {found:?} (expected {expected})")]
    UnsupportedVersion { found: String, expected: u32 },
}

impl PdaError {
    /// Whether the error comes from malformed or unusable input data.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            PdaError::InvalidDataset(_)
                | PdaError::MissingColumn(_)
                | PdaError::NonNumeric { .. }
                | PdaError::ClassCount { .. }
                | PdaError::EmptyFile(_)
                | PdaError::Csv(_)
                | PdaError::Io(_)
                | PdaError::CorruptModel(_)
                | PdaError::UnsupportedVersion { .. }
                | PdaError::DimensionMismatch { .. }
                | PdaError::Stratification(_)
                | PdaError::UndefinedRoc
        )
    }

    /// Whether the error means no estimate exists for the requested problem.
    pub fn is_ill_posed(&self) -> bool {
        matches!(self, PdaError::IllPosed(_) | PdaError::Singular { .. } | PdaError::NotPositiveDefinite { .. })
    }
}

impl From<std::io::Error> for PdaError {
    fn from(e: std::io::Error) -> Self {
        PdaError::Io(e.to_string())
    }
}

impl From<csv::Error> for PdaError {
    fn from(e: csv::Error) -> Self {
        PdaError::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PdaError>;
