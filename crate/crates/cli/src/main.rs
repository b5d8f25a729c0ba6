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

//! Command-line front end: fit, path, cross-validation, prediction,
//! simulation and optimality checks.

use clap::{Parser, Subcommand, ValueEnum};
use l1pda::admm::{kkt_report, KktTolerance};
use l1pda::discriminant::{fit_l1pda, fit_lda, fit_qda, fit_rda, models_from_path, rda_alpha_grid};
use l1pda::eval::{cross_validate, CvGrid};
use l1pda::io::{
    dataset_digest, feature_rows, format_cv_report, format_experiment_report, format_kkt_report, format_path_table,
    load_model, read_table, save_model, CsvOptions, ModelFile, Table,
};
use l1pda::path::{lambda_max, make_grid, solve_path};
use l1pda::simulate::{run_experiment, ExperimentConfig, SimDesign};
use l1pda::{compute_stats, Dataset, Model, PdaError};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "l1pda", version, about = "Discriminant analysis with a fused l1 penalty on class precisions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lda,
    Qda,
    Rda,
    L1pda,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the class label column.
    #[arg(long)]
    label: String,
    /// Field delimiter.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,
    /// Absolute stopping tolerance; the relative tolerance is 100 times this.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self) -> l1pda::Config {
        l1pda::Config {
            rho: self.rho,
            max_iter: self.max_iter,
            abs_tol: self.tol,
            rel_tol: 100.0 * self.tol,
            ..l1pda::Config::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model and write it to a model file.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Fusion penalty (l1pda).
        #[arg(long, conflicts_with = "alpha")]
        lambda: Option<f64>,
        /// Mixing weight toward the class covariances (rda).
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a warm-started path from lambda_max down to eps * lambda_max.
    Path {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 30)]
        nlambda: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory for the per-lambda models and diagnostics.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified K-fold cross-validation over the tuning grid.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "l1pda")]
        method: MethodArg,
        #[arg(long, default_value_t = 30)]
        nlambda: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 30)]
        nalpha: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Append predicted labels (and optionally P(class 1 | x)) to a CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        proba: bool,
        #[arg(long, default_value = ",", value_parser = parse_delimiter)]
        delimiter: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replicated train/tune/test comparison on simulated Gaussian data.
    Simulate {
        #[arg(long, default_value_t = 30)]
        p: usize,
        /// Rows per class in each of the train, tune and test sets.
        #[arg(long, default_value_t = 33)]
        n: usize,
        #[arg(long, default_value_t = 0.9)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        nlambda: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 30)]
        nalpha: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the optimality conditions of a model against a dataset.
    KktCheck {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got {s:?}")),
    }
}

/// Failure that maps onto a process exit status.
enum Failure {
    Usage(String),
    Pda(PdaError),
    NotConverged(String),
    Check(String),
}

impl From<PdaError> for Failure {
    fn from(e: PdaError) -> Self {
        Failure::Pda(e)
    }
}

impl Failure {
    fn report(&self) -> (String, u8) {
        match self {
            Failure::Usage(m) => (m.clone(), 2),
            Failure::NotConverged(m) => (m.clone(), 5),
            Failure::Check(m) => (m.clone(), 1),
            Failure::Pda(e) => {
                let code = if e.is_ill_posed() {
                    4
                } else if e.is_data_error() || matches!(e, PdaError::DegenerateGrid(_)) {
                    3
                } else if matches!(e, PdaError::InvalidArgument(_)) {
                    2
                } else {
                    1
                };
                (e.to_string(), code)
            }
        }
    }
}

type CliResult = Result<(), Failure>;

fn load_data(args: &DataArgs) -> Result<(Dataset, Table), PdaError> {
    let table = read_table(&args.data, args.delimiter)?;
    let opts = CsvOptions::new(&args.label).with_delimiter(args.delimiter);
    Ok((l1pda::io::parse_dataset(&table, &opts)?, table))
}

fn write_text(path: &Path, text: &str) -> Result<(), PdaError> {
    fs::write(path, text).map_err(|e| PdaError::Io(format!("{}: {e}", path.display())))
}

fn model_file(model: Model, data: &Dataset, label: &str, solver: Option<l1pda::Config>) -> ModelFile<f64> {
    ModelFile {
        model: model.with_label_map(data.label_names.clone()),
        feature_names: data.feature_names.clone(),
        label_column: Some(label.to_string()),
        dataset_digest: Some(dataset_digest(data)),
        solve_config: solver,
    }
}

fn fit(
    data: &DataArgs,
    method: MethodArg,
    lambda: Option<f64>,
    alpha: Option<f64>,
    solver: &SolverArgs,
    out: &Path,
) -> CliResult {
    let cfg = solver.config();
    cfg.validate()?;
    let (ds, _) = load_data(data)?;
    let stats = compute_stats(&ds)?;
    let (model, cfg_used) = match method {
        MethodArg::Lda => (fit_lda(&stats)?, None),
        MethodArg::Qda => (fit_qda(&stats)?, None),
        MethodArg::Rda => {
            let a = alpha.ok_or_else(|| Failure::Usage("--method rda requires --alpha".into()))?;
            (fit_rda(&stats, a)?, None)
        }
        MethodArg::L1pda => {
            let l = lambda.ok_or_else(|| Failure::Usage("--method l1pda requires --lambda".into()))?;
            (fit_l1pda(&stats, l, &cfg, None)?, Some(cfg))
        }
    };
    let converged = model.diagnostics.is_none_or(|d| d.converged);
    let iterations = model.diagnostics.map_or(0, |d| d.iterations);
    save_model(out, &model_file(model, &ds, &data.label, cfg_used))?;
    if !converged {
        return Err(Failure::NotConverged(format!(
            "solver stopped at the iteration cap ({iterations}) before meeting the tolerance; model written to {}",
            out.display()
        )));
    }
    Ok(())
}

fn path(data: &DataArgs, nlambda: usize, eps: f64, solver: &SolverArgs, out: &Path) -> CliResult {
    let cfg = solver.config();
    cfg.validate()?;
    let (ds, _) = load_data(data)?;
    let stats = compute_stats(&ds)?;
    let grid = make_grid(lambda_max(&stats), nlambda, eps)?;
    let fit = solve_path(&stats, &grid, &cfg)?;
    fs::create_dir_all(out).map_err(|e| PdaError::Io(format!("{}: {e}", out.display())))?;
    let width = nlambda.saturating_sub(1).to_string().len();
    for (i, m) in models_from_path(&fit)?.into_iter().enumerate() {
        save_model(&out.join(format!("model_{i:0width$}.txt")), &model_file(m, &ds, &data.label, Some(cfg)))?;
    }
    write_text(&out.join("diagnostics.tsv"), &format_path_table(&fit))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cv(
    data: &DataArgs,
    folds: usize,
    seed: u64,
    method: MethodArg,
    nlambda: usize,
    eps: f64,
    nalpha: usize,
    solver: &SolverArgs,
    out: &Path,
) -> CliResult {
    let cfg = solver.config();
    cfg.validate()?;
    let (ds, _) = load_data(data)?;
    let grid = match method {
        MethodArg::Lda => CvGrid::Lda,
        MethodArg::Qda => CvGrid::Qda,
        MethodArg::Rda => CvGrid::Alpha(rda_alpha_grid(nalpha)),
        MethodArg::L1pda => {
            let stats = compute_stats(&ds)?;
            CvGrid::Lambda(make_grid(lambda_max(&stats), nlambda, eps)?.values().to_vec())
        }
    };
    let report = cross_validate(&ds, &grid, folds, seed, &cfg)?;
    write_text(out, &format_cv_report(&report))?;
    Ok(())
}

fn feature_columns(table: &Table, file: &ModelFile<f64>) -> Result<Vec<usize>, PdaError> {
    let p = file.model.dim();
    let cols: Vec<usize> = match &file.feature_names {
        Some(names) => names.iter().map(|n| table.column_index(n)).collect::<Result<_, _>>()?,
        None => (0..table.headers.len())
            .filter(|&c| file.label_column.as_deref() != Some(table.headers[c].as_str()))
            .collect(),
    };
    if cols.len() != p {
        return Err(PdaError::DimensionMismatch { expected: p, found: cols.len() });
    }
    Ok(cols)
}

fn predict(model: &Path, data: &Path, proba: bool, delimiter: u8, out: &Path) -> CliResult {
    let file: ModelFile<f64> = load_model(model)?;
    let table = read_table(data, delimiter)?;
    let rows = feature_rows::<f64>(&table, &feature_columns(&table, &file)?)?;
    let names = file.model.label_map.clone().unwrap_or_else(|| ["1".into(), "2".into()]);

    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_path(out).map_err(PdaError::from)?;
    let mut header = table.headers.clone();
    header.push("predicted".into());
    if proba {
        header.push("prob_class1".into());
    }
    w.write_record(&header).map_err(PdaError::from)?;
    for (rec, x) in table.records.iter().zip(&rows) {
        let mut fields = rec.clone();
        fields.push(names[file.model.predict(x)?.index()].clone());
        if proba {
            fields.push(file.model.predict_proba(x)?.to_string());
        }
        w.write_record(&fields).map_err(PdaError::from)?;
    }
    w.flush().map_err(PdaError::from)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    p: usize,
    n: usize,
    c: f64,
    reps: usize,
    seed: u64,
    nlambda: usize,
    eps: f64,
    nalpha: usize,
    out: &Path,
) -> CliResult {
    let design = SimDesign { p, n_per_class: n, c, seed };
    let cfg = ExperimentConfig { reps, nlambda, epsilon: eps, nalpha, ..Default::default() };
    let report = run_experiment(&design, &cfg)?;
    write_text(out, &format_experiment_report(&report))?;
    Ok(())
}

fn kkt_check(model: &Path, data: &DataArgs) -> CliResult {
    let file: ModelFile<f64> = load_model(model)?;
    let (ds, _) = load_data(data)?;
    let stats = compute_stats(&ds)?;
    if ds.p() != file.model.dim() {
        return Err(PdaError::DimensionMismatch { expected: file.model.dim(), found: ds.p() }.into());
    }
    let lambda = match file.model.method {
        l1pda::Method::L1pda { lambda } => lambda,
        l1pda::Method::Lda => lambda_max(&stats),
        l1pda::Method::Qda => 0.0,
        l1pda::Method::Rda { .. } => {
            return Err(Failure::Usage("rda models do not solve the fused problem; nothing to check".into()))
        }
    };
    let [a, b] = &file.model.precisions;
    let report = kkt_report(a, b, &stats, lambda, &KktTolerance::default())?;
    print!("{}", format_kkt_report(&report));
    if !report.passed {
        return Err(Failure::Check("optimality conditions violated beyond tolerance".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Fit { data, method, lambda, alpha, solver, out } => fit(&data, method, lambda, alpha, &solver, &out),
        Command::Path { data, nlambda, eps, solver, out } => path(&data, nlambda, eps, &solver, &out),
        Command::Cv { data, folds, seed, method, nlambda, eps, nalpha, solver, out } => {
            cv(&data, folds, seed, method, nlambda, eps, nalpha, &solver, &out)
        }
        Command::Predict { model, data, proba, delimiter, out } => predict(&model, &data, proba, delimiter, &out),
        Command::Simulate { p, n, c, reps, seed, nlambda, eps, nalpha, out } => {
            simulate(p, n, c, reps, seed, nlambda, eps, nalpha, &out)
        }
        Command::KktCheck { model, data } => kkt_check(&model, &data),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (msg, code) = f.report();
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
