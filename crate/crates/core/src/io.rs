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

//! CSV ingestion, the versioned model file and plain-text reports.

use crate::admm::{KktReport, SolveConfig};
use crate::discriminant::{FitDiagnostics, Method, PdaModel};
use crate::error::{PdaError, Result};
use crate::eval::CvReport;
use crate::matkernel::SymMatrix;
use crate::path::PathFit;
use crate::scalar::Scalar;
use crate::simulate::{ExperimentReport, METHODS, SEED_RULE};
use crate::stats::{Class, LabeledDataset};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

/// How to read a labeled CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvOptions {
    pub label_column: String,
    pub delimiter: u8,
    /// Labels for class 1 and class 2. When absent, the first label seen is
    /// class 1.
    pub label_order: Option<[String; 2]>,
}

impl CsvOptions {
    pub fn new(label_column: impl Into<String>) -> Self {
        Self { label_column: label_column.into(), delimiter: b',', label_order: None }
    }

    pub fn with_delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }
}

/// Raw CSV contents: header plus string records.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| PdaError::MissingColumn(name.to_string()))
    }
}

pub fn read_table_from<R: Read>(reader: R, delimiter: u8, source: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).delimiter(delimiter).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(PdaError::EmptyFile(source.to_string()));
    }
    let mut records = Vec::new();
    for rec in rdr.records() {
        records.push(rec?.iter().map(str::to_string).collect());
    }
    if records.is_empty() {
        return Err(PdaError::EmptyFile(format!("{source}: header but no data rows")));
    }
    Ok(Table { headers, records })
}

pub fn read_table(path: &Path, delimiter: u8) -> Result<Table> {
    let file = fs::File::open(path).map_err(|e| PdaError::Io(format!("{}: {e}", path.display())))?;
    read_table_from(file, delimiter, &path.display().to_string())
}

/// Parses one cell. `row` counts data rows from 1.
fn parse_cell<T: Scalar>(cell: &str, row: usize, column: &str) -> Result<T> {
    let bad = || PdaError::NonNumeric { row, column: column.to_string(), value: cell.to_string() };
    let v: T = cell.trim().parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Numeric rows of the named columns, in the given order.
pub fn feature_rows<T: Scalar>(table: &Table, columns: &[usize]) -> Result<Vec<Vec<T>>> {
    table
        .records
        .iter()
        .enumerate()
        .map(|(r, rec)| columns.iter().map(|&c| parse_cell(&rec[c], r + 1, &table.headers[c])).collect())
        .collect()
}

/// Interprets a table as a labeled dataset: every column except the label
/// column is a feature.
pub fn parse_dataset<T: Scalar>(table: &Table, opts: &CsvOptions) -> Result<LabeledDataset<T>> {
    let label_col = table.column_index(&opts.label_column)?;
    let mut distinct: Vec<&str> = Vec::new();
    if let Some(order) = &opts.label_order {
        distinct.extend(order.iter().map(String::as_str));
    }
    let mut y = Vec::with_capacity(table.records.len());
    for rec in &table.records {
        let label = rec[label_col].as_str();
        let k = match distinct.iter().position(|&d| d == label) {
            Some(k) => k,
            None => {
                distinct.push(label);
                distinct.len() - 1
            }
        };
        y.push(if k == 0 { Class::First } else { Class::Second });
    }
    if distinct.len() != 2 {
        return Err(PdaError::ClassCount { found: distinct.len() });
    }
    if !y.contains(&Class::First) || !y.contains(&Class::Second) {
        return Err(PdaError::ClassCount { found: 1 });
    }
    let columns: Vec<usize> = (0..table.headers.len()).filter(|&c| c != label_col).collect();
    if columns.is_empty() {
        return Err(PdaError::InvalidDataset("no feature columns besides the label".into()));
    }
    let rows = feature_rows::<T>(table, &columns)?;
    let names = columns.iter().map(|&c| table.headers[c].clone()).collect();
    Ok(LabeledDataset::from_rows(&rows, y)?
        .with_label_names([distinct[0].to_string(), distinct[1].to_string()])
        .with_feature_names(names))
}

pub fn load_csv<T: Scalar>(path: &Path, opts: &CsvOptions) -> Result<LabeledDataset<T>> {
    parse_dataset(&read_table(path, opts.delimiter)?, opts)
}

/// Writes features followed by the label column. Values use the shortest
/// representation that parses back to the same number.
pub fn write_csv<T: Scalar>(path: &Path, data: &LabeledDataset<T>, label_column: &str, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_path(path)?;
    let names: Vec<String> = match &data.feature_names {
        Some(n) => n.clone(),
        None => (1..=data.p()).map(|j| format!("x{j}")).collect(),
    };
    let labels = data.label_names.clone().unwrap_or_else(|| ["1".into(), "2".into()]);
    let mut header = names;
    header.push(label_column.to_string());
    w.write_record(&header)?;
    for (row, class) in data.rows().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(labels[class.index()].clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// SHA-256 over the dimensions, the feature values (as `f64` bit patterns)
/// and the class labels, as lowercase hex.
pub fn dataset_digest<T: Scalar>(data: &LabeledDataset<T>) -> String {
    let mut h = Sha256::new();
    h.update((data.n() as u64).to_le_bytes());
    h.update((data.p() as u64).to_le_bytes());
    for v in data.features() {
        h.update(v.as_f64().to_bits().to_le_bytes());
    }
    for c in data.labels() {
        h.update([c.number()]);
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub const MODEL_FORMAT: &str = "l1pda-model";
pub const MODEL_VERSION: u32 = 1;

/// A model plus the provenance needed to use it on new files.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile<T> {
    pub model: PdaModel<T>,
    pub feature_names: Option<Vec<String>>,
    pub label_column: Option<String>,
    pub dataset_digest: Option<String>,
    pub solve_config: Option<SolveConfig<T>>,
}

impl<T: Scalar> ModelFile<T> {
    pub fn new(model: PdaModel<T>) -> Self {
        Self { model, feature_names: None, label_column: None, dataset_digest: None, solve_config: None }
    }
}

fn num<T: Scalar>(v: T) -> String {
    format!("{v:.16e}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(PdaError::CorruptModel(format!("bad escape \\{other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

fn line(out: &mut String, key: &str, fields: impl IntoIterator<Item = String>) {
    out.push_str(key);
    for f in fields {
        out.push('\t');
        out.push_str(&f);
    }
    out.push('\n');
}

/// Serializes to the tab-separated text format. Every number is written with
/// 17 significant digits, which reads back bit for bit.
pub fn model_to_string<T: Scalar>(file: &ModelFile<T>) -> String {
    let m = &file.model;
    let mut out = String::new();
    line(&mut out, "format", [MODEL_FORMAT.to_string()]);
    line(&mut out, "version", [MODEL_VERSION.to_string()]);
    line(&mut out, "method", [m.method.tag().to_string()]);
    match m.method {
        Method::L1pda { lambda } => line(&mut out, "lambda", [num(lambda)]),
        Method::Rda { alpha } => line(&mut out, "alpha", [num(alpha)]),
        Method::Lda | Method::Qda => {}
    }
    line(&mut out, "dim", [m.dim().to_string()]);
    if let Some(labels) = &m.label_map {
        line(&mut out, "labels", labels.iter().map(|l| escape(l)));
    }
    if let Some(names) = &file.feature_names {
        line(&mut out, "features", names.iter().map(|l| escape(l)));
    }
    if let Some(col) = &file.label_column {
        line(&mut out, "label_column", [escape(col)]);
    }
    line(&mut out, "priors", [num(m.priors.0), num(m.priors.1)]);
    for k in 0..2 {
        line(&mut out, ["mean1", "mean2"][k], m.means[k].iter().map(|&v| num(v)));
    }
    line(&mut out, "logdets", m.logdets.iter().map(|&v| num(v)));
    for k in 0..2 {
        let key = ["precision1", "precision2"][k];
        for i in 0..m.dim() {
            line(&mut out, key, m.precisions[k].row(i).iter().map(|&v| num(v)));
        }
    }
    if let Some(d) = &file.dataset_digest {
        line(&mut out, "dataset_sha256", [d.clone()]);
    }
    if let Some(c) = &file.solve_config {
        line(&mut out, "solver", [num(c.rho), c.max_iter.to_string(), num(c.abs_tol), num(c.rel_tol), num(c.gap_tol)]);
    }
    if let Some(d) = &m.diagnostics {
        line(
            &mut out,
            "diagnostics",
            [
                d.iterations.to_string(),
                num(d.primal_residual),
                num(d.dual_residual),
                d.converged.to_string(),
                num(d.objective),
                num(d.duality_gap),
            ],
        );
    }
    line(&mut out, "end", []);
    out
}

struct Fields<'a> {
    lines: Vec<(&'a str, Vec<&'a str>)>,
}

impl<'a> Fields<'a> {
    fn all(&self, key: &str) -> impl Iterator<Item = &Vec<&'a str>> + '_ {
        let key = key.to_string();
        self.lines.iter().filter(move |(k, _)| *k == key).map(|(_, f)| f)
    }

    fn opt(&self, key: &str) -> Result<Option<&Vec<&'a str>>> {
        let mut it = self.all(key);
        let first = it.next();
        if it.next().is_some() {
            return Err(corrupt(format!("duplicate key `{key}`")));
        }
        Ok(first)
    }

    fn req(&self, key: &str) -> Result<&Vec<&'a str>> {
        self.opt(key)?.ok_or_else(|| corrupt(format!("missing key `{key}`")))
    }

    fn single(&self, key: &str) -> Result<&'a str> {
        let f = self.req(key)?;
        if f.len() != 1 {
            return Err(corrupt(format!("`{key}` takes one value, found {}", f.len())));
        }
        Ok(f[0])
    }
}

fn corrupt(msg: String) -> PdaError {
    PdaError::CorruptModel(msg)
}

fn parse_num<T: Scalar>(s: &str, key: &str) -> Result<T> {
    s.parse().map_err(|_| corrupt(format!("`{key}`: cannot parse {s:?}")))
}

fn parse_vec<T: Scalar>(f: &[&str], len: usize, key: &str) -> Result<Vec<T>> {
    if f.len() != len {
        return Err(corrupt(format!("`{key}` has {} values, expected {len}", f.len())));
    }
    f.iter().map(|s| parse_num(s, key)).collect()
}

fn parse_int(s: &str, key: &str) -> Result<usize> {
    s.parse().map_err(|_| corrupt(format!("`{key}`: cannot parse {s:?}")))
}

const KNOWN_KEYS: [&str; 17] = [
    "format",
    "version",
    "method",
    "lambda",
    "alpha",
    "dim",
    "labels",
    "features",
    "label_column",
    "priors",
    "mean1",
    "mean2",
    "logdets",
    "precision1",
    "precision2",
    "dataset_sha256",
    "solver",
];

pub fn model_from_str<T: Scalar>(text: &str) -> Result<ModelFile<T>> {
    let mut lines = Vec::new();
    let mut ended = false;
    for raw in text.lines() {
        if ended {
            if raw.trim().is_empty() {
                continue;
            }
            return Err(corrupt("content after `end`".into()));
        }
        let mut parts = raw.split('\t');
        let key = parts.next().unwrap_or("");
        if key == "end" {
            ended = true;
            continue;
        }
        if !KNOWN_KEYS.contains(&key) && key != "diagnostics" {
            return Err(corrupt(format!("unknown key {key:?}")));
        }
        lines.push((key, parts.collect::<Vec<_>>()));
    }
    let f = Fields { lines };
    if f.lines.first().map(|l| l.0) != Some("format") || f.single("format")? != MODEL_FORMAT {
        return Err(corrupt("not an l1pda model file".into()));
    }
    let version = f.single("version")?;
    if version != MODEL_VERSION.to_string() {
        return Err(PdaError::UnsupportedVersion { found: version.to_string(), expected: MODEL_VERSION });
    }
    if !ended {
        return Err(corrupt("truncated file: missing `end`".into()));
    }

    let p = parse_int(f.single("dim")?, "dim")?;
    if p == 0 {
        return Err(corrupt("dimension must be positive".into()));
    }
    let method = match f.single("method")? {
        "lda" => Method::Lda,
        "qda" => Method::Qda,
        "rda" => Method::Rda { alpha: parse_num(f.single("alpha")?, "alpha")? },
        "l1pda" => Method::L1pda { lambda: parse_num(f.single("lambda")?, "lambda")? },
        other => return Err(corrupt(format!("unknown method {other:?}"))),
    };
    let pair = |key: &str| -> Result<[String; 2]> {
        let v = f.req(key)?;
        if v.len() != 2 {
            return Err(corrupt(format!("`{key}` needs two values")));
        }
        Ok([unescape(v[0])?, unescape(v[1])?])
    };
    let label_map = match f.opt("labels")? {
        Some(_) => Some(pair("labels")?),
        None => None,
    };
    let priors: Vec<T> = parse_vec(f.req("priors")?, 2, "priors")?;
    let logdets: Vec<T> = parse_vec(f.req("logdets")?, 2, "logdets")?;
    let means = [parse_vec(f.req("mean1")?, p, "mean1")?, parse_vec(f.req("mean2")?, p, "mean2")?];
    let mut precisions = Vec::with_capacity(2);
    for key in ["precision1", "precision2"] {
        let rows: Vec<&Vec<&str>> = f.all(key).collect();
        if rows.len() != p {
            return Err(corrupt(format!("`{key}` has {} rows, expected {p}", rows.len())));
        }
        let mut data = Vec::with_capacity(p * p);
        for r in rows {
            data.extend(parse_vec::<T>(r, p, key)?);
        }
        precisions.push(SymMatrix::from_row_major(p, data).map_err(|e| corrupt(format!("`{key}`: {e}")))?);
    }
    let diagnostics = match f.opt("diagnostics")? {
        None => None,
        Some(d) if d.len() == 6 => Some(FitDiagnostics {
            iterations: parse_int(d[0], "diagnostics")?,
            primal_residual: parse_num(d[1], "diagnostics")?,
            dual_residual: parse_num(d[2], "diagnostics")?,
            converged: d[3].parse().map_err(|_| corrupt("diagnostics: bad converged flag".into()))?,
            objective: parse_num(d[4], "diagnostics")?,
            duality_gap: parse_num(d[5], "diagnostics")?,
        }),
        Some(_) => return Err(corrupt("`diagnostics` needs six values".into())),
    };
    let solve_config = match f.opt("solver")? {
        None => None,
        Some(s) if s.len() == 5 => Some(SolveConfig {
            rho: parse_num(s[0], "solver")?,
            max_iter: parse_int(s[1], "solver")?,
            abs_tol: parse_num(s[2], "solver")?,
            rel_tol: parse_num(s[3], "solver")?,
            gap_tol: parse_num(s[4], "solver")?,
        }),
        Some(_) => return Err(corrupt("`solver` needs five values".into())),
    };
    let feature_names = match f.opt("features")? {
        None => None,
        Some(v) => {
            if v.len() != p {
                return Err(corrupt(format!("{} feature names for dimension {p}", v.len())));
            }
            Some(v.iter().map(|s| unescape(s)).collect::<Result<_>>()?)
        }
    };
    let label_column =
        f.opt("label_column")?.map(|_| f.single("label_column")).transpose()?.map(unescape).transpose()?;
    let dataset_digest = f.opt("dataset_sha256")?.map(|_| f.single("dataset_sha256")).transpose()?.map(str::to_string);

    let [p2, p1]: [SymMatrix<T>; 2] = [precisions.pop().unwrap(), precisions.pop().unwrap()];
    let model = PdaModel {
        method,
        priors: (priors[0], priors[1]),
        means,
        precisions: [p1, p2],
        logdets: [logdets[0], logdets[1]],
        label_map,
        diagnostics,
    };
    Ok(ModelFile { model, feature_names, label_column, dataset_digest, solve_config })
}

pub fn save_model<T: Scalar>(path: &Path, file: &ModelFile<T>) -> Result<()> {
    fs::write(path, model_to_string(file)).map_err(|e| PdaError::Io(format!("{}: {e}", path.display())))
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<ModelFile<T>> {
    let text = fs::read_to_string(path).map_err(|e| PdaError::Io(format!("{}: {e}", path.display())))?;
    model_from_str(&text)
}

/// Relative size below which an entry of `A - B` counts as fused.
pub const FUSED_REL_TOL: f64 = 1e-8;

/// Off-diagonal-and-diagonal entries of `A - B` that are not fused.
pub fn nnz_difference<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> usize {
    let scale = a.max_abs().max(b.max_abs());
    (a - b).count_above(T::cst(FUSED_REL_TOL) * scale)
}

/// One row per path point; unconverged points stay in the table.
pub fn format_path_table<T: Scalar>(fit: &PathFit<T>) -> String {
    let mut out = String::from(
        "index\tlambda\titerations\tprimal_residual\tdual_residual\tobjective\tduality_gap\tnnz_difference\tconverged\n",
    );
    for (i, r) in fit.results.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i}\t{:e}\t{}\t{:e}\t{:e}\t{:e}\t{:e}\t{}\t{}",
            r.lambda,
            r.iterations,
            r.primal_residual,
            r.dual_residual,
            r.objective,
            r.duality_gap,
            nnz_difference(&r.a, &r.b),
            r.converged
        );
    }
    out
}

pub fn format_cv_report<T: Scalar>(r: &CvReport<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method\t{}", r.method);
    let _ = writeln!(out, "folds\t{}", r.folds);
    let _ = writeln!(out, "seed\t{}", r.seed);
    let _ = writeln!(out, "selection_rule\t{}", r.selection_rule);
    let _ = writeln!(out, "best_index\t{}", r.best_index);
    let param = match r.method {
        "l1pda" => "lambda",
        "rda" => "alpha",
        _ => "param",
    };
    let _ = writeln!(out, "\nindex\t{param}\tmean_accuracy\tstd_error\tunconverged_folds\tfailed_folds");
    for (i, pt) in r.points.iter().enumerate() {
        let v = pt.param.map_or_else(|| "-".to_string(), |v| format!("{v:e}"));
        let _ = writeln!(
            out,
            "{i}\t{v}\t{}\t{}\t{}\t{}",
            pt.mean_accuracy, pt.std_error, pt.unconverged_folds, pt.failed_folds
        );
    }
    out
}

pub fn format_experiment_report(r: &ExperimentReport) -> String {
    let d = &r.design;
    let mut out = String::new();
    let _ = writeln!(out, "p\t{}", d.p);
    let _ = writeln!(out, "n_per_class\t{}", d.n_per_class);
    let _ = writeln!(out, "c\t{}", d.c);
    let _ = writeln!(out, "seed\t{}", d.seed);
    let _ = writeln!(out, "seed_rule\t{SEED_RULE}");
    let _ = writeln!(out, "reps\t{}", r.config.reps);
    let _ = writeln!(out, "nlambda\t{}", r.config.nlambda);
    let _ = writeln!(out, "epsilon\t{}", r.config.epsilon);
    let _ = writeln!(out, "nalpha\t{}", r.config.nalpha);
    let _ = writeln!(out, "\nmethod\treps\tmean_accuracy\tse_accuracy\tmean_auc\tse_auc");
    for s in &r.summary {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            s.method, s.reps, s.mean_accuracy, s.se_accuracy, s.mean_auc, s.se_auc
        );
    }
    let _ = writeln!(out, "\nrep\tmethod\taccuracy\tauc\tselected\tunconverged_path_points");
    for rep in &r.reps {
        for (k, m) in rep.methods.iter().enumerate() {
            match m {
                Some(o) => {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}",
                        rep.rep, METHODS[k], o.accuracy, o.auc, o.selected, rep.unconverged_path_points
                    );
                }
                None => {
                    let _ = writeln!(out, "{}\t{}\t-\t-\t-\t{}", rep.rep, METHODS[k], rep.unconverged_path_points);
                }
            }
        }
    }
    out
}

pub fn format_kkt_report<T: Scalar>(r: &KktReport<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lambda\t{:e}", r.lambda);
    let _ = writeln!(out, "stationarity_norm\t{:e}", r.stationarity_norm);
    let _ = writeln!(out, "stationarity_bound\t{:e}", r.lambda + r.lambda);
    let _ = writeln!(out, "stationarity_max_violation\t{:e}", r.stationarity_max_violation);
    let _ = writeln!(out, "sign_condition_violations\t{}", r.sign_condition_violations);
    let _ = writeln!(out, "pooled_residual\t{:e}", r.pooled_residual);
    let _ = writeln!(out, "nnz_delta\t{}", r.nnz_delta);
    let _ = writeln!(out, "passed\t{}", r.passed);
    out
}
