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

//! Two-class datasets and their sufficient statistics.

use crate::error::{PdaError, Result};
use crate::matkernel::SymMatrix;
use crate::scalar::Scalar;

/// Class membership. `First` is class 1, `Second` is class 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    First,
    Second,
}

impl Class {
    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Class::First => 1,
            Class::Second => 2,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Class::First),
            2 => Some(Class::Second),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self.number() as usize - 1
    }

    pub fn other(self) -> Self {
        match self {
            Class::First => Class::Second,
            Class::Second => Class::First,
        }
    }
}

/// `n x p` feature matrix with one class label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    p: usize,
    x: Vec<T>,
    y: Vec<Class>,
    /// Original label strings for class 1 and class 2, when known.
    pub label_names: Option<[String; 2]>,
    /// Feature column names, when known.
    pub feature_names: Option<Vec<String>>,
}

impl<T: Scalar> LabeledDataset<T> {
    /// Validates shape, finiteness and that both classes appear.
    pub fn new(p: usize, x: Vec<T>, y: Vec<Class>) -> Result<Self> {
        if p == 0 {
            return Err(PdaError::InvalidDataset("no feature columns".into()));
        }
        if x.len() != p * y.len() {
            return Err(PdaError::InvalidDataset(format!(
                "{} feature values do not fill {} rows of width {p}",
                x.len(),
                y.len()
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(PdaError::InvalidDataset(format!("non-finite value at row {}, column {}", pos / p, pos % p)));
        }
        let ds = Self { p, x, y, label_names: None, feature_names: None };
        let (n1, n2) = ds.class_counts();
        if ds.n() < 2 || n1 == 0 || n2 == 0 {
            return Err(PdaError::InvalidDataset(format!(
                "both classes must be present (class 1: {n1} rows, class 2: {n2} rows)"
            )));
        }
        Ok(ds)
    }

    pub fn from_rows(rows: &[Vec<T>], y: Vec<Class>) -> Result<Self> {
        let p = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(PdaError::DimensionMismatch { expected: p, found: bad.len() });
        }
        Self::new(p, rows.concat(), y)
    }

    pub fn with_label_names(mut self, names: [String; 2]) -> Self {
        self.label_names = Some(names);
        self
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = Some(names);
        self
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.x.chunks(self.p)
    }

    pub fn labels(&self) -> &[Class] {
        &self.y
    }

    pub fn features(&self) -> &[T] {
        &self.x
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let n1 = self.y.iter().filter(|&&c| c == Class::First).count();
        (n1, self.y.len() - n1)
    }

    /// Rows at `indices`, in that order. Fails if a class goes missing.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(indices.len() * self.p);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        let mut out = Self::new(self.p, x, y)?;
        out.label_names = self.label_names.clone();
        out.feature_names = self.feature_names.clone();
        Ok(out)
    }
}

/// Per-class counts, means, MLE covariances and the pooled covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassStats<T> {
    pub n1: usize,
    pub n2: usize,
    pub mu1: Vec<T>,
    pub mu2: Vec<T>,
    pub s1: SymMatrix<T>,
    pub s2: SymMatrix<T>,
    pub s_pool: SymMatrix<T>,
    pub priors: (T, T),
}

impl<T: Scalar> ClassStats<T> {
    pub fn p(&self) -> usize {
        self.mu1.len()
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Counts as scalars, `(n1, n2)`.
    pub fn weights(&self) -> (T, T) {
        (T::from_count(self.n1), T::from_count(self.n2))
    }

    /// Replaces the priors with `(a, b) / (a + b)`.
    pub fn with_priors(mut self, a: T, b: T) -> Result<Self> {
        let total = a + b;
        if !(a > T::zero() && b > T::zero() && total.is_finite()) {
            return Err(PdaError::InvalidArgument(format!("priors must be positive and finite, got ({a}, {b})")));
        }
        self.priors = (a / total, b / total);
        Ok(self)
    }

    /// Statistics from moments given directly (no raw data), priors `n_k / n`.
    pub fn from_moments(
        n1: usize,
        n2: usize,
        mu1: Vec<T>,
        mu2: Vec<T>,
        s1: SymMatrix<T>,
        s2: SymMatrix<T>,
    ) -> Result<Self> {
        let p = s1.dim();
        if n1 == 0 || n2 == 0 {
            return Err(PdaError::InvalidDataset("class counts must be positive".into()));
        }
        for len in [mu1.len(), mu2.len(), s2.dim()] {
            if len != p {
                return Err(PdaError::DimensionMismatch { expected: p, found: len });
            }
        }
        let (w1, w2) = (T::from_count(n1), T::from_count(n2));
        let total = w1 + w2;
        let s_pool = s1.lin_comb(w1 / total, &s2, w2 / total);
        Ok(Self { n1, n2, mu1, mu2, s1, s2, s_pool, priors: (w1 / total, w2 / total) })
    }
}

/// Class means, MLE covariances (divisor `n_k`), pooled covariance and
/// empirical priors.
pub fn compute_stats<T: Scalar>(d: &LabeledDataset<T>) -> Result<ClassStats<T>> {
    let p = d.p();
    let (n1, n2) = d.class_counts();
    if n1 == 0 || n2 == 0 {
        return Err(PdaError::InvalidDataset("a class is absent".into()));
    }
    let mut sums = [vec![T::zero(); p], vec![T::zero(); p]];
    for (row, &c) in d.rows().zip(d.labels()) {
        for (s, &v) in sums[c.index()].iter_mut().zip(row) {
            *s += v;
        }
    }
    let counts = [T::from_count(n1), T::from_count(n2)];
    let [mu1, mu2] = [0, 1].map(|k| sums[k].iter().map(|&s| s / counts[k]).collect::<Vec<T>>());

    let mut scatter = [vec![T::zero(); p * p], vec![T::zero(); p * p]];
    let mut centered = vec![T::zero(); p];
    for (row, &c) in d.rows().zip(d.labels()) {
        let mu = if c == Class::First { &mu1 } else { &mu2 };
        for ((z, &x), &m) in centered.iter_mut().zip(row).zip(mu) {
            *z = x - m;
        }
        let acc = &mut scatter[c.index()];
        for i in 0..p {
            let zi = centered[i];
            for j in i..p {
                acc[i * p + j] += zi * centered[j];
            }
        }
    }
    let [s1, s2] = [0, 1].map(|k| {
        let acc = &scatter[k];
        SymMatrix::from_upper_fn(p, |i, j| acc[i * p + j] / counts[k])
    });
    ClassStats::from_moments(n1, n2, mu1, mu2, s1, s2)
}
