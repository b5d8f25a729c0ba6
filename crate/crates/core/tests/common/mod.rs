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

#![allow(dead_code)]

use l1pda::{compute_stats, Class, ClassStats, LabeledDataset, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Gaussian classes with independent random covariance factors and a mean
/// shift of `shift` on every coordinate of class 2.
pub fn gaussian_dataset(p: usize, n1: usize, n2: usize, shift: f64, seed: u64) -> LabeledDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factor = || -> Vec<f64> {
        (0..p * p)
            .map(|k| {
                let g: f64 = rng.sample(StandardNormal);
                if k / p == k % p {
                    1.0 + 0.3 * g
                } else {
                    0.4 * g / (p as f64).sqrt()
                }
            })
            .collect()
    };
    let f = [factor(), factor()];
    let mut x = Vec::with_capacity((n1 + n2) * p);
    let mut y = Vec::new();
    for (k, n) in [(0usize, n1), (1, n2)] {
        for _ in 0..n {
            let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            for j in 0..p {
                x.push((0..p).map(|i| z[i] * f[k][i * p + j]).sum::<f64>() + k as f64 * shift);
            }
            y.push(if k == 0 { Class::First } else { Class::Second });
        }
    }
    LabeledDataset::new(p, x, y).unwrap()
}

pub fn random_stats(p: usize, n1: usize, n2: usize, seed: u64) -> ClassStats<f64> {
    compute_stats(&gaussian_dataset(p, n1, n2, 0.5, seed)).unwrap()
}

/// Dense row-major product `a * b` of square matrices.
pub fn matmul(a: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let mut out = vec![0.0; p * p];
    for i in 0..p {
        for k in 0..p {
            let aik = a[i * p + k];
            for j in 0..p {
                out[i * p + j] += aik * b[k * p + j];
            }
        }
    }
    out
}

/// Inverse by Gauss-Jordan elimination with partial pivoting. Independent of
/// the eigendecomposition the library uses.
pub fn gauss_jordan_inverse(m: &SymMatrix<f64>) -> Vec<f64> {
    let p = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut inv: Vec<f64> = (0..p * p).map(|k| if k / p == k % p { 1.0 } else { 0.0 }).collect();
    for col in 0..p {
        let piv = (col..p).max_by(|&i, &j| a[i * p + col].abs().total_cmp(&a[j * p + col].abs())).unwrap();
        for j in 0..p {
            a.swap(col * p + j, piv * p + j);
            inv.swap(col * p + j, piv * p + j);
        }
        let d = a[col * p + col];
        for j in 0..p {
            a[col * p + j] /= d;
            inv[col * p + j] /= d;
        }
        for i in 0..p {
            if i != col {
                let f = a[i * p + col];
                for j in 0..p {
                    a[i * p + j] -= f * a[col * p + j];
                    inv[i * p + j] -= f * inv[col * p + j];
                }
            }
        }
    }
    inv
}

/// Log-determinant from an unpivoted Cholesky factorization.
pub fn cholesky_logdet(m: &SymMatrix<f64>) -> f64 {
    let p = m.dim();
    let mut l = vec![0.0; p * p];
    let mut ld = 0.0;
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = m.get(i, j) - (0..j).map(|k| l[i * p + k] * l[j * p + k]).sum::<f64>();
            if i == j {
                assert!(s > 0.0, "not positive definite");
                l[i * p + i] = s.sqrt();
                ld += 2.0 * s.sqrt().ln();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    ld
}
