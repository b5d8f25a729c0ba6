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
//! Random instances for unit tests.

use crate::matkernel::SymMatrix;
use crate::stats::{compute_stats, Class, ClassStats, LabeledDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Gaussian data whose two classes have different random covariance factors.
pub fn random_dataset(p: usize, n1: usize, n2: usize, seed: u64) -> LabeledDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<Vec<f64>> = (0..2)
        .map(|_| {
            (0..p * p)
                .map(|k| {
                    let g: f64 = rng.sample(StandardNormal);
                    if k / p == k % p {
                        1.0 + 0.3 * g
                    } else {
                        0.3 * g / (p as f64).sqrt()
                    }
                })
                .collect()
        })
        .collect();
    let mut x = Vec::with_capacity((n1 + n2) * p);
    let mut y = Vec::with_capacity(n1 + n2);
    for (k, n) in [(0usize, n1), (1, n2)] {
        for _ in 0..n {
            let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            for j in 0..p {
                let v: f64 = (0..p).map(|i| z[i] * factors[k][i * p + j]).sum();
                x.push(v + k as f64 * 0.5);
            }
            y.push(if k == 0 { Class::First } else { Class::Second });
        }
    }
    LabeledDataset::new(p, x, y).unwrap()
}

pub fn random_stats(p: usize, n1: usize, n2: usize, seed: u64) -> ClassStats<f64> {
    compute_stats(&random_dataset(p, n1, n2, seed)).unwrap()
}

pub fn random_spd(p: usize, seed: u64) -> SymMatrix<f64> {
    random_stats(p, 3 * p + 5, 3 * p + 5, seed).s_pool
}
