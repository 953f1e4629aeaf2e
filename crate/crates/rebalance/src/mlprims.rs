//! Clustering and propensity primitives used by the samplers.
//!
//! [`kmeans_fit`] runs Lloyd iterations from a k-means++ initialization
//! driven by a [`RandomStream`], so identical seeds give identical models
//! on any thread count. [`fit_propensity`] fits a least-squares linear
//! model of a 0/1 class indicator; its scores order rows by how strongly
//! the feature space associates them with the positive class.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::squared_euclidean;
use crate::rng::RandomStream;

pub const KMEANS_MAX_ITERATIONS: usize = 20;

const KMEANS_STREAM: u64 = 0x6b6d_6561_6e73; // "kmeans"
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KMeansModel {
    centroids: Vec<f64>,
    n_cols: usize,
    pub iterations_run: usize,
    pub inertia: f64,
    /// Inertia after each assignment pass; non-increasing.
    pub inertia_trace: Vec<f64>,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.centroids.len() / self.n_cols
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.n_cols..(c + 1) * self.n_cols]
    }
}

/// Index of the nearest centroid; ties resolve to the lowest index.
fn nearest_centroid(model: &KMeansModel, point: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for c in 0..model.k() {
        let d = squared_euclidean(point, model.centroid(c));
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Lloyd k-means with k-means++ seeding. `k` is clamped to the row count
/// when it exceeds it. Stops when an assignment pass repeats the previous
/// one or after [`KMEANS_MAX_ITERATIONS`] passes.
pub fn kmeans_fit(data: &Dataset, k: usize, seed: u64) -> Result<KMeansModel> {
    if k == 0 {
        return Err(Error::InvalidConfig("k-means needs k >= 1".into()));
    }
    let n = data.n_rows();
    let d = data.n_cols();
    let k = if k > n {
        log::warn!("k-means: clamping k from {k} to the {n} available rows");
        n
    } else {
        k
    };
    let mut stream = RandomStream::new(seed, KMEANS_STREAM);

    // k-means++ seeding: first centroid uniform, the rest proportional to
    // the squared distance from the nearest centroid chosen so far.
    let mut centroids: Vec<f64> = Vec::with_capacity(k * d);
    centroids.extend_from_slice(data.row(stream.below(n)));
    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| squared_euclidean(data.row(i), &centroids[..d]))
        .collect();
    for _ in 1..k {
        let total: f64 = min_d2.iter().sum();
        let next = if total > 0.0 {
            let target = stream.next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                acc += w;
                if target < acc {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            stream.below(n)
        };
        let start = centroids.len();
        centroids.extend_from_slice(data.row(next));
        let new = &centroids[start..start + d];
        for i in 0..n {
            let dd = squared_euclidean(data.row(i), new);
            if dd < min_d2[i] {
                min_d2[i] = dd;
            }
        }
    }

    let mut model = KMeansModel {
        centroids,
        n_cols: d,
        iterations_run: 0,
        inertia: 0.0,
        inertia_trace: Vec::new(),
    };
    let mut assignment: Vec<usize> = vec![usize::MAX; n];
    for iter in 0..KMEANS_MAX_ITERATIONS {
        let next: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|i| nearest_centroid(&model, data.row(i)))
            .collect();
        let inertia: f64 = (0..n)
            .map(|i| squared_euclidean(data.row(i), model.centroid(next[i])))
            .sum();
        model.inertia_trace.push(inertia);
        model.inertia = inertia;
        model.iterations_run = iter + 1;
        if next == assignment {
            break;
        }
        assignment = next;

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for (j, v) in data.row(i).iter().enumerate() {
                sums[c * d + j] += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    model.centroids[c * d + j] = sums[c * d + j] / counts[c] as f64;
                }
            }
        }
        // Reseed each empty cluster at the point farthest from its own
        // centroid, stealing only from clusters that keep at least one row.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut chosen: Option<(f64, usize)> = None;
            for i in 0..n {
                if counts[assignment[i]] < 2 {
                    continue;
                }
                let dist = squared_euclidean(data.row(i), model.centroid(assignment[i]));
                if chosen.map_or(true, |(best, _)| dist > best) {
                    chosen = Some((dist, i));
                }
            }
            if let Some((_, i)) = chosen {
                counts[assignment[i]] -= 1;
                assignment[i] = c;
                counts[c] = 1;
                let row = data.row(i).to_vec();
                model.centroids[c * d..(c + 1) * d].copy_from_slice(&row);
            }
        }
    }
    Ok(model)
}

/// Assigns every row to its nearest centroid; ties go to the lowest index.
pub fn kmeans_assign(model: &KMeansModel, data: &Dataset) -> Result<Vec<usize>> {
    if data.n_cols() != model.n_cols {
        return Err(Error::ShapeMismatch(format!(
            "model has {} columns, data has {}",
            model.n_cols,
            data.n_cols()
        )));
    }
    Ok((0..data.n_rows())
        .into_par_iter()
        .map(|i| nearest_centroid(model, data.row(i)))
        .collect())
}

/// Linear scoring model: `predict` is affine in the features.
#[derive(Debug, Clone)]
pub struct PropensityModel {
    coefficients: Vec<f64>,
    intercept: f64,
}

impl PropensityModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.coefficients.len());
        let mut acc = self.intercept;
        for (w, x) in self.coefficients.iter().zip(row) {
            acc += w * x;
        }
        acc
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }
}

/// Least-squares fit of the 0/1 indicator of `positive_label` on the
/// features plus an intercept, via normal equations with a small ridge
/// term for numerical safety.
pub fn fit_propensity(data: &Dataset, positive_label: u32) -> PropensityModel {
    let n = data.n_rows();
    let d = data.n_cols();
    let m = d + 1; // trailing column is the intercept

    // Gram matrix G = A'A + ridge*I and right-hand side b = A'y, where A
    // is the feature matrix with an appended column of ones.
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let mut aug = vec![0.0; m];
    for i in 0..n {
        aug[..d].copy_from_slice(data.row(i));
        aug[d] = 1.0;
        let y = if data.labels()[i] == positive_label {
            1.0
        } else {
            0.0
        };
        for r in 0..m {
            rhs[r] += aug[r] * y;
            for c in r..m {
                gram[r * m + c] += aug[r] * aug[c];
            }
        }
    }
    for r in 0..m {
        for c in 0..r {
            gram[r * m + c] = gram[c * m + r];
        }
        gram[r * m + r] += RIDGE;
    }

    let weights = solve(&mut gram, &mut rhs, m);
    PropensityModel {
        intercept: weights[d],
        coefficients: weights[..d].to_vec(),
    }
}

/// Gaussian elimination with partial pivoting on an `m x m` system.
/// The ridge term keeps every pivot strictly positive.
fn solve(a: &mut [f64], b: &mut [f64], m: usize) -> Vec<f64> {
    for col in 0..m {
        let mut pivot = col;
        for r in col + 1..m {
            if a[r * m + col].abs() > a[pivot * m + col].abs() {
                pivot = r;
            }
        }
        if pivot != col {
            for c in 0..m {
                a.swap(col * m + c, pivot * m + c);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * m + col];
        for r in col + 1..m {
            let factor = a[r * m + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in col..m {
                a[r * m + c] -= factor * a[col * m + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut acc = b[col];
        for c in col + 1..m {
            acc -= a[col * m + c] * x[c];
        }
        x[col] = acc / a[col * m + col];
    }
    x
}
