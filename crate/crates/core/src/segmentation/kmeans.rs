use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    /// Stop once the relative WCSS improvement drops to this value or below.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { k: 4, max_iters: 100, tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<T, const D: usize> {
    pub centroids: Vec<[T; D]>,
    pub assignments: Vec<usize>,
    /// WCSS after the initial assignment and after every Lloyd iteration.
    pub wcss_history: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar, const D: usize> KMeansResult<T, D> {
    pub fn wcss(&self) -> T {
        *self.wcss_history.last().expect("history is never empty")
    }
}

pub(crate) fn sq_dist<T: Scalar, const D: usize>(a: &[T; D], b: &[T; D]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum()
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest<T: Scalar, const D: usize>(p: &[T; D], centroids: &[[T; D]]) -> usize {
    let mut best = 0;
    let mut best_d = sq_dist(p, &centroids[0]);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(p, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// k-means++ seeding.
pub fn kmeans_plus_plus<T: Scalar, const D: usize>(points: &[[T; D]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[T; D]> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())]);
    let mut d2: Vec<T> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: T = d2.iter().copied().sum();
        let idx = if total > T::zero() {
            let target = T::lit(rng.gen::<f64>()) * total;
            let mut acc = T::zero();
            let mut chosen = points.len() - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += *d;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[idx];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn wcss<T: Scalar, const D: usize>(points: &[[T; D]], assign: &[usize], centroids: &[[T; D]]) -> T {
    points.iter().zip(assign).map(|(p, &a)| sq_dist(p, &centroids[a])).sum()
}

/// Lloyd iterations from a k-means++ seeding. Empty clusters keep their previous centroid.
pub fn kmeans<T: Scalar, const D: usize>(points: &[[T; D]], config: &KMeansConfig) -> Result<KMeansResult<T, D>> {
    if config.k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    if points.len() < config.k {
        return Err(Error::Validation(format!("k = {} exceeds the {} points", config.k, points.len())));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("points must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids = kmeans_plus_plus(points, config.k, &mut rng);
    let mut assignments: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    let mut history = vec![wcss(points, &assignments, &centroids)];
    let tol = T::lit(config.tol);
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let mut sums = vec![[T::zero(); D]; config.k];
        let mut counts = vec![0usize; config.k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += *v;
            }
        }
        for ((c, s), &n) in centroids.iter_mut().zip(&sums).zip(&counts) {
            if n > 0 {
                let n = T::from_usize_lossy(n);
                for (ci, si) in c.iter_mut().zip(s) {
                    *ci = *si / n;
                }
            }
        }
        for (a, p) in assignments.iter_mut().zip(points) {
            *a = nearest(p, &centroids);
        }
        let prev = *history.last().unwrap();
        let cur = wcss(points, &assignments, &centroids);
        history.push(cur);
        if prev - cur <= tol * prev {
            break;
        }
    }
    Ok(KMeansResult { centroids, assignments, wcss_history: history, iterations })
}
