//! Centroidal Voronoi tessellation of the unit hypercube.
//!
//! Centroids are fitted by Lloyd's k-means over uniform samples. Cell
//! lookup goes through [`NearestIndex`], which orders centroids along the
//! first axis and prunes candidates whose first-axis gap alone already
//! exceeds the best squared distance found. Results are identical to an
//! exhaustive scan, including the lowest-index tie rule.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const LLOYD_TOLERANCE: f64 = 1e-4;
pub const LLOYD_MAX_ITERATIONS: usize = 200;

/// Default sample count for a `k`-cell tessellation: `50·k`, at least 100 000.
pub fn default_cvt_samples(k: usize) -> usize {
    (50 * k).max(100_000)
}

/// `k` points in `[0,1]^dim`, stored row-major.
#[derive(Debug, Clone)]
pub struct Centroids {
    dim: usize,
    points: Vec<f64>,
    index: NearestIndex,
}

impl PartialEq for Centroids {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points
    }
}

impl Centroids {
    pub fn from_points(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("centroid dimension must be positive"));
        }
        if points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form a non-empty set of {dim}-d points",
                points.len()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("centroid coordinates must be finite"));
        }
        let index = NearestIndex::build(dim, &points);
        Ok(Centroids { dim, points, index })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// Index of the nearest centroid (Euclidean), ties to the lowest index.
    pub fn assign_cell(&self, descriptor: &[f64]) -> Result<usize> {
        if descriptor.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: descriptor.len(),
            });
        }
        Ok(self.index.nearest(&self.points, self.dim, descriptor))
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Centroid order sorted by first coordinate, used to prune the scan.
#[derive(Debug, Clone)]
struct NearestIndex {
    order: Vec<usize>,
    keys: Vec<f64>,
}

impl NearestIndex {
    fn build(dim: usize, points: &[f64]) -> Self {
        let k = points.len() / dim;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            points[a * dim]
                .partial_cmp(&points[b * dim])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let keys = order.iter().map(|&i| points[i * dim]).collect();
        NearestIndex { order, keys }
    }

    fn nearest(&self, points: &[f64], dim: usize, q: &[f64]) -> usize {
        let start = self.keys.partition_point(|&x| x < q[0]);
        let mut best = (f64::INFINITY, usize::MAX);
        let consider = |slot: usize, best: &mut (f64, usize)| -> bool {
            let dx = q[0] - self.keys[slot];
            if dx * dx > best.0 {
                return false;
            }
            let i = self.order[slot];
            let d2 = squared_distance(q, &points[i * dim..(i + 1) * dim]);
            if d2 < best.0 || (d2 == best.0 && i < best.1) {
                *best = (d2, i);
            }
            true
        };
        let (mut lo, mut hi) = (start, start);
        let (mut left_open, mut right_open) = (true, true);
        while left_open || right_open {
            if right_open {
                if hi < self.keys.len() && consider(hi, &mut best) {
                    hi += 1;
                } else {
                    right_open = false;
                }
            }
            if left_open {
                if lo > 0 && consider(lo - 1, &mut best) {
                    lo -= 1;
                } else {
                    left_open = false;
                }
            }
        }
        best.1
    }
}

/// Fits `k` centroids with Lloyd's algorithm over `n_samples` uniform draws
/// from `[0,1]^d`. Stops when no centroid moves more than
/// [`LLOYD_TOLERANCE`] in any coordinate, or after
/// [`LLOYD_MAX_ITERATIONS`]. Bit-reproducible for a fixed seed.
pub fn compute_cvt_centroids(k: usize, d: usize, n_samples: usize, seed: u64) -> Result<Centroids> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("descriptor dimension must be at least 1"));
    }
    if n_samples < k {
        return Err(Error::invalid(format!(
            "n_samples ({n_samples}) must be at least k ({k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n_samples * d).map(|_| rng.random::<f64>()).collect();
    let mut centroids = Centroids::from_points(d, samples[..k * d].to_vec())?;

    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for _ in 0..LLOYD_MAX_ITERATIONS {
        let assignment: Vec<usize> = samples
            .par_chunks_exact(d)
            .map(|s| centroids.index.nearest(&centroids.points, d, s))
            .collect();
        sums.iter_mut().for_each(|s| *s = 0.0);
        counts.iter_mut().for_each(|c| *c = 0);
        for (s, &c) in samples.chunks_exact(d).zip(&assignment) {
            counts[c] += 1;
            for (acc, v) in sums[c * d..(c + 1) * d].iter_mut().zip(s) {
                *acc += v;
            }
        }
        let mut next = centroids.points.clone();
        let mut movement = 0.0f64;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let n = counts[c] as f64;
            for j in 0..d {
                let v = sums[c * d + j] / n;
                movement = movement.max((v - next[c * d + j]).abs());
                next[c * d + j] = v;
            }
        }
        centroids = Centroids::from_points(d, next)?;
        if movement < LLOYD_TOLERANCE {
            break;
        }
    }
    Ok(centroids)
}

type CacheKey = (usize, usize, usize, u64);

/// Process-wide memoised [`compute_cvt_centroids`]. Runs sharing a
/// tessellation (same k, d, sample count and seed) fit it once.
pub fn cached_cvt_centroids(k: usize, d: usize, n_samples: usize, seed: u64) -> Result<Arc<Centroids>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Centroids>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (k, d, n_samples, seed);
    if let Some(c) = cache.lock().expect("centroid cache poisoned").get(&key) {
        return Ok(Arc::clone(c));
    }
    let fitted = Arc::new(compute_cvt_centroids(k, d, n_samples, seed)?);
    cache
        .lock()
        .expect("centroid cache poisoned")
        .insert(key, Arc::clone(&fitted));
    Ok(fitted)
}
