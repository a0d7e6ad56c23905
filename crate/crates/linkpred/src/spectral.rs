//! Deterministic spectral embedding and k-means used by the block-model
//! predictor: top-k eigenvectors of the (shifted) weighted adjacency by
//! subspace iteration, then Lloyd's algorithm with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::scores::ScoreMap;

const SUBSPACE_ITERATIONS: usize = 60;
const KMEANS_MAX_ITERATIONS: usize = 100;

/// Partitions nodes into at most `k` blocks from the weighted adjacency
/// `w`. Deterministic for a fixed seed. If a clustering leaves empty
/// blocks it is re-seeded once; blocks that are still empty are merged
/// away (labels stay compact) with a warning.
pub fn spectral_blocks(w: &ScoreMap, n: usize, k: usize, seed: u64) -> Vec<usize> {
    assert!(k >= 1 && k <= n, "block count must satisfy 1 <= k <= n");
    if k == 1 || w.is_empty() {
        return vec![0; n];
    }

    let embedding = embed(w, n, k, seed);
    let mut labels = kmeans(&embedding, n, k, seed);
    if count_blocks(&labels, k).iter().any(|&c| c == 0) {
        labels = kmeans(&embedding, n, k, seed.wrapping_add(1));
    }
    let counts = count_blocks(&labels, k);
    if counts.iter().any(|&c| c == 0) {
        let nonempty = counts.iter().filter(|&&c| c > 0).count();
        log::warn!(
            "spectral clustering produced {} empty of {k} blocks after re-seeding; \
             merging down to {nonempty} blocks",
            k - nonempty
        );
        labels = compact_labels(&labels, &counts);
    }
    labels
}

fn count_blocks(labels: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

fn compact_labels(labels: &[usize], counts: &[usize]) -> Vec<usize> {
    let mut remap = vec![usize::MAX; counts.len()];
    let mut next = 0;
    for (old, &c) in counts.iter().enumerate() {
        if c > 0 {
            remap[old] = next;
            next += 1;
        }
    }
    labels.iter().map(|&l| remap[l]).collect()
}

/// Row embedding from `k` leading eigenvectors of `W + shift*I`. The
/// diagonal shift (max weighted degree) keeps the target eigenvalues the
/// algebraically largest so subspace iteration converges to them.
fn embed(w: &ScoreMap, n: usize, k: usize, seed: u64) -> Vec<f64> {
    let entries = w.iter_sorted();
    let mut degree = vec![0.0f64; n];
    for &(p, v) in &entries {
        let (a, b) = p.nodes();
        degree[a as usize] += v;
        degree[b as usize] += v;
    }
    let shift = degree.iter().fold(0.0f64, |m, &d| m.max(d));

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // column-major basis: q[c*n..(c+1)*n] is one basis vector
    let mut q: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthonormalize(&mut q, n, k);

    let mut z = vec![0.0f64; n * k];
    for _ in 0..SUBSPACE_ITERATIONS {
        for c in 0..k {
            let qc = &q[c * n..(c + 1) * n];
            let zc = &mut z[c * n..(c + 1) * n];
            for (x, &qv) in zc.iter_mut().zip(qc) {
                *x = shift * qv;
            }
            for &(p, v) in &entries {
                let (a, b) = p.nodes();
                zc[a as usize] += v * qc[b as usize];
                zc[b as usize] += v * qc[a as usize];
            }
        }
        std::mem::swap(&mut q, &mut z);
        orthonormalize(&mut q, n, k);
    }

    // transpose to row-major points for k-means
    let mut rows = vec![0.0f64; n * k];
    for c in 0..k {
        for i in 0..n {
            rows[i * k + c] = q[c * n + i];
        }
    }
    rows
}

/// Modified Gram-Schmidt on `k` column vectors of length `n`. A column
/// that collapses to numerical zero is replaced by a deterministic basis
/// vector before renormalizing.
fn orthonormalize(q: &mut [f64], n: usize, k: usize) {
    for c in 0..k {
        for prev in 0..c {
            let dot: f64 = (0..n).map(|i| q[c * n + i] * q[prev * n + i]).sum();
            for i in 0..n {
                q[c * n + i] -= dot * q[prev * n + i];
            }
        }
        let norm: f64 = (0..n)
            .map(|i| q[c * n + i] * q[c * n + i])
            .sum::<f64>()
            .sqrt();
        if norm < 1e-12 {
            for i in 0..n {
                q[c * n + i] = if i == c % n { 1.0 } else { 0.0 };
            }
            // re-orthogonalize the replacement against earlier columns
            for prev in 0..c {
                let dot: f64 = (0..n).map(|i| q[c * n + i] * q[prev * n + i]).sum();
                for i in 0..n {
                    q[c * n + i] -= dot * q[prev * n + i];
                }
            }
            let norm2: f64 = (0..n)
                .map(|i| q[c * n + i] * q[c * n + i])
                .sum::<f64>()
                .sqrt();
            if norm2 > 1e-12 {
                for i in 0..n {
                    q[c * n + i] /= norm2;
                }
            }
        } else {
            for i in 0..n {
                q[c * n + i] /= norm;
            }
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding over `n` points of dimension
/// `k` (row-major). Ties in assignment go to the lowest center index.
fn kmeans(points: &[f64], n: usize, k: usize, seed: u64) -> Vec<usize> {
    let dim = k;
    let point = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x6b6d_6561_6e73);

    // k-means++ seeding
    let mut centers: Vec<f64> = Vec::with_capacity(k * dim);
    let first = rng.gen_range(0..n);
    centers.extend_from_slice(point(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(point(i), &centers[0..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let chosen = if total <= 0.0 {
            // all points coincide with a center; any index works
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        };
        let start = centers.len();
        centers.extend_from_slice(point(chosen));
        let new_center = centers[start..start + dim].to_vec();
        for i in 0..n {
            let d = sq_dist(point(i), &new_center);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    let mut labels = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITERATIONS {
        let mut changed = false;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = sq_dist(point(i), &centers[c * dim..(c + 1) * dim]);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for d in 0..dim {
                sums[labels[i] * dim + d] += points[i * dim + d];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centers[c * dim + d] = sums[c * dim + d] / counts[c] as f64;
                }
            }
        }
    }
    labels
}
