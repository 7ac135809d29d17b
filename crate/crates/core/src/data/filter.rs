//! Frame-consistent smoothing of Cauchy stress histories.
//!
//! Each record is split into eigenvalues and an eigenbasis, tracked
//! continuously from the first record. Eigenvalues pass through a centered
//! moving average. For the basis, every window is expressed as rotations
//! relative to the basis at its center and averaged as unit quaternions
//! (normalised chordal mean); the mean rotates that center basis. For small
//! relative rotations this agrees with averaging their Euler angles to first
//! order, without the gimbal singularity.

use alloc::vec::Vec;

use super::synth::StressSeries;
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{dot3, quaternion_of, zyx_angles, Rotation, Tensor2, Vec3};

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub const DEFAULT_WINDOW: usize = 300;

/// Continuity-tracked spectral decomposition of a stress history.
#[derive(Clone, Debug)]
pub struct SpectralTrack {
    pub values: Vec<[f64; 3]>,
    /// Eigenvectors as columns, `det = +1`.
    pub bases: Vec<Tensor2>,
}

fn is_degenerate(values: &[f64; 3]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(math::abs(*v)));
    let gap = (values[0] - values[1]).abs().min((values[1] - values[2]).abs());
    scale == 0.0 || gap <= 1e-12 * scale
}

fn det_positive(v: &mut [Vec3; 3]) {
    let m = Tensor2::from_columns(*v);
    if m.det() < 0.0 {
        for c in v[2].iter_mut() {
            *c = -*c;
        }
    }
}

/// Eigen-decomposes each record, descending at the first record and matched
/// to the previous basis afterwards.
pub fn spectral_track(sigmas: &[Tensor2]) -> SpectralTrack {
    let mut values = Vec::with_capacity(sigmas.len());
    let mut bases: Vec<Tensor2> = Vec::with_capacity(sigmas.len());
    for (n, s) in sigmas.iter().enumerate() {
        let e = s.sym_eigen();
        if n == 0 {
            let mut v = [e.vector(0), e.vector(1), e.vector(2)];
            if is_degenerate(&e.values) {
                v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            }
            det_positive(&mut v);
            let b = Tensor2::from_columns(v);
            values.push(diag_in(s, &b));
            bases.push(b);
            continue;
        }
        let prev = bases[n - 1];
        if is_degenerate(&e.values) {
            values.push(diag_in(s, &prev));
            bases.push(prev);
            continue;
        }
        let pv = [prev.column(0), prev.column(1), prev.column(2)];
        let cand = [e.vector(0), e.vector(1), e.vector(2)];
        let mut best = PERMUTATIONS[0];
        let mut best_score = f64::NEG_INFINITY;
        for perm in PERMUTATIONS {
            let score: f64 = (0..3).map(|a| math::abs(dot3(&pv[a], &cand[perm[a]]))).sum();
            if score > best_score + 1e-15 {
                best_score = score;
                best = perm;
            }
        }
        let mut v = [cand[best[0]], cand[best[1]], cand[best[2]]];
        let lam = [e.values[best[0]], e.values[best[1]], e.values[best[2]]];
        for a in 0..3 {
            if dot3(&pv[a], &v[a]) < 0.0 {
                for c in v[a].iter_mut() {
                    *c = -*c;
                }
            }
        }
        if Tensor2::from_columns(v).det() < 0.0 {
            // flip the least aligned vector
            let a = (0..3)
                .min_by(|&x, &y| math::abs(dot3(&pv[x], &v[x])).total_cmp(&math::abs(dot3(&pv[y], &v[y]))))
                .unwrap_or(2);
            for c in v[a].iter_mut() {
                *c = -*c;
            }
        }
        let b = Tensor2::from_columns(v);
        values.push(lam);
        bases.push(b);
    }
    SpectralTrack { values, bases }
}

fn diag_in(s: &Tensor2, b: &Tensor2) -> [f64; 3] {
    let r = b.transpose().dot(s).dot(b);
    [r[(0, 0)], r[(1, 1)], r[(2, 2)]]
}

/// Relative-rotation angles, unwrapped so consecutive values never jump by more than π.
pub fn euler_track(bases: &[Tensor2]) -> Vec<[f64; 3]> {
    let Some(b0) = bases.first() else { return Vec::new() };
    let b0t = b0.transpose();
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(bases.len());
    for b in bases {
        let mut a = zyx_angles(&b0t.dot(b));
        if let Some(prev) = out.last() {
            for c in 0..3 {
                a[c] += two_pi * math::round((prev[c] - a[c]) / two_pi);
            }
        }
        out.push(a);
    }
    out
}

/// Centered moving average; the window shrinks symmetrically at the ends.
pub fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        let last = *prefix.last().unwrap_or(&0.0);
        prefix.push(last + v);
    }
    (0..n)
        .map(|i| {
            let (lo, hi) = window_bounds(i, n, window);
            (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect()
}

/// Spectral moving-average filter of the Cauchy stress.
pub fn filter_series(series: &StressSeries, window: usize) -> Result<StressSeries> {
    if window == 0 || (window > 1 && series.len() <= window) {
        return Err(Error::Window { window, len: series.len() });
    }
    let sigmas: Vec<Tensor2> = series.records.iter().map(|r| r.sigma).collect();
    let filtered = filter_tensors(&sigmas, window);
    let mut out = series.clone();
    for (r, s) in out.records.iter_mut().zip(filtered) {
        r.sigma = s;
    }
    out.meta.filter_window = Some(window);
    Ok(out)
}

/// Index range `[lo, hi]` of the centered window at `i`, shrinking symmetrically at the ends.
fn window_bounds(i: usize, n: usize, window: usize) -> (usize, usize) {
    let left = window / 2;
    let right = window.saturating_sub(1) - window / 2;
    let k = i.min(n - 1 - i);
    (i - left.min(k), i + right.min(k))
}

/// Chordal mean of `B_cᵀ B_m` over the window.
fn local_mean_rotation(bases: &[Tensor2], c: usize, lo: usize, hi: usize) -> Rotation {
    let ct = bases[c].transpose();
    let mut sum = [0.0; 4];
    for b in &bases[lo..=hi] {
        let q = quaternion_of(&ct.dot(b));
        for k in 0..4 {
            sum[k] += q[k];
        }
    }
    let n = math::sqrt(sum.iter().map(|v| v * v).sum::<f64>());
    if n < 1e-12 {
        return Rotation::identity();
    }
    Rotation::from_quaternion([sum[0] / n, sum[1] / n, sum[2] / n, sum[3] / n])
}

/// Filters a sequence of symmetric tensors.
pub fn filter_tensors(sigmas: &[Tensor2], window: usize) -> Vec<Tensor2> {
    if window <= 1 || sigmas.is_empty() {
        return sigmas.to_vec();
    }
    let n = sigmas.len();
    let track = spectral_track(sigmas);
    let channel = |f: &dyn Fn(usize) -> f64| moving_average(&(0..n).map(f).collect::<Vec<_>>(), window);
    let lam: Vec<Vec<f64>> = (0..3).map(|a| channel(&|k| track.values[k][a])).collect();
    (0..n)
        .map(|i| {
            let (lo, hi) = window_bounds(i, n, window);
            let r = track.bases[i].dot(local_mean_rotation(&track.bases, i, lo, hi).tensor());
            let d = Tensor2::from_diag([lam[0][i], lam[1][i], lam[2][i]]);
            r.dot(&d).dot(&r.transpose()).sym()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_edges() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = moving_average(&x, 3);
        assert_eq!(y, x);
        let c = moving_average(&[2.0; 7], 4);
        assert!(c.iter().all(|v| (*v - 2.0).abs() < 1e-15));
        assert_eq!(moving_average(&[1.0, 5.0, 3.0], 1), [1.0, 5.0, 3.0]);
    }

    #[test]
    fn constant_series_unchanged() {
        let s = Tensor2([[1.0, 0.2, 0.0], [0.2, -0.5, 0.1], [0.0, 0.1, 0.3]]);
        let out = filter_tensors(&[s; 50], 11);
        for o in out {
            assert!((o - s).max_abs() < 1e-12);
        }
    }
}
