//! Seeded random-matrix models: GUE, strictly upper triangular Gaussian
//! matrices, diagonal realizations of radial measures, and the DT and block
//! DT models assembled from them.

use std::f64::consts::TAU;
use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::linalg::{c64, diagonal_matrix, CMatrix};
use super::measure::RadialMeasure;
use super::MatrixError;
use crate::seed;

const STREAM_DIAGONAL: u64 = 0;
const STREAM_TRIANGLE: u64 = 1;
const STREAM_MIX_DIAGONAL: u64 = 2;
const STREAM_MIX_OFF_DIAGONAL: u64 = 3;
const STREAM_BLOCK_DIAGONALS: u64 = 16;

fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(scale * re, scale * im)
}

/// Hermitian Gaussian matrix with entry variance `1/N`, so `E τ_N(X²) = 1`.
pub fn sample_gue(n: usize, seed: u64) -> CMatrix {
    let mut rng = seed::rng(seed);
    let var = 1.0 / n as f64;
    let mut x = CMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        x[(i, i)] = c64(d * var.sqrt(), 0.0);
        for j in i + 1..n {
            let z = complex_gaussian(&mut rng, var);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
        }
    }
    x
}

/// Strictly upper triangular matrix with iid complex Gaussian entries of
/// variance `1/N` above the diagonal.
pub fn sample_ut(n: usize, seed: u64) -> CMatrix {
    let mut rng = seed::rng(seed);
    let var = 1.0 / n as f64;
    let mut t = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            t[(i, j)] = complex_gaussian(&mut rng, var);
        }
    }
    t
}

/// Entries strictly above the diagonal; everything else zero.
pub fn strict_upper(a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(
        a.nrows(),
        a.ncols(),
        |i, j| {
            if j > i {
                a[(i, j)]
            } else {
                c64(0.0, 0.0)
            }
        },
    )
}

/// Largest-remainder apportionment of `n` slots to the given weights.
/// Fails when some weight receives no slot.
pub fn apportion(weights: &[f64], n: usize) -> Result<Vec<usize>, MatrixError> {
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(n.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(MatrixError::Resolution { atom: k, n });
    }
    Ok(counts)
}

/// Diagonal entries realizing `μ`: atom `k` fills a contiguous block of its
/// apportioned size with `ρ_k e^{iθ}`, `θ` equally spaced on `[0, 2π)` from a
/// seed-dependent offset.
pub fn diag_entries(mu: &RadialMeasure, n: usize, seed: u64) -> Result<Vec<Complex64>, MatrixError> {
    let counts = apportion(&mu.weights(), n)?;
    let mut entries = Vec::with_capacity(n);
    for (k, (atom, &m)) in mu.atoms().iter().zip(&counts).enumerate() {
        let offset: f64 = seed::rng(seed::derive(seed, k as u64)).random::<f64>() * TAU;
        for j in 0..m {
            let theta = offset + TAU * j as f64 / m as f64;
            entries.push(Complex64::from_polar(atom.radius, theta));
        }
    }
    Ok(entries)
}

pub fn diag_from_measure(mu: &RadialMeasure, n: usize, seed: u64) -> Result<CMatrix, MatrixError> {
    Ok(diagonal_matrix(&diag_entries(mu, n, seed)?))
}

/// Contiguous diagonal block `[start, start + len)` with weight `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelBlock {
    pub start: usize,
    pub len: usize,
    pub weight: f64,
}

impl ModelBlock {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    /// Diagonal projection onto the block's coordinates.
    pub fn projection(&self, n: usize) -> CMatrix {
        block_projection(n, self.range())
    }
}

pub fn block_projection(n: usize, range: Range<usize>) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j && range.contains(&i) {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// `Z = D + c·T` with `D` diagonal and `T` strictly upper triangular.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    pub z: CMatrix,
    pub d: CMatrix,
    pub t: CMatrix,
    pub c: f64,
    pub blocks: Vec<ModelBlock>,
}

impl MatrixModel {
    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    /// Largest entrywise deviation from `Z = D + c·T`.
    pub fn assembly_residual(&self) -> f64 {
        let rebuilt = &self.d + &self.t * c64(self.c, 0.0);
        (&self.z - rebuilt).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn projections(&self) -> Vec<CMatrix> {
        self.blocks.iter().map(|b| b.projection(self.dim())).collect()
    }
}

/// DT(μ, c) model `diag_from_measure(μ) + c · sample_ut`.
pub fn build_dt(mu: &RadialMeasure, c: f64, n: usize, seed: u64) -> Result<MatrixModel, MatrixError> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(MatrixError::InvalidParameter(format!("c = {c}")));
    }
    let d = diag_from_measure(mu, n, seed::derive(seed, STREAM_DIAGONAL))?;
    let t = sample_ut(n, seed::derive(seed, STREAM_TRIANGLE));
    let z = &d + &t * c64(c, 0.0);
    Ok(MatrixModel {
        z,
        d,
        t,
        c,
        blocks: Vec::new(),
    })
}

fn partition_labels(n: usize, projections: &[CMatrix]) -> Result<Vec<usize>, MatrixError> {
    let mut labels = vec![usize::MAX; n];
    for (k, p) in projections.iter().enumerate() {
        if p.nrows() != n || p.ncols() != n {
            return Err(MatrixError::DimensionMismatch(format!(
                "projection {k} is {}x{}, expected {n}x{n}",
                p.nrows(),
                p.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = p[(i, j)];
                let ok = if i == j {
                    v == c64(0.0, 0.0) || v == c64(1.0, 0.0)
                } else {
                    v == c64(0.0, 0.0)
                };
                if !ok {
                    return Err(MatrixError::InvalidParameter(format!(
                        "projection {k} is not a diagonal 0/1 matrix"
                    )));
                }
            }
            if p[(i, i)] == c64(1.0, 0.0) {
                if labels[i] != usize::MAX {
                    return Err(MatrixError::InvalidParameter(format!(
                        "projections overlap at index {i}"
                    )));
                }
                labels[i] = k;
            }
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(MatrixError::InvalidParameter(
            "projections do not sum to the identity".into(),
        ));
    }
    Ok(labels)
}

/// `Y = Σ pᵢ X̃ pᵢ + Σ_{i<j} (pᵢ X pⱼ + pⱼ X pᵢ)` for a partition of the
/// identity into diagonal projections.
pub fn semicircular_mix(xtilde: &CMatrix, x: &CMatrix, projections: &[CMatrix]) -> Result<CMatrix, MatrixError> {
    let n = x.nrows();
    if xtilde.shape() != x.shape() || x.nrows() != x.ncols() {
        return Err(MatrixError::DimensionMismatch(format!(
            "X̃ is {:?}, X is {:?}",
            xtilde.shape(),
            x.shape()
        )));
    }
    let labels = partition_labels(n, projections)?;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            xtilde[(i, j)]
        } else {
            x[(i, j)]
        }
    }))
}

/// Block upper triangular model: diagonal blocks are DT(μᵢ, c√tᵢ) models of
/// apportioned size ≈ tᵢN, the triangular part is cut from the semicircular
/// mixture of two independent GUE samples.
pub fn build_block_dt(parts: &[(RadialMeasure, f64)], c: f64, n: usize, seed: u64) -> Result<MatrixModel, MatrixError> {
    if parts.is_empty() {
        return Err(MatrixError::InvalidParameter("no parts".into()));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(MatrixError::InvalidParameter(format!("c = {c}")));
    }
    let weights: Vec<f64> = parts.iter().map(|p| p.1).collect();
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(MatrixError::InvalidParameter("part weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(MatrixError::InvalidParameter(format!("part weights sum to {total}")));
    }
    let sizes = apportion(&weights, n)?;
    if let Some(k) = sizes.iter().position(|&m| m < 2) {
        return Err(MatrixError::BlockTooSmall {
            block: k,
            size: sizes[k],
        });
    }
    let mut blocks = Vec::with_capacity(parts.len());
    let mut start = 0;
    for (&len, &weight) in sizes.iter().zip(&weights) {
        blocks.push(ModelBlock { start, len, weight });
        start += len;
    }
    let mut diag = Vec::with_capacity(n);
    for (k, ((mu, _), blk)) in parts.iter().zip(&blocks).enumerate() {
        let s = seed::derive(seed, STREAM_BLOCK_DIAGONALS + k as u64);
        diag.extend(diag_entries(mu, blk.len, s)?);
    }
    let xtilde = sample_gue(n, seed::derive(seed, STREAM_MIX_DIAGONAL));
    let x = sample_gue(n, seed::derive(seed, STREAM_MIX_OFF_DIAGONAL));
    let projections: Vec<CMatrix> = blocks.iter().map(|b| b.projection(n)).collect();
    let y = semicircular_mix(&xtilde, &x, &projections)?;
    let t = strict_upper(&y);
    let d = diagonal_matrix(&diag);
    let z = &d + &t * c64(c, 0.0);
    Ok(MatrixModel { z, d, t, c, blocks })
}

/// Diagonal matrix `diag(f(i/N))`, `i = 0, …, N−1`.
pub fn diagonal_from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> CMatrix {
    let entries: Vec<Complex64> = (0..n).map(|i| c64(f(i as f64 / n as f64), 0.0)).collect();
    diagonal_matrix(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_lab::linalg::{matmul, normalized_trace, power};

    #[test]
    fn samplers_are_deterministic() {
        assert_eq!(sample_gue(9, 5), sample_gue(9, 5));
        assert_eq!(sample_ut(9, 5), sample_ut(9, 5));
        assert_ne!(sample_ut(9, 5), sample_ut(9, 6));
    }

    #[test]
    fn gue_is_hermitian_and_ut_nilpotent() {
        let x = sample_gue(17, 1);
        assert_eq!(x, x.adjoint());
        let t = sample_ut(17, 1);
        assert_eq!(power(&t, 17), CMatrix::zeros(17, 17));
        assert!((0..17).all(|j| (j..17).all(|i| t[(i, j)] == c64(0.0, 0.0))));
    }

    #[test]
    fn ut_second_moment_mean() {
        let n = 64;
        let trials = 200;
        let mean: f64 = (0..trials)
            .map(|s| {
                let t = sample_ut(n, s);
                normalized_trace(&matmul(&t.adjoint(), &t)).re
            })
            .sum::<f64>()
            / trials as f64;
        let expected = (n as f64 - 1.0) / (2.0 * n as f64);
        assert!((mean - expected).abs() < 0.01, "{mean} vs {expected}");
    }

    #[test]
    fn apportionment_examples() {
        assert_eq!(apportion(&[0.5, 0.5], 8).unwrap(), vec![4, 4]);
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 10).unwrap(), vec![4, 3, 3]);
        assert_eq!(apportion(&[0.7, 0.2, 0.1], 7).unwrap().iter().sum::<usize>(), 7);
        assert!(matches!(
            apportion(&[0.99, 0.01], 10),
            Err(MatrixError::Resolution { atom: 1, .. })
        ));
    }

    #[test]
    fn diagonal_realizations() {
        let circle = RadialMeasure::circle(1.0).unwrap();
        let e = diag_entries(&circle, 4, 3).unwrap();
        for k in 0..4 {
            assert!((e[k].norm() - 1.0).abs() < 1e-15);
            let step = (e[(k + 1) % 4] / e[k]).arg();
            assert!((step - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
        let two = RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).unwrap();
        let e = diag_entries(&two, 8, 0).unwrap();
        assert_eq!(e.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-14).count(), 4);
        assert_eq!(e.iter().filter(|z| (z.norm() - 2.0).abs() < 1e-14).count(), 4);
        let second: f64 = e.iter().map(|z| z.norm_sqr()).sum::<f64>() / 8.0;
        assert!((second - two.radial_moment(1)).abs() < 1e-12);
    }

    #[test]
    fn dt_models() {
        let two = RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).unwrap();
        let m = build_dt(&two, 0.0, 16, 2).unwrap();
        assert_eq!(m.z, m.d);
        let q = build_dt(&RadialMeasure::circle(0.0).unwrap(), 1.0, 16, 2).unwrap();
        assert_eq!(q.z, q.t);
        assert!(build_dt(&two, 1.0, 16, 2).unwrap().assembly_residual() < 1e-12);
    }

    #[test]
    fn block_model_structure() {
        let a = RadialMeasure::circle(1.0).unwrap();
        let b = RadialMeasure::circle(2.0).unwrap();
        let m = build_block_dt(&[(a, 0.5), (b, 0.5)], 1.0, 20, 4).unwrap();
        let ps = m.projections();
        let lower = matmul(&matmul(&ps[1], &m.z), &ps[0]);
        assert_eq!(lower, CMatrix::zeros(20, 20));
        assert_eq!(normalized_trace(&ps[0]), c64(0.5, 0.0));
        assert!(m.assembly_residual() < 1e-12);
        let tiny = RadialMeasure::circle(1.0).unwrap();
        assert!(matches!(
            build_block_dt(&[(tiny.clone(), 0.95), (tiny, 0.05)], 1.0, 20, 0),
            Err(MatrixError::BlockTooSmall { block: 1, .. })
        ));
    }

    #[test]
    fn mix_with_identity_projection_is_xtilde() {
        let xt = sample_gue(6, 1);
        let x = sample_gue(6, 2);
        let y = semicircular_mix(&xt, &x, &[CMatrix::identity(6, 6)]).unwrap();
        assert_eq!(y, xt);
        let y2 = semicircular_mix(&xt, &x, &[block_projection(6, 0..3), block_projection(6, 3..6)]).unwrap();
        assert_eq!(y2, y2.adjoint());
        assert_eq!(y2[(0, 4)], x[(0, 4)]);
        assert_eq!(y2[(4, 5)], xt[(4, 5)]);
        assert!(semicircular_mix(&xt, &x, &[block_projection(6, 0..3)]).is_err());
    }
}
