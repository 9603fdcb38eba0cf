//! Dense complex linear algebra services: products, norms, inverses, complex
//! Schur forms with eigenvalue reordering, and subspace geometry.
//!
//! Matrices are `nalgebra` column-major `DMatrix<Complex64>`. Products go
//! through `matrixmultiply::zgemm`, which is several times faster than the
//! generic complex kernel at the sizes used by the experiments.

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

/// Largest admissible 1-norm condition number for [`inverse`].
pub const MAX_CONDITION: f64 = 1e12;
/// Largest admissible `‖A A⁻¹ − I‖₁` for [`inverse`].
pub const MAX_INVERSE_RESIDUAL: f64 = 1e-8;
/// A Schur swap leaving a subdiagonal entry above this multiple of `‖U‖_F`
/// is reported as failed.
pub const SWAP_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is numerically singular (condition estimate {cond:e})")]
    Singular { cond: f64 },
    #[error("inverse is inaccurate (residual {residual:e})")]
    InaccurateInverse { residual: f64 },
    #[error("Schur iteration did not converge")]
    SchurNoConvergence,
    #[error("Schur reordering swap at position {position} failed (residual {residual:e})")]
    ReorderFailed { position: usize, residual: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn ensure_square(a: &CMatrix) -> Result<usize, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &CMatrix) -> Result<(), LinalgError> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

fn gemm(a: &CMatrix, adj_a: bool, b: &CMatrix, adj_b: bool) -> CMatrix {
    let (m, k) = if adj_a {
        (a.ncols(), a.nrows())
    } else {
        (a.nrows(), a.ncols())
    };
    let (kb, n) = if adj_b {
        (b.ncols(), b.nrows())
    } else {
        (b.nrows(), b.ncols())
    };
    assert_eq!(k, kb, "inner dimensions differ in matrix product");
    let mut c = CMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // zgemm has no conjugation option: conjugate a copy and read it with
    // transposed strides.
    let a_conj;
    let a = if adj_a {
        a_conj = a.map(|z| z.conj());
        &a_conj
    } else {
        a
    };
    let b_conj;
    let b = if adj_b {
        b_conj = b.map(|z| z.conj());
        &b_conj
    } else {
        b
    };
    let lda = a.nrows() as isize;
    let ldb = b.nrows() as isize;
    let (rsa, csa) = if adj_a { (lda, 1) } else { (1, lda) };
    let (rsb, csb) = if adj_b { (ldb, 1) } else { (1, ldb) };
    // SAFETY: `Complex64` is `repr(C)` with layout `[f64; 2]`; the strides
    // describe the contiguous column-major storage of `a`, `b` and `c`, and
    // `c` does not alias the inputs.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            rsa,
            csa,
            b.as_ptr() as *const [f64; 2],
            rsb,
            csb,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// `A B`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    gemm(a, false, b, false)
}

/// `A* B`.
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    gemm(a, true, b, false)
}

/// `A B*`.
pub fn mul_adjoint(a: &CMatrix, b: &CMatrix) -> CMatrix {
    gemm(a, false, b, true)
}

/// `A^k` by repeated squaring.
pub fn power(a: &CMatrix, mut k: u32) -> CMatrix {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = matmul(&result, &base);
        }
        k >>= 1;
        if k > 0 {
            base = matmul(&base, &base);
        }
    }
    result
}

/// `τ_N(A) = Tr(A)/N`.
pub fn normalized_trace(a: &CMatrix) -> Complex64 {
    let n = a.nrows().max(1) as f64;
    a.diagonal().iter().sum::<Complex64>() / n
}

/// `τ_N(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let n = a.nrows().max(1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc / n
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `‖A‖₂ = τ_N(A*A)^{1/2}`, the norm of the GNS vector of `A`.
pub fn gns_norm(a: &CMatrix) -> f64 {
    (frobenius_sq(a) / a.nrows().max(1) as f64).sqrt()
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU-based inverse with a 1-norm condition cutoff and a residual check.
pub fn inverse(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    let inv = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or(LinalgError::Singular { cond: f64::INFINITY })?;
    ensure_finite(&inv).map_err(|_| LinalgError::Singular { cond: f64::INFINITY })?;
    let cond = norm1(a) * norm1(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(LinalgError::Singular { cond });
    }
    let residual = norm1(&(matmul(a, &inv) - identity(n)));
    if residual > MAX_INVERSE_RESIDUAL {
        return Err(LinalgError::InaccurateInverse { residual });
    }
    Ok(inv)
}

/// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`; infinite when singular.
pub fn condition_number(a: &CMatrix) -> f64 {
    match a.clone().lu().try_inverse() {
        Some(inv) => norm1(a) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Complex Schur form `A = Q U Q*` with `Q` unitary and `U` upper triangular.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub q: CMatrix,
    pub u: CMatrix,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.u.diagonal().iter().copied().collect()
    }

    /// `Q U Q*`.
    pub fn reconstruct(&self) -> CMatrix {
        mul_adjoint(&matmul(&self.q, &self.u), &self.q)
    }

    /// First `k` Schur vectors, an orthonormal basis of the invariant
    /// subspace belonging to the first `k` diagonal entries.
    pub fn leading_basis(&self, k: usize) -> CMatrix {
        self.q.columns(0, k).into_owned()
    }

    /// Trailing `n - k` Schur vectors.
    pub fn trailing_basis(&self, k: usize) -> CMatrix {
        self.q.columns(k, self.dim() - k).into_owned()
    }
}

fn is_upper_triangular(a: &CMatrix) -> bool {
    (0..a.ncols()).all(|j| (j + 1..a.nrows()).all(|i| a[(i, j)] == Complex64::new(0.0, 0.0)))
}

pub fn schur(a: &CMatrix) -> Result<SchurForm, LinalgError> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if is_upper_triangular(a) {
        return Ok(SchurForm {
            q: identity(n),
            u: a.clone(),
        });
    }
    let decomposition =
        Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(10)).ok_or(LinalgError::SchurNoConvergence)?;
    let (q, mut u) = decomposition.unpack();
    let scale = frobenius_sq(a).sqrt().max(f64::MIN_POSITIVE);
    for j in 0..n {
        for i in j + 1..n {
            if u[(i, j)].norm() > 1e-10 * scale {
                return Err(LinalgError::SchurNoConvergence);
            }
            u[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    ensure_finite(&q)?;
    ensure_finite(&u)?;
    Ok(SchurForm { q, u })
}

/// Exchanges the adjacent diagonal entries `j` and `j + 1` of `U` by a
/// unitary rotation, updating `Q` so that `Q U Q*` is unchanged.
fn swap_adjacent(form: &mut SchurForm, j: usize, scale: f64) -> Result<(), LinalgError> {
    let n = form.dim();
    let a = form.u[(j, j)];
    let b = form.u[(j + 1, j + 1)];
    let x = form.u[(j, j + 1)];
    let gap = b - a;
    let r = x.norm().hypot(gap.norm());
    if r == 0.0 {
        return Ok(());
    }
    // (c, s) is the unit eigenvector of [[a, x], [0, b]] for eigenvalue b.
    let c = x / r;
    let s = gap / r;
    let u = &mut form.u;
    for m in j..n {
        let (p, q) = (u[(j, m)], u[(j + 1, m)]);
        u[(j, m)] = c.conj() * p + s.conj() * q;
        u[(j + 1, m)] = -s * p + c * q;
    }
    for m in 0..(j + 2) {
        let (p, q) = (u[(m, j)], u[(m, j + 1)]);
        u[(m, j)] = p * c + q * s;
        u[(m, j + 1)] = -p * s.conj() + q * c.conj();
    }
    let residual = u[(j + 1, j)].norm();
    if residual > SWAP_TOLERANCE * scale {
        return Err(LinalgError::ReorderFailed { position: j, residual });
    }
    u[(j + 1, j)] = Complex64::new(0.0, 0.0);
    u[(j, j)] = b;
    u[(j + 1, j + 1)] = a;
    let qm = &mut form.q;
    for m in 0..n {
        let (p, q) = (qm[(m, j)], qm[(m, j + 1)]);
        qm[(m, j)] = p * c + q * s;
        qm[(m, j + 1)] = -p * s.conj() + q * c.conj();
    }
    Ok(())
}

/// Reorders a Schur form so that the eigenvalues satisfying `select` occupy
/// the leading `k` diagonal positions, preserving their relative order.
/// Returns the reordered form and `k`.
pub fn reorder_schur<F>(form: &SchurForm, mut select: F) -> Result<(SchurForm, usize), LinalgError>
where
    F: FnMut(Complex64) -> bool,
{
    let n = form.dim();
    let mut out = form.clone();
    let scale = frobenius_sq(&form.u).sqrt().max(f64::MIN_POSITIVE);
    let mut k = 0;
    for i in 0..n {
        if select(out.u[(i, i)]) {
            for j in (k..i).rev() {
                swap_adjacent(&mut out, j, scale)?;
            }
            k += 1;
        }
    }
    Ok((out, k))
}

/// Orthonormal basis of the column span of `a`, keeping directions whose
/// singular value exceeds `tol`.
pub fn orthonormal_basis(a: &CMatrix, tol: f64) -> CMatrix {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return CMatrix::zeros(n, 0);
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let mut basis = CMatrix::zeros(n, order.len());
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &u.column(src));
    }
    basis
}

/// Cosines of the principal angles between the spans of two orthonormal
/// bases, descending.
pub fn principal_cosines(va: &CMatrix, vb: &CMatrix) -> Vec<f64> {
    singular_values(&adjoint_mul(va, vb))
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect()
}

/// Cosine of the minimal angle: `sup |⟨v, w⟩|` over unit `v`, `w` in the
/// two spans.
pub fn max_cosine(va: &CMatrix, vb: &CMatrix) -> f64 {
    principal_cosines(va, vb).first().copied().unwrap_or(0.0)
}

/// Sine of the largest principal angle between equal-dimensional spans;
/// `1` when the dimensions differ.
pub fn subspace_distance(va: &CMatrix, vb: &CMatrix) -> f64 {
    if va.ncols() != vb.ncols() {
        return 1.0;
    }
    if va.ncols() == 0 {
        return 0.0;
    }
    let residual = vb - matmul(va, &adjoint_mul(va, vb));
    op_norm(&residual).clamp(0.0, 1.0)
}

pub fn hcat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Orthonormal basis of `span(va) + span(vb)`.
pub fn join(va: &CMatrix, vb: &CMatrix, tol: f64) -> CMatrix {
    orthonormal_basis(&hcat(va, vb), tol)
}

/// Orthonormal basis of `span(va) ∩ span(vb)` for orthonormal `va`, `vb`:
/// directions of `span(va)` whose distance to `span(vb)` is below `tol`.
pub fn meet(va: &CMatrix, vb: &CMatrix, tol: f64) -> CMatrix {
    let n = va.nrows();
    if va.ncols() == 0 || vb.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let residual = va - matmul(vb, &adjoint_mul(vb, va));
    let svd = SVD::new(residual, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = va.ncols();
    let mut coeffs = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < tol {
            coeffs.push(v_t.row(i).adjoint());
        }
    }
    // Thin SVD of a tall matrix returns exactly `k` right singular vectors.
    debug_assert!(svd.singular_values.len() == k);
    if coeffs.is_empty() {
        return CMatrix::zeros(n, 0);
    }
    let mut w = CMatrix::zeros(k, coeffs.len());
    for (j, col) in coeffs.iter().enumerate() {
        w.set_column(j, col);
    }
    orthonormal_basis(&matmul(va, &w), 0.5)
}

/// `V V*` for an orthonormal basis `V`.
pub fn projector(basis: &CMatrix) -> CMatrix {
    mul_adjoint(basis, basis)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Hausdorff distance between two finite point sets in the plane.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |from: &[Complex64], to: &[Complex64]| {
        from.iter()
            .map(|z| to.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    directed(a, b).max(directed(b, a))
}

/// Square submatrix on the index range `[start, start + len)`.
pub fn diagonal_block(a: &CMatrix, start: usize, len: usize) -> CMatrix {
    a.view((start, start), (len, len)).into_owned()
}

pub fn block(a: &CMatrix, rows: (usize, usize), cols: (usize, usize)) -> CMatrix {
    a.view((rows.0, cols.0), (rows.1, cols.1)).into_owned()
}

pub fn diagonal_matrix(entries: &[Complex64]) -> CMatrix {
    let n = entries.len();
    let mut d = CMatrix::zeros(n, n);
    for (i, z) in entries.iter().enumerate() {
        d[(i, i)] = *z;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(n: usize, m: usize, s: u64) -> CMatrix {
        let mut rng = seed::rng(s);
        CMatrix::from_fn(n, m, |_, _| {
            c64(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
    }

    fn max_abs(a: &CMatrix) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zgemm_products_match_naive() {
        let a = random_matrix(7, 5, 1);
        let b = random_matrix(5, 6, 2);
        let c = random_matrix(7, 6, 3);
        assert!(max_abs(&(matmul(&a, &b) - &a * &b)) < 1e-12);
        assert!(max_abs(&(adjoint_mul(&a, &c) - a.adjoint() * &c)) < 1e-12);
        assert!(max_abs(&(mul_adjoint(&c, &b) - &c * b.adjoint())) < 1e-12);
        assert_eq!(
            matmul(&CMatrix::zeros(3, 0), &CMatrix::zeros(0, 2)),
            CMatrix::zeros(3, 2)
        );
    }

    #[test]
    fn norm_examples() {
        assert!((op_norm(&identity(5)) - 1.0).abs() < 1e-14);
        assert!((gns_norm(&identity(5)) - 1.0).abs() < 1e-14);
        let mut e = CMatrix::zeros(16, 16);
        e[(0, 0)] = c64(1.0, 0.0);
        assert!((gns_norm(&e) - 0.25).abs() < 1e-15);
        assert_eq!(normalized_trace(&identity(4)), c64(1.0, 0.0));
    }

    #[test]
    fn inverse_residual_and_singularity() {
        let a = random_matrix(30, 30, 4) + identity(30) * c64(8.0, 0.0);
        let inv = inverse(&a).unwrap();
        assert!(norm1(&(matmul(&a, &inv) - identity(30))) < 1e-8);
        let mut s = identity(3);
        s[(2, 2)] = c64(0.0, 0.0);
        assert!(matches!(inverse(&s), Err(LinalgError::Singular { .. })));
        let mut near = identity(3);
        near[(2, 2)] = c64(1e-14, 0.0);
        assert!(matches!(inverse(&near), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn schur_of_diagonal_is_trivial() {
        let d = diagonal_matrix(&[c64(3.0, 0.0), c64(-1.0, 2.0), c64(0.5, 0.0)]);
        let f = schur(&d).unwrap();
        assert_eq!(f.u, d);
        assert_eq!(f.q, identity(3));
    }

    #[test]
    fn schur_of_hermitian_is_diagonal() {
        let g = random_matrix(12, 12, 5);
        let h = (&g + g.adjoint()) * c64(0.5, 0.0);
        let f = schur(&h).unwrap();
        for j in 0..12 {
            for i in 0..j {
                assert!(f.u[(i, j)].norm() < 1e-10, "off-diagonal {i},{j}");
            }
        }
    }

    #[test]
    fn schur_reconstructs_random_matrix() {
        let a = random_matrix(20, 20, 6);
        let f = schur(&a).unwrap();
        let scale = op_norm(&a);
        assert!(op_norm(&(f.reconstruct() - &a)) < 1e-8 * scale);
        assert!(op_norm(&(adjoint_mul(&f.q, &f.q) - identity(20))) < 1e-10);
    }

    #[test]
    fn reorder_extremes_and_two_by_two() {
        let a = random_matrix(10, 10, 7);
        let f = schur(&a).unwrap();
        assert_eq!(reorder_schur(&f, |_| true).unwrap().1, 10);
        assert_eq!(reorder_schur(&f, |_| false).unwrap().1, 0);

        let d = diagonal_matrix(&[c64(3.0, 0.0), c64(1.0, 0.0)]);
        let (g, k) = reorder_schur(&schur(&d).unwrap(), |z| z.norm() < 2.0).unwrap();
        assert_eq!(k, 1);
        assert!((g.u[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(op_norm(&(g.reconstruct() - &d)) < 1e-14);
    }

    #[test]
    fn reorder_preserves_similarity_and_selects() {
        let a = random_matrix(25, 25, 8);
        let f = schur(&a).unwrap();
        let (g, k) = reorder_schur(&f, |z| z.norm() < 3.0).unwrap();
        let expected = f.eigenvalues().iter().filter(|z| z.norm() < 3.0).count();
        assert_eq!(k, expected);
        assert!(g.eigenvalues()[..k].iter().all(|z| z.norm() < 3.0));
        assert!(g.eigenvalues()[k..].iter().all(|z| z.norm() >= 3.0));
        assert!(op_norm(&(g.reconstruct() - &a)) < 1e-8 * op_norm(&a));
        // Invariance of the leading block.
        let v = g.leading_basis(k);
        let w = g.trailing_basis(k);
        assert!(op_norm(&adjoint_mul(&w, &matmul(&a, &v))) < 1e-8 * op_norm(&a));
    }

    #[test]
    fn subspace_geometry() {
        let e1 = CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let diag = CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(1.0, 0.0)]) * c64(0.5f64.sqrt(), 0.0);
        let e2 = CMatrix::from_column_slice(2, 1, &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!((max_cosine(&e1, &diag) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(max_cosine(&e1, &e2), 0.0);
        assert!((max_cosine(&e1, &e1) - 1.0).abs() < 1e-15);
        assert!((subspace_distance(&e1, &diag) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(subspace_distance(&e1, &identity(2)), 1.0);
    }

    #[test]
    fn join_and_meet_of_coordinate_planes() {
        let i4 = identity(4);
        let a = i4.columns(0, 2).into_owned();
        let b = i4.columns(1, 2).into_owned();
        assert_eq!(join(&a, &b, 1e-8).ncols(), 3);
        let m = meet(&a, &b, 1e-8);
        assert_eq!(m.ncols(), 1);
        assert!((m[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(meet(&a, &i4.columns(2, 2).into_owned(), 1e-8).ncols(), 0);
    }

    #[test]
    fn power_by_squaring() {
        let a = random_matrix(6, 6, 9) * c64(0.3, 0.0);
        let mut naive = identity(6);
        for _ in 0..13 {
            naive = &naive * &a;
        }
        assert!(max_abs(&(power(&a, 13) - naive)) < 1e-12);
        assert_eq!(power(&a, 0), identity(6));
    }

    #[test]
    fn hermitian_max_eigenvalue_of_projection_product() {
        let p = diagonal_matrix(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert!((hermitian_max_eigenvalue(&p) - 1.0).abs() < 1e-14);
    }
}
