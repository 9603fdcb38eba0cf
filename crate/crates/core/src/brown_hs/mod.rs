//! Empirical Brown measures, Haagerup–Schultz projections and angles for
//! finite matrices.
//!
//! For an `N×N` matrix with normalized trace the Brown measure is the
//! eigenvalue counting measure, and the Haagerup–Schultz projection for a
//! region `B` is the orthogonal projection onto the sum of the generalized
//! eigenspaces with eigenvalues in `B`. That subspace is spanned by the
//! leading Schur vectors after reordering the Schur form so that those
//! eigenvalues come first.

pub mod region;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::matrix_lab::linalg::{
    self, adjoint_mul, condition_number, hausdorff_distance, hermitian_max_eigenvalue, inverse, join, matmul,
    max_cosine, meet, op_norm, orthonormal_basis, projector, reorder_schur, schur, subspace_distance, CMatrix,
    LinalgError, SchurForm,
};
pub use region::Region;

/// Eigenvalues closer than this to a region boundary are not classified.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// Singular-value cutoff when forming joins and meets of subspaces.
pub const SUBSPACE_RANK_TOLERANCE: f64 = 1e-7;
pub const LATTICE_TOLERANCE: f64 = 1e-8;
pub const SIMILARITY_TOLERANCE: f64 = 1e-6;
pub const MAX_SIMILARITY_CONDITION: f64 = 1e8;

#[derive(Debug, Error)]
pub enum HsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("boundary ambiguity: eigenvalue {eigenvalue} lies within {distance:e} of the region boundary")]
    BoundaryAmbiguity { eigenvalue: Complex64, distance: f64 },
    #[error("projection has rank zero")]
    ZeroProjection,
    #[error("similarity is too ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("vector must have unit norm, got {0}")]
    NotNormalized(f64),
}

/// Eigenvalues of `z`, i.e. the atoms of its empirical Brown measure.
pub fn brown_empirical(z: &CMatrix) -> Result<Vec<Complex64>, HsError> {
    Ok(schur(z)?.eigenvalues())
}

/// Fraction of eigenvalues lying in `region`.
pub fn brown_mass(eigenvalues: &[Complex64], region: &Region) -> f64 {
    let count = eigenvalues.iter().filter(|&&z| region.contains(z)).count();
    count as f64 / eigenvalues.len().max(1) as f64
}

/// Orthogonal projection onto an invariant subspace, stored as an
/// orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct HSProjection {
    pub basis: CMatrix,
    pub region: Region,
    /// Number of eigenvalues of the source matrix in the region.
    pub eigen_count: usize,
}

impl HSProjection {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn matrix(&self) -> CMatrix {
        projector(&self.basis)
    }

    /// `τ_N(P)`.
    pub fn trace(&self) -> f64 {
        self.rank() as f64 / self.dim().max(1) as f64
    }
}

fn check_boundary(form: &SchurForm, region: &Region) -> Result<(), HsError> {
    for z in form.eigenvalues() {
        let distance = region.boundary_distance(z);
        if distance < BOUNDARY_TOLERANCE {
            return Err(HsError::BoundaryAmbiguity {
                eigenvalue: z,
                distance,
            });
        }
    }
    Ok(())
}

/// `P(Z, B)` from a precomputed Schur form of `Z`.
pub fn hs_projection_from_schur(form: &SchurForm, region: &Region) -> Result<HSProjection, HsError> {
    region.validate()?;
    check_boundary(form, region)?;
    let (reordered, k) = reorder_schur(form, |z| region.contains(z))?;
    Ok(HSProjection {
        basis: reordered.leading_basis(k),
        region: region.clone(),
        eigen_count: k,
    })
}

pub fn hs_projection(z: &CMatrix, region: &Region) -> Result<HSProjection, HsError> {
    hs_projection_from_schur(&schur(z)?, region)
}

/// `‖(1 − P) Z P‖`.
pub fn invariance_residual(z: &CMatrix, p: &HSProjection) -> f64 {
    if p.rank() == 0 {
        return 0.0;
    }
    let zv = matmul(z, &p.basis);
    op_norm(&(&zv - matmul(&p.basis, &adjoint_mul(&p.basis, &zv))))
}

/// Cosine of the minimal angle between the ranges: `‖Q P‖`.
pub fn angle_cos(p: &HSProjection, q: &HSProjection) -> Result<f64, HsError> {
    if p.rank() == 0 || q.rank() == 0 {
        return Err(HsError::ZeroProjection);
    }
    Ok(max_cosine(&p.basis, &q.basis))
}

/// Largest eigenvalue of `P Q P`, formed from the dense projections.
pub fn pqp_max_eigenvalue(p: &HSProjection, q: &HSProjection) -> f64 {
    let pm = p.matrix();
    hermitian_max_eigenvalue(&matmul(&matmul(&pm, &q.matrix()), &pm))
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub union_distance: f64,
    pub intersection_distance: f64,
    pub union_rank: usize,
    pub intersection_rank: usize,
    pub pass: bool,
}

/// Compares `P(Z, B₁ ∪ B₂)` with `P(Z, B₁) ∨ P(Z, B₂)` and `P(Z, B₁ ∩ B₂)`
/// with `P(Z, B₁) ∧ P(Z, B₂)`.
pub fn check_lattice(z: &CMatrix, b1: &Region, b2: &Region) -> Result<LatticeReport, HsError> {
    let form = schur(z)?;
    check_lattice_from_schur(&form, b1, b2)
}

pub fn check_lattice_from_schur(form: &SchurForm, b1: &Region, b2: &Region) -> Result<LatticeReport, HsError> {
    let p1 = hs_projection_from_schur(form, b1)?;
    let p2 = hs_projection_from_schur(form, b2)?;
    let pu = hs_projection_from_schur(form, &Region::union(vec![b1.clone(), b2.clone()]))?;
    let pi = hs_projection_from_schur(form, &Region::intersect(vec![b1.clone(), b2.clone()]))?;
    let joined = join(&p1.basis, &p2.basis, SUBSPACE_RANK_TOLERANCE);
    let met = meet(&p1.basis, &p2.basis, SUBSPACE_RANK_TOLERANCE);
    let union_distance = subspace_distance(&pu.basis, &joined);
    let intersection_distance = subspace_distance(&pi.basis, &met);
    Ok(LatticeReport {
        union_distance,
        intersection_distance,
        union_rank: pu.rank(),
        intersection_rank: pi.rank(),
        pass: union_distance < LATTICE_TOLERANCE && intersection_distance < LATTICE_TOLERANCE,
    })
}

/// Whether `ran P ⊆ ran Q`, measured as `‖(1 − Q) V_P‖`.
pub fn containment_residual(p: &HSProjection, q: &HSProjection) -> f64 {
    if p.rank() == 0 {
        return 0.0;
    }
    let vp = &p.basis;
    op_norm(&(vp - matmul(&q.basis, &adjoint_mul(&q.basis, vp))))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityReport {
    pub condition: f64,
    pub eigenvalue_distance: f64,
    pub eigenvalue_tolerance: f64,
    pub subspace_distance: f64,
    pub pass: bool,
}

/// Checks that `A Z A⁻¹` has the eigenvalues of `Z` and that
/// `ran P(A Z A⁻¹, B) = A · ran P(Z, B)`.
pub fn check_similarity(z: &CMatrix, a: &CMatrix, region: &Region) -> Result<SimilarityReport, HsError> {
    let cond = condition_number(a);
    if !(cond < MAX_SIMILARITY_CONDITION) {
        return Err(HsError::IllConditioned { cond });
    }
    let a_inv = inverse(a)?;
    let conjugated = matmul(&matmul(a, z), &a_inv);
    let form = schur(z)?;
    let form_conj = schur(&conjugated)?;
    let eigenvalue_distance = hausdorff_distance(&form.eigenvalues(), &form_conj.eigenvalues());
    let eigenvalue_tolerance = SIMILARITY_TOLERANCE * op_norm(z);
    let p = hs_projection_from_schur(&form, region)?;
    let p_conj = hs_projection_from_schur(&form_conj, region)?;
    let mapped = orthonormal_basis(&matmul(a, &p.basis), SUBSPACE_RANK_TOLERANCE);
    let subspace_distance = linalg::subspace_distance(&p_conj.basis, &mapped);
    Ok(SimilarityReport {
        condition: cond,
        eigenvalue_distance,
        eigenvalue_tolerance,
        subspace_distance,
        pass: eigenvalue_distance < eigenvalue_tolerance && subspace_distance < SIMILARITY_TOLERANCE,
    })
}

/// `‖(T*ⁿ Tⁿ)^{1/2n}‖ = ‖Tⁿ‖^{1/n}` for `n = 1, …, n_max`.
pub fn sot_qn_decay(t: &CMatrix, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max);
    let mut power = t.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = matmul(&power, t);
        }
        out.push(op_norm(&power).powf(1.0 / n as f64));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCertificate {
    pub radius: f64,
    pub sequence: Vec<f64>,
    pub tail_max: f64,
    pub pass: bool,
}

/// Relative slack allowed on the tail of `‖Zⁿξ‖^{1/n}`.
pub const MEMBERSHIP_SLACK: f64 = 0.05;

/// `‖Zⁿξ‖^{1/n}` for `n = 1, …, n_max`; passes when the maximum over the
/// tail `n > n_max / 2` is at most `r (1 + 5%)`.
pub fn hs_membership_certificate(
    z: &CMatrix,
    r: f64,
    xi: &CMatrix,
    n_max: usize,
) -> Result<MembershipCertificate, HsError> {
    let norm = xi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(HsError::NotNormalized(norm));
    }
    let mut v = xi.clone();
    let mut sequence = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        v = matmul(z, &v);
        let len = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        sequence.push(len.powf(1.0 / n as f64));
    }
    let tail_max = sequence.iter().skip(n_max / 2).copied().fold(0.0, f64::max);
    Ok(MembershipCertificate {
        radius: r,
        sequence,
        tail_max,
        pass: tail_max <= r * (1.0 + MEMBERSHIP_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_lab::linalg::{c64, diagonal_matrix, identity};
    use crate::matrix_lab::sampling::sample_ut;

    fn m2(entries: [[f64; 2]; 2]) -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c64(entries[0][0], 0.0),
                c64(entries[0][1], 0.0),
                c64(entries[1][0], 0.0),
                c64(entries[1][1], 0.0),
            ],
        )
    }

    #[test]
    fn brown_measure_of_diagonal_and_nilpotent() {
        let d = diagonal_matrix(&[c64(1.0, 0.0), c64(0.0, 2.0), c64(-3.0, 0.0)]);
        assert_eq!(
            brown_empirical(&d).unwrap(),
            vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(-3.0, 0.0)]
        );
        let t = sample_ut(8, 1);
        assert!(brown_empirical(&t).unwrap().iter().all(|z| *z == c64(0.0, 0.0)));
    }

    #[test]
    fn projection_examples() {
        let d = diagonal_matrix(&[c64(1.0, 0.0), c64(3.0, 0.0), c64(5.0, 0.0)]);
        let p = hs_projection(&d, &Region::disc(2.0)).unwrap();
        assert_eq!(p.rank(), 1);
        assert!((p.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let all = hs_projection(&d, &Region::All).unwrap();
        assert!(linalg::op_norm(&(all.matrix() - identity(3))) < 1e-14);

        let z = m2([[1.0, 10.0], [0.0, 3.0]]);
        let p = hs_projection(&z, &Region::open_annulus(0.0, 2.0)).unwrap();
        assert_eq!(p.rank(), 1);
        assert!((p.basis[(0, 0)].norm() - 1.0).abs() < 1e-14);
        let q = hs_projection(&z, &Region::annulus(2.5, 4.0)).unwrap();
        assert_eq!(q.rank(), 1);
        assert!(invariance_residual(&z, &q) < 1e-12);
        // Eigenvector of 3 is (10, 2)/|·|.
        let expected = 10.0 / (104.0f64).sqrt();
        assert!((angle_cos(&p, &q).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn boundary_ambiguity_is_reported() {
        let d = diagonal_matrix(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        assert!(matches!(
            hs_projection(&d, &Region::disc(1.0 + 1e-10)),
            Err(HsError::BoundaryAmbiguity { .. })
        ));
    }

    #[test]
    fn angle_examples() {
        let e1 = HSProjection {
            basis: CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(0.0, 0.0)]),
            region: Region::All,
            eigen_count: 1,
        };
        let diag = HSProjection {
            basis: CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(1.0, 0.0)]) * c64(0.5f64.sqrt(), 0.0),
            ..e1.clone()
        };
        let e2 = HSProjection {
            basis: CMatrix::from_column_slice(2, 1, &[c64(0.0, 0.0), c64(1.0, 0.0)]),
            ..e1.clone()
        };
        assert!((angle_cos(&e1, &e1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(angle_cos(&e1, &e2).unwrap(), 0.0);
        assert!((angle_cos(&e1, &diag).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((pqp_max_eigenvalue(&e1, &diag) - 0.5).abs() < 1e-14);
        let zero = HSProjection {
            basis: CMatrix::zeros(2, 0),
            ..e1
        };
        assert!(matches!(angle_cos(&zero, &e2), Err(HsError::ZeroProjection)));
    }

    #[test]
    fn lattice_with_empty_and_nested_regions() {
        let z = m2([[1.0, 1.0], [0.0, 3.0]]);
        let r = check_lattice(&z, &Region::disc(2.0), &Region::Empty).unwrap();
        assert!(r.pass, "{r:?}");
        let small = hs_projection(&z, &Region::disc(2.0)).unwrap();
        let big = hs_projection(&z, &Region::disc(4.0)).unwrap();
        assert!(containment_residual(&small, &big) < 1e-12);
    }

    #[test]
    fn similarity_by_identity_and_unitary() {
        let z = m2([[1.0, 2.0], [0.0, 3.0]]);
        let r = check_similarity(&z, &identity(2), &Region::disc(2.0)).unwrap();
        assert!(r.pass && r.subspace_distance < 1e-14);
        let u = m2([[0.0, 1.0], [1.0, 0.0]]);
        let r = check_similarity(&z, &u, &Region::disc(2.0)).unwrap();
        assert!(r.pass && r.subspace_distance < 1e-10, "{r:?}");
        let bad = m2([[1.0, 0.0], [0.0, 1e-10]]);
        assert!(matches!(
            check_similarity(&z, &bad, &Region::disc(2.0)),
            Err(HsError::IllConditioned { .. })
        ));
    }

    #[test]
    fn quasinilpotent_decay() {
        assert!(sot_qn_decay(&CMatrix::zeros(4, 4), 3).iter().all(|&v| v == 0.0));
        let mut jordan = CMatrix::zeros(4, 4);
        for i in 0..3 {
            jordan[(i, i + 1)] = c64(1.0, 0.0);
        }
        let seq = sot_qn_decay(&jordan, 6);
        assert_eq!(&seq[3..], &[0.0, 0.0, 0.0]);
        assert!((seq[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn membership_certificates() {
        let d = diagonal_matrix(&[c64(0.5, 0.0), c64(2.0, 0.0)]);
        let e1 = CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let e2 = CMatrix::from_column_slice(2, 1, &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        let cert = hs_membership_certificate(&d, 1.0, &e1, 16).unwrap();
        assert!(cert.pass && cert.sequence.iter().all(|&v| (v - 0.5).abs() < 1e-14));
        assert!(!hs_membership_certificate(&d, 1.0, &e2, 16).unwrap().pass);
        assert!(hs_membership_certificate(&d, 1.0, &(e1 * c64(2.0, 0.0)), 16).is_err());
    }
}
