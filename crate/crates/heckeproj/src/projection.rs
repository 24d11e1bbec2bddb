//! Validated Hermitian idempotents on C^(n^2) and their tensor-leg calculus.
//!
//! A [`Projection`] carries its local dimension `n` and cached rank `r`.
//! The embeddings `P_i` place the projection on two adjacent legs of
//! (C^n)^(x strands); the difference operator `K_P = P1 - P2` on C^(n^3)
//! carries the discrete parameter `k = rank(K_P) / 2` and, for solutions,
//! the loop parameter `Q` through its nonzero eigenvalues +-sqrt(1 - 1/Q^2).

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{self, C64, CMatrix, CLUSTER_TOL, RANK_REL_TOL};

/// Hard cap on n^strands for dense embeddings.
pub const EMBED_DIM_CAP: usize = 4096;

/// A validated orthogonal projection (Hermitian idempotent) on C^(n^2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProjection", into = "RawProjection")]
pub struct Projection {
    n: usize,
    mat: CMatrix,
    r: usize,
}

/// JSON form: {"n": .., "mat": [[..]]}; rank is recomputed on load.
#[derive(Serialize, Deserialize)]
struct RawProjection {
    n: usize,
    mat: CMatrix,
}

impl From<Projection> for RawProjection {
    fn from(p: Projection) -> Self {
        RawProjection { n: p.n, mat: p.mat }
    }
}

impl TryFrom<RawProjection> for Projection {
    type Error = String;
    fn try_from(raw: RawProjection) -> std::result::Result<Self, String> {
        let p = validate(&raw.mat, 1e-9).map_err(|e| e.to_string())?;
        if p.n != raw.n {
            return Err(format!("declared n = {}, matrix implies n = {}", raw.n, p.n));
        }
        Ok(p)
    }
}

impl Projection {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// P (x) I_n on C^(n^3).
    pub fn p1(&self) -> CMatrix {
        embed(self, 3, 1).expect("3 strands always fit the cap")
    }

    /// I_n (x) P on C^(n^3).
    pub fn p2(&self) -> CMatrix {
        embed(self, 3, 2).expect("3 strands always fit the cap")
    }

    /// K_P = P1 - P2 on C^(n^3).
    pub fn k_matrix(&self) -> CMatrix {
        &self.p1() - &self.p2()
    }
}

/// Clustered spectrum of K_P together with the derived discrete data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Clustered eigenvalues of K_P, ascending, with multiplicities.
    pub eigs: Vec<(f64, usize)>,
    /// k = rank(K_P) / 2.
    pub k: usize,
    /// Positive nonzero cluster value (0 when K_P = 0).
    pub lambda_plus: f64,
    /// Estimate of Q from lambda_plus = sqrt(1 - 1/Q^2); NaN when the
    /// spectrum is not of solution shape.
    pub q_estimate: f64,
    /// True iff the nonzero clusters are exactly {+lambda, -lambda} for a
    /// single lambda in (0, 1) with equal multiplicities matching k.
    pub is_solution_spectrum: bool,
}

/// Validate a candidate matrix as an orthogonal projection at tolerance `tol`.
pub fn validate(mat: &CMatrix, tol: f64) -> Result<Projection> {
    if !mat.is_square() {
        return Err(Error::BadDimension(format!(
            "expected square matrix, got {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    let dim = mat.rows();
    let n = (dim as f64).sqrt().round() as usize;
    if n < 2 || n * n != dim {
        return Err(Error::BadDimension(format!(
            "size {dim} is not n^2 for an integer n >= 2"
        )));
    }
    let scale = 1.0 + mat.frobenius_norm();
    let herm = mat.hermitian_defect();
    if herm > tol * scale {
        return Err(Error::NotHermitian { defect: herm, tol: tol * scale });
    }
    let idem = (&mat.matmul(mat) - mat).frobenius_norm();
    if idem > tol * scale {
        return Err(Error::NotIdempotent { defect: idem, tol: tol * scale });
    }
    let r = matkit::rank_eps(mat, RANK_REL_TOL);
    let tr = mat.trace().re.round() as usize;
    if r != tr {
        return Err(Error::NotIdempotent {
            defect: (mat.trace().re - r as f64).abs(),
            tol: tol * scale,
        });
    }
    Ok(Projection { n, mat: mat.clone(), r })
}

/// I^(x (site-1)) (x) P (x) I^(x (strands-site-1)), an n^strands matrix.
///
/// The projection occupies legs `site` and `site + 1` (1-based).
pub fn embed(p: &Projection, strands: usize, site: usize) -> Result<CMatrix> {
    embed_two_leg(p.mat(), p.n(), strands, site)
}

/// Same as [`embed`] for an arbitrary two-leg operator on C^(n^2).
pub fn embed_two_leg(op: &CMatrix, n: usize, strands: usize, site: usize) -> Result<CMatrix> {
    if strands < 2 || site == 0 || site > strands - 1 {
        return Err(Error::SiteOutOfRange { site, strands });
    }
    let dim = n.checked_pow(strands as u32).unwrap_or(usize::MAX);
    if dim > EMBED_DIM_CAP {
        return Err(Error::DimensionOverflow { dim, cap: EMBED_DIM_CAP });
    }
    let left = CMatrix::identity(n.pow((site - 1) as u32));
    let right = CMatrix::identity(n.pow((strands - site - 1) as u32));
    Ok(matkit::kron(&matkit::kron(&left, op), &right))
}

/// The dual projection I - P, of rank n^2 - r.
pub fn dual(p: &Projection) -> Projection {
    let mat = &CMatrix::identity(p.dim()) - p.mat();
    Projection { n: p.n(), r: p.dim() - p.rank(), mat }
}

/// Spectrum of K_P = P1 - P2 and the derived parameters.
pub fn k_and_spectrum(p: &Projection) -> Result<SpectralReport> {
    let k_mat = p.k_matrix();
    let rank = matkit::rank_eps(&k_mat, RANK_REL_TOL);
    if rank % 2 != 0 {
        return Err(Error::OddRank { rank });
    }
    let k = rank / 2;
    let eigs = matkit::eig_hermitian(&k_mat, CLUSTER_TOL)?;

    let max_abs = eigs.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max);
    let zero_tol = 1e-6 * (1.0 + max_abs);
    let nonzero: Vec<(f64, usize)> =
        eigs.iter().copied().filter(|(v, _)| v.abs() > zero_tol).collect();

    let mut lambda_plus = nonzero.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max);
    let mut q_estimate = f64::NAN;
    let mut is_solution_spectrum = false;
    if let [(neg, m_neg), (pos, m_pos)] = nonzero.as_slice() {
        let paired = (neg + pos).abs() <= CLUSTER_TOL * (1.0 + pos.abs());
        let lambda_ok = *pos > 0.0 && *pos < 1.0 - 1e-9;
        if paired && lambda_ok && m_neg == m_pos && *m_pos == k {
            lambda_plus = *pos;
            q_estimate = 1.0 / (1.0 - pos * pos).sqrt();
            is_solution_spectrum = true;
        }
    }

    Ok(SpectralReport { eigs, k, lambda_plus, q_estimate, is_solution_spectrum })
}

/// Seed-deterministic Haar-like random projection of rank r on C^(n^2).
///
/// P = U U* where U orthonormalizes an n^2 x r complex Gaussian sample.
pub fn random_projection(n: usize, r: usize, seed: u64) -> Result<Projection> {
    let dim = n * n;
    if r > dim {
        return Err(Error::BadRank { n, r });
    }
    if r == 0 {
        return Ok(Projection { n, mat: CMatrix::zeros(dim, dim), r: 0 });
    }
    if r == dim {
        return Ok(Projection { n, mat: CMatrix::identity(dim), r: dim });
    }
    let u = random_isometry(dim, r, seed)?;
    let mat = u.matmul(&u.adjoint());
    validate(&mat, 1e-10)
}

/// Seeded complex Gaussian matrix orthonormalized by sign-fixed QR.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let g = CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    matkit::orthonormal_columns(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::kron;

    #[test]
    fn validate_trivial_cases() {
        let zero = validate(&CMatrix::zeros(4, 4), 1e-9).unwrap();
        assert_eq!((zero.n(), zero.rank()), (2, 0));
        let id = validate(&CMatrix::identity(9), 1e-9).unwrap();
        assert_eq!((id.n(), id.rank()), (3, 9));
    }

    #[test]
    fn validate_rejects_half_identity() {
        let half = CMatrix::identity(4).scale_re(0.5);
        assert!(matches!(validate(&half, 1e-9), Err(Error::NotIdempotent { .. })));
    }

    #[test]
    fn validate_rejects_non_square_sizes() {
        assert!(matches!(validate(&CMatrix::identity(5), 1e-9), Err(Error::BadDimension(_))));
        assert!(matches!(validate(&CMatrix::zeros(3, 4), 1e-9), Err(Error::BadDimension(_))));
    }

    #[test]
    fn embed_site_one_is_kron_with_identity() {
        let p = random_projection(2, 2, 3).unwrap();
        let p1 = embed(&p, 3, 1).unwrap();
        assert!(p1.max_diff(&kron(p.mat(), &CMatrix::identity(2))) < 1e-15);
    }

    #[test]
    fn embed_trace_is_rn() {
        let p = random_projection(2, 3, 5).unwrap();
        let p2 = embed(&p, 3, 2).unwrap();
        assert!((p2.trace().re - 3.0 * 2.0).abs() < 1e-10);
    }

    #[test]
    fn far_embeddings_commute() {
        let p = random_projection(2, 2, 9).unwrap();
        let e1 = embed(&p, 4, 1).unwrap();
        let e3 = embed(&p, 4, 3).unwrap();
        assert!(e1.matmul(&e3).max_diff(&e3.matmul(&e1)) < 1e-13);
    }

    #[test]
    fn embed_range_and_cap() {
        let p = random_projection(2, 1, 1).unwrap();
        assert!(matches!(embed(&p, 3, 3), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(embed(&p, 13, 1), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn dual_involution_and_rank() {
        let zero = validate(&CMatrix::zeros(4, 4), 1e-9).unwrap();
        let d = dual(&zero);
        assert_eq!(d.rank(), 4);
        assert!(d.mat().max_diff(&CMatrix::identity(4)) < 1e-15);
        let p = random_projection(2, 2, 11).unwrap();
        let dd = dual(&dual(&p));
        assert!(dd.mat().max_diff(p.mat()) < 1e-15);
    }

    #[test]
    fn k_spectrum_of_identity_is_zero() {
        let id = validate(&CMatrix::identity(4), 1e-9).unwrap();
        let report = k_and_spectrum(&id).unwrap();
        assert_eq!(report.k, 0);
        assert_eq!(report.lambda_plus, 0.0);
        assert!(!report.is_solution_spectrum);
        assert_eq!(report.eigs.iter().map(|(_, m)| m).sum::<usize>(), 8);
    }

    #[test]
    fn random_projection_trivial_ranks() {
        let z = random_projection(2, 0, 7).unwrap();
        assert_eq!(z.mat().frobenius_norm(), 0.0);
        let id = random_projection(2, 4, 7).unwrap();
        assert!(id.mat().max_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn random_projection_validates_and_is_deterministic() {
        for r in 1..4 {
            let p = random_projection(2, r, 42).unwrap();
            assert_eq!(p.rank(), r);
            assert!(validate(p.mat(), 1e-10).is_ok());
        }
        let a = random_projection(3, 4, 123).unwrap();
        let b = random_projection(3, 4, 123).unwrap();
        assert_eq!(a.mat().max_diff(b.mat()), 0.0);
        let c = random_projection(3, 4, 124).unwrap();
        assert!(a.mat().max_diff(c.mat()) > 1e-3);
    }

    #[test]
    fn rank_of_p1_minus_p3_identity() {
        // rank(P (x) I_m - I_m (x) P) = 2 m rank(P) - 2 rank(P)^2 for idempotents.
        for (n, r, seed) in [(2usize, 1usize, 1u64), (2, 2, 2), (2, 3, 3)] {
            let p = random_projection(n, r, seed).unwrap();
            let m = n * n;
            let p1 = kron(p.mat(), &CMatrix::identity(m));
            let p3 = kron(&CMatrix::identity(m), p.mat());
            let rank = matkit::rank_eps(&(&p1 - &p3), RANK_REL_TOL);
            assert_eq!(rank, 2 * m * r - 2 * r * r);
        }
    }

    #[test]
    fn projection_json_round_trip() {
        let p = random_projection(2, 2, 77).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: Projection = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n(), 2);
        assert_eq!(back.rank(), 2);
        assert!(back.mat().max_diff(p.mat()) < 1e-15);
    }
}
