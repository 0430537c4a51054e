//! Factorizations and sampling on dense complex matrices: SVD, Hermitian
//! eigendecomposition, PSD square roots, nullspace bases, Haar-random
//! unitaries, complex Schur eigenpairs, and polar factors.
//!
//! All rank decisions use a relative singular-value threshold
//! `eps_rank · σ_max · max_dim`. Empty matrices (zero rows or columns) are
//! handled explicitly so callers never special-case degenerate blocks.

use nalgebra::SymmetricEigen;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::matrix::{
    c, ensure_finite, hermitian_defect, phase_canonicalize, pivoted_orthonormal_basis,
    unitarity_defect, CMatrix, CVector, C64,
};
use crate::seeding::{complex_gaussian_matrix, rng_from_seed};

const SVD_MAX_ITER: usize = 10_000;
const SCHUR_MAX_ITER: usize = 10_000;

/// Thin singular value decomposition `m = u · diag(s) · v*`.
///
/// `u` is rows×k and `v` is cols×k with orthonormal columns, k = min(rows,
/// cols); `s` is nonincreasing and nonnegative.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values above the relative threshold.
    pub fn rank(&self, eps_rank: f64, max_dim: usize) -> usize {
        rank_from_singular_values(&self.s, eps_rank, max_dim)
    }

    /// `u`, `v` restricted to the first `k` columns and `s` to its first
    /// `k` entries.
    pub fn truncate(&self, k: usize) -> (CMatrix, Vec<f64>, CMatrix) {
        (
            self.u.columns(0, k).into_owned(),
            self.s[..k].to_vec(),
            self.v.columns(0, k).into_owned(),
        )
    }
}

pub fn rank_from_singular_values(s: &[f64], eps_rank: f64, max_dim: usize) -> usize {
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let tol = eps_rank * sigma_max * max_dim.max(1) as f64;
    s.iter().filter(|&&x| x > tol).count()
}

/// Thin SVD with descending singular values.
///
/// The factorization is verified (reconstruction and orthonormality)
/// before it is returned. The primary engine occasionally converges to a
/// wrong factorization on matrices with maximally degenerate spectra —
/// which partial isometries always have — so a failed verification falls
/// back to the Hermitian eigendecomposition of the Jordan–Wielandt
/// embedding `[[0, M], [M*, 0]]`, which is solid on exactly those inputs.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    ensure_finite(m)?;
    let (rows, cols) = (m.nrows(), m.ncols());
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        });
    }
    if let Some(f) = m.clone().try_svd(true, true, 1e-13, SVD_MAX_ITER) {
        if let (Some(u), Some(v_t)) = (f.u, f.v_t) {
            let v = v_t.adjoint();
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| {
                f.singular_values[b]
                    .partial_cmp(&f.singular_values[a])
                    .expect("singular values are finite")
            });
            let mut su = CMatrix::zeros(rows, k);
            let mut sv = CMatrix::zeros(cols, k);
            let mut s = Vec::with_capacity(k);
            for (dst, &src) in order.iter().enumerate() {
                su.column_mut(dst).copy_from(&u.column(src));
                sv.column_mut(dst).copy_from(&v.column(src));
                s.push(f.singular_values[src].max(0.0));
            }
            let out = Svd { u: su, s, v: sv };
            if svd_verifies(m, &out) {
                return Ok(out);
            }
        }
    }
    let out = svd_jordan_wielandt(m)?;
    if svd_verifies(m, &out) {
        Ok(out)
    } else {
        Err(Error::FactorizationFailure)
    }
}

fn svd_verifies(m: &CMatrix, f: &Svd) -> bool {
    let k = f.s.len();
    let sigma = CMatrix::from_fn(
        k,
        k,
        |i, j| {
            if i == j {
                c(f.s[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        },
    );
    let recon = (&f.u * sigma * f.v.adjoint() - m).norm();
    let tol = 1e-11 * (m.norm() + 1.0);
    recon <= tol && unitarity_defect(&f.u) <= tol && unitarity_defect(&f.v) <= tol
}

/// SVD through the Hermitian eigenproblem of `[[0, M], [M*, 0]]`, whose
/// positive eigenpairs are `(σ_i, (u_i; v_i)/√2)`. Null directions are
/// completed canonically.
fn svd_jordan_wielandt(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let k = rows.min(cols);
    let dim = rows + cols;
    let mut h = CMatrix::zeros(dim, dim);
    h.view_mut((0, rows), (rows, cols)).copy_from(m);
    h.view_mut((rows, 0), (cols, rows)).copy_from(&m.adjoint());
    let (values, q) = hermitian_eig(&h)?;
    let floor = f64::EPSILON * dim as f64 * values.first().map_or(0.0, |v| v.abs());

    let mut s = Vec::with_capacity(k);
    let mut u = CMatrix::zeros(rows, k);
    let mut v = CMatrix::zeros(cols, k);
    let mut filled = 0usize;
    for (i, &value) in values.iter().enumerate() {
        if filled == k || value <= floor {
            break;
        }
        let col = q.column(i);
        let ui = col.rows(0, rows).into_owned() * c(2.0f64.sqrt(), 0.0);
        let vi = col.rows(rows, cols).into_owned() * c(2.0f64.sqrt(), 0.0);
        s.push(value);
        u.column_mut(filled).copy_from(&ui);
        v.column_mut(filled).copy_from(&vi);
        filled += 1;
    }
    if filled < k {
        // complete the null directions with canonical orthonormal bases
        let ur = u.columns(0, filled).into_owned();
        let pu = CMatrix::identity(rows, rows) - &ur * ur.adjoint();
        let cu = pivoted_orthonormal_basis(&pu, k - filled);
        let vr = v.columns(0, filled).into_owned();
        let pv = CMatrix::identity(cols, cols) - &vr * vr.adjoint();
        let cv = pivoted_orthonormal_basis(&pv, k - filled);
        for j in filled..k {
            s.push(0.0);
            u.column_mut(j).copy_from(&cu.column(j - filled));
            v.column_mut(j).copy_from(&cv.column(j - filled));
        }
    }
    Ok(Svd { u, s, v })
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues (descending)
/// and a unitary eigenvector matrix. The input is hermitized before the
/// solve; validity checks are the caller's business.
pub fn hermitian_eig(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        vectors
            .column_mut(dst)
            .copy_from(&eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Hermitian PSD square root with clamping of slightly negative
/// eigenvalues. Rejects non-Hermitian inputs and eigenvalues below
/// `−eps_rank · |λ|_max`.
pub fn psd_sqrt(h: &CMatrix, cfg: &ToleranceConfig) -> Result<CMatrix> {
    ensure_finite(h)?;
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "psd_sqrt expects a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.nrows() == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let defect = hermitian_defect(h) / (h.norm() + 1.0);
    if defect > cfg.eps_res {
        return Err(Error::NotHermitian { residual: defect });
    }
    let (values, q) = hermitian_eig(h)?;
    let scale = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    // +1 regularization: h is typically a difference of unit-scale
    // matrices, so roundoff sits at absolute scale even when ‖h‖ ≈ 0.
    // Everything inside the threshold band is treated as rank-zero; the
    // square root is not Lipschitz at 0 and would otherwise turn 1e-16
    // noise into 1e-8 output.
    let floor = cfg.eps_rank * (scale + 1.0);
    let mut clamped = Vec::with_capacity(values.len());
    for &v in &values {
        if v < -floor {
            return Err(Error::NotPsd { min_eigenvalue: v });
        }
        clamped.push(if v <= floor { 0.0 } else { v.sqrt() });
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        clamped.len(),
        clamped.iter().map(|&x| c(x, 0.0)),
    ));
    let s = &q * d * q.adjoint();
    Ok((&s + s.adjoint()) * c(0.5, 0.0))
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with
/// the phase convention that makes the R diagonal real positive.
/// Deterministic in the seed.
pub fn haar_unitary(n: usize, seed: u64) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = complex_gaussian_matrix(&mut rng_from_seed(seed), n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..n {
        let rii = r[(i, i)];
        let d = if rii.norm() > 0.0 {
            rii / rii.norm()
        } else {
            c(1.0, 0.0)
        };
        for k in 0..n {
            q[(k, i)] *= d;
        }
    }
    q
}

/// Orthonormal basis of the numerical nullspace
/// `{x : ‖mx‖ ≤ eps_rank·σ_max·max_dim·‖x‖}`, chosen canonically
/// (coordinate kernels come out as standard basis vectors). Returns a
/// matrix with zero columns when the nullspace is trivial.
pub fn null_basis(m: &CMatrix, cfg: &ToleranceConfig) -> Result<CMatrix> {
    ensure_finite(m)?;
    let cols = m.ncols();
    if cols == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let f = svd(m)?;
    let rank = f.rank(cfg.eps_rank, m.nrows().max(cols));
    let nullity = cols - rank;
    if nullity == 0 {
        return Ok(CMatrix::zeros(cols, 0));
    }
    let vr = f.v.columns(0, rank);
    let p = CMatrix::identity(cols, cols) - vr * vr.adjoint();
    Ok(pivoted_orthonormal_basis(&p, nullity))
}

/// Complex eigenpairs via Schur: eigenvalues from the triangular factor and
/// eigenvectors by back-substitution. Columns are unit, phase-canonical.
pub fn eig_complex(a: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    ensure_finite(a)?;
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition expects a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let schur = a
        .clone()
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::FactorizationFailure)?;
    let (q, t) = schur.unpack();
    let scale = t.norm();
    let floor = f64::EPSILON * (scale + 1.0);
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        values.push(lambda);
        let mut y = CVector::zeros(n);
        y[i] = c(1.0, 0.0);
        for k in (0..i).rev() {
            let mut acc = c(0.0, 0.0);
            for j in (k + 1)..=i {
                acc += t[(k, j)] * y[j];
            }
            let mut denom = t[(k, k)] - lambda;
            if denom.norm() < floor {
                denom = c(floor, 0.0);
            }
            y[k] = -acc / denom;
        }
        let x = &q * y;
        let nx = x.norm();
        let col = if nx > 0.0 { x / c(nx, 0.0) } else { x };
        let canon = phase_canonicalize(&CMatrix::from_column_slice(n, 1, col.as_slice()));
        vectors.column_mut(i).copy_from(&canon.column(0));
    }
    Ok((values, vectors))
}

/// Unitary polar factor via SVD, `u · v*`. Defined for any square matrix;
/// on singular inputs the choice on the null directions follows the SVD.
pub fn nearest_unitary(x: &CMatrix) -> Result<CMatrix> {
    let f = svd(x)?;
    Ok(&f.u * f.v.adjoint())
}

/// Unitary polar factor by the scaled Newton iteration
/// `Y ← (μY + (μY)^{-*})/2`. Preserves complex symmetry of the iterate,
/// which the SVD route does not guarantee under degenerate singular
/// values. Returns `None` on singular or non-converging inputs.
pub fn polar_unitary_newton(x: &CMatrix) -> Option<CMatrix> {
    let n = x.nrows();
    if n != x.ncols() {
        return None;
    }
    if n == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    let mut y = x.clone();
    for _ in 0..60 {
        let inv = y.clone().try_inverse()?;
        if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        let ny = y.norm();
        let ninv = inv.norm();
        if ny == 0.0 || ninv == 0.0 {
            return None;
        }
        let mu = (ninv / ny).sqrt();
        let next = (&y * c(mu, 0.0) + inv.adjoint() * c(1.0 / mu, 0.0)) * c(0.5, 0.0);
        let step = (&next - &y).norm();
        y = next;
        if step <= 1e-15 * (y.norm() + 1.0) {
            break;
        }
    }
    if unitarity_defect(&y) <= 1e-12 * (n as f64) {
        Some(y)
    } else {
        None
    }
}
