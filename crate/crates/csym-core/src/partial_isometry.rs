//! Partial isometries: validation, the block decomposition over initial
//! space ⊕ kernel, the polar data of the kernel block, and the reduction
//! that discards the maximal zero summand.
//!
//! A partial isometry T restricted to `(ker T)^⊥` is isometric;
//! equivalently `T*T` is an orthogonal projection. In an orthonormal basis
//! `[Q1 Q2]` adapted to initial space and kernel,
//! `T = [[A, 0], [B, 0]]` and the projection identity becomes
//! `A*A + B*B = I` on the initial space.

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::linalg::{null_basis, psd_sqrt, svd};
use crate::matrix::{ensure_finite, pivoted_orthonormal_basis, relative, CMatrix, C64};
use crate::seeding::derive_seed;

/// A partial isometry together with the adapted bases and blocks.
///
/// `q1` (n×r) spans the initial space `(ker T)^⊥ = ran T*`; `q2` (n×(n−r))
/// spans `ker T`; `a = Q1*·T·Q1` is the compression to the initial space
/// and `b = Q2*·T·Q1` the kernel-side block.
#[derive(Debug, Clone)]
pub struct PartialIsometryBlocks {
    pub t: CMatrix,
    pub q1: CMatrix,
    pub q2: CMatrix,
    pub a: CMatrix,
    pub b: CMatrix,
}

/// Residuals of the defining identities of a block decomposition; all
/// Frobenius, relative where scale-dependent.
#[derive(Debug, Clone)]
pub struct BlockResiduals {
    /// `‖[Q1 Q2]*[Q1 Q2] − I‖`
    pub basis_orthonormality: f64,
    /// `‖T·Q2‖` (T vanishes on its kernel)
    pub kernel_annihilation: f64,
    /// `‖A*A + B*B − I‖` on the initial space
    pub sum_of_squares: f64,
    /// `‖T − (Q1·A·Q1* + Q2·B·Q1*)‖ / (‖T‖ + 1)`
    pub reassembly: f64,
}

impl PartialIsometryBlocks {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Rank of T = dimension of the initial space.
    pub fn rank(&self) -> usize {
        self.q1.ncols()
    }

    pub fn residuals(&self) -> BlockResiduals {
        let n = self.dim();
        let r = self.rank();
        let q = crate::matrix::hstack(&[&self.q1, &self.q2]);
        let basis = (q.adjoint() * &q - CMatrix::identity(n, n)).norm();
        let kernel = (&self.t * &self.q2).norm();
        let sos = (self.a.adjoint() * &self.a + self.b.adjoint() * &self.b
            - CMatrix::identity(r, r))
        .norm();
        let rebuilt =
            &self.q1 * &self.a * self.q1.adjoint() + &self.q2 * &self.b * self.q1.adjoint();
        let reassembly = relative((&self.t - rebuilt).norm(), self.t.norm());
        BlockResiduals {
            basis_orthonormality: basis,
            kernel_annihilation: kernel,
            sum_of_squares: sos,
            reassembly,
        }
    }
}

/// Polar data of the kernel block: `B = V·|B|` with `V` a partial isometry
/// from the initial space into the kernel and `|B| = √(I − A*A)`.
#[derive(Debug, Clone)]
pub struct PolarOfB {
    pub v: CMatrix,
    pub abs_b: CMatrix,
}

/// Tests `T*T` for being an orthogonal projection. Returns the verdict and
/// the residual `max(‖(T*T)² − T*T‖, ‖T*T − (T*T)*‖) / (‖T*T‖ + 1)`.
pub fn is_partial_isometry(t: &CMatrix, cfg: &ToleranceConfig) -> Result<(bool, f64)> {
    ensure_finite(t)?;
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "partial isometry test expects a square matrix, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let p = t.adjoint() * t;
    let idem = (&p * &p - &p).norm();
    let herm = (&p - p.adjoint()).norm();
    let residual = relative(idem.max(herm), p.norm());
    Ok((residual <= cfg.eps_res, residual))
}

/// Numerical nullities of T and T*.
pub fn kernel_dims(t: &CMatrix, cfg: &ToleranceConfig) -> Result<(usize, usize)> {
    let kt = null_basis(t, cfg)?.ncols();
    let kts = null_basis(&t.adjoint(), cfg)?.ncols();
    Ok((kt, kts))
}

/// Seeded rank-r partial isometry `U1 · diag(1×r, 0×(n−r)) · U2*` with
/// independent Haar factors.
pub fn random_partial_isometry(n: usize, r: usize, seed: u64) -> Result<CMatrix> {
    if r > n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} exceeds dimension {n}"
        )));
    }
    let u1 = crate::linalg::haar_unitary(n, derive_seed(seed, 1));
    let u2 = crate::linalg::haar_unitary(n, derive_seed(seed, 2));
    let e = CMatrix::from_fn(n, n, |i, j| {
        if i == j && i < r {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(u1 * e * u2.adjoint())
}

/// Block decomposition of a partial isometry over initial space ⊕ kernel.
///
/// The bases come from column-pivoted Gram–Schmidt on the projections
/// `T*T` and `I − T*T`, which is canonical: coordinate-aligned subspaces
/// produce standard basis vectors, and repeated runs are bit-identical.
pub fn block_decompose(t: &CMatrix, cfg: &ToleranceConfig) -> Result<PartialIsometryBlocks> {
    let (ok, residual) = is_partial_isometry(t, cfg)?;
    if !ok {
        return Err(Error::NotPartialIsometry { residual });
    }
    let n = t.nrows();
    let f = svd(t)?;
    let r = f.rank(cfg.eps_rank, n);
    let p1 = t.adjoint() * t;
    let p2 = CMatrix::identity(n, n) - &p1;
    let q1 = pivoted_orthonormal_basis(&p1, r);
    let q2 = pivoted_orthonormal_basis(&p2, n - r);
    let a = q1.adjoint() * t * &q1;
    let b = q2.adjoint() * t * &q1;
    Ok(PartialIsometryBlocks {
        t: t.clone(),
        q1,
        q2,
        a,
        b,
    })
}

/// Result of stripping the maximal reducing zero summand: `T` restricted
/// to `H₁ ⊕ closure(ran B)`, the embedding of that subspace, and an
/// orthonormal basis `Z` of the discarded block (on which T vanishes).
#[derive(Debug, Clone)]
pub struct EssentialPart {
    /// Blocks of the restricted operator, expressed in its own coordinates.
    pub blocks: PartialIsometryBlocks,
    /// n×(r+rank B) isometric embedding `[Q1, Q2·U_B]` of the essential
    /// subspace into the original space.
    pub embedding: CMatrix,
    /// n×k orthonormal basis of the discarded zero block.
    pub zero_block: CMatrix,
}

/// Splits the kernel into `closure(ran B) ⊕ complement`; on the essential
/// part the kernel block has dense range, and T vanishes identically on
/// the complement.
pub fn essential_part(d: &PartialIsometryBlocks, cfg: &ToleranceConfig) -> Result<EssentialPart> {
    let r = d.rank();
    let fb = svd(&d.b)?;
    let rb = fb.rank(cfg.eps_rank, d.b.nrows().max(d.b.ncols()));
    let (ub, _, _) = fb.truncate(rb);
    // complement of ran B inside the kernel = ker B*
    let w = null_basis(&d.b.adjoint(), cfg)?;
    let q2_ess = &d.q2 * &ub;
    let zero_block = &d.q2 * &w;
    let embedding = crate::matrix::hstack(&[&d.q1, &q2_ess]);
    let b_ess = ub.adjoint() * &d.b;
    let t_ess = crate::matrix::block2x2(
        &d.a,
        &CMatrix::zeros(r, rb),
        &b_ess,
        &CMatrix::zeros(rb, rb),
    );
    let m = r + rb;
    let q1 = CMatrix::identity(m, m).columns(0, r).into_owned();
    let q2 = CMatrix::identity(m, m).columns(r, rb).into_owned();
    Ok(EssentialPart {
        blocks: PartialIsometryBlocks {
            t: t_ess,
            q1,
            q2,
            a: d.a.clone(),
            b: b_ess,
        },
        embedding,
        zero_block,
    })
}

/// Polar decomposition of the kernel block from its rank-truncated SVD:
/// `V = U_B·V_B*` and `|B| = V_B·diag(σ)·V_B*`, so `B = V·|B|`,
/// `V*B = |B| = B*V`, and `|B| = √(I − A*A)`.
pub fn polar_of_b(d: &PartialIsometryBlocks, cfg: &ToleranceConfig) -> Result<PolarOfB> {
    let r = d.rank();
    let fb = svd(&d.b)?;
    let rb = fb.rank(cfg.eps_rank, d.b.nrows().max(d.b.ncols()));
    let (ub, sb, vb) = fb.truncate(rb);
    let v = &ub * vb.adjoint();
    let sigma = CMatrix::from_fn(rb, rb, |i, j| {
        if i == j {
            C64::new(sb[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let abs_b = &vb * sigma * vb.adjoint();
    debug_assert_eq!(abs_b.nrows(), r);
    Ok(PolarOfB { v, abs_b })
}

/// Residuals of the polar identities for [`PolarOfB`].
#[derive(Debug, Clone)]
pub struct PolarResiduals {
    /// `‖B − V·|B|‖`
    pub factorization: f64,
    /// `max(‖V*B − |B|‖, ‖B*V − |B|‖)`
    pub adjoint_identities: f64,
    /// `‖|B| − √(I − A*A)‖`
    pub sqrt_identity: f64,
    /// `‖V*V − P_ran|B|‖`
    pub initial_projection: f64,
}

pub fn polar_residuals(
    d: &PartialIsometryBlocks,
    p: &PolarOfB,
    cfg: &ToleranceConfig,
) -> Result<PolarResiduals> {
    let r = d.rank();
    let factorization = (&d.b - &p.v * &p.abs_b).norm();
    let r1 = (p.v.adjoint() * &d.b - &p.abs_b).norm();
    let r2 = (d.b.adjoint() * &p.v - &p.abs_b).norm();
    let gram = CMatrix::identity(r, r) - d.a.adjoint() * &d.a;
    let sqrt_identity = (&p.abs_b - psd_sqrt(&gram, cfg)?).norm();
    // projection onto ran |B| from the rank-truncated eigenvectors of |B|
    let fb = svd(&p.abs_b)?;
    let rb = fb.rank(cfg.eps_rank, r);
    let (u, _, _) = fb.truncate(rb);
    let proj = &u * u.adjoint();
    let initial_projection = (p.v.adjoint() * &p.v - proj).norm();
    Ok(PolarResiduals {
        factorization,
        adjoint_identities: r1.max(r2),
        sqrt_identity,
        initial_projection,
    })
}
