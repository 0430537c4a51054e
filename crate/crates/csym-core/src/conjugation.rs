//! Conjugations: antilinear, involutive isometries `C(x) = M·conj(x)`.
//!
//! In a fixed basis a conjugation is exactly a symmetric unitary matrix M:
//! unitarity of M is the isometry axiom and symmetry is the involution
//! (`C²x = M·conj(M)·x`, and `conj(M) = M*` iff `M = Mᵀ`). An operator `T`
//! is C-symmetric (`T = CT*C`) iff `T·M = M·Tᵀ`, which is the bilinear form
//! used by every residual in this crate.

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::linalg::haar_unitary;
use crate::matrix::{
    block2x2, conj, ensure_finite, relative, symmetry_defect, unitarity_defect, CMatrix, CVector,
};

/// A validated conjugation, stored as its symmetric unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation {
    m: CMatrix,
}

impl Conjugation {
    /// Validates M as symmetric unitary within `cfg.eps_res` (distinct
    /// errors for the two axioms) and wraps it.
    pub fn new(m: CMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        ensure_finite(&m)?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "conjugation matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let unit = unitarity_defect(&m);
        if unit > cfg.eps_res {
            return Err(Error::NotUnitary { residual: unit });
        }
        let sym = symmetry_defect(&m);
        if sym > cfg.eps_res {
            return Err(Error::NotSymmetric { residual: sym });
        }
        Ok(Self { m })
    }

    /// The canonical entrywise conjugation, `M = I`.
    pub fn canonical(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    /// Deterministic random conjugation `M = Q·Qᵀ` for Haar `Q`; symmetric
    /// unitary by construction.
    pub fn random(dim: usize, seed: u64) -> Self {
        let q = haar_unitary(dim, seed);
        let m = &q * q.transpose();
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Applies the antilinear action `x ↦ M·conj(x)`.
    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "conjugation of dimension {} applied to vector of length {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(&self.m * x.map(|z| z.conj()))
    }

    /// Block-diagonal direct sum; the zero-dimensional conjugation is the
    /// neutral element.
    pub fn direct_sum(&self, other: &Conjugation) -> Conjugation {
        let (d1, d2) = (self.dim(), other.dim());
        let m = block2x2(
            &self.m,
            &CMatrix::zeros(d1, d2),
            &CMatrix::zeros(d2, d1),
            &other.m,
        );
        Conjugation { m }
    }

    /// Unitarity and symmetry defects `(‖M*M−I‖, ‖M−Mᵀ‖)`.
    pub fn validity_residuals(&self) -> (f64, f64) {
        (unitarity_defect(&self.m), symmetry_defect(&self.m))
    }
}

/// A partial conjugation: symmetric M whose support `M*M` is an orthogonal
/// projection rather than the identity.
#[derive(Debug, Clone)]
pub struct PartialConjugation {
    m: CMatrix,
}

impl PartialConjugation {
    pub fn new(m: CMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        ensure_finite(&m)?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "partial conjugation matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = symmetry_defect(&m);
        if sym > cfg.eps_res {
            return Err(Error::NotSymmetric { residual: sym });
        }
        let support = m.adjoint() * &m;
        let proj_defect = (&support * &support - &support).norm();
        if proj_defect > cfg.eps_res {
            return Err(Error::InvalidArgument(format!(
                "support M*M is not a projection (residual {proj_defect:.3e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Orthogonal projection onto the support, `M*M`.
    pub fn support(&self) -> CMatrix {
        self.m.adjoint() * &self.m
    }
}

/// Relative defect of `T = CT*C` in the bilinear form:
/// `‖T·M − M·Tᵀ‖ / (‖T‖ + 1)`. Values at or below `eps_res` certify
/// C-symmetry.
pub fn c_symmetry_residual(t: &CMatrix, c: &Conjugation) -> Result<f64> {
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operator must be square, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    if t.nrows() != c.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} against conjugation of dimension {}",
            t.nrows(),
            c.dim()
        )));
    }
    let m = c.matrix();
    let defect = (t * m - m * t.transpose()).norm();
    Ok(relative(defect, t.norm()))
}

/// Same residual computed through the sandwich form `C T = T* C`, i.e.
/// `‖M·conj(T) − T*·M‖ / (‖T‖ + 1)`. Agrees with
/// [`c_symmetry_residual`] for validated conjugations.
pub fn c_symmetry_residual_sandwich(t: &CMatrix, c: &Conjugation) -> Result<f64> {
    if t.nrows() != t.ncols() || t.nrows() != c.dim() {
        return Err(Error::DimensionMismatch(
            "sandwich residual with mismatched dimensions".into(),
        ));
    }
    let m = c.matrix();
    let defect = (m * conj(t) - t.adjoint() * m).norm();
    Ok(relative(defect, t.norm()))
}
