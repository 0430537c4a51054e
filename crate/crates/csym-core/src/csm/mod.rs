//! Complex symmetry of partial isometries: detection on the compression,
//! conjugation synthesis, certification, zero-summand embedding/stripping,
//! Aluthge transforms, and extension of a certified partial isometry to a
//! C-symmetric unitary.
//!
//! The central fact: a partial isometry `T = [[A, 0], [B, 0]]` (blocks over
//! initial space ⊕ kernel) is complex symmetric iff its compression `A`
//! is. Given a conjugation `K` certifying `A`, a certifying conjugation for
//! `T` is assembled blockwise from `K` and the polar data `B = V·|B|`:
//!
//! ```text
//! M_C = [[ A·M_K,        M_K·Bᵀ          ],
//!        [ B·M_K,  −V·A*·M_K·Vᵀ + pad    ]]
//! ```
//!
//! where the pad is an arbitrary conjugation on the part of the kernel
//! orthogonal to `ran B` (on which T and T* vanish).

mod detect;
mod oracle;

pub use detect::{
    detect_csm, sylvester_matrix, Detection, DetectionMethod, DetectionStatus, Obstruction,
};
pub use oracle::{oracle_uecsm, OracleOutcome};

use std::time::Instant;

use crate::config::ToleranceConfig;
use crate::conjugation::{c_symmetry_residual, Conjugation, PartialConjugation};
use crate::error::{Error, Result};
use crate::linalg::{null_basis, svd};
use crate::matrix::{
    block2x2, c, conj, ensure_finite, hstack, pivoted_orthonormal_basis, relative,
    unitarity_defect, CMatrix, C64,
};
use crate::partial_isometry::{
    block_decompose, is_partial_isometry, polar_of_b, polar_residuals, PartialIsometryBlocks,
};
use crate::seeding::derive_seed;

/// Stream tag for the seed of the zero-block padding conjugation.
const PAD_STREAM: u64 = 0x0050_4144;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    ComplexSymmetric,
    NotComplexSymmetric,
    Inconclusive,
}

impl CertificateStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateStatus::ComplexSymmetric => "ComplexSymmetric",
            CertificateStatus::NotComplexSymmetric => "NotComplexSymmetric",
            CertificateStatus::Inconclusive => "Inconclusive",
        }
    }
}

/// Diagnostics attached to a certificate: rank warnings, the seed used for
/// zero-block padding, structural-identity residuals, and wall time (the
/// one field excluded from reproducibility guarantees).
#[derive(Debug, Clone, Default)]
pub struct CertificateMeta {
    pub rank_warnings: Vec<String>,
    pub pad_seed: Option<u64>,
    pub sos_residual: f64,
    pub w1_residual: f64,
    pub w2_residual: f64,
    pub wall_ms: f64,
}

/// Outcome of certifying a partial isometry.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub conjugation: Option<Conjugation>,
    /// `c_symmetry_residual(T, C)` of the witness, when present.
    pub residual_symmetry: f64,
    /// `max(‖M*M − I‖, ‖M − Mᵀ‖)` of the witness, when present.
    pub residual_conjugation: f64,
    pub detection: Detection,
    pub metadata: CertificateMeta,
}

/// A synthesized certifying conjugation along with the residuals of the
/// identities its construction depends on.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub conjugation: Conjugation,
    /// Seed of the padding conjugation on the zero block, if one was needed.
    pub pad_seed: Option<u64>,
    /// Worst polar-identity residual of `B = V·|B|` (the four identities of
    /// the polar data).
    pub w1_residual: f64,
    /// Worst commutation residual of `(KA)·|B| = |B|·(KA)` and
    /// `(A*K)·|B| = |B|·(A*K)` in matrix form.
    pub w2_residual: f64,
    /// `‖M₂₁ − M₁₂ᵀ‖`, the block-level symmetry of the assembled matrix.
    pub block_symmetry_residual: f64,
}

/// Builds the certifying conjugation for the full partial isometry from a
/// conjugation `K` certifying the compression `A`.
///
/// The assembly works directly on the blocks; the part of the kernel
/// orthogonal to `ran B` (where the closed formula vanishes) is padded
/// with a deterministic seeded random conjugation, which is legitimate
/// because `T` and `T*` vanish there.
pub fn synthesize_conjugation(
    d: &PartialIsometryBlocks,
    k: &Conjugation,
    cfg: &ToleranceConfig,
) -> Result<Synthesis> {
    cfg.validate()?;
    let r = d.rank();
    if k.dim() != r {
        return Err(Error::DimensionMismatch(format!(
            "conjugation of dimension {} against compression of dimension {r}",
            k.dim()
        )));
    }
    let gate = c_symmetry_residual(&d.a, k)?;
    if gate > cfg.eps_res {
        return Err(Error::NotCertifying { residual: gate });
    }

    let pol = polar_of_b(d, cfg)?;
    let pres = polar_residuals(d, &pol, cfg)?;
    let w1_residual = pres
        .factorization
        .max(pres.adjoint_identities)
        .max(pres.sqrt_identity)
        .max(pres.initial_projection);

    let mk = k.matrix();
    // eq-W2 in matrix form: the antilinear map K·A has matrix M_K·conj(A),
    // and commuting it past the Hermitian |B| conjugates |B| on the inside
    let mka = mk * conj(&d.a);
    let amk = d.a.adjoint() * mk;
    let absb_c = conj(&pol.abs_b);
    let w2_residual = (&mka * &absb_c - &pol.abs_b * &mka)
        .norm()
        .max((&amk * &absb_c - &pol.abs_b * &amk).norm());

    let m11 = &d.a * mk;
    let m12 = mk * d.b.transpose();
    let m21 = &d.b * mk;
    let mut m22 = -(&pol.v * d.a.adjoint() * mk * pol.v.transpose());

    // pad the complement of ran B inside the kernel
    let w = null_basis(&d.b.adjoint(), cfg)?;
    let pad = w.ncols();
    let pad_seed = if pad > 0 {
        let seed = derive_seed(cfg.seed, PAD_STREAM);
        let j = Conjugation::random(pad, seed);
        m22 += &w * j.matrix() * w.transpose();
        Some(seed)
    } else {
        None
    };

    let block_symmetry_residual = (&m21 - m12.transpose()).norm();
    let m_block = block2x2(&m11, &m12, &m21, &m22);
    let q = hstack(&[&d.q1, &d.q2]);
    let m_std = &q * m_block * q.transpose();

    let conjugation = Conjugation::new(m_std, cfg).map_err(|e| {
        Error::SynthesisValidation(format!(
            "assembled matrix is not a conjugation ({e}); \
             polar residual {w1_residual:.3e}, commutation residual {w2_residual:.3e}"
        ))
    })?;
    let full = c_symmetry_residual(&d.t, &conjugation)?;
    if full > cfg.eps_res {
        return Err(Error::SynthesisValidation(format!(
            "assembled conjugation does not certify T (residual {full:.3e}); \
             polar residual {w1_residual:.3e}, commutation residual {w2_residual:.3e}"
        )));
    }

    Ok(Synthesis {
        conjugation,
        pad_seed,
        w1_residual,
        w2_residual,
        block_symmetry_residual,
    })
}

/// Decides complex symmetry of a partial isometry and produces a
/// certificate: a validated witness conjugation in the positive case, the
/// structural obstruction on the compression in the negative case.
pub fn certify(t: &CMatrix, cfg: &ToleranceConfig) -> Result<Certificate> {
    cfg.validate()?;
    let started = Instant::now();
    let (ok, residual) = is_partial_isometry(t, cfg)?;
    if !ok {
        return Err(Error::NotPartialIsometry { residual });
    }
    let d = block_decompose(t, cfg)?;

    let mut warnings = Vec::new();
    let ft = svd(t)?;
    warn_near_threshold(&ft.s, cfg, t.nrows(), "T", &mut warnings);
    let fb = svd(&d.b)?;
    warn_near_threshold(&fb.s, cfg, d.b.nrows().max(d.b.ncols()), "B", &mut warnings);

    let detection = detect_csm(&d.a, cfg)?;
    let sos_residual = d.residuals().sum_of_squares;

    let mut meta = CertificateMeta {
        rank_warnings: warnings,
        sos_residual,
        ..CertificateMeta::default()
    };

    let certificate = match detection.status {
        DetectionStatus::Positive => {
            let k = detection
                .witness
                .clone()
                .ok_or_else(|| Error::Internal("positive detection without witness".into()))?;
            let synth = synthesize_conjugation(&d, &k, cfg)?;
            let residual_symmetry = c_symmetry_residual(t, &synth.conjugation)?;
            let (unit, sym) = synth.conjugation.validity_residuals();
            meta.pad_seed = synth.pad_seed;
            meta.w1_residual = synth.w1_residual;
            meta.w2_residual = synth.w2_residual;
            Certificate {
                status: CertificateStatus::ComplexSymmetric,
                conjugation: Some(synth.conjugation),
                residual_symmetry,
                residual_conjugation: unit.max(sym),
                detection,
                metadata: meta,
            }
        }
        DetectionStatus::Negative => Certificate {
            status: CertificateStatus::NotComplexSymmetric,
            conjugation: None,
            residual_symmetry: f64::NAN,
            residual_conjugation: f64::NAN,
            detection,
            metadata: meta,
        },
        DetectionStatus::Inconclusive => Certificate {
            status: CertificateStatus::Inconclusive,
            conjugation: None,
            residual_symmetry: f64::NAN,
            residual_conjugation: f64::NAN,
            detection,
            metadata: meta,
        },
    };
    let mut certificate = certificate;
    certificate.metadata.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(certificate)
}

fn warn_near_threshold(
    s: &[f64],
    cfg: &ToleranceConfig,
    max_dim: usize,
    label: &str,
    warnings: &mut Vec<String>,
) {
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return;
    }
    let tol = cfg.eps_rank * sigma_max * max_dim.max(1) as f64;
    for (i, &sigma) in s.iter().enumerate() {
        if sigma > tol / 10.0 && sigma < tol * 10.0 {
            warnings.push(format!(
                "singular value {i} of {label} ({sigma:.3e}) is within 10x of the rank \
                 threshold ({tol:.3e})"
            ));
        }
    }
}

/// `T ⊕ 0_k`: block-diagonal embedding with a k-dimensional zero summand.
pub fn lemma_zero_embed(t: &CMatrix, k: usize) -> CMatrix {
    let n = t.nrows();
    block2x2(
        t,
        &CMatrix::zeros(n, k),
        &CMatrix::zeros(k, n),
        &CMatrix::zeros(k, k),
    )
}

/// Restriction of `S` to `closure(ran S + ran S*)`, together with the
/// isometric embedding of that subspace. The discarded complement is a
/// reducing subspace on which S vanishes.
pub fn lemma_zero_strip(s: &CMatrix, cfg: &ToleranceConfig) -> Result<(CMatrix, CMatrix)> {
    ensure_finite(s)?;
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "strip expects a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let n = s.nrows();
    let p = s * s.adjoint() + s.adjoint() * s;
    let (values, _) = crate::linalg::hermitian_eig(&p)?;
    let scale = values.first().copied().unwrap_or(0.0);
    let tol = cfg.eps_rank * scale * n.max(1) as f64;
    let rank = values.iter().filter(|&&v| v > tol).count();
    let q = pivoted_orthonormal_basis(&p, rank);
    Ok((q.adjoint() * s * &q, q))
}

/// Aluthge transform `|T|^{1/2}·U·|T|^{1/2}` for `T = U·|T|`, with the
/// polar factor taken from the rank-truncated SVD (so `ker U = ker T`).
/// For a partial isometry this collapses to `A ⊕ 0` over the adapted
/// basis.
pub fn aluthge(t: &CMatrix, cfg: &ToleranceConfig) -> Result<CMatrix> {
    ensure_finite(t)?;
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "Aluthge transform expects a square matrix, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let n = t.nrows();
    let f = svd(t)?;
    let rank = f.rank(cfg.eps_rank, n);
    let (u, s, v) = f.truncate(rank);
    let u_pol = &u * v.adjoint();
    let sqrt_abs = {
        let d = CMatrix::from_fn(rank, rank, |i, j| {
            if i == j {
                C64::new(s[i].sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        &v * d * v.adjoint()
    };
    Ok(&sqrt_abs * u_pol * &sqrt_abs)
}

/// Extends a C-symmetric partial isometry to a C-symmetric unitary:
/// returns `(U, P)` with `T = U·P`, `P = T*T` an orthogonal projection,
/// `U` unitary and C-symmetric.
///
/// The construction follows `T = C·J·P` with the partial conjugation
/// `J = C∘T` supported on `ran P`; extending `J` by `J' = W·Wᵀ` on the
/// kernel basis `W` gives a full conjugation `J̃` and `U = C∘J̃`.
pub fn unitary_extension(
    t: &CMatrix,
    c_conj: &Conjugation,
    cfg: &ToleranceConfig,
) -> Result<(CMatrix, CMatrix)> {
    cfg.validate()?;
    let gate = c_symmetry_residual(t, c_conj)?;
    if gate > cfg.eps_res {
        return Err(Error::NotCertifying { residual: gate });
    }
    let (ok, residual) = is_partial_isometry(t, cfg)?;
    if !ok {
        return Err(Error::NotPartialIsometry { residual });
    }
    let n = t.nrows();
    let p = {
        let raw = t.adjoint() * t;
        (&raw + raw.adjoint()) * c(0.5, 0.0)
    };
    let mc = c_conj.matrix();
    let m_j = mc * conj(t);
    // J must be a partial conjugation supported on ran P
    let _ = PartialConjugation::new(m_j.clone(), cfg).map_err(|e| {
        Error::SynthesisValidation(format!("C∘T is not a partial conjugation ({e})"))
    })?;
    let f = svd(t)?;
    let rank = f.rank(cfg.eps_rank, n);
    let w = pivoted_orthonormal_basis(&(CMatrix::identity(n, n) - &p), n - rank);
    let m_jt = &m_j + &w * w.transpose();
    let u = mc * conj(&m_jt);

    let unit = unitarity_defect(&u);
    if unit > cfg.eps_res {
        return Err(Error::SynthesisValidation(format!(
            "extension is not unitary (residual {unit:.3e})"
        )));
    }
    let u_sym = c_symmetry_residual(&u, c_conj)?;
    if u_sym > cfg.eps_res {
        return Err(Error::SynthesisValidation(format!(
            "extension is not C-symmetric (residual {u_sym:.3e})"
        )));
    }
    let rec = relative((&u * &p - t).norm(), t.norm());
    if rec > cfg.eps_res {
        return Err(Error::SynthesisValidation(format!(
            "U·P does not reproduce T (residual {rec:.3e})"
        )));
    }
    Ok((u, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use crate::matrix::{flip, jordan_nilpotent};
    use crate::partial_isometry::random_partial_isometry;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn golden_jordan4_certificate_is_flip4() {
        let t = jordan_nilpotent(4);
        let cert = certify(&t, &cfg()).unwrap();
        assert_eq!(cert.status, CertificateStatus::ComplexSymmetric);
        let w = cert.conjugation.unwrap();
        assert!(
            (w.matrix() - flip(4)).norm() < 1e-12,
            "witness deviates from flip4 by {:.3e}",
            (w.matrix() - flip(4)).norm()
        );
        assert!(cert.residual_symmetry <= 1e-12);
        assert!(cert.residual_conjugation <= 1e-12);
    }

    #[test]
    fn synthesis_blocks_for_jordan4_match_hand_computation() {
        let t = jordan_nilpotent(4);
        let d = block_decompose(&t, &cfg()).unwrap();
        let k = Conjugation::new(flip(3), &cfg()).unwrap();
        let synth = synthesize_conjugation(&d, &k, &cfg()).unwrap();
        assert!((synth.conjugation.matrix() - flip(4)).norm() < 1e-13);
        assert!(synth.pad_seed.is_none());
        assert!(synth.w1_residual <= 1e-12);
        assert!(synth.w2_residual <= 1e-12);
        assert!(synth.block_symmetry_residual <= 1e-13);
    }

    #[test]
    fn synthesis_rejects_non_certifying_conjugation() {
        let t = jordan_nilpotent(4);
        let d = block_decompose(&t, &cfg()).unwrap();
        let bad = Conjugation::canonical(3);
        match synthesize_conjugation(&d, &bad, &cfg()) {
            Err(Error::NotCertifying { .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn synthesis_for_identity_collapses_to_canonical_conjugation() {
        // B empty: M_C = A·M_K; for A = I and K entrywise this is I
        let d = block_decompose(&CMatrix::identity(3, 3), &cfg()).unwrap();
        let k = Conjugation::canonical(3);
        let synth = synthesize_conjugation(&d, &k, &cfg()).unwrap();
        assert!((synth.conjugation.matrix() - CMatrix::identity(3, 3)).norm() < 1e-14);
        assert!(synth.pad_seed.is_none());
    }

    #[test]
    fn unitary_input_collapses_to_compression_block() {
        let u = haar_unitary(3, 12);
        let cert = certify(&u, &cfg()).unwrap();
        assert_eq!(cert.status, CertificateStatus::ComplexSymmetric);
        assert!(cert.residual_symmetry <= 1e-8);
    }

    #[test]
    fn zero_operator_certifies_with_padding() {
        let cert = certify(&CMatrix::zeros(3, 3), &cfg()).unwrap();
        assert_eq!(cert.status, CertificateStatus::ComplexSymmetric);
        assert!(cert.metadata.pad_seed.is_some());
    }

    #[test]
    fn padded_jordan_block_certifies_through_zero_summand() {
        let t = lemma_zero_embed(&jordan_nilpotent(2), 2);
        let cert = certify(&t, &cfg()).unwrap();
        assert_eq!(cert.status, CertificateStatus::ComplexSymmetric);
        assert!(cert.residual_symmetry <= 1e-10);
        assert!(cert.metadata.pad_seed.is_some());
    }

    #[test]
    fn lemma_embed_strip_roundtrip() {
        let t = jordan_nilpotent(2);
        let e = lemma_zero_embed(&t, 2);
        assert_eq!(e.nrows(), 4);
        assert_eq!(e.view((0, 0), (2, 2)).clone_owned(), t);
        let (stripped, embedding) = lemma_zero_strip(&e, &cfg()).unwrap();
        assert!((&stripped - &t).norm() < 1e-12);
        // embedding reproduces the original on its range
        assert!((embedding.adjoint() * &e * &embedding - stripped).norm() < 1e-12);
    }

    #[test]
    fn aluthge_on_jordan_block_is_shifted_jordan() {
        let a = aluthge(&jordan_nilpotent(4), &cfg()).unwrap();
        let expect = lemma_zero_embed(&jordan_nilpotent(3), 1);
        assert!((a - expect).norm() < 1e-12);
    }

    #[test]
    fn aluthge_fixes_unitaries_and_kills_rank_one_nilpotents() {
        let u = haar_unitary(3, 77);
        let au = aluthge(&u, &cfg()).unwrap();
        assert!((&au - &u).norm() < 1e-10);

        // x ↦ ⟨x, e1⟩ e2
        let mut t = CMatrix::zeros(3, 3);
        t[(1, 0)] = c(1.0, 0.0);
        let at = aluthge(&t, &cfg()).unwrap();
        assert!(at.norm() < 1e-12);
    }

    #[test]
    fn aluthge_matches_compression_on_samples() {
        for seed in 0..6u64 {
            let n = 3 + (seed % 3) as usize;
            let r = (seed % (n as u64)) as usize + 1;
            let t = random_partial_isometry(n, r, seed + 500).unwrap();
            let d = block_decompose(&t, &cfg()).unwrap();
            let expect = &d.q1 * &d.a * d.q1.adjoint();
            let got = aluthge(&t, &cfg()).unwrap();
            assert!((got - expect).norm() <= 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn golden_unitary_extension_of_jordan4() {
        let t = jordan_nilpotent(4);
        let f4 = Conjugation::new(flip(4), &cfg()).unwrap();
        let (u, p) = unitary_extension(&t, &f4, &cfg()).unwrap();
        // P = diag(1,1,1,0)
        let p_expect = CMatrix::from_fn(4, 4, |i, j| {
            if i == j && i < 3 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!((&p - p_expect).norm() < 1e-13);
        // U is the 4-cycle e1→e2→e3→e4→e1
        let u_expect = CMatrix::from_fn(4, 4, |i, j| {
            if (j + 1) % 4 == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(
            (&u - &u_expect).norm() < 1e-13,
            "U deviates by {:.3e}",
            (&u - &u_expect).norm()
        );
        assert!((u * p - t).norm() <= 1e-12);
    }

    #[test]
    fn extension_of_unitary_returns_itself() {
        let t = haar_unitary(3, 21);
        let cert = certify(&t, &cfg()).unwrap();
        let c_w = cert.conjugation.unwrap();
        let (u, p) = unitary_extension(&t, &c_w, &cfg()).unwrap();
        assert!((&p - CMatrix::identity(3, 3)).norm() < 1e-10);
        assert!((&u - &t).norm() < 1e-10);
    }

    #[test]
    fn extension_of_zero_operator() {
        let t = CMatrix::zeros(2, 2);
        let c_w = Conjugation::canonical(2);
        let (u, p) = unitary_extension(&t, &c_w, &cfg()).unwrap();
        assert!(p.norm() < 1e-14);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((u * p).norm() < 1e-12);
    }

    #[test]
    fn extension_rejects_wrong_conjugation() {
        let t = jordan_nilpotent(4);
        let wrong = Conjugation::canonical(4);
        match unitary_extension(&t, &wrong, &cfg()) {
            Err(Error::NotCertifying { .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }
}
