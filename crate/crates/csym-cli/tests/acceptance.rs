//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measurements (run with `--nocapture` to see them).
//!
//! Criteria:
//! 1. every seeded partial isometry in dimensions 1–4 certifies as
//!    complex symmetric (1000 trials per dimension, mixed ranks);
//! 2. every seeded rank-≤2 partial isometry certifies for n = 3..8
//!    (200 trials per dimension);
//! 3. the counterexample search at (n, r) = (5, 3) produces a corroborated
//!    negative instance, frozen by seed, whose oracle best residual stays
//!    at or above 1e-2 over 10⁴ restarts;
//! 4. the golden nilpotent Jordan case: the certificate witness is the
//!    antidiagonal flip exactly, and the unitary extension is the 4-cycle;
//! 5. the structured detector and the optimization oracle never disagree
//!    when both are conclusive (300 mixed trials, n = 3..6);
//! 6. certification status is invariant under adding zero summands;
//! 7. the Aluthge transform matches the compression form and stays
//!    complex symmetric on certified samples;
//! 8. the structural identities (sum-of-squares, polar, commutation,
//!    conjugation axioms) hold on every decomposition in a fresh sweep;
//! 9. repeating criteria 1–3 with identical seeds reproduces identical
//!    reports to the last digit (timing lines aside).

use std::time::Instant;

use csym_cli::commands::{cmd_find_negative, cmd_montecarlo, RankChoice};
use csym_cli::report::Report;
use csym_core::csm::{detect_csm, DetectionStatus};
use csym_core::matrix::{c, conj, flip, jordan_nilpotent, CMatrix};
use csym_core::partial_isometry::polar_residuals;
use csym_core::seeding::{complex_gaussian_matrix, derive_seed, rng_from_seed};
use csym_core::*;

/// Trial index and derived seed at which the seeded search (base seed 1)
/// finds its corroborated negative instance; the instance itself is
/// `random_partial_isometry(5, 3, FROZEN_NEGATIVE_SEED)`.
const FROZEN_NEGATIVE_TRIAL: usize = 3;
const FROZEN_NEGATIVE_SEED: u64 = 10973940975234208150;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn montecarlo_dimension_sweep(dims: &[usize], trials: usize) -> Vec<Report> {
    dims.iter()
        .map(|&n| {
            let mut c = cfg();
            c.seed = 1;
            cmd_montecarlo(n, RankChoice::All, trials, &c).expect("montecarlo runs")
        })
        .collect()
}

#[test]
fn criterion_1_dimension_at_most_four_is_always_complex_symmetric() {
    let started = Instant::now();
    let trials = 1000usize;
    let reports = montecarlo_dimension_sweep(&[1, 2, 3, 4], trials);
    let mut worst_sym = 0.0f64;
    let mut worst_conj = 0.0f64;
    for (report, n) in reports.iter().zip([1, 2, 3, 4]) {
        let cs: usize = report
            .get("counts.complex_symmetric")
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(cs, trials, "dimension {n}: {cs}/{trials} certified");
        assert_eq!(report.get("counts.not_complex_symmetric"), Some("0"));
        assert_eq!(report.get("counts.inconclusive"), Some("0"));
        let ws: f64 = report
            .get("worst.residual_symmetry")
            .unwrap()
            .parse()
            .unwrap();
        let wc: f64 = report
            .get("worst.residual_conjugation")
            .unwrap()
            .parse()
            .unwrap();
        assert!(
            ws <= 1e-8,
            "dimension {n}: worst symmetry residual {ws:.3e}"
        );
        assert!(
            wc <= 1e-8,
            "dimension {n}: worst conjugation residual {wc:.3e}"
        );
        worst_sym = worst_sym.max(ws);
        worst_conj = worst_conj.max(wc);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 took {elapsed:?}");
    println!(
        "criterion 1: PASS — 4000/4000 complex symmetric over n=1..4, worst residuals \
         {worst_sym:.3e} / {worst_conj:.3e}, {elapsed:.2?}"
    );
}

/// Deterministic transcript of the rank-≤2 sweep, reused by criterion 9.
fn rank_le2_sweep() -> (String, f64) {
    let base = cfg();
    let mut transcript = String::new();
    let mut worst = 0.0f64;
    for n in 3usize..=8 {
        for trial in 0..200u64 {
            let tseed = derive_seed(derive_seed(1, n as u64), trial);
            let r = (tseed % 3) as usize;
            let t = random_partial_isometry(n, r, tseed).unwrap();
            let cert = certify(&t, &base.with_seed(derive_seed(tseed, 1))).unwrap();
            assert_eq!(
                cert.status,
                CertificateStatus::ComplexSymmetric,
                "n={n} r={r} seed={tseed}"
            );
            assert!(cert.residual_symmetry <= 1e-8, "n={n} seed={tseed}");
            assert!(cert.residual_conjugation <= 1e-8, "n={n} seed={tseed}");
            worst = worst.max(cert.residual_symmetry);
            transcript.push_str(&format!(
                "{n} {trial} {} {}\n",
                csym_cli::report::fmt_f64(cert.residual_symmetry),
                csym_cli::report::fmt_f64(cert.residual_conjugation),
            ));
        }
    }
    (transcript, worst)
}

#[test]
fn criterion_2_rank_at_most_two_is_always_complex_symmetric() {
    let started = Instant::now();
    let (_, worst) = rank_le2_sweep();
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 2 took {elapsed:?}");
    println!(
        "criterion 2: PASS — 1200/1200 complex symmetric over n=3..8 at rank ≤ 2, worst \
         residual {worst:.3e}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_negative_instance_found_and_corroborated() {
    let started = Instant::now();
    let base = cfg();
    let report = cmd_find_negative(5, 3, 500, &base, None).expect("search runs");
    assert_eq!(report.get("found"), Some("true"), "no negative found");
    let trial: usize = report.get("found.trial").unwrap().parse().unwrap();
    let seed: u64 = report.get("found.seed").unwrap().parse().unwrap();
    assert_eq!(
        trial, FROZEN_NEGATIVE_TRIAL,
        "search drifted from the frozen fixture"
    );
    assert_eq!(
        seed, FROZEN_NEGATIVE_SEED,
        "search drifted from the frozen fixture"
    );

    // the frozen instance refuses with a structural obstruction
    let t = random_partial_isometry(5, 3, seed).unwrap();
    let cert = certify(&t, &base.with_seed(derive_seed(seed, 1))).unwrap();
    assert_eq!(cert.status, CertificateStatus::NotComplexSymmetric);
    assert!(cert.detection.obstruction.is_some());

    // oracle corroboration over 10^4 restarts on the instance itself
    let mut ocfg = base.clone();
    ocfg.restarts = 10_000;
    let oracle = oracle_uecsm(&t, &ocfg).unwrap();
    assert!(
        oracle.best_residual >= 1e-2,
        "oracle reached {:.4e} on the frozen negative instance",
        oracle.best_residual
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 600, "criterion 3 took {elapsed:?}");
    println!(
        "criterion 3: PASS — negative at trial {trial} (seed {seed}), oracle best residual \
         {:.4e} over 10^4 restarts, {elapsed:.2?}",
        oracle.best_residual
    );
}

#[test]
fn criterion_4_jordan_golden_case() {
    let base = cfg();
    let t = jordan_nilpotent(4);
    let cert = certify(&t, &base).unwrap();
    assert_eq!(cert.status, CertificateStatus::ComplexSymmetric);
    let witness = cert.conjugation.unwrap();
    let witness_gap = (witness.matrix() - flip(4)).norm();
    assert!(
        witness_gap <= 1e-12,
        "witness deviates from flip4 by {witness_gap:.3e}"
    );

    let flip4 = Conjugation::new(flip(4), &base).unwrap();
    let (u, p) = unitary_extension(&t, &flip4, &base).unwrap();
    let four_cycle = CMatrix::from_fn(4, 4, |i, j| {
        if (j + 1) % 4 == i {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let p_expect = CMatrix::from_fn(4, 4, |i, j| {
        if i == j && i < 3 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    assert!((&u - four_cycle).norm() <= 1e-12);
    assert!((&p - p_expect).norm() <= 1e-12);
    let factorization = (&u * &p - &t).norm();
    assert!(factorization <= 1e-12);
    println!(
        "criterion 4: PASS — witness = flip4 (gap {witness_gap:.3e}), U = 4-cycle, \
         ‖UP − T‖ = {factorization:.3e}"
    );
}

#[test]
fn criterion_5_detector_and_oracle_agree_when_both_conclusive() {
    let started = Instant::now();
    let base = cfg();
    let mut oracle_cfg = base.clone();
    oracle_cfg.restarts = 32;
    oracle_cfg.max_iter = 500;
    let mut both_conclusive = 0usize;
    let mut disagreements = 0usize;
    for trial in 0..300u64 {
        let n = 3 + (trial % 4) as usize;
        let tseed = derive_seed(33_000, trial);
        let r = (tseed % (n as u64 + 1)) as usize;
        let t = random_partial_isometry(n, r, tseed).unwrap();
        let d = block_decompose(&t, &base).unwrap();
        let det = detect_csm(&d.a, &base.with_seed(derive_seed(tseed, 1))).unwrap();
        let oracle = oracle_uecsm(&t, &oracle_cfg.with_seed(derive_seed(tseed, 2))).unwrap();
        let detector_verdict = match det.status {
            DetectionStatus::Positive => Some(true),
            DetectionStatus::Negative => Some(false),
            DetectionStatus::Inconclusive => None,
        };
        let oracle_verdict = if oracle.best_residual <= base.eps_res {
            Some(true)
        } else if oracle.best_residual >= 100.0 * base.eps_res {
            Some(false)
        } else {
            None
        };
        if let (Some(a), Some(b)) = (detector_verdict, oracle_verdict) {
            both_conclusive += 1;
            if a != b {
                disagreements += 1;
                eprintln!(
                    "disagreement at n={n} r={r} seed={tseed}: detector {a}, oracle {b} \
                     ({:.3e})",
                    oracle.best_residual
                );
            }
        }
    }
    assert_eq!(disagreements, 0);
    assert!(
        both_conclusive >= 200,
        "only {both_conclusive}/300 conclusive"
    );
    println!(
        "criterion 5: PASS — {both_conclusive}/300 trials conclusive on both routes, \
         0 disagreements, {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_6_zero_summand_equivalence() {
    let started = Instant::now();
    let base = cfg();
    let mut checked = 0usize;
    for trial in 0..100u64 {
        let n = 2 + (trial % 4) as usize; // 2..=5
        let tseed = derive_seed(66_000, trial);
        let r = (tseed % (n as u64 + 1)) as usize;
        let t = random_partial_isometry(n, r, tseed).unwrap();
        let tcfg = base.with_seed(derive_seed(tseed, 1));
        let status = certify(&t, &tcfg).unwrap().status;
        for k in [1usize, 3] {
            let padded = certify(&lemma_zero_embed(&t, k), &tcfg).unwrap().status;
            assert_eq!(status, padded, "n={n} r={r} seed={tseed} k={k}");
            checked += 1;
        }
    }
    println!(
        "criterion 6: PASS — {checked} padded certifications match their base status, {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_7_aluthge_form_and_symmetry() {
    let started = Instant::now();
    let base = cfg();
    let mut oracle_cfg = base.clone();
    oracle_cfg.restarts = 32;
    oracle_cfg.max_iter = 500;
    let mut positives = 0usize;
    for trial in 0..100u64 {
        let n = 3 + (trial % 3) as usize; // 3..=5
        let tseed = derive_seed(77_000, trial);
        let r = (tseed % (n as u64 + 1)) as usize;
        let t = random_partial_isometry(n, r, tseed).unwrap();
        let d = block_decompose(&t, &base).unwrap();
        let a_tilde = aluthge(&t, &base).unwrap();
        let gap = (&a_tilde - &d.q1 * &d.a * d.q1.adjoint()).norm();
        assert!(gap <= 1e-8, "n={n} r={r} seed={tseed}: gap {gap:.3e}");

        let cert = certify(&t, &base.with_seed(derive_seed(tseed, 1))).unwrap();
        if cert.status == CertificateStatus::ComplexSymmetric {
            positives += 1;
            let oracle =
                oracle_uecsm(&a_tilde, &oracle_cfg.with_seed(derive_seed(tseed, 2))).unwrap();
            assert!(
                oracle.best_residual <= 1e-6,
                "n={n} seed={tseed}: Aluthge oracle residual {:.3e}",
                oracle.best_residual
            );
        }
    }
    assert!(positives >= 50, "only {positives}/100 positive samples");
    println!(
        "criterion 7: PASS — 100 compression-form checks, {positives} Aluthge transforms \
         oracle-confirmed complex symmetric, {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_8_structural_identity_sweep() {
    let started = Instant::now();
    let base = cfg();
    let mut decompositions = 0usize;
    let mut conjugations_checked = 0usize;
    for trial in 0..60u64 {
        let n = 2 + (trial % 5) as usize; // 2..=6
        let tseed = derive_seed(88_000, trial);
        let r = (tseed % (n as u64 + 1)) as usize;
        let t = random_partial_isometry(n, r, tseed).unwrap();
        let d = block_decompose(&t, &base).unwrap();
        decompositions += 1;

        let res = d.residuals();
        assert!(res.sum_of_squares <= 1e-8, "eq-SOS at seed {tseed}");
        let pol = polar_of_b(&d, &base).unwrap();
        let pres = polar_residuals(&d, &pol, &base).unwrap();
        assert!(pres.factorization <= 1e-8, "seed {tseed}");
        assert!(pres.adjoint_identities <= 1e-8, "seed {tseed}");
        assert!(pres.sqrt_identity <= 1e-8, "seed {tseed}");
        assert!(pres.initial_projection <= 1e-8, "seed {tseed}");

        let det = detect_csm(&d.a, &base.with_seed(derive_seed(tseed, 1))).unwrap();
        if det.status != DetectionStatus::Positive {
            continue;
        }
        let k = det.witness.unwrap();
        // commutation: (KA)|B| = |B|(KA) and (A*K)|B| = |B|(A*K)
        let mka = k.matrix() * conj(&d.a);
        let amk = d.a.adjoint() * k.matrix();
        let absb_c = conj(&pol.abs_b);
        let w2 = (&mka * &absb_c - &pol.abs_b * &mka)
            .norm()
            .max((&amk * &absb_c - &pol.abs_b * &amk).norm());
        assert!(w2 <= 1e-8, "commutation at seed {tseed}: {w2:.3e}");

        // conjugation axioms on random vectors for the synthesized witness
        // and a random conjugation of the same dimension
        let synth = synthesize_conjugation(&d, &k, &base.with_seed(derive_seed(tseed, 1))).unwrap();
        for (which, w) in [
            (0u64, synth.conjugation.clone()),
            (1u64, Conjugation::random(n, derive_seed(tseed, 3))),
        ] {
            let mut rng = rng_from_seed(derive_seed(tseed, 10 + which));
            for _ in 0..100 {
                let x = complex_gaussian_matrix(&mut rng, n, 1)
                    .column(0)
                    .into_owned();
                let cx = w.apply(&x).unwrap();
                assert!((cx.norm() - x.norm()).abs() <= 1e-12 * (x.norm() + 1.0));
                let back = w.apply(&cx).unwrap();
                assert!((back - &x).norm() <= 1e-12 * (x.norm() + 1.0));
            }
            conjugations_checked += 1;
        }
    }
    println!(
        "criterion 8: PASS — {decompositions} decompositions satisfy eq-SOS/polar/commutation, \
         {conjugations_checked} conjugations pass the axioms on 100 vectors each, {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_9_determinism_of_criteria_1_to_3() {
    let started = Instant::now();
    // criterion 1 rerun: byte-identical deterministic reports
    let first = montecarlo_dimension_sweep(&[1, 2, 3, 4], 1000);
    let second = montecarlo_dimension_sweep(&[1, 2, 3, 4], 1000);
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.render_deterministic(), b.render_deterministic());
    }

    // criterion 2 rerun: identical status/residual transcript
    let (t1, _) = rank_le2_sweep();
    let (t2, _) = rank_le2_sweep();
    assert_eq!(t1, t2);

    // criterion 3 rerun: the search report reproduces exactly
    let base = cfg();
    let s1 = cmd_find_negative(5, 3, 500, &base, None).unwrap();
    let s2 = cmd_find_negative(5, 3, 500, &base, None).unwrap();
    assert_eq!(s1.render_deterministic(), s2.render_deterministic());
    assert_eq!(
        s1.get("found.seed"),
        Some(format!("{FROZEN_NEGATIVE_SEED}").as_str())
    );

    println!(
        "criterion 9: PASS — criteria 1–3 reproduce byte-identical reports, {:.2?}",
        started.elapsed()
    );
}
