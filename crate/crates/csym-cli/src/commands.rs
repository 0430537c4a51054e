//! Command implementations. Each command is a pure function from its
//! arguments to a [`Report`]; `main` only parses flags, selects the thread
//! pool, prints, and maps errors to exit codes.

use std::path::Path;
use std::time::Instant;

use csym_core::csm::DetectionStatus;
use csym_core::matrix::CMatrix;
use csym_core::seeding::derive_seed;
use csym_core::{
    aluthge, block_decompose, certify, is_partial_isometry, oracle_uecsm, random_partial_isometry,
    unitary_extension, Certificate, CertificateStatus, Conjugation, Error as CoreError,
    ToleranceConfig,
};

use crate::matfile::{read_matrix, write_matrix, MatFileError};
use crate::report::Report;

/// Oracle corroboration floor for negative findings: the best residual of
/// the compression and of the full instance must both stay at or above
/// this for a negative to count. Twice the 1e-2 evidence threshold, so a
/// frozen instance keeps a margin under any larger restart budget.
pub const NEGATIVE_CORROBORATION_FLOOR: f64 = 2e-2;

/// CLI failures split by exit code: invalid input (2) versus internal
/// invariant violations (3).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<MatFileError> for CliError {
    fn from(e: MatFileError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Internal(_)
            | CoreError::SynthesisValidation(_)
            | CoreError::FactorizationFailure => CliError::Internal(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CmdResult = Result<Report, CliError>;

fn write_out(path: &Path, m: &CMatrix) -> Result<(), CliError> {
    write_matrix(path, m).map_err(CliError::from)
}

/// Derived per-trial seed stream for Monte Carlo runs.
const TRIAL_STREAM: u64 = 0x4d43;

/// `gen`: write a seeded random rank-r partial isometry.
pub fn cmd_gen(n: usize, r: usize, cfg: &ToleranceConfig, out: &Path) -> CmdResult {
    let started = Instant::now();
    let t = random_partial_isometry(n, r, cfg.seed)?;
    let (ok, residual) = is_partial_isometry(&t, cfg)?;
    if !ok {
        return Err(CliError::Internal(format!(
            "generated matrix failed the partial isometry test (residual {residual:.3e})"
        )));
    }
    write_out(out, &t)?;
    let mut report = Report::new("gen");
    report.push_config(cfg);
    report.push("dim", n);
    report.push("rank", r);
    report.push("output", out.display());
    report.push_f64("projection_residual", residual);
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

fn push_certificate(report: &mut Report, prefix: &str, cert: &Certificate, with_witness: bool) {
    report.push(&format!("{prefix}.status"), cert.status.name());
    if cert.status == CertificateStatus::ComplexSymmetric {
        report.push_f64(
            &format!("{prefix}.residual_symmetry"),
            cert.residual_symmetry,
        );
        report.push_f64(
            &format!("{prefix}.residual_conjugation"),
            cert.residual_conjugation,
        );
        report.push_f64(
            &format!("{prefix}.residual_sos"),
            cert.metadata.sos_residual,
        );
        report.push_f64(&format!("{prefix}.residual_w1"), cert.metadata.w1_residual);
        report.push_f64(&format!("{prefix}.residual_w2"), cert.metadata.w2_residual);
    }
    let det = &cert.detection;
    report.push(
        &format!("{prefix}.detection.status"),
        match det.status {
            DetectionStatus::Positive => "Positive",
            DetectionStatus::Negative => "Negative",
            DetectionStatus::Inconclusive => "Inconclusive",
        },
    );
    report.push(&format!("{prefix}.detection.method"), det.method.name());
    report.push(
        &format!("{prefix}.detection.intertwiner_dim"),
        det.intertwiner_dim,
    );
    report.push(
        &format!("{prefix}.detection.symmetric_dim"),
        det.symmetric_dim,
    );
    report.push_f64(&format!("{prefix}.detection.residual"), det.residual);
    report.push(
        &format!("{prefix}.detection.restarts_used"),
        det.restarts_used,
    );
    if let Some(obstruction) = &det.obstruction {
        report.push(&format!("{prefix}.obstruction"), obstruction.describe());
    }
    if let Some(seed) = cert.metadata.pad_seed {
        report.push(&format!("{prefix}.pad_seed"), seed);
    }
    for (i, w) in cert.metadata.rank_warnings.iter().enumerate() {
        report.push(&format!("{prefix}.warning.{i}"), w);
    }
    if with_witness {
        if let Some(conj) = &cert.conjugation {
            report.push_matrix(&format!("{prefix}.witness"), conj.matrix());
        }
    }
}

/// `certify`: decide complex symmetry of the partial isometry in a file.
pub fn cmd_certify(input: &Path, cfg: &ToleranceConfig, out: Option<&Path>) -> CmdResult {
    let started = Instant::now();
    let t = read_matrix(input)?;
    let cert = certify(&t, cfg)?;
    let mut report = Report::new("certify");
    report.push("input", input.display());
    report.push_config(cfg);
    report.push("dim", t.nrows());
    push_certificate(&mut report, "certificate", &cert, true);
    if let (Some(path), Some(conj)) = (out, &cert.conjugation) {
        write_out(path, conj.matrix())?;
        report.push("output", path.display());
    }
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// Rank selection for Monte Carlo: a fixed rank or a seeded uniform mix.
#[derive(Debug, Clone, Copy)]
pub enum RankChoice {
    Fixed(usize),
    All,
}

struct TrialOutcome {
    status: CertificateStatus,
    residual_symmetry: f64,
    residual_conjugation: f64,
    warnings: usize,
}

/// `montecarlo`: certify a stream of seeded random partial isometries and
/// aggregate counts and worst residuals. Per-trial seeds derive from
/// (seed, trial index), so any `--jobs` setting yields identical results.
pub fn cmd_montecarlo(
    n: usize,
    rank: RankChoice,
    trials: usize,
    cfg: &ToleranceConfig,
) -> CmdResult {
    use rayon::prelude::*;
    let started = Instant::now();
    if trials == 0 {
        return Err(CliError::Invalid("trials must be at least 1".into()));
    }
    let run_trial = |trial: usize| -> Result<TrialOutcome, CliError> {
        let tseed = derive_seed(cfg.seed, derive_seed(TRIAL_STREAM, trial as u64));
        let r = match rank {
            RankChoice::Fixed(r) => r,
            RankChoice::All => (tseed % (n as u64 + 1)) as usize,
        };
        let t = random_partial_isometry(n, r, tseed)?;
        let cert = certify(&t, &cfg.with_seed(derive_seed(tseed, 1)))?;
        Ok(TrialOutcome {
            status: cert.status,
            residual_symmetry: cert.residual_symmetry,
            residual_conjugation: cert.residual_conjugation,
            warnings: cert.metadata.rank_warnings.len(),
        })
    };
    let outcomes: Vec<Result<TrialOutcome, CliError>> =
        (0..trials).into_par_iter().map(run_trial).collect();

    let mut counts = (0usize, 0usize, 0usize);
    let mut worst_sym = (0.0f64, None::<usize>);
    let mut worst_conj = (0.0f64, None::<usize>);
    let mut warnings = 0usize;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome?;
        match o.status {
            CertificateStatus::ComplexSymmetric => {
                counts.0 += 1;
                if o.residual_symmetry > worst_sym.0 {
                    worst_sym = (o.residual_symmetry, Some(i));
                }
                if o.residual_conjugation > worst_conj.0 {
                    worst_conj = (o.residual_conjugation, Some(i));
                }
            }
            CertificateStatus::NotComplexSymmetric => counts.1 += 1,
            CertificateStatus::Inconclusive => counts.2 += 1,
        }
        warnings += o.warnings;
    }

    let mut report = Report::new("montecarlo");
    report.push_config(cfg);
    report.push("dim", n);
    match rank {
        RankChoice::Fixed(r) => report.push("rank", r),
        RankChoice::All => report.push("rank", "all"),
    }
    report.push("trials", trials);
    report.push("counts.complex_symmetric", counts.0);
    report.push("counts.not_complex_symmetric", counts.1);
    report.push("counts.inconclusive", counts.2);
    report.push_f64("worst.residual_symmetry", worst_sym.0);
    if let Some(i) = worst_sym.1 {
        report.push("worst.residual_symmetry_trial", i);
    }
    report.push_f64("worst.residual_conjugation", worst_conj.0);
    if let Some(i) = worst_conj.1 {
        report.push("worst.residual_conjugation_trial", i);
    }
    report.push("rank_warnings", warnings);
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// `find-negative`: scan seeded samples until one certifies as not complex
/// symmetric with oracle corroboration, then freeze it to a file. Budget
/// exhaustion is an ordinary report, not an error.
pub fn cmd_find_negative(
    n: usize,
    r: usize,
    budget: usize,
    cfg: &ToleranceConfig,
    out: Option<&Path>,
) -> CmdResult {
    let started = Instant::now();
    let mut report = Report::new("find-negative");
    report.push_config(cfg);
    report.push("dim", n);
    report.push("rank", r);
    report.push("budget", budget);

    let mut uncorroborated = 0usize;
    for trial in 0..budget {
        let tseed = derive_seed(cfg.seed, derive_seed(TRIAL_STREAM, trial as u64));
        let t = random_partial_isometry(n, r, tseed)?;
        let cert = certify(&t, &cfg.with_seed(derive_seed(tseed, 1)))?;
        if cert.status != CertificateStatus::NotComplexSymmetric {
            continue;
        }
        // corroborate with the independent oracle, on the compression
        // first (cheap) and then on the full instance
        let d = block_decompose(&t, cfg)?;
        let ocfg = ToleranceConfig {
            restarts: cfg.restarts.max(200),
            ..cfg.with_seed(derive_seed(tseed, 2))
        };
        let oracle_a = oracle_uecsm(&d.a, &ocfg)?;
        if oracle_a.best_residual < NEGATIVE_CORROBORATION_FLOOR {
            uncorroborated += 1;
            continue;
        }
        let oracle_t = oracle_uecsm(&t, &ocfg)?;
        if oracle_t.best_residual < NEGATIVE_CORROBORATION_FLOOR {
            uncorroborated += 1;
            continue;
        }
        report.push("found", true);
        report.push("found.trial", trial);
        report.push("found.seed", tseed);
        if let Some(obstruction) = &cert.detection.obstruction {
            report.push("found.obstruction", obstruction.describe());
        }
        report.push_f64("found.oracle_residual_compression", oracle_a.best_residual);
        report.push_f64("found.oracle_residual", oracle_t.best_residual);
        report.push("found.oracle_restarts", oracle_t.restarts_used);
        report.push("uncorroborated_negatives", uncorroborated);
        if let Some(path) = out {
            write_out(path, &t)?;
            report.push("output", path.display());
        }
        report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
        return Ok(report);
    }
    report.push("found", false);
    report.push("trials_exhausted", budget);
    report.push("uncorroborated_negatives", uncorroborated);
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// `extend`: factor a C-symmetric partial isometry as `T = U·P` with a
/// C-symmetric unitary U and the projection `P = T*T`.
pub fn cmd_extend(
    input: &Path,
    conjugation_path: &Path,
    cfg: &ToleranceConfig,
    out_u: Option<&Path>,
    out_p: Option<&Path>,
) -> CmdResult {
    let started = Instant::now();
    let t = read_matrix(input)?;
    let m = read_matrix(conjugation_path)?;
    let conjugation = Conjugation::new(m, cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (u, p) = match unitary_extension(&t, &conjugation, cfg) {
        Ok(pair) => pair,
        Err(e @ CoreError::NotCertifying { .. })
        | Err(e @ CoreError::NotPartialIsometry { .. }) => {
            return Err(CliError::Invalid(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut report = Report::new("extend");
    report.push("input", input.display());
    report.push("conjugation", conjugation_path.display());
    report.push_config(cfg);
    report.push_f64(
        "residual_unitarity",
        csym_core::matrix::unitarity_defect(&u),
    );
    report.push_f64(
        "residual_c_symmetry",
        csym_core::c_symmetry_residual(&u, &conjugation).map_err(CliError::from)?,
    );
    report.push_f64(
        "residual_factorization",
        (&u * &p - &t).norm() / (t.norm() + 1.0),
    );
    if let Some(path) = out_u {
        write_out(path, &u)?;
        report.push("output.unitary", path.display());
    }
    if let Some(path) = out_p {
        write_out(path, &p)?;
        report.push("output.projection", path.display());
    }
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// `aluthge`: file-to-file Aluthge transform.
pub fn cmd_aluthge(input: &Path, cfg: &ToleranceConfig, out: &Path) -> CmdResult {
    let started = Instant::now();
    let t = read_matrix(input)?;
    let a = aluthge(&t, cfg)?;
    write_out(out, &a)?;
    let mut report = Report::new("aluthge");
    report.push("input", input.display());
    report.push_config(cfg);
    report.push("output", out.display());
    report.push_f64("transform_norm", a.norm());
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// `oracle`: multi-restart optimization evidence for complex symmetry of
/// an arbitrary square matrix.
pub fn cmd_oracle(input: &Path, cfg: &ToleranceConfig, out: Option<&Path>) -> CmdResult {
    let started = Instant::now();
    let a = read_matrix(input)?;
    let outcome = oracle_uecsm(&a, cfg)?;
    let mut report = Report::new("oracle");
    report.push("input", input.display());
    report.push_config(cfg);
    report.push("dim", a.nrows());
    report.push_f64("best_residual", outcome.best_residual);
    report.push("restarts_used", outcome.restarts_used);
    if let Some(path) = out {
        write_out(path, &outcome.best_m)?;
        report.push("output", path.display());
    }
    report.push_timing("wall_ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// Runs `f` inside a rayon pool of the requested width (or the default).
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// One-line human summary for `--verbose` (stderr).
pub fn summarize(report: &Report) -> String {
    let command = report.get("command").unwrap_or("?");
    match command {
        "certify" => format!(
            "certify: {} (detection {})",
            report.get("certificate.status").unwrap_or("?"),
            report.get("certificate.detection.method").unwrap_or("?"),
        ),
        "montecarlo" => format!(
            "montecarlo: {} trials -> {} complex symmetric, {} not, {} inconclusive",
            report.get("trials").unwrap_or("?"),
            report.get("counts.complex_symmetric").unwrap_or("?"),
            report.get("counts.not_complex_symmetric").unwrap_or("?"),
            report.get("counts.inconclusive").unwrap_or("?"),
        ),
        "find-negative" => match report.get("found") {
            Some("true") => format!(
                "find-negative: found at trial {} (oracle residual {})",
                report.get("found.trial").unwrap_or("?"),
                report.get("found.oracle_residual").unwrap_or("?"),
            ),
            _ => "find-negative: budget exhausted with no corroborated negative".to_string(),
        },
        other => format!("{other}: done"),
    }
}

