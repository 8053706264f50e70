//! Config-driven simulation studies with reproducible outputs.
//!
//! A study is described by a JSON [`ExperimentConfig`] and produces CSV
//! tables (the canonical output), a minimal hand-assembled SVG figure, and
//! a `manifest.json` listing every emitted file with its SHA-256 hash.
//! Replicates run on a work-stealing pool; each replicate derives its
//! random seeds purely from `(master seed, domain, N, replicate)`, and
//! output records are sorted by `(N, replicate)` before writing, so a rerun
//! of the same config produces byte-identical CSV and SVG files. Wall-clock
//! timings are deliberately kept out of the CSVs — they live in the
//! per-replicate records and the manifest.
//!
//! Studies: `consistency` (error decay over a grid of network sizes, with
//! the log-log OLS slope), `normality` (replicated standardized estimates
//! run through the multivariate normality diagnostics), `fdr` / `roc`
//! (multiple-testing error rates and score discrimination), `gof`
//! (simulate from a fitted model and compare sufficient statistics), and
//! `bounds-sweep` (the finite-sample bound calculators over the size grid).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::estim::{fit_tally, EstimError, FitOptions, FitResult, Objective};
use crate::graphgen::{sample_basis, sample_multilayer, BasisSpec, GraphGenError};
use crate::infer::{
    auc, fdr_power, normality_diagnostics, roc_from_scores, wald_tests, InferError, MardiaTest,
    Method, ReplicateMatrix,
};
use crate::model::{
    info_dyad, network_suff_stats, pair_count, BasisNetwork, DyadTally, InteractionIndex,
    ModelError,
};
use crate::theory::{
    dg, remainder_bound, thm1_bound, thm2_bernoulli, thm2_bound, xi_epsilon, TheoryError,
    TheoryInputs,
};

/// Errors from configuring or running a study.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphGenError),
    #[error(transparent)]
    Estim(#[from] EstimError),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("{failed} of {total} replicate fits failed (more than 10%)")]
    TooManyFailures { failed: usize, total: usize },
}

/// Which simulation study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Consistency,
    Normality,
    Fdr,
    Roc,
    Gof,
    BoundsSweep,
}

impl std::fmt::Display for Study {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Study::Consistency => "consistency",
            Study::Normality => "normality",
            Study::Fdr => "fdr",
            Study::Roc => "roc",
            Study::Gof => "gof",
            Study::BoundsSweep => "bounds-sweep",
        })
    }
}

/// Where the generating parameter comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaSource {
    /// A fixed vector of length `p`.
    Explicit(Vec<f64>),
    /// Per-replicate uniform(-1, 1) draws with components 3 and 5
    /// (1-based) forced to zero, so the truth pattern of nulls is fixed
    /// while effect sizes vary.
    RandomTwoZeros,
}

const CONFIG_FORMAT_VERSION: u32 = 1;

fn default_format_version() -> u32 {
    CONFIG_FORMAT_VERSION
}
fn default_alpha() -> f64 {
    0.05
}
fn default_objective() -> Objective {
    Objective::Mple
}
fn default_epsilon_star() -> f64 {
    2.0
}
fn default_xi_ball_samples() -> usize {
    200
}

/// A study description, loadable from JSON (unknown fields rejected).
///
/// ```json
/// {
///   "study": "consistency",
///   "n_grid": [200, 400],
///   "m_replicates": 100,
///   "k": 3, "h": 2,
///   "theta_star": {"explicit": [-3, -2, -1, 0.5, 0, 0]},
///   "basis": {"bernoulli-fixed": 0.8},
///   "seed": 1,
///   "output_dir": "out/consistency"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub study: Study,
    pub n_grid: Vec<usize>,
    pub m_replicates: usize,
    pub k: usize,
    pub h: usize,
    pub theta_star: ThetaSource,
    pub basis: BasisSpec,
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub output_dir: PathBuf,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    /// Simulated networks per goodness-of-fit comparison (gof study only).
    #[serde(default)]
    pub gof_reps: usize,
    /// Normality study: draw estimates exactly from the limiting Gaussian
    /// instead of fitting, to calibrate the diagnostics themselves.
    #[serde(default)]
    pub synthetic_gaussian: bool,
    /// Ball radius for the bound sweep's minimum-eigenvalue level.
    #[serde(default = "default_epsilon_star")]
    pub epsilon_star: f64,
    #[serde(default = "default_xi_ball_samples")]
    pub xi_ball_samples: usize,
}

impl ExperimentConfig {
    pub fn index(&self) -> Result<InteractionIndex, HarnessError> {
        Ok(InteractionIndex::new(self.k, self.h)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.format_version != CONFIG_FORMAT_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported config format_version {} (expected {CONFIG_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.n_grid.is_empty() {
            return Err(HarnessError::Config("n_grid must be nonempty".into()));
        }
        if self.n_grid.iter().any(|&n| n < 3) {
            return Err(HarnessError::Config("every grid size needs N >= 3".into()));
        }
        if self.m_replicates == 0 {
            return Err(HarnessError::Config("m_replicates must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HarnessError::Config(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        for &n in &self.n_grid {
            self.basis.validate(n).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        let index = self.index()?;
        match &self.theta_star {
            ThetaSource::Explicit(theta) => {
                index.validate_theta(theta).map_err(|e| HarnessError::Config(e.to_string()))?;
            }
            ThetaSource::RandomTwoZeros => {
                if index.p() < 5 {
                    return Err(HarnessError::Config(format!(
                        "random theta source zeroes components 3 and 5, but p = {}",
                        index.p()
                    )));
                }
            }
        }
        match self.study {
            Study::Normality if self.m_replicates < 50 => Err(HarnessError::Config(format!(
                "normality study needs m_replicates >= 50, got {}",
                self.m_replicates
            ))),
            Study::Gof if self.gof_reps == 0 => {
                Err(HarnessError::Config("gof study needs gof_reps >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Loads and validates a JSON config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Pure seed derivation for one replicate stream: SHA-256 over
/// `(master, domain, n, rep)`, truncated to 64 bits. Distinct domains
/// ("theta", "basis", "layers", "gof", ...) give independent streams for
/// the same replicate.
pub fn replicate_seed(master: u64, domain: &str, n: usize, rep: usize) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(domain.as_bytes());
    hasher.update([0u8]);
    hasher.update((n as u64).to_le_bytes());
    hasher.update((rep as u64).to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is at least 8 bytes"))
}

/// One replicate's result.
#[derive(Debug, Clone)]
pub struct ReplicateRecord {
    pub n: usize,
    pub rep: usize,
    pub seed_basis: u64,
    pub seed_layers: u64,
    pub theta_star: Vec<f64>,
    /// `None` when the fit failed outright.
    pub theta_hat: Option<Vec<f64>>,
    pub converged: bool,
    /// `||theta_hat - theta_star|| / ||theta_star||`; `None` for failed
    /// fits or a zero generating parameter.
    pub rel_l2_error: Option<f64>,
    pub abs_l2_error: Option<f64>,
    pub runtime_ms: u128,
}

/// A file the study wrote, with its content hash.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Study-specific summary numbers (the same values the summary CSVs hold).
#[derive(Debug, Clone)]
pub enum StudySummary {
    Consistency {
        /// `(N, median relative l2 error over converged replicates)`.
        per_n_median: Vec<(usize, f64)>,
        /// Log-log OLS slope over the medians; `None` with fewer than two
        /// grid points.
        ols_slope: Option<f64>,
        ols_intercept: Option<f64>,
    },
    Normality {
        /// Per-component Anderson-Darling `(statistic, p)`.
        anderson_darling: Vec<(f64, f64)>,
        mardia: MardiaTest,
        /// Components whose AD p-value exceeds the config alpha.
        ad_passes: usize,
    },
    Fdr {
        /// `(N, method, empirical FDR, empirical power)`.
        rows: Vec<(usize, Method, f64, f64)>,
    },
    Roc {
        /// `(N, AUC)` plus the pooled ROC points per N.
        auc_per_n: Vec<(usize, f64)>,
        points: Vec<(usize, f64, f64)>,
    },
    Gof(GofTable),
    Bounds {
        rows: Vec<BoundsRow>,
    },
}

/// Everything a study run produced.
#[derive(Debug)]
pub struct StudyOutput {
    pub study: Study,
    pub records: Vec<ReplicateRecord>,
    pub summary: StudySummary,
    pub files: Vec<ManifestFile>,
    pub failures: usize,
    pub total_runtime_ms: u128,
}

/// Per-statistic goodness-of-fit comparison.
#[derive(Debug, Clone)]
pub struct GofRow {
    pub label: String,
    pub observed: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct GofTable {
    pub rows: Vec<GofRow>,
    /// `||s_obs - mean s_sim||_2 / ||s_obs||_2`.
    pub rel_l2_error: f64,
    pub n_reps: usize,
}

/// One grid row of the bound sweep.
#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub n: usize,
    pub expected_edges: f64,
    pub dg_plus: f64,
    pub xi: f64,
    pub xi_pseudo: f64,
    pub thm1_mle: f64,
    pub thm1_mple: f64,
    pub thm2_total: f64,
    pub remainder: f64,
    pub remainder_floor: f64,
    /// Bernoulli specialization, when the basis is a fixed Bernoulli graph.
    pub bernoulli_total: Option<f64>,
    pub bernoulli_remainder: Option<f64>,
    pub bernoulli_floor: Option<f64>,
}

fn resolve_theta(cfg: &ExperimentConfig, p: usize, n: usize, rep: usize) -> Vec<f64> {
    match &cfg.theta_star {
        ThetaSource::Explicit(theta) => theta.clone(),
        ThetaSource::RandomTwoZeros => {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(cfg.seed, "theta", n, rep));
            let mut theta: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            theta[2] = 0.0;
            theta[4] = 0.0;
            theta
        }
    }
}

struct FitOutcome {
    record: ReplicateRecord,
    fit: Option<FitResult>,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs the per-replicate sample-and-fit pipeline over `ns x m` jobs in
/// parallel and returns outcomes sorted by `(N, replicate)`.
fn run_replicates(
    cfg: &ExperimentConfig,
    ns: &[usize],
    index: &InteractionIndex,
) -> Result<Vec<FitOutcome>, HarnessError> {
    let jobs: Vec<(usize, usize)> =
        ns.iter().flat_map(|&n| (0..cfg.m_replicates).map(move |rep| (n, rep))).collect();
    let opts = FitOptions::new(cfg.objective);
    let p = index.p();
    let mut outcomes: Vec<FitOutcome> = jobs
        .into_par_iter()
        .map(|(n, rep)| {
            let start = Instant::now();
            let theta_star = resolve_theta(cfg, p, n, rep);
            let seed_basis = replicate_seed(cfg.seed, "basis", n, rep);
            let seed_layers = replicate_seed(cfg.seed, "layers", n, rep);
            let fit = sample_basis(&cfg.basis, n, seed_basis)
                .map_err(HarnessError::from)
                .and_then(|basis| {
                    let x = sample_multilayer(&basis.network, &theta_star, index, seed_layers)?;
                    let tally = DyadTally::new(&x, &basis.network, index)?;
                    Ok(fit_tally(&tally, index, &opts)?)
                })
                .ok();
            let converged = fit.as_ref().map_or(false, |f| f.converged);
            let (theta_hat, abs_err) = match &fit {
                Some(f) => {
                    let diff: Vec<f64> = f
                        .theta_hat
                        .iter()
                        .zip(&theta_star)
                        .map(|(a, b)| a - b)
                        .collect();
                    (Some(f.theta_hat.clone()), Some(l2(&diff)))
                }
                None => (None, None),
            };
            let star_norm = l2(&theta_star);
            let rel = match (converged, abs_err, star_norm > 0.0) {
                (true, Some(abs), true) => Some(abs / star_norm),
                _ => None,
            };
            FitOutcome {
                record: ReplicateRecord {
                    n,
                    rep,
                    seed_basis,
                    seed_layers,
                    theta_star,
                    theta_hat,
                    converged,
                    rel_l2_error: rel,
                    abs_l2_error: abs_err,
                    runtime_ms: start.elapsed().as_millis(),
                },
                fit,
            }
        })
        .collect();
    outcomes.sort_by_key(|o| (o.record.n, o.record.rep));
    let total = outcomes.len();
    let failed = outcomes.iter().filter(|o| !o.record.converged).count();
    if failed * 10 > total {
        return Err(HarnessError::TooManyFailures { failed, total });
    }
    Ok(outcomes)
}

/// R type-7 quantile of pre-sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(quantile(values, 0.5))
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept)`.
fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

// ---------------------------------------------------------------------------
// Output plumbing: CSV, SVG, manifest.
// ---------------------------------------------------------------------------

struct OutputDir {
    root: PathBuf,
    files: Vec<ManifestFile>,
}

impl OutputDir {
    fn create(root: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(root)
            .map_err(|source| HarnessError::Io { path: root.to_path_buf(), source })?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), HarnessError> {
        let path = self.root.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(row)?;
        }
        writer.flush().map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        self.register(name)
    }

    fn write_text(&mut self, name: &str, contents: &str) -> Result<(), HarnessError> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        self.register(name)
    }

    fn register(&mut self, name: &str) -> Result<(), HarnessError> {
        let path = self.root.join(name);
        let bytes = fs::read(&path)
            .map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
        self.files.push(ManifestFile {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256,
        });
        Ok(())
    }

    fn write_manifest(
        &mut self,
        cfg: &ExperimentConfig,
        failures: usize,
        total_runtime_ms: u128,
    ) -> Result<(), HarnessError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            format_version: u32,
            study: String,
            config: &'a ExperimentConfig,
            files: &'a [ManifestFile],
            failures: usize,
            total_runtime_ms: u128,
        }
        let manifest = Manifest {
            format_version: CONFIG_FORMAT_VERSION,
            study: cfg.study.to_string(),
            config: cfg,
            files: &self.files,
            failures,
            total_runtime_ms,
        };
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| HarnessError::Io { path, source })?;
        Ok(())
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn records_rows(records: &[ReplicateRecord], p: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["n".to_string(), "replicate".into(), "seed_basis".into(), "seed_layers".into()];
    for t in 0..p {
        header.push(format!("theta_star_{}", t + 1));
    }
    for t in 0..p {
        header.push(format!("theta_hat_{}", t + 1));
    }
    header.extend(["converged".to_string(), "rel_l2_error".into(), "abs_l2_error".into()]);
    let rows = records
        .iter()
        .map(|r| {
            let mut row = vec![
                r.n.to_string(),
                r.rep.to_string(),
                r.seed_basis.to_string(),
                r.seed_layers.to_string(),
            ];
            row.extend(r.theta_star.iter().map(|v| fmt_f64(*v)));
            match &r.theta_hat {
                Some(hat) => row.extend(hat.iter().map(|v| fmt_f64(*v))),
                None => row.extend(std::iter::repeat(String::new()).take(p)),
            }
            row.push(r.converged.to_string());
            row.push(fmt_opt(r.rel_l2_error));
            row.push(fmt_opt(r.abs_l2_error));
            row
        })
        .collect();
    (header, rows)
}

fn write_records(out: &mut OutputDir, records: &[ReplicateRecord], p: usize) -> Result<(), HarnessError> {
    let (header, rows) = records_rows(records, p);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_csv("records.csv", &header_refs, &rows)
}

/// Hand-assembled scatter plot: data points, optional `y = a + b x` line,
/// axis frame with the data ranges as corner labels.
fn svg_scatter(title: &str, points: &[(f64, f64)], line: Option<(f64, f64)>) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x0 == x1 {
        x1 = x0 + 1.0;
    }
    if y0 == y1 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n\
         <rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w / 2.0,
        w - 2.0 * m,
        h - 2.0 * m,
    );
    if let Some((slope, intercept)) = line {
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
            sx(x0),
            sy(intercept + slope * x0),
            sx(x1),
            sy(intercept + slope * x1),
        ));
    }
    for &(x, y) in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"firebrick\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{m}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">({x0:.3}, {y0:.3})</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">({x1:.3}, {y1:.3})</text>\n</svg>\n",
        h - m / 2.0,
        w - m,
        m / 1.5,
    ));
    svg
}

/// Hand-assembled bar chart over labeled categories.
fn svg_bars(title: &str, bars: &[(String, f64)], reference: Option<f64>) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let top = bars.iter().map(|b| b.1).fold(0.0f64, f64::max).max(reference.unwrap_or(0.0)).max(1e-12);
    let band = (w - 2.0 * m) / bars.len().max(1) as f64;
    let sy = |v: f64| h - m - v / top * (h - 2.0 * m);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        w / 2.0
    );
    for (i, (label, value)) in bars.iter().enumerate() {
        let x = m + i as f64 * band;
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\"/>\n\
             <text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{value:.4}</text>\n",
            x + band * 0.15,
            sy(*value),
            band * 0.7,
            (h - m) - sy(*value),
            x + band / 2.0,
            h - m / 2.0,
            x + band / 2.0,
            sy(*value) - 5.0,
        ));
    }
    if let Some(r) = reference {
        svg.push_str(&format!(
            "<line x1=\"{m}\" y1=\"{:.2}\" x2=\"{}\" y2=\"{:.2}\" stroke=\"firebrick\" stroke-dasharray=\"4\"/>\n",
            sy(r),
            w - m,
            sy(r),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// Studies.
// ---------------------------------------------------------------------------

/// Dispatches on `cfg.study`.
pub fn run_study(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    cfg.validate()?;
    match cfg.study {
        Study::Consistency => run_consistency(cfg),
        Study::Normality => run_normality(cfg),
        Study::Fdr => run_fdr(cfg),
        Study::Roc => run_roc(cfg),
        Study::Gof => run_gof_study(cfg),
        Study::BoundsSweep => run_bounds_sweep(cfg),
    }
}

fn expect_study(cfg: &ExperimentConfig, study: Study) -> Result<(), HarnessError> {
    cfg.validate()?;
    if cfg.study != study {
        return Err(HarnessError::Config(format!(
            "config declares study {}, expected {study}",
            cfg.study
        )));
    }
    Ok(())
}

/// Estimation-error decay over the size grid: per-N medians of the
/// relative l2 error and the log-log OLS slope across grid sizes.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::Consistency)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let outcomes = run_replicates(cfg, &cfg.n_grid, &index)?;
    let records: Vec<ReplicateRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let failures = records.iter().filter(|r| !r.converged).count();

    let mut per_n_median = Vec::new();
    for &n in &cfg.n_grid {
        let mut errors: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.rel_l2_error)
            .collect();
        if let Some(med) = median(&mut errors) {
            per_n_median.push((n, med));
        }
    }
    let log_points: Vec<(f64, f64)> =
        per_n_median.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    let xs: Vec<f64> = log_points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = log_points.iter().map(|p| p.1).collect();
    let fit_line = ols(&xs, &ys);

    let mut out = OutputDir::create(&cfg.output_dir)?;
    write_records(&mut out, &records, index.p())?;
    let median_rows: Vec<Vec<String>> = per_n_median
        .iter()
        .map(|&(n, e)| vec![n.to_string(), fmt_f64(e)])
        .collect();
    out.write_csv("medians.csv", &["n", "median_rel_l2_error"], &median_rows)?;
    let mut summary_rows = vec![
        vec!["replicates".to_string(), records.len().to_string()],
        vec!["failures".to_string(), failures.to_string()],
    ];
    if let Some((slope, intercept)) = fit_line {
        summary_rows.push(vec!["ols_slope".to_string(), fmt_f64(slope)]);
        summary_rows.push(vec!["ols_intercept".to_string(), fmt_f64(intercept)]);
    }
    out.write_csv("summary.csv", &["key", "value"], &summary_rows)?;
    out.write_text(
        "figure.svg",
        &svg_scatter("median relative error vs size (log-log)", &log_points, fit_line),
    )?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, failures, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::Consistency,
        records,
        summary: StudySummary::Consistency {
            per_n_median,
            ols_slope: fit_line.map(|l| l.0),
            ols_intercept: fit_line.map(|l| l.1),
        },
        files: out.files,
        failures,
        total_runtime_ms,
    })
}

/// Multivariate-normality diagnostics of standardized estimates at the
/// largest grid size: per-replicate rows `sqrt(||Y||_1) (theta_hat -
/// theta_star)` whitened by the square root of the dyad-level information
/// at the generating parameter.
pub fn run_normality(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::Normality)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let p = index.p();
    let n = *cfg.n_grid.iter().max().expect("validated nonempty grid");
    let theta_star = resolve_theta(cfg, p, n, 0);

    let records: Vec<ReplicateRecord> = if cfg.synthetic_gaussian {
        // Draw estimates exactly from the limiting Gaussian so the
        // diagnostics themselves are on trial, not the estimator.
        let basis = sample_basis(&cfg.basis, n, replicate_seed(cfg.seed, "basis", n, 0))?;
        let y1 = basis.network.edge_count() as f64;
        let info_total = info_dyad(&theta_star, &index)? * y1;
        let cov = Cholesky::new(info_total)
            .ok_or_else(|| HarnessError::Config("information matrix is singular at theta_star".into()))?
            .inverse();
        let chol = Cholesky::new(cov)
            .ok_or_else(|| HarnessError::Config("information matrix is singular at theta_star".into()))?;
        let l = chol.l();
        (0..cfg.m_replicates)
            .map(|rep| {
                let start = Instant::now();
                let mut rng =
                    ChaCha8Rng::seed_from_u64(replicate_seed(cfg.seed, "layers", n, rep));
                let z = DMatrix::from_fn(p, 1, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
                let draw = &l * z;
                let theta_hat: Vec<f64> =
                    theta_star.iter().enumerate().map(|(t, v)| v + draw[(t, 0)]).collect();
                let diff: Vec<f64> =
                    theta_hat.iter().zip(&theta_star).map(|(a, b)| a - b).collect();
                let abs = l2(&diff);
                let star_norm = l2(&theta_star);
                ReplicateRecord {
                    n,
                    rep,
                    seed_basis: replicate_seed(cfg.seed, "basis", n, 0),
                    seed_layers: replicate_seed(cfg.seed, "layers", n, rep),
                    theta_star: theta_star.clone(),
                    theta_hat: Some(theta_hat),
                    converged: true,
                    rel_l2_error: (star_norm > 0.0).then(|| abs / star_norm),
                    abs_l2_error: Some(abs),
                    runtime_ms: start.elapsed().as_millis(),
                }
            })
            .collect()
    } else {
        run_replicates(cfg, &[n], &index)?.into_iter().map(|o| o.record).collect()
    };
    let failures = records.iter().filter(|r| !r.converged).count();

    // Per-replicate scaling by sqrt(||Y||_1) happens row-wise; the shared
    // whitening by I(theta_star)^{1/2} happens inside the diagnostics.
    let kept: Vec<&ReplicateRecord> = records.iter().filter(|r| r.converged).collect();
    let mut rows = DMatrix::zeros(kept.len(), p);
    for (m, r) in kept.iter().enumerate() {
        let y1 = basis_edge_count(cfg, r)? as f64;
        let hat = r.theta_hat.as_ref().expect("converged record has an estimate");
        for t in 0..p {
            rows[(m, t)] = y1.sqrt() * (hat[t] - theta_star[t]);
        }
    }
    let rm = ReplicateMatrix::new(rows, vec![0.0; p])?;
    let info_star = info_dyad(&theta_star, &index)?;
    let report = normality_diagnostics(&rm, Some(&info_star))?;
    let ad_passes = report.anderson_darling.iter().filter(|(_, pv)| *pv > cfg.alpha).count();

    let mut out = OutputDir::create(&cfg.output_dir)?;
    write_records(&mut out, &records, p)?;
    let component_rows: Vec<Vec<String>> = report
        .anderson_darling
        .iter()
        .enumerate()
        .map(|(t, (stat, pv))| {
            vec![
                (t + 1).to_string(),
                index.label(t),
                fmt_f64(*stat),
                fmt_f64(*pv),
                (*pv > cfg.alpha).to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "component_tests.csv",
        &["component", "label", "ad_stat", "ad_p", "passed"],
        &component_rows,
    )?;
    let m = &report.mardia;
    let mardia_rows = vec![
        vec!["b1p".to_string(), fmt_f64(m.b1p)],
        vec!["skew_stat".to_string(), fmt_f64(m.skew_stat)],
        vec!["skew_df".to_string(), m.skew_df.to_string()],
        vec!["p_skew".to_string(), fmt_f64(m.p_skew)],
        vec!["b2p".to_string(), fmt_f64(m.b2p)],
        vec!["kurt_z".to_string(), fmt_f64(m.kurt_z)],
        vec!["p_kurt".to_string(), fmt_f64(m.p_kurt)],
    ];
    out.write_csv("mardia.csv", &["key", "value"], &mardia_rows)?;
    let mut qq_rows = Vec::new();
    let mut qq_points = Vec::new();
    for (t, series) in report.qq.iter().enumerate() {
        for &(theoretical, sample) in series {
            qq_rows.push(vec![(t + 1).to_string(), fmt_f64(theoretical), fmt_f64(sample)]);
            qq_points.push((theoretical, sample));
        }
    }
    out.write_csv("qq.csv", &["component", "theoretical", "sample"], &qq_rows)?;
    out.write_text(
        "figure.svg",
        &svg_scatter("standardized component Q-Q", &qq_points, Some((1.0, 0.0))),
    )?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, failures, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::Normality,
        records,
        summary: StudySummary::Normality {
            anderson_darling: report.anderson_darling,
            mardia: report.mardia,
            ad_passes,
        },
        files: out.files,
        failures,
        total_runtime_ms,
    })
}

/// Basis edge count for a record, regenerated from its recorded seed (the
/// sample is deterministic, so this is exact, and avoids holding every
/// network in memory).
fn basis_edge_count(cfg: &ExperimentConfig, r: &ReplicateRecord) -> Result<usize, HarnessError> {
    Ok(sample_basis(&cfg.basis, r.n, r.seed_basis)?.network.edge_count())
}

/// Empirical FDR and power of all four multiplicity-adjustment procedures
/// on Wald tests of `theta_t = 0`.
pub fn run_fdr(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::Fdr)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let p = index.p();
    let outcomes = run_replicates(cfg, &cfg.n_grid, &index)?;

    let truth = truth_pattern(cfg, p)?;
    let mut rows = Vec::new();
    let mut test_rows = Vec::new();
    for &n in &cfg.n_grid {
        let mut per_method: Vec<Vec<Vec<bool>>> = vec![Vec::new(); Method::ALL.len()];
        for o in outcomes.iter().filter(|o| o.record.n == n && o.record.converged) {
            let fit = o.fit.as_ref().expect("converged outcome has a fit");
            let report = wald_tests(fit, &vec![0.0; p], cfg.alpha)?;
            for (t, (z, pv)) in
                report.z_scores.iter().zip(&report.p_values_raw).enumerate()
            {
                test_rows.push(vec![
                    n.to_string(),
                    o.record.rep.to_string(),
                    (t + 1).to_string(),
                    index.label(t),
                    fmt_f64(*z),
                    fmt_f64(*pv),
                ]);
            }
            for (m, method) in Method::ALL.iter().enumerate() {
                per_method[m].push(report.adjusted(*method).decisions);
            }
        }
        for (m, method) in Method::ALL.iter().enumerate() {
            let (fdr, power) = fdr_power(&per_method[m], &truth);
            rows.push((n, *method, fdr, power));
        }
    }
    let records: Vec<ReplicateRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let failures = records.iter().filter(|r| !r.converged).count();

    let mut out = OutputDir::create(&cfg.output_dir)?;
    write_records(&mut out, &records, p)?;
    out.write_csv("tests.csv", &["n", "replicate", "component", "label", "z", "p_raw"], &test_rows)?;
    let fdr_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(n, method, fdr, power)| {
            vec![n.to_string(), method.to_string(), fmt_f64(*fdr), fmt_f64(*power)]
        })
        .collect();
    out.write_csv("fdr_power.csv", &["n", "method", "fdr", "power"], &fdr_rows)?;
    let bars: Vec<(String, f64)> =
        rows.iter().map(|(n, m, fdr, _)| (format!("{m}@{n}"), *fdr)).collect();
    out.write_text("figure.svg", &svg_bars("empirical FDR by method", &bars, Some(cfg.alpha)))?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, failures, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::Fdr,
        records,
        summary: StudySummary::Fdr { rows },
        files: out.files,
        failures,
        total_runtime_ms,
    })
}

fn truth_pattern(cfg: &ExperimentConfig, p: usize) -> Result<Vec<bool>, HarnessError> {
    Ok(match &cfg.theta_star {
        ThetaSource::Explicit(theta) => theta.iter().map(|v| *v != 0.0).collect(),
        ThetaSource::RandomTwoZeros => {
            (0..p).map(|t| t != 2 && t != 4).collect()
        }
    })
}

/// Pooled ROC of |z| scores against the truth pattern, per grid size.
pub fn run_roc(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::Roc)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let p = index.p();
    let outcomes = run_replicates(cfg, &cfg.n_grid, &index)?;
    let truth = truth_pattern(cfg, p)?;

    let mut auc_per_n = Vec::new();
    let mut points = Vec::new();
    for &n in &cfg.n_grid {
        let fits: Vec<&FitResult> = outcomes
            .iter()
            .filter(|o| o.record.n == n && o.record.converged)
            .map(|o| o.fit.as_ref().expect("converged outcome has a fit"))
            .collect();
        if fits.is_empty() {
            continue;
        }
        let mut z = DMatrix::zeros(fits.len(), p);
        for (m, fit) in fits.iter().enumerate() {
            let report = wald_tests(fit, &vec![0.0; p], cfg.alpha)?;
            for t in 0..p {
                z[(m, t)] = report.z_scores[t];
            }
        }
        let curve = roc_from_scores(&z, &truth);
        auc_per_n.push((n, auc(&curve)));
        points.extend(curve.into_iter().map(|(fpr, tpr)| (n, fpr, tpr)));
    }
    let records: Vec<ReplicateRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let failures = records.iter().filter(|r| !r.converged).count();

    let mut out = OutputDir::create(&cfg.output_dir)?;
    write_records(&mut out, &records, p)?;
    let point_rows: Vec<Vec<String>> = points
        .iter()
        .map(|(n, fpr, tpr)| vec![n.to_string(), fmt_f64(*fpr), fmt_f64(*tpr)])
        .collect();
    out.write_csv("roc_points.csv", &["n", "fpr", "tpr"], &point_rows)?;
    let auc_rows: Vec<Vec<String>> =
        auc_per_n.iter().map(|(n, a)| vec![n.to_string(), fmt_f64(*a)]).collect();
    out.write_csv("auc.csv", &["n", "auc"], &auc_rows)?;
    let scatter: Vec<(f64, f64)> = points.iter().map(|(_, f, t)| (*f, *t)).collect();
    out.write_text("figure.svg", &svg_scatter("ROC (pooled |z| thresholds)", &scatter, Some((1.0, 0.0))))?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, failures, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::Roc,
        records,
        summary: StudySummary::Roc { auc_per_n, points },
        files: out.files,
        failures,
        total_runtime_ms,
    })
}

/// Simulates `n_reps` networks from a fitted model on the observed basis
/// and compares simulated sufficient statistics against the observed ones.
pub fn run_gof(
    fit: &FitResult,
    y: &BasisNetwork,
    index: &InteractionIndex,
    n_reps: usize,
    seed: u64,
) -> Result<GofTable, HarnessError> {
    if n_reps == 0 {
        return Err(HarnessError::Config("goodness of fit needs n_reps >= 1".into()));
    }
    if !fit.converged {
        return Err(HarnessError::Config(
            "goodness of fit needs a converged fit".into(),
        ));
    }
    let p = index.p();
    let sims: Vec<Vec<u64>> = (0..n_reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<u64>, HarnessError> {
            let x = sample_multilayer(
                y,
                &fit.theta_hat,
                index,
                replicate_seed(seed, "gof", y.n_nodes(), rep),
            )?;
            Ok(network_suff_stats(&x, index)?)
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(p);
    let mut sq_diff = 0.0;
    let mut sq_obs = 0.0;
    for t in 0..p {
        let mut values: Vec<f64> = sims.iter().map(|s| s[t] as f64).collect();
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let observed = fit.suff_stats[t];
        rows.push(GofRow {
            label: index.label(t),
            observed,
            min: values[0],
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            max: *values.last().expect("n_reps >= 1"),
            mean,
        });
        sq_diff += (observed - mean) * (observed - mean);
        sq_obs += observed * observed;
    }
    Ok(GofTable { rows, rel_l2_error: (sq_diff / sq_obs).sqrt(), n_reps })
}

/// Config-driven goodness of fit: sample one instance at the largest grid
/// size, fit it, then compare simulated statistics via [`run_gof`].
pub fn run_gof_study(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::Gof)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let n = *cfg.n_grid.iter().max().expect("validated nonempty grid");
    let outcomes = run_replicates(cfg, &[n], &index)?;
    let first_converged = outcomes
        .iter()
        .find(|o| o.record.converged)
        .ok_or_else(|| HarnessError::Config("no replicate converged".into()))?;
    let fit = first_converged.fit.as_ref().expect("converged outcome has a fit");
    let basis = sample_basis(&cfg.basis, n, first_converged.record.seed_basis)?;
    let table = run_gof(fit, &basis.network, &index, cfg.gof_reps, cfg.seed)?;

    let records: Vec<ReplicateRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let failures = records.iter().filter(|r| !r.converged).count();
    let mut out = OutputDir::create(&cfg.output_dir)?;
    write_records(&mut out, &records, index.p())?;
    let gof_rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                fmt_f64(r.observed),
                fmt_f64(r.min),
                fmt_f64(r.q1),
                fmt_f64(r.median),
                fmt_f64(r.q3),
                fmt_f64(r.max),
                fmt_f64(r.mean),
            ]
        })
        .collect();
    out.write_csv(
        "gof.csv",
        &["statistic", "observed", "min", "q1", "median", "q3", "max", "mean"],
        &gof_rows,
    )?;
    out.write_csv(
        "summary.csv",
        &["key", "value"],
        &[
            vec!["rel_l2_error".to_string(), fmt_f64(table.rel_l2_error)],
            vec!["n_reps".to_string(), table.n_reps.to_string()],
        ],
    )?;
    let bars: Vec<(String, f64)> = table
        .rows
        .iter()
        .map(|r| (r.label.clone(), if r.mean != 0.0 { r.observed / r.mean } else { f64::NAN }))
        .collect();
    out.write_text(
        "figure.svg",
        &svg_bars("observed / simulated-mean per statistic", &bars, Some(1.0)),
    )?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, failures, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::Gof,
        records,
        summary: StudySummary::Gof(table),
        files: out.files,
        failures,
        total_runtime_ms,
    })
}

/// Evaluates the finite-sample bound calculators over the size grid.
pub fn run_bounds_sweep(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    expect_study(cfg, Study::BoundsSweep)?;
    let started = Instant::now();
    let index = cfg.index()?;
    let p = index.p();
    let theta_star = resolve_theta(cfg, p, *cfg.n_grid.first().expect("nonempty"), 0);
    let xi = xi_epsilon(
        &theta_star,
        cfg.epsilon_star,
        &index,
        cfg.xi_ball_samples,
        cfg.seed,
        false,
    )?;
    let xi_pseudo = xi_epsilon(
        &theta_star,
        cfg.epsilon_star,
        &index,
        cfg.xi_ball_samples,
        cfg.seed,
        true,
    )?;
    if !(xi > 0.0) || !(xi_pseudo > 0.0) {
        return Err(HarnessError::Config(
            "information matrix is degenerate at theta_star; bounds are undefined".into(),
        ));
    }

    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let expected_edges = match cfg.basis.expected_density(n) {
            Some(d) => d * pair_count(n) as f64,
            // The latent space intercept is calibrated to its target
            // density, so the target is the expected density.
            None => match cfg.basis {
                BasisSpec::Lsm { density_target, .. } => density_target * pair_count(n) as f64,
                _ => unreachable!("only the latent family lacks a closed-form density"),
            },
        };
        let dg_est = dg(&cfg.basis, n, 5_000, cfg.seed)?;
        let inputs = TheoryInputs {
            n,
            p,
            k: cfg.k,
            expected_edges,
            dg_plus: dg_est.dg_plus,
            xi,
            epsilon_star: cfg.epsilon_star,
        };
        let pseudo_inputs = TheoryInputs { xi: xi_pseudo, ..inputs.clone() };
        let thm1_mle = thm1_bound(&inputs, Objective::Mle)?.value;
        let thm1_mple = thm1_bound(&pseudo_inputs, Objective::Mple)?.value;
        let thm2 = thm2_bound(&inputs)?;
        let rem = remainder_bound(&inputs)?;
        let bern = match cfg.basis {
            BasisSpec::BernoulliFixed(pi) => Some(thm2_bernoulli(pi, &inputs)?),
            _ => None,
        };
        rows.push(BoundsRow {
            n,
            expected_edges,
            dg_plus: dg_est.dg_plus,
            xi,
            xi_pseudo,
            thm1_mle,
            thm1_mple,
            thm2_total: thm2.value,
            remainder: rem.value,
            remainder_floor: rem.probability_floor.expect("remainder bound carries a floor"),
            bernoulli_total: bern.as_ref().map(|b| b.normal_approx.value),
            bernoulli_remainder: bern.as_ref().map(|b| b.remainder.value),
            bernoulli_floor: bern
                .as_ref()
                .map(|b| b.remainder.probability_floor.expect("remainder bound carries a floor")),
        });
    }

    let mut out = OutputDir::create(&cfg.output_dir)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.expected_edges),
                fmt_f64(r.dg_plus),
                fmt_f64(r.xi),
                fmt_f64(r.xi_pseudo),
                fmt_f64(r.thm1_mle),
                fmt_f64(r.thm1_mple),
                fmt_f64(r.thm2_total),
                fmt_f64(r.remainder),
                fmt_f64(r.remainder_floor),
                fmt_opt(r.bernoulli_total),
                fmt_opt(r.bernoulli_remainder),
                fmt_opt(r.bernoulli_floor),
            ]
        })
        .collect();
    out.write_csv(
        "bounds.csv",
        &[
            "n",
            "expected_edges",
            "dg_plus",
            "xi",
            "xi_pseudo",
            "thm1_mle",
            "thm1_mple",
            "thm2_total",
            "remainder",
            "remainder_floor",
            "bernoulli_total",
            "bernoulli_remainder",
            "bernoulli_floor",
        ],
        &csv_rows,
    )?;
    let points: Vec<(f64, f64)> =
        rows.iter().map(|r| ((r.n as f64).ln(), r.thm1_mle.ln())).collect();
    out.write_text("figure.svg", &svg_scatter("estimation error bound vs size (log-log)", &points, None))?;
    let total_runtime_ms = started.elapsed().as_millis();
    out.write_manifest(cfg, 0, total_runtime_ms)?;

    Ok(StudyOutput {
        study: Study::BoundsSweep,
        records: Vec::new(),
        summary: StudySummary::Bounds { rows },
        files: out.files,
        failures: 0,
        total_runtime_ms,
    })
}
