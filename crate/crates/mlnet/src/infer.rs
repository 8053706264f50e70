//! Hypothesis tests, multiple-testing corrections, FDR/power summaries, and
//! normality diagnostics for replicated estimates.
//!
//! Component-level Wald tests feed four standard adjustment procedures
//! (Bonferroni, Benjamini-Hochberg, Hochberg, Holm); Hotelling's T-squared
//! provides the global test. Normality of replicated estimates is probed by
//! Mardia's multivariate skewness/kurtosis statistics and per-component
//! Anderson-Darling tests (composite case: mean and variance estimated),
//! with Q-Q coordinate pairs exported for plotting.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

use crate::estim::FitResult;
use crate::special::{chi2_sf, f_sf, kolmogorov_sf, normal_quantile, normal_sf};

/// Multiple-testing adjustment procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bonferroni,
    BenjaminiHochberg,
    Hochberg,
    Holm,
}

impl Method {
    /// All four procedures, in reporting order.
    pub const ALL: [Method; 4] =
        [Method::Bonferroni, Method::BenjaminiHochberg, Method::Hochberg, Method::Holm];
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bonferroni => "bonferroni",
            Method::BenjaminiHochberg => "bh",
            Method::Hochberg => "hochberg",
            Method::Holm => "holm",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bonferroni" => Ok(Method::Bonferroni),
            "bh" | "benjamini-hochberg" => Ok(Method::BenjaminiHochberg),
            "hochberg" => Ok(Method::Hochberg),
            "holm" => Ok(Method::Holm),
            other => Err(format!(
                "unknown adjustment method '{other}' (expected bonferroni, bh, hochberg, holm)"
            )),
        }
    }
}

/// Errors from inference routines.
#[derive(Debug, Error)]
pub enum InferError {
    #[error("singular information matrix: standard errors unavailable")]
    SingularInformation,
    #[error("rank-deficient input: {reason}")]
    RankDeficient { reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Component-wise test report. `wald_tests` produces the raw report
/// (`method = None`, decisions from raw p-values); [`TestReport::adjusted`]
/// derives the report for a given correction.
#[derive(Debug, Clone)]
pub struct TestReport {
    pub z_scores: Vec<f64>,
    pub p_values_raw: Vec<f64>,
    pub alpha: f64,
    pub method: Option<Method>,
    pub p_values_adjusted: Option<Vec<f64>>,
    /// Rejections at level `alpha`, from the adjusted p-values when a method
    /// is set and the raw ones otherwise.
    pub decisions: Vec<bool>,
}

impl TestReport {
    /// The same tests with the given correction applied.
    pub fn adjusted(&self, method: Method) -> TestReport {
        let adj = adjust(&self.p_values_raw, method);
        let decisions = adj.iter().map(|&p| p <= self.alpha).collect();
        TestReport {
            z_scores: self.z_scores.clone(),
            p_values_raw: self.p_values_raw.clone(),
            alpha: self.alpha,
            method: Some(method),
            p_values_adjusted: Some(adj),
            decisions,
        }
    }
}

/// Component-wise Wald tests of `H_i: theta_i = mu_i` from a converged fit:
/// `z_i = (theta_hat_i - mu_i) / std_err_i`, two-sided normal p-values
/// `2 (1 - Phi(|z_i|))`.
pub fn wald_tests(fit: &FitResult, mu: &[f64], alpha: f64) -> Result<TestReport, InferError> {
    if !fit.converged {
        return Err(InferError::InvalidInput("fit did not converge".into()));
    }
    if mu.len() != fit.theta_hat.len() {
        return Err(InferError::InvalidInput(format!(
            "mu has length {} but the fit has {} parameters",
            mu.len(),
            fit.theta_hat.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(InferError::InvalidInput(format!("alpha = {alpha} outside [0, 1]")));
    }
    if fit.std_err.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(InferError::SingularInformation);
    }
    let z_scores: Vec<f64> = fit
        .theta_hat
        .iter()
        .zip(mu)
        .zip(&fit.std_err)
        .map(|((t, m), s)| (t - m) / s)
        .collect();
    let p_values_raw: Vec<f64> = z_scores.iter().map(|z| 2.0 * normal_sf(z.abs())).collect();
    let decisions = p_values_raw.iter().map(|&p| p <= alpha).collect();
    Ok(TestReport {
        z_scores,
        p_values_raw,
        alpha,
        method: None,
        p_values_adjusted: None,
        decisions,
    })
}

/// Adjusted p-values for the given procedure. Inputs must lie in [0, 1];
/// outputs are monotone-corrected and clipped to [0, 1].
pub fn adjust(p_raw: &[f64], method: Method) -> Vec<f64> {
    assert!(
        p_raw.iter().all(|p| (0.0..=1.0).contains(p)),
        "adjust: raw p-values must lie in [0, 1]"
    );
    let m = p_raw.len();
    if m == 0 {
        return Vec::new();
    }
    if let Method::Bonferroni = method {
        return p_raw.iter().map(|p| (p * m as f64).min(1.0)).collect();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_raw[a].total_cmp(&p_raw[b]));
    let mut adj_sorted = vec![0.0; m];
    match method {
        Method::Holm => {
            // Step-down: running maximum of (m - i) * p_(i), 0-based i.
            let mut running = 0.0f64;
            for (i, &idx) in order.iter().enumerate() {
                running = running.max(((m - i) as f64 * p_raw[idx]).min(1.0));
                adj_sorted[i] = running;
            }
        }
        Method::Hochberg => {
            // Step-up: running minimum of (m - i) * p_(i) from the largest.
            let mut running = 1.0f64;
            for (i, &idx) in order.iter().enumerate().rev() {
                running = running.min(((m - i) as f64 * p_raw[idx]).min(1.0));
                adj_sorted[i] = running;
            }
        }
        Method::BenjaminiHochberg => {
            // Step-up: running minimum of p_(i) * m / (i + 1).
            let mut running = 1.0f64;
            for (i, &idx) in order.iter().enumerate().rev() {
                running = running.min((p_raw[idx] * m as f64 / (i + 1) as f64).min(1.0));
                adj_sorted[i] = running;
            }
        }
        Method::Bonferroni => unreachable!(),
    }
    let mut adjusted = vec![0.0; m];
    for (i, &idx) in order.iter().enumerate() {
        adjusted[idx] = adj_sorted[i];
    }
    adjusted
}

/// Empirical FDR and power of per-replicate decisions against the truth
/// support: FDR is the mean false-discovery proportion
/// `false / max(1, discoveries)`, power the mean fraction of true nonzero
/// components discovered. Power is NaN when the truth has no nonzeros.
pub fn fdr_power(decisions: &[Vec<bool>], truth_nonzero: &[bool]) -> (f64, f64) {
    assert!(!decisions.is_empty(), "fdr_power: no replicates");
    let p = truth_nonzero.len();
    let n_true = truth_nonzero.iter().filter(|&&t| t).count();
    let mut fdp_sum = 0.0;
    let mut power_sum = 0.0;
    for row in decisions {
        assert_eq!(row.len(), p, "fdr_power: decision row length mismatch");
        let discoveries = row.iter().filter(|&&d| d).count();
        let false_disc = row
            .iter()
            .zip(truth_nonzero)
            .filter(|(&d, &t)| d && !t)
            .count();
        let true_disc = discoveries - false_disc;
        fdp_sum += false_disc as f64 / discoveries.max(1) as f64;
        power_sum += true_disc as f64 / n_true as f64; // NaN when n_true == 0
    }
    let m = decisions.len() as f64;
    (fdp_sum / m, power_sum / m)
}

/// ROC points for thresholding pooled `|z|` scores at each grid value:
/// `(FPR, TPR)` pairs sorted by FPR with the `(0,0)` and `(1,1)` endpoints
/// appended.
pub fn roc_points(
    z_scores: &DMatrix<f64>,
    truth_nonzero: &[bool],
    grid: &[f64],
) -> Vec<(f64, f64)> {
    assert!(!grid.is_empty(), "roc_points: empty threshold grid");
    assert_eq!(z_scores.ncols(), truth_nonzero.len(), "roc_points: width mismatch");
    let n_pos = truth_nonzero.iter().filter(|&&t| t).count() * z_scores.nrows();
    let n_neg = truth_nonzero.len() * z_scores.nrows() - n_pos;
    let mut points = Vec::with_capacity(grid.len() + 2);
    for &t in grid {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for r in 0..z_scores.nrows() {
            for (i, &is_pos) in truth_nonzero.iter().enumerate() {
                if z_scores[(r, i)].abs() > t {
                    if is_pos {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
        }
        points.push((fp as f64 / n_neg.max(1) as f64, tp as f64 / n_pos.max(1) as f64));
    }
    points.push((0.0, 0.0));
    points.push((1.0, 1.0));
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    points
}

/// ROC curve using every distinct pooled `|z|` value as a threshold — the
/// full curve, invariant under strictly monotone transforms of the scores.
pub fn roc_from_scores(z_scores: &DMatrix<f64>, truth_nonzero: &[bool]) -> Vec<(f64, f64)> {
    let mut grid: Vec<f64> = z_scores.iter().map(|z| z.abs()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    roc_points(z_scores, truth_nonzero, &grid)
}

/// Area under a sorted ROC point list (trapezoid rule).
pub fn auc(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
        .sum()
}

/// Replicated estimates: an `M x p` matrix with the generating truth.
#[derive(Debug, Clone)]
pub struct ReplicateMatrix {
    estimates: DMatrix<f64>,
    truth: Vec<f64>,
}

impl ReplicateMatrix {
    pub fn new(estimates: DMatrix<f64>, truth: Vec<f64>) -> Result<Self, InferError> {
        if estimates.nrows() < 2 {
            return Err(InferError::InvalidInput(format!(
                "need at least 2 replicates, got {}",
                estimates.nrows()
            )));
        }
        if truth.len() != estimates.ncols() {
            return Err(InferError::InvalidInput(format!(
                "truth has length {} but estimates have {} columns",
                truth.len(),
                estimates.ncols()
            )));
        }
        if estimates.iter().any(|v| !v.is_finite()) || truth.iter().any(|v| !v.is_finite()) {
            return Err(InferError::InvalidInput("non-finite entries".into()));
        }
        Ok(Self { estimates, truth })
    }

    pub fn m(&self) -> usize {
        self.estimates.nrows()
    }

    pub fn p(&self) -> usize {
        self.estimates.ncols()
    }

    pub fn estimates(&self) -> &DMatrix<f64> {
        &self.estimates
    }

    pub fn truth(&self) -> &[f64] {
        &self.truth
    }

    /// Column means.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.p()).map(|j| self.estimates.column(j).mean()).collect()
    }

    /// Column standard deviations (denominator `M - 1`).
    pub fn std_dev(&self) -> Vec<f64> {
        let m = self.m() as f64;
        self.mean()
            .iter()
            .enumerate()
            .map(|(j, mu)| {
                (self.estimates.column(j).iter().map(|v| (v - mu).powi(2)).sum::<f64>()
                    / (m - 1.0))
                    .sqrt()
            })
            .collect()
    }
}

/// Hotelling's T-squared global test result.
#[derive(Debug, Clone)]
pub struct HotellingTest {
    pub t2: f64,
    pub f_stat: f64,
    pub df: (usize, usize),
    pub p_value: f64,
}

/// Global test of `H: E[theta_hat] = mu` from replicated estimates:
/// `T^2 = M (xbar - mu)' S^-1 (xbar - mu)` with the sample covariance `S`
/// (denominator `M - 1`), referred to `F(p, M - p)` after the
/// `(M - p) / ((M - 1) p)` rescaling. Requires `M > p`.
pub fn hotelling_global(rm: &ReplicateMatrix, mu: &[f64]) -> Result<HotellingTest, InferError> {
    let (m, p) = (rm.m(), rm.p());
    if m <= p {
        return Err(InferError::RankDeficient {
            reason: format!("Hotelling test needs M > p, got M = {m}, p = {p}"),
        });
    }
    if mu.len() != p {
        return Err(InferError::InvalidInput(format!(
            "mu has length {} but estimates have {p} columns",
            mu.len()
        )));
    }
    let mean = DVector::from_vec(rm.mean());
    let centered = center_rows(rm.estimates(), mean.as_slice());
    let cov = &centered.transpose() * &centered / (m as f64 - 1.0);
    let diff = &mean - DVector::from_column_slice(mu);
    let chol = Cholesky::new(cov).ok_or(InferError::RankDeficient {
        reason: "sample covariance is singular".into(),
    })?;
    let t2 = m as f64 * diff.dot(&chol.solve(&diff));
    let f_stat = (m - p) as f64 / (((m - 1) * p) as f64) * t2;
    let p_value = f_sf(f_stat, p as f64, (m - p) as f64);
    Ok(HotellingTest { t2, f_stat, df: (p, m - p), p_value })
}

fn center_rows(x: &DMatrix<f64>, mu: &[f64]) -> DMatrix<f64> {
    let mut c = x.clone();
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            c[(i, j)] -= mu[j];
        }
    }
    c
}

/// Mardia's multivariate skewness/kurtosis test result.
#[derive(Debug, Clone)]
pub struct MardiaTest {
    pub b1p: f64,
    pub skew_stat: f64,
    pub skew_df: f64,
    pub p_skew: f64,
    pub b2p: f64,
    pub kurt_z: f64,
    pub p_kurt: f64,
}

/// Mardia's skewness and kurtosis statistics on rows of `data`, centered at
/// the sample mean with the ML covariance (denominator `M`). Skewness:
/// `M b_{1,p} / 6 ~ chi^2(p(p+1)(p+2)/6)`; kurtosis:
/// `(b_{2,p} - p(p+2)) / sqrt(8 p (p+2) / M) ~ N(0,1)` two-sided.
pub fn mardia(data: &DMatrix<f64>) -> Result<MardiaTest, InferError> {
    let (m, p) = (data.nrows(), data.ncols());
    if m <= p {
        return Err(InferError::RankDeficient {
            reason: format!("Mardia test needs M > p, got M = {m}, p = {p}"),
        });
    }
    let mean: Vec<f64> = (0..p).map(|j| data.column(j).mean()).collect();
    let centered = center_rows(data, &mean);
    let cov = &centered.transpose() * &centered / m as f64;
    let chol = Cholesky::new(cov).ok_or(InferError::RankDeficient {
        reason: "ML covariance is singular".into(),
    })?;
    // G = C S^-1 C' computed column-block-wise.
    let solved = chol.solve(&centered.transpose());
    let g = &centered * solved;
    let mut b1p = 0.0;
    for i in 0..m {
        for j in 0..m {
            b1p += g[(i, j)].powi(3);
        }
    }
    b1p /= (m * m) as f64;
    let b2p = (0..m).map(|i| g[(i, i)].powi(2)).sum::<f64>() / m as f64;
    let pf = p as f64;
    let skew_stat = m as f64 * b1p / 6.0;
    let skew_df = pf * (pf + 1.0) * (pf + 2.0) / 6.0;
    let p_skew = chi2_sf(skew_stat, skew_df);
    let kurt_z = (b2p - pf * (pf + 2.0)) / (8.0 * pf * (pf + 2.0) / m as f64).sqrt();
    let p_kurt = 2.0 * normal_sf(kurt_z.abs());
    Ok(MardiaTest { b1p, skew_stat, skew_df, p_skew, b2p, kurt_z, p_kurt })
}

/// Anderson-Darling test of composite normality (mean and variance
/// estimated from the sample). Returns `(A^2, p)` with the
/// D'Agostino-Stephens small-sample correction and piecewise p-value.
pub fn anderson_darling_normal(sample: &[f64]) -> (f64, f64) {
    let n = sample.len();
    assert!(n >= 8, "anderson_darling_normal: need at least 8 observations, got {n}");
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let sd = (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    assert!(sd > 0.0, "anderson_darling_normal: zero sample variance");
    let mut z: Vec<f64> = sample.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let mut a2 = 0.0;
    for i in 0..n {
        let log_cdf = crate::special::normal_cdf(z[i]).max(f64::MIN_POSITIVE).ln();
        let log_sf = normal_sf(z[n - 1 - i]).max(f64::MIN_POSITIVE).ln();
        a2 += (2 * i + 1) as f64 * (log_cdf + log_sf);
    }
    let a2 = -nf - a2 / nf;
    let star = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if star <= 0.2 {
        1.0 - (-13.436 + 101.14 * star - 223.73 * star * star).exp()
    } else if star <= 0.34 {
        1.0 - (-8.318 + 42.796 * star - 59.938 * star * star).exp()
    } else if star <= 0.6 {
        (0.9177 - 4.279 * star - 1.38 * star * star).exp()
    } else {
        (1.2937 - 5.709 * star + 0.0186 * star * star).exp()
    };
    (a2, p.clamp(0.0, 1.0))
}

/// One-sample Kolmogorov-Smirnov test of Uniform(0, 1) (asymptotic
/// p-value). Used to check that null p-values are uniform.
pub fn ks_test_uniform(sample: &[f64]) -> (f64, f64) {
    let n = sample.len();
    assert!(n >= 2, "ks_test_uniform: need at least 2 observations");
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &u) in s.iter().enumerate() {
        d = d.max((i + 1) as f64 / nf - u).max(u - i as f64 / nf);
    }
    (d, kolmogorov_sf(nf.sqrt() * d))
}

/// Per-component Q-Q data: sorted standardized values paired with the
/// normal quantiles at `(i - 1/2) / M`.
pub type QqSeries = Vec<(f64, f64)>;

/// Normality diagnostics of replicated estimates.
#[derive(Debug, Clone)]
pub struct NormalityReport {
    pub mardia: MardiaTest,
    /// Per-component `(A^2, p)` Anderson-Darling results.
    pub anderson_darling: Vec<(f64, f64)>,
    /// Per-component Q-Q coordinate pairs `(normal quantile, sorted value)`.
    pub qq: Vec<QqSeries>,
    /// The standardized `M x p` samples the diagnostics were computed on.
    pub standardized: DMatrix<f64>,
}

/// Diagnoses approximate normality of replicated estimates.
///
/// With a `standardizer` (the network-level information `I(theta*) ||Y||_1`),
/// rows are mapped to `S^{1/2} (theta_hat - theta*)` using the symmetric
/// square root — the theoretical standardization, approximately standard
/// normal under the model. Without one, each component is studentized by its
/// sample mean and standard deviation. Requires `M >= 20` replicates.
pub fn normality_diagnostics(
    rm: &ReplicateMatrix,
    standardizer: Option<&DMatrix<f64>>,
) -> Result<NormalityReport, InferError> {
    let (m, p) = (rm.m(), rm.p());
    if m < 20 {
        return Err(InferError::InvalidInput(format!(
            "normality diagnostics need M >= 20 replicates, got {m}"
        )));
    }
    let standardized = match standardizer {
        Some(info) => {
            if info.nrows() != p || info.ncols() != p {
                return Err(InferError::InvalidInput(format!(
                    "standardizer must be {p} x {p}"
                )));
            }
            let eig = info.clone().symmetric_eigen();
            if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
                return Err(InferError::RankDeficient {
                    reason: "standardizer is not positive definite".into(),
                });
            }
            let sqrt_vals =
                DMatrix::from_diagonal(&eig.eigenvalues.map(|l: f64| l.sqrt()));
            let root = &eig.eigenvectors * sqrt_vals * eig.eigenvectors.transpose();
            center_rows(rm.estimates(), rm.truth()) * root
        }
        None => {
            let mean = rm.mean();
            let sd = rm.std_dev();
            if sd.iter().any(|s| *s <= 0.0) {
                return Err(InferError::RankDeficient {
                    reason: "a component has zero sample variance".into(),
                });
            }
            let mut z = center_rows(rm.estimates(), &mean);
            for j in 0..p {
                for i in 0..m {
                    z[(i, j)] /= sd[j];
                }
            }
            z
        }
    };
    let mardia = mardia(&standardized)?;
    let mut anderson_darling = Vec::with_capacity(p);
    let mut qq = Vec::with_capacity(p);
    for j in 0..p {
        let col: Vec<f64> = standardized.column(j).iter().cloned().collect();
        anderson_darling.push(anderson_darling_normal(&col));
        let mut sorted = col;
        sorted.sort_by(f64::total_cmp);
        qq.push(
            sorted
                .iter()
                .enumerate()
                .map(|(i, &v)| (normal_quantile((i as f64 + 0.5) / m as f64), v))
                .collect(),
        );
    }
    Ok(NormalityReport { mardia, anderson_darling, qq, standardized })
}
