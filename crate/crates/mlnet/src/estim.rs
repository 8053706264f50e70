//! Newton-type maximization of the log-likelihood (MLE) and
//! log-pseudolikelihood (MPLE).
//!
//! Both objectives are concave, so the solver is a damped Newton iteration:
//! Cholesky solve on the negative Hessian, an eigenvalue-floored solve when
//! the Hessian is (near-)singular — flat directions arise from rarely
//! realized interactions — and a plain gradient-ascent step if even that
//! fails. Step halving enforces that accepted steps never decrease the
//! objective. Divergence of the iterates past a norm cap signals data
//! separation (the maximizer does not exist; the sufficient statistic sits on
//! a face of its convex hull).

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    self, BasisNetwork, DyadTally, InteractionIndex, ModelError, MultilayerNetwork,
};

/// Which objective [`fit`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Exact conditional likelihood of the layers given the basis network.
    Mle,
    /// Pseudolikelihood: product of per-layer conditional probabilities.
    Mple,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::Mle => "mle",
            Objective::Mple => "mple",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Objective::Mle),
            "mple" => Ok(Objective::Mple),
            other => Err(format!("unknown objective '{other}' (expected 'mle' or 'mple')")),
        }
    }
}

/// Errors from fitting.
#[derive(Debug, Error)]
pub enum EstimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    /// `||Y||_1 = 0`: no activated dyads, nothing to fit.
    #[error("basis network has no activated dyads")]
    NoActivatedDyads,
    /// Iterates left the norm cap: the maximizer does not exist (data
    /// separation) or the model is numerically degenerate.
    #[error(
        "estimate diverged: ||theta|| = {norm:.2} exceeded the cap {cap} at iteration {iters} \
         (data separation; the maximizer likely does not exist)"
    )]
    Separation { norm: f64, cap: f64, iters: usize },
    /// The Newton solve kept failing and gradient ascent did not rescue the
    /// iteration within the budget.
    #[error("Newton solve failed through iteration {iters} (singular Hessian)")]
    SingularHessian { iters: usize },
    #[error("invalid fit options: {0}")]
    InvalidOptions(String),
}

/// Solver configuration. `Default` gives the standard desk-scale settings.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub objective: Objective,
    /// Maximum Newton iterations.
    pub max_iters: usize,
    /// Stop when the gradient sup-norm falls below this.
    pub grad_tol: f64,
    /// Maximum number of step halvings per iteration.
    pub step_halving_max: usize,
    /// Error out when `||theta||_2` exceeds this (separation detection).
    pub divergence_cap: f64,
    /// Starting point; `None` means the zero vector (the center of the
    /// natural parameter space — the concave objectives need no warm start).
    pub init: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Mle,
            max_iters: 100,
            grad_tol: 1e-8,
            step_halving_max: 30,
            divergence_cap: 50.0,
            init: None,
        }
    }
}

impl FitOptions {
    /// Default options for the given objective.
    pub fn new(objective: Objective) -> Self {
        Self { objective, ..Self::default() }
    }

    fn validate(&self, p: usize) -> Result<(), EstimError> {
        if self.max_iters == 0 {
            return Err(EstimError::InvalidOptions("max_iters must be >= 1".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(EstimError::InvalidOptions(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(EstimError::InvalidOptions(format!(
                "divergence_cap must be positive, got {}",
                self.divergence_cap
            )));
        }
        if let Some(init) = &self.init {
            if init.len() != p || init.iter().any(|v| !v.is_finite()) {
                return Err(EstimError::InvalidOptions(format!(
                    "init must be a finite vector of length {p}"
                )));
            }
        }
        Ok(())
    }
}

/// A fitted model.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub objective: Objective,
    /// The estimate.
    pub theta_hat: Vec<f64>,
    /// Standard errors: square roots of the diagonal of
    /// `(I(theta_hat) ||Y||_1)^-1`, the normal-approximation covariance.
    /// The same standardization applies to both objectives — the MPLE and
    /// MLE agree asymptotically (exactly, when the order cap is at least
    /// `K - 1`), so the likelihood information governs either estimate.
    /// All-NaN when the information matrix is singular.
    pub std_err: Vec<f64>,
    /// Network-level curvature of the maximized objective at the estimate:
    /// `||Y||_1 * I(theta_hat)` for the MLE, or the pseudolikelihood
    /// analogue `||Y||_1 * Itilde(theta_hat)` for the MPLE.
    pub info_matrix: DMatrix<f64>,
    /// Whether the gradient sup-norm reached `grad_tol`.
    pub converged: bool,
    pub iters: usize,
    pub final_grad_norm: f64,
    pub objective_value: f64,
    /// Number of activated dyads `||Y||_1`.
    pub y_ones: u64,
    /// Observed network-level sufficient statistics `s(x)`.
    pub suff_stats: Vec<f64>,
}

/// Maximizes the chosen objective for `(x, y)` under `index`.
pub fn fit(
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
    opts: &FitOptions,
) -> Result<FitResult, EstimError> {
    let p = index.p();
    opts.validate(p)?;
    let tally = DyadTally::new(x, y, index)?;
    fit_tally(&tally, index, opts)
}

/// [`fit`] on a pre-computed outcome tally (used by the harness, which
/// samples dyad outcomes directly).
pub(crate) fn fit_tally(
    tally: &DyadTally,
    index: &InteractionIndex,
    opts: &FitOptions,
) -> Result<FitResult, EstimError> {
    let p = index.p();
    opts.validate(p)?;
    if tally.y1 == 0 {
        return Err(EstimError::NoActivatedDyads);
    }

    let value_of = |theta: &[f64]| -> Result<f64, ModelError> {
        match opts.objective {
            Objective::Mle => {
                let pmf = model::dyad_pmf(theta, index)?;
                Ok(model::loglik_from_tally(tally, &pmf))
            }
            Objective::Mple => Ok(model::log_pseudolik_from_tally(theta, tally, index)),
        }
    };
    let grad_of = |theta: &[f64]| -> Result<Vec<f64>, ModelError> {
        match opts.objective {
            Objective::Mle => {
                let pmf = model::dyad_pmf(theta, index)?;
                Ok(model::loglik_gradient_from_tally(tally, &pmf, index))
            }
            Objective::Mple => {
                Ok(model::log_pseudolik_gradient_from_tally(theta, tally, index))
            }
        }
    };
    let hess_of = |theta: &[f64]| -> Result<DMatrix<f64>, ModelError> {
        match opts.objective {
            Objective::Mle => {
                let pmf = model::dyad_pmf(theta, index)?;
                Ok(model::info_from_pmf(&pmf, index) * (-(tally.y1 as f64)))
            }
            Objective::Mple => {
                Ok(model::log_pseudolik_hessian_from_tally(theta, tally, index))
            }
        }
    };

    let mut theta: Vec<f64> = opts.init.clone().unwrap_or_else(|| vec![0.0; p]);
    let mut value = value_of(&theta)?;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0;
    let mut newton_failing = false;

    for iter in 1..=opts.max_iters {
        iters = iter;
        let grad = grad_of(&theta)?;
        grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm <= opts.grad_tol {
            converged = true;
            break;
        }
        let g = DVector::from_column_slice(&grad);
        let neg_h = -hess_of(&theta)?;
        let (direction, solved) = newton_direction(neg_h, &g);
        newton_failing = !solved;

        // Backtracking: accept the first step that does not decrease the
        // objective. A positive-definite solve yields an ascent direction,
        // so this terminates unless we are at (numerical) stationarity.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.step_halving_max {
            let cand: Vec<f64> =
                theta.iter().zip(direction.iter()).map(|(t, d)| t + step * d).collect();
            if let Ok(cand_value) = value_of(&cand) {
                if cand_value.is_finite() && cand_value >= value {
                    theta = cand;
                    value = cand_value;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // Stationary up to floating point; report the current iterate.
            break;
        }
        let norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > opts.divergence_cap {
            return Err(EstimError::Separation {
                norm,
                cap: opts.divergence_cap,
                iters: iter,
            });
        }
    }

    if !converged && newton_failing {
        return Err(EstimError::SingularHessian { iters });
    }

    // Recompute the gradient norm at the final iterate (the loop may have
    // exited after accepting a step).
    let grad = grad_of(&theta)?;
    let final_grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs())).min(grad_norm);

    let curvature_dyad = match opts.objective {
        Objective::Mle => model::info_dyad(&theta, index)?,
        Objective::Mple => model::pseudo_info_dyad(&theta, index)?,
    };
    let info_matrix = curvature_dyad * tally.y1 as f64;
    // Standard errors always come from the likelihood information: the
    // normal approximation holds for the MPLE through its agreement with
    // the MLE, not through the pseudolikelihood curvature.
    let std_err = match Cholesky::new(model::info_dyad(&theta, index)? * tally.y1 as f64) {
        Some(chol) => {
            let inv = chol.inverse();
            (0..p).map(|t| inv[(t, t)].sqrt()).collect()
        }
        None => vec![f64::NAN; p],
    };

    Ok(FitResult {
        objective: opts.objective,
        theta_hat: theta,
        std_err,
        info_matrix,
        converged,
        iters,
        final_grad_norm,
        objective_value: value,
        y_ones: tally.y1,
        suff_stats: tally.suff(index),
    })
}

/// Ascent direction for gradient `g` of a concave objective with negative
/// Hessian `neg_h` (positive semidefinite): Cholesky solve, then an
/// eigenvalue-floored solve, then gradient ascent. The flag reports whether
/// a Newton-type solve succeeded.
fn newton_direction(neg_h: DMatrix<f64>, g: &DVector<f64>) -> (DVector<f64>, bool) {
    if let Some(chol) = Cholesky::new(neg_h.clone()) {
        let d = chol.solve(g);
        if d.iter().all(|v| v.is_finite()) {
            return (d, true);
        }
    }
    const FLOOR: f64 = 1e-10;
    let eig = neg_h.symmetric_eigen();
    if eig.eigenvalues.iter().all(|l| l.is_finite()) {
        let coeffs = eig.eigenvectors.transpose() * g;
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c / l.max(FLOOR)),
        );
        let d = &eig.eigenvectors * scaled;
        if d.iter().all(|v| v.is_finite()) {
            return (d, true);
        }
    }
    (g.clone(), false)
}

/// Moment residual `s(x) - ||Y||_1 * E_{theta_hat}[s]`.
///
/// The score equation makes this (numerically) zero for a converged MLE; an
/// MPLE is not guaranteed to reproduce observed sufficient statistics, so
/// its residual is reported rather than asserted.
pub fn moment_check(
    fit: &FitResult,
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<Vec<f64>, EstimError> {
    let tally = DyadTally::new(x, y, index)?;
    let pmf = model::dyad_pmf(&fit.theta_hat, index)?;
    Ok(model::loglik_gradient_from_tally(&tally, &pmf, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_basis, pair_count};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Networks with i.i.d. dyad outcomes drawn from the exact model at
    /// `theta`, plus non-activated dyads at the given rate.
    fn simulate(
        n: usize,
        theta: &[f64],
        index: &InteractionIndex,
        basis_density: f64,
        seed: u64,
    ) -> (MultilayerNetwork, BasisNetwork) {
        let pmf = model::dyad_pmf(theta, index).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dyads: Vec<u16> = (0..pair_count(n))
            .map(|_| {
                if rng.gen_bool(basis_density) {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut out = (1u32 << index.k()) as u16 - 1;
                    for mask in 1..(1u32 << index.k()) as u16 {
                        acc += pmf.prob(mask);
                        if u < acc {
                            out = mask;
                            break;
                        }
                    }
                    out
                } else {
                    0
                }
            })
            .collect();
        let x = MultilayerNetwork::from_dyads(n, index.k(), dyads).unwrap();
        let y = derive_basis(&x);
        (x, y)
    }

    #[test]
    fn mle_recovers_null_model() {
        let index = InteractionIndex::new(3, 2).unwrap();
        let (x, y) = simulate(120, &[0.0; 6], &index, 0.6, 5);
        for objective in [Objective::Mle, Objective::Mple] {
            let fit = fit(&x, &y, &index, &FitOptions::new(objective)).unwrap();
            assert!(fit.converged);
            assert!(fit.final_grad_norm <= 1e-8);
            let norm = fit.theta_hat.iter().map(|t| t * t).sum::<f64>().sqrt();
            assert!(norm < 0.2, "{objective}: ||theta_hat|| = {norm}");
            assert!(fit.std_err.iter().all(|s| s.is_finite() && *s > 0.0));
        }
    }

    #[test]
    fn mle_moment_residual_vanishes() {
        let index = InteractionIndex::new(3, 2).unwrap();
        let theta = [-1.0, -0.5, 0.3, 0.4, -0.2, 0.1];
        let (x, y) = simulate(80, &theta, &index, 0.7, 9);
        let fit = fit(&x, &y, &index, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        let resid = moment_check(&fit, &x, &y, &index).unwrap();
        let y1 = y.edge_count() as f64;
        let sup = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(sup <= 1e-6 * y1, "sup residual {sup} vs {}", 1e-6 * y1);

        // The check itself is informative: a shifted estimate leaves a large
        // residual.
        let mut bad = fit.clone();
        for t in bad.theta_hat.iter_mut() {
            *t += 1.0;
        }
        let resid = moment_check(&bad, &x, &y, &index).unwrap();
        assert!(resid.iter().fold(0.0f64, |m, r| m.max(r.abs())) > 0.01 * y1);
    }

    #[test]
    fn mple_moment_residual_is_reported_nonzero() {
        // H < K - 1: the conditional logits are not saturated in the
        // conditioning indicators, so pseudolikelihood and likelihood
        // estimating equations genuinely differ.
        let index = InteractionIndex::new(3, 1).unwrap();
        let theta = [-1.0, -0.5, 0.3];
        let (x, y) = simulate(80, &theta, &index, 0.7, 13);
        let fit = fit(&x, &y, &index, &FitOptions::new(Objective::Mple)).unwrap();
        assert!(fit.converged);
        let resid = moment_check(&fit, &x, &y, &index).unwrap();
        assert!(resid.iter().any(|r| r.abs() > 1e-3));
    }

    #[test]
    fn mple_equals_mle_when_conditionals_saturate() {
        // With H >= K - 1 every layer's conditional logit carries the full
        // interaction of the K - 1 conditioning indicators, and the
        // pseudolikelihood equations reduce to the likelihood equations:
        // the two estimators coincide exactly.
        let index = InteractionIndex::new(3, 2).unwrap();
        let theta = [-1.0, -0.5, 0.3, 0.4, -0.2, 0.1];
        let (x, y) = simulate(80, &theta, &index, 0.7, 13);
        let mle = fit(&x, &y, &index, &FitOptions::new(Objective::Mle)).unwrap();
        let mple = fit(&x, &y, &index, &FitOptions::new(Objective::Mple)).unwrap();
        for (a, b) in mle.theta_hat.iter().zip(&mple.theta_hat) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
        }
        let resid = moment_check(&mple, &x, &y, &index).unwrap();
        let sup = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(sup <= 1e-6 * y.edge_count() as f64);
    }

    #[test]
    fn estimates_agree_from_different_starts() {
        let index = InteractionIndex::new(3, 2).unwrap();
        let theta = [-0.8, 0.2, -0.3, 0.5, 0.1, -0.4];
        let (x, y) = simulate(60, &theta, &index, 0.8, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for objective in [Objective::Mle, Objective::Mple] {
            let base = fit(&x, &y, &index, &FitOptions::new(objective)).unwrap();
            let init: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let opts = FitOptions { init: Some(init), ..FitOptions::new(objective) };
            let warm = fit(&x, &y, &index, &opts).unwrap();
            for (a, b) in base.theta_hat.iter().zip(&warm.theta_hat) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn separation_is_detected() {
        // A single activated dyad with every layer present puts the
        // sufficient statistic on a vertex of its convex hull: no maximizer.
        // The iterates' gradient decays so fast that the default tolerance
        // is met at ||theta|| ~ 16, so pin the divergence path with a cap
        // below that and an unreachable tolerance.
        let index = InteractionIndex::new(2, 2).unwrap();
        let x = MultilayerNetwork::from_dyads(2, 2, vec![0b11]).unwrap();
        let y = derive_basis(&x);
        let opts = FitOptions {
            grad_tol: 1e-16,
            divergence_cap: 10.0,
            max_iters: 300,
            ..FitOptions::default()
        };
        match fit(&x, &y, &index, &opts) {
            Err(EstimError::Separation { norm, .. }) => assert!(norm > 10.0),
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn no_activated_dyads_is_an_error() {
        let index = InteractionIndex::new(2, 2).unwrap();
        let x = MultilayerNetwork::empty(5, 2).unwrap();
        let y = derive_basis(&x);
        assert!(matches!(
            fit(&x, &y, &index, &FitOptions::default()),
            Err(EstimError::NoActivatedDyads)
        ));
    }

    #[test]
    fn degenerate_information_yields_nan_std_errors() {
        // K = 1: the lone statistic is constant on activated dyads, so the
        // information matrix is singular and the (flat) objective is
        // maximized everywhere.
        let index = InteractionIndex::new(1, 1).unwrap();
        let x = MultilayerNetwork::from_dyads(3, 1, vec![1, 1, 0]).unwrap();
        let y = derive_basis(&x);
        let fit = fit(&x, &y, &index, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.std_err.iter().all(|s| s.is_nan()));
    }

    #[test]
    fn saturated_model_fits_through_floored_solve() {
        // H = K makes I(theta) singular for every theta (the statistics
        // plus the constant are affinely dependent), so the Cholesky solve
        // always fails and the eigenvalue-floored path carries the fit.
        let index = InteractionIndex::new(2, 2).unwrap();
        let (x, y) = simulate(100, &[0.2, -0.1, 0.3], &index, 0.6, 31);
        let fit = fit(&x, &y, &index, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        let resid = moment_check(&fit, &x, &y, &index).unwrap();
        let sup = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(sup <= 1e-6 * y.edge_count() as f64);
    }

    #[test]
    fn invalid_options_are_rejected() {
        let index = InteractionIndex::new(2, 1).unwrap();
        let x = MultilayerNetwork::from_dyads(2, 2, vec![0b01]).unwrap();
        let y = derive_basis(&x);
        for opts in [
            FitOptions { grad_tol: 0.0, ..FitOptions::default() },
            FitOptions { max_iters: 0, ..FitOptions::default() },
            FitOptions { divergence_cap: -1.0, ..FitOptions::default() },
            FitOptions { init: Some(vec![0.0; 5]), ..FitOptions::default() },
        ] {
            assert!(matches!(
                fit(&x, &y, &index, &opts),
                Err(EstimError::InvalidOptions(_))
            ));
        }
    }
}
