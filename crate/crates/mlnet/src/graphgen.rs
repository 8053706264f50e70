//! Random generation of basis networks and exact sampling of the layers.
//!
//! Basis networks come from four families: dense Bernoulli, sparse Bernoulli
//! (edge probability `c / N`), a stochastic block model with deterministic
//! round-robin block assignment, and a latent space model with
//! standard-normal positions and a logistic link in negative Euclidean
//! distance, its intercept calibrated to a target density. Given a basis
//! network, layers are sampled exactly: every activated dyad draws one of
//! the `2^K - 1` nonzero outcomes by inverse CDF on the dyad probability
//! table, so `(X, Y)` is network concordant by construction.
//!
//! All sampling uses the pinned `ChaCha8` generator: identical
//! `(spec, N, seed)` reproduce bit-identical networks across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    dyad_pmf, pair_count, BasisNetwork, InteractionIndex, ModelError, MultilayerNetwork,
};
use crate::special::logistic;

/// Number of Monte-Carlo position pairs used when calibrating the latent
/// space intercept inside [`sample_basis`].
const LSM_CALIBRATION_REPS: usize = 200_000;

/// Errors from basis-network generation.
#[derive(Debug, Error)]
pub enum GraphGenError {
    #[error("invalid basis spec: {0}")]
    InvalidSpec(String),
    #[error(
        "latent space calibration failed: target density {target} not reachable with \
         alpha in [{lo}, {hi}] (achievable range [{min:.6}, {max:.6}])"
    )]
    Calibration { target: f64, lo: f64, hi: f64, min: f64, max: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A basis-network family with its parameters. Serializes externally
/// tagged with kebab-case family names, e.g.
/// `{"bernoulli-fixed": 0.8}` or `{"sbm": {"n_blocks": 5, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisSpec {
    /// Every pair is an edge independently with probability `pi`.
    BernoulliFixed(f64),
    /// Sparse regime: edge probability `c / N`.
    BernoulliSparse(f64),
    /// Stochastic block model; node `i` belongs to block `i mod n_blocks`.
    Sbm { n_blocks: usize, p_in: f64, p_out: f64 },
    /// Latent space model: positions with i.i.d. standard-normal
    /// coordinates, edge probability `sigma(alpha - ||z_i - z_j||_2)` with
    /// `alpha` calibrated so the expected density hits `density_target`.
    Lsm { density_target: f64, latent_dim: usize },
}

impl BasisSpec {
    pub(crate) fn validate(&self, n: usize) -> Result<(), GraphGenError> {
        if n < 3 {
            return Err(GraphGenError::InvalidSpec(format!("need N >= 3 nodes, got {n}")));
        }
        let ok_prob = |p: f64| p > 0.0 && p < 1.0;
        match *self {
            BasisSpec::BernoulliFixed(pi) if !ok_prob(pi) => Err(
                GraphGenError::InvalidSpec(format!("edge probability {pi} outside (0,1)")),
            ),
            BasisSpec::BernoulliSparse(c) if !ok_prob(c / n as f64) => {
                Err(GraphGenError::InvalidSpec(format!(
                    "c/N = {}/{n} outside (0,1)",
                    c
                )))
            }
            BasisSpec::Sbm { n_blocks, p_in, p_out } => {
                if n_blocks == 0 {
                    Err(GraphGenError::InvalidSpec("need n_blocks >= 1".into()))
                } else if !ok_prob(p_in) || !ok_prob(p_out) {
                    Err(GraphGenError::InvalidSpec(format!(
                        "block densities ({p_in}, {p_out}) outside (0,1)"
                    )))
                } else {
                    Ok(())
                }
            }
            BasisSpec::Lsm { density_target, latent_dim } => {
                if !ok_prob(density_target) {
                    Err(GraphGenError::InvalidSpec(format!(
                        "density target {density_target} outside (0,1)"
                    )))
                } else if latent_dim == 0 {
                    Err(GraphGenError::InvalidSpec("need latent_dim >= 1".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Exact expected edge density where a closed form exists (Bernoulli
    /// variants and the SBM with its deterministic blocks); `None` for the
    /// latent space model.
    pub fn expected_density(&self, n: usize) -> Option<f64> {
        match *self {
            BasisSpec::BernoulliFixed(pi) => Some(pi),
            BasisSpec::BernoulliSparse(c) => Some(c / n as f64),
            BasisSpec::Sbm { n_blocks, p_in, p_out } => {
                let mut within = 0usize;
                for b in 0..n_blocks {
                    let size = n / n_blocks + usize::from(b < n % n_blocks);
                    within += pair_count(size);
                }
                let frac = within as f64 / pair_count(n) as f64;
                Some(frac * p_in + (1.0 - frac) * p_out)
            }
            BasisSpec::Lsm { .. } => None,
        }
    }
}

/// Variant-specific generation byproducts.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisMeta {
    None,
    /// SBM block of each node.
    Blocks(Vec<usize>),
    /// Latent positions (row per node) and the calibrated intercept.
    Latent { positions: Vec<Vec<f64>>, alpha: f64 },
}

/// A generated basis network with its metadata.
#[derive(Debug, Clone)]
pub struct BasisSample {
    pub network: BasisNetwork,
    pub meta: BasisMeta,
}

/// Samples a basis network on `n` nodes. Deterministic in
/// `(spec, n, seed)`.
pub fn sample_basis(
    spec: &BasisSpec,
    n: usize,
    seed: u64,
) -> Result<BasisSample, GraphGenError> {
    spec.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![false; pair_count(n)];
    let meta = match *spec {
        BasisSpec::BernoulliFixed(pi) => {
            for e in edges.iter_mut() {
                *e = rng.gen_bool(pi);
            }
            BasisMeta::None
        }
        BasisSpec::BernoulliSparse(c) => {
            let p = c / n as f64;
            for e in edges.iter_mut() {
                *e = rng.gen_bool(p);
            }
            BasisMeta::None
        }
        BasisSpec::Sbm { n_blocks, p_in, p_out } => {
            let blocks: Vec<usize> = (0..n).map(|i| i % n_blocks).collect();
            let mut idx = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let p = if blocks[i] == blocks[j] { p_in } else { p_out };
                    edges[idx] = rng.gen_bool(p);
                    idx += 1;
                }
            }
            BasisMeta::Blocks(blocks)
        }
        BasisSpec::Lsm { density_target, latent_dim } => {
            let alpha = calibrate_lsm_alpha(
                density_target,
                n,
                latent_dim,
                seed,
                LSM_CALIBRATION_REPS,
            )?;
            let positions: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..latent_dim).map(|_| rng.sample(StandardNormal)).collect())
                .collect();
            let mut idx = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let dist = positions[i]
                        .iter()
                        .zip(&positions[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    edges[idx] = rng.gen_bool(logistic(alpha - dist));
                    idx += 1;
                }
            }
            BasisMeta::Latent { positions, alpha }
        }
    };
    Ok(BasisSample { network: BasisNetwork::from_edges(n, edges)?, meta })
}

/// Solves `mean_j sigma(alpha - d_j) = density_target` for `alpha` by
/// bisection over the given fixed distances. The mean link is strictly
/// increasing in `alpha`, so the root is unique when it is bracketed.
pub fn calibrate_alpha_for_distances(
    distances: &[f64],
    density_target: f64,
    bracket: (f64, f64),
) -> Result<f64, GraphGenError> {
    assert!(!distances.is_empty(), "calibration needs at least one distance");
    let (lo, hi) = bracket;
    let mean_prob = |alpha: f64| {
        distances.iter().map(|d| logistic(alpha - d)).sum::<f64>() / distances.len() as f64
    };
    let (f_lo, f_hi) = (mean_prob(lo), mean_prob(hi));
    if density_target < f_lo || density_target > f_hi {
        return Err(GraphGenError::Calibration {
            target: density_target,
            lo,
            hi,
            min: f_lo,
            max: f_hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mean_prob(mid) < density_target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    let alpha = 0.5 * (a + b);
    let achieved = mean_prob(alpha);
    if (achieved - density_target).abs() > 1e-3 {
        return Err(GraphGenError::Calibration {
            target: density_target,
            lo,
            hi,
            min: f_lo,
            max: f_hi,
        });
    }
    Ok(alpha)
}

/// Calibrates the latent space intercept over the default bracket
/// `[-20, 20]`: Monte-Carlo draws of `mc_reps` standard-normal position
/// pairs in `latent_dim` dimensions, then bisection so the mean edge
/// probability is within 1e-3 of `density_target`.
pub fn calibrate_lsm_alpha(
    density_target: f64,
    n: usize,
    latent_dim: usize,
    seed: u64,
    mc_reps: usize,
) -> Result<f64, GraphGenError> {
    calibrate_lsm_alpha_in(density_target, n, latent_dim, seed, mc_reps, (-20.0, 20.0))
}

/// [`calibrate_lsm_alpha`] with an explicit bisection bracket.
///
/// The pair-distance distribution does not depend on `n` (positions are
/// i.i.d. standard normal); `n` participates only in deriving the
/// Monte-Carlo stream so different network sizes calibrate on independent
/// draws.
pub fn calibrate_lsm_alpha_in(
    density_target: f64,
    n: usize,
    latent_dim: usize,
    seed: u64,
    mc_reps: usize,
    bracket: (f64, f64),
) -> Result<f64, GraphGenError> {
    if !(density_target > 0.0 && density_target < 1.0) {
        return Err(GraphGenError::InvalidSpec(format!(
            "density target {density_target} outside (0,1)"
        )));
    }
    if latent_dim == 0 || mc_reps == 0 {
        return Err(GraphGenError::InvalidSpec(
            "need latent_dim >= 1 and mc_reps >= 1".into(),
        ));
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let distances: Vec<f64> = (0..mc_reps)
        .map(|_| {
            (0..latent_dim)
                .map(|_| {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    (a - b) * (a - b)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    calibrate_alpha_for_distances(&distances, density_target, bracket)
}

/// Samples the layers on a given basis network: activated dyads draw a
/// nonzero outcome from the dyad probability table at `theta` by inverse
/// CDF; non-activated dyads carry the zero outcome. The result is always
/// network concordant with `y`.
pub fn sample_multilayer(
    y: &BasisNetwork,
    theta: &[f64],
    index: &InteractionIndex,
    seed: u64,
) -> Result<MultilayerNetwork, GraphGenError> {
    let pmf = dyad_pmf(theta, index)?;
    let mut cdf = Vec::with_capacity(pmf.probs().len());
    let mut acc = 0.0;
    for &p in pmf.probs() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dyads: Vec<u16> = y
        .edges()
        .iter()
        .map(|&active| {
            if active {
                let u: f64 = rng.gen();
                // partition_point returns the count of outcomes with
                // cdf <= u; the final bucket absorbs rounding residue.
                let pos = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                (pos + 1) as u16
            } else {
                0
            }
        })
        .collect();
    Ok(MultilayerNetwork::from_dyads(y.n_nodes(), index.k(), dyads)?)
}
