//! Probability structure of the multilayer model.
//!
//! A *dyad* is an unordered node pair `{i, j}`; its outcome is the vector of
//! `K` layer indicators, stored here as a `K`-bit mask (bit `k-1` set means an
//! edge in layer `k`). The basis network `Y` marks which dyads are
//! *activated*: a concordant pair `(X, Y)` has `y_ij = 1` exactly when the
//! dyad carries at least one layer edge.
//!
//! Conditional on activation, each dyad outcome is one of the `2^K - 1`
//! nonzero masks, with probability proportional to `exp(<theta, s(x)>)`
//! where `s(x)` collects products of layer indicators over the subsets in an
//! [`InteractionIndex`]. Everything in this module is exact enumeration over
//! those masks, which is cheap for `K <= 16`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::special::{ln_1p_exp, logistic};

/// Largest supported number of layers. Enumeration over `2^K - 1` dyad
/// outcomes is exact and cheap in this regime.
pub const MAX_LAYERS: usize = 16;

/// Errors from model-level operations.
#[derive(Debug, Error)]
pub enum ModelError {
    /// Interaction order outside `1..=K` or `K` outside `1..=16`.
    #[error("invalid interaction order: K={k}, H={h} (need 1 <= H <= K <= {MAX_LAYERS})")]
    InvalidOrder { k: usize, h: usize },
    /// Parameter vector has the wrong length or non-finite entries.
    #[error("invalid parameter vector: {reason}")]
    InvalidParameter { reason: String },
    /// Layer counts or node counts do not line up.
    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },
    /// `(X, Y)` is not network concordant.
    #[error(
        "(X, Y) not network concordant at dyad {{{i}, {j}}}: basis edge {y} but dyad outcome mask {mask:#b}"
    )]
    NotConcordant { i: usize, j: usize, y: bool, mask: u16 },
    /// Dyad outcome uses layers beyond `K`.
    #[error("dyad outcome {mask:#b} has bits above layer count {k}")]
    OutcomeOutOfRange { mask: u16, k: usize },
}

/// Index of the unordered pair `{i, j}` (with `i < j`) in row-major order
/// over the `C(n, 2)` pairs of an `n`-node network.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Number of unordered node pairs in an `n`-node network.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Ordered list of the layer subsets that define the sufficient statistics
/// and natural parameters.
///
/// All nonempty subsets of `{1, ..., K}` of size at most `H`, singletons
/// first, then ascending size, lexicographic within each size. Position `t`
/// of a parameter vector refers to `subsets()[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionIndex {
    k: usize,
    h: usize,
    subsets: Vec<u16>,
}

impl InteractionIndex {
    /// Builds the index for `k` layers with maximum interaction order `h`.
    pub fn new(k: usize, h: usize) -> Result<Self, ModelError> {
        if !(1..=MAX_LAYERS).contains(&k) || h < 1 || h > k {
            return Err(ModelError::InvalidOrder { k, h });
        }
        let mut subsets = Vec::new();
        let mut combo: Vec<usize> = Vec::new();
        for size in 1..=h {
            combo.clear();
            combo.extend(1..=size);
            loop {
                let mask = combo.iter().fold(0u16, |m, &layer| m | (1 << (layer - 1)));
                subsets.push(mask);
                // Advance to the next combination of `size` layers in
                // lexicographic order, or stop when exhausted.
                let mut pos = size;
                loop {
                    if pos == 0 {
                        combo.clear();
                        break;
                    }
                    pos -= 1;
                    if combo[pos] < k - (size - 1 - pos) {
                        combo[pos] += 1;
                        for q in pos + 1..size {
                            combo[q] = combo[q - 1] + 1;
                        }
                        break;
                    }
                }
                if combo.is_empty() {
                    break;
                }
            }
        }
        Ok(Self { k, h, subsets })
    }

    /// Number of layers `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Maximum interaction order `H`.
    pub fn h(&self) -> usize {
        self.h
    }

    /// Model dimension `p = sum_{h<=H} C(K, h)`.
    pub fn p(&self) -> usize {
        self.subsets.len()
    }

    /// The ordered subset bitmasks (bit `k-1` represents layer `k`).
    pub fn subsets(&self) -> &[u16] {
        &self.subsets
    }

    /// 1-based layer members of subset `t`, ascending.
    pub fn members(&self, t: usize) -> Vec<usize> {
        let mask = self.subsets[t];
        (1..=self.k).filter(|&l| mask & (1 << (l - 1)) != 0).collect()
    }

    /// Human-readable label for position `t`, e.g. `"2"` or `"1,3"`.
    pub fn label(&self, t: usize) -> String {
        self.members(t)
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Checks that `theta` is a valid parameter vector for this index.
    pub fn validate_theta(&self, theta: &[f64]) -> Result<(), ModelError> {
        if theta.len() != self.p() {
            return Err(ModelError::InvalidParameter {
                reason: format!("length {} does not match p = {}", theta.len(), self.p()),
            });
        }
        if let Some(t) = theta.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParameter {
                reason: format!("non-finite entry {} at position {t}", theta[t]),
            });
        }
        Ok(())
    }
}

/// A multilayer network: `K` binary undirected layers on `n` nodes, stored
/// dyad-major as one `K`-bit outcome mask per unordered pair. Symmetric by
/// construction; self-loops are not representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilayerNetwork {
    n_nodes: usize,
    n_layers: usize,
    dyads: Vec<u16>,
}

impl MultilayerNetwork {
    /// An edgeless network.
    pub fn empty(n_nodes: usize, n_layers: usize) -> Result<Self, ModelError> {
        Self::from_dyads(n_nodes, n_layers, vec![0; pair_count(n_nodes)])
    }

    /// Builds a network from per-dyad outcome masks in [`pair_index`] order.
    pub fn from_dyads(
        n_nodes: usize,
        n_layers: usize,
        dyads: Vec<u16>,
    ) -> Result<Self, ModelError> {
        if !(1..=MAX_LAYERS).contains(&n_layers) {
            return Err(ModelError::InvalidOrder { k: n_layers, h: 1 });
        }
        if dyads.len() != pair_count(n_nodes) {
            return Err(ModelError::DimensionMismatch {
                reason: format!(
                    "{} dyads supplied for an {n_nodes}-node network (need {})",
                    dyads.len(),
                    pair_count(n_nodes)
                ),
            });
        }
        let limit = if n_layers == 16 { u16::MAX } else { (1 << n_layers) - 1 };
        if let Some(&mask) = dyads.iter().find(|&&m| m > limit) {
            return Err(ModelError::OutcomeOutOfRange { mask, k: n_layers });
        }
        Ok(Self { n_nodes, n_layers, dyads })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    /// Outcome mask of dyad `{i, j}` (`i != j`, any order).
    pub fn dyad(&self, i: usize, j: usize) -> u16 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.dyads[pair_index(self.n_nodes, a, b)]
    }

    /// All outcome masks in [`pair_index`] order.
    pub fn dyads(&self) -> &[u16] {
        &self.dyads
    }

    /// Number of edges in layer `layer` (1-based).
    pub fn layer_edge_count(&self, layer: usize) -> usize {
        let bit = 1u16 << (layer - 1);
        self.dyads.iter().filter(|&&m| m & bit != 0).count()
    }
}

/// A single-layer basis network: one bit per unordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisNetwork {
    n_nodes: usize,
    edges: Vec<bool>,
}

impl BasisNetwork {
    /// An edgeless basis network.
    pub fn empty(n_nodes: usize) -> Self {
        Self { n_nodes, edges: vec![false; pair_count(n_nodes)] }
    }

    /// Builds a basis network from per-pair indicators in [`pair_index`] order.
    pub fn from_edges(n_nodes: usize, edges: Vec<bool>) -> Result<Self, ModelError> {
        if edges.len() != pair_count(n_nodes) {
            return Err(ModelError::DimensionMismatch {
                reason: format!(
                    "{} pair indicators supplied for an {n_nodes}-node network (need {})",
                    edges.len(),
                    pair_count(n_nodes)
                ),
            });
        }
        Ok(Self { n_nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges[pair_index(self.n_nodes, a, b)]
    }

    /// Per-pair indicators in [`pair_index`] order.
    pub fn edges(&self) -> &[bool] {
        &self.edges
    }

    /// Number of activated dyads, `||Y||_1`.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    /// Edge density `||Y||_1 / C(n, 2)`.
    pub fn density(&self) -> f64 {
        if self.edges.is_empty() {
            0.0
        } else {
            self.edge_count() as f64 / self.edges.len() as f64
        }
    }
}

/// Dyad-level sufficient statistics of one outcome mask: entry `t` is the
/// product of the layer indicators over `index.subsets()[t]`, i.e. `1` iff
/// the subset's layers are all present in the outcome.
pub fn dyad_suff_stats(outcome: u16, index: &InteractionIndex) -> Vec<u8> {
    index.subsets().iter().map(|&s| u8::from(outcome & s == s)).collect()
}

/// Network-level sufficient statistics: componentwise sum of the dyad-level
/// statistics over all unordered pairs.
pub fn network_suff_stats(
    x: &MultilayerNetwork,
    index: &InteractionIndex,
) -> Result<Vec<u64>, ModelError> {
    if x.n_layers() != index.k() {
        return Err(ModelError::DimensionMismatch {
            reason: format!(
                "network has {} layers but index expects {}",
                x.n_layers(),
                index.k()
            ),
        });
    }
    let mut s = vec![0u64; index.p()];
    for &mask in x.dyads() {
        if mask == 0 {
            continue;
        }
        for (t, &sub) in index.subsets().iter().enumerate() {
            if mask & sub == sub {
                s[t] += 1;
            }
        }
    }
    Ok(s)
}

/// The basis network determined by a multilayer network: `y_ij = 1` iff the
/// dyad carries at least one layer edge. The pair `(x, derive_basis(x))` is
/// always network concordant.
pub fn derive_basis(x: &MultilayerNetwork) -> BasisNetwork {
    BasisNetwork {
        n_nodes: x.n_nodes(),
        edges: x.dyads().iter().map(|&m| m != 0).collect(),
    }
}

/// Checks network concordance of `(x, y)`: every activated dyad carries at
/// least one edge and every non-activated dyad carries none.
pub fn check_concordant(x: &MultilayerNetwork, y: &BasisNetwork) -> Result<(), ModelError> {
    if x.n_nodes() != y.n_nodes() {
        return Err(ModelError::DimensionMismatch {
            reason: format!(
                "multilayer network has {} nodes, basis network {}",
                x.n_nodes(),
                y.n_nodes()
            ),
        });
    }
    let n = x.n_nodes();
    for i in 0..n {
        for j in i + 1..n {
            let idx = pair_index(n, i, j);
            let mask = x.dyads()[idx];
            let y_ij = y.edges()[idx];
            if y_ij != (mask != 0) {
                return Err(ModelError::NotConcordant { i, j, y: y_ij, mask });
            }
        }
    }
    Ok(())
}

/// Probability table over the `2^K - 1` nonzero outcomes of an activated
/// dyad, together with the per-dyad log-normalizer
/// `log sum_{x != 0} exp(<theta, s(x)>)`.
#[derive(Debug, Clone)]
pub struct DyadPmf {
    k: usize,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    log_normalizer: f64,
}

impl DyadPmf {
    /// Probability of the nonzero outcome mask (the all-zero outcome has
    /// probability zero on an activated dyad).
    pub fn prob(&self, outcome: u16) -> f64 {
        if outcome == 0 {
            0.0
        } else {
            self.probs[outcome as usize - 1]
        }
    }

    /// Log-probability of a nonzero outcome mask.
    pub fn log_prob(&self, outcome: u16) -> f64 {
        debug_assert!(outcome != 0);
        self.log_probs[outcome as usize - 1]
    }

    /// Probabilities of outcomes `1, ..., 2^K - 1` in mask order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `log sum_{x != 0} exp(<theta, s(x)>)`; the per-activated-dyad
    /// contribution to the global normalizer.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Expected dyad-level sufficient statistics `E[s]` under this table.
    pub fn expected_suff(&self, index: &InteractionIndex) -> Vec<f64> {
        let mut e = vec![0.0; index.p()];
        for (t, &sub) in index.subsets().iter().enumerate() {
            for mask in 1..(1u32 << self.k) as u16 {
                if mask & sub == sub {
                    e[t] += self.prob(mask);
                }
            }
        }
        e
    }
}

/// Builds the dyad outcome distribution for an activated dyad:
/// `prob(x) = exp(<theta, s(x)>) / sum_{x' != 0} exp(<theta, s(x')>)`,
/// stabilized with log-sum-exp.
pub fn dyad_pmf(theta: &[f64], index: &InteractionIndex) -> Result<DyadPmf, ModelError> {
    index.validate_theta(theta)?;
    let k = index.k();
    let n_outcomes = (1usize << k) - 1;
    let mut log_w = Vec::with_capacity(n_outcomes);
    for mask in 1..=n_outcomes as u16 {
        let mut lw = 0.0;
        for (t, &sub) in index.subsets().iter().enumerate() {
            if mask & sub == sub {
                lw += theta[t];
            }
        }
        log_w.push(lw);
    }
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum_exp: f64 = log_w.iter().map(|lw| (lw - max).exp()).sum();
    let log_normalizer = max + sum_exp.ln();
    let log_probs: Vec<f64> = log_w.iter().map(|lw| lw - log_normalizer).collect();
    let probs: Vec<f64> = log_probs.iter().map(|lp| lp.exp()).collect();
    Ok(DyadPmf { k, probs, log_probs, log_normalizer })
}

/// Conditional log-odds of a layer edge on an activated dyad, given the other
/// layers' indicators.
///
/// `layer` is 1-based; `x_others` is the outcome mask of the *other* layers
/// (any bit at `layer` itself is ignored). When no other layer is present the
/// conditional distribution is a point mass at 1 (the dyad must carry at
/// least one edge), so the log-odds is `+inf`. Otherwise it equals the sum of
/// the parameter entries over all subsets containing `layer` whose remaining
/// members all appear in `x_others`.
pub fn log_odds(theta: &[f64], index: &InteractionIndex, layer: usize, x_others: u16) -> f64 {
    debug_assert!((1..=index.k()).contains(&layer));
    let bit = 1u16 << (layer - 1);
    let others = x_others & !bit;
    if others == 0 {
        return f64::INFINITY;
    }
    let mut eta = 0.0;
    for (t, &sub) in index.subsets().iter().enumerate() {
        if sub & bit != 0 && (sub & !bit) & !others == 0 {
            eta += theta[t];
        }
    }
    eta
}

/// Counts of activated-dyad outcomes, the sufficient statistics, and
/// `||Y||_1`, gathered in one concordance-checking pass. Both objectives and
/// all their derivatives are per-dyad sums that depend only on the outcome
/// mask, so evaluation cost after tallying is independent of network size.
#[derive(Debug, Clone)]
pub(crate) struct DyadTally {
    /// `counts[mask]` = number of activated dyads with that outcome
    /// (index 0 unused).
    pub counts: Vec<u64>,
    /// Number of activated dyads.
    pub y1: u64,
}

impl DyadTally {
    pub fn new(
        x: &MultilayerNetwork,
        y: &BasisNetwork,
        index: &InteractionIndex,
    ) -> Result<Self, ModelError> {
        if x.n_layers() != index.k() {
            return Err(ModelError::DimensionMismatch {
                reason: format!(
                    "network has {} layers but index expects {}",
                    x.n_layers(),
                    index.k()
                ),
            });
        }
        check_concordant(x, y)?;
        let mut counts = vec![0u64; 1 << index.k()];
        let mut y1 = 0u64;
        for &mask in x.dyads() {
            if mask != 0 {
                counts[mask as usize] += 1;
                y1 += 1;
            }
        }
        Ok(Self { counts, y1 })
    }

    /// Network-level sufficient statistics as floats.
    pub fn suff(&self, index: &InteractionIndex) -> Vec<f64> {
        let mut s = vec![0.0; index.p()];
        for (mask, &c) in self.counts.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            for (t, &sub) in index.subsets().iter().enumerate() {
                if mask as u16 & sub == sub {
                    s[t] += c as f64;
                }
            }
        }
        s
    }
}

/// Conditional log-likelihood of the layers given the basis network:
/// the sum over activated dyads of the log dyad-outcome probability. The
/// basis network's own marginal probability is a constant in `theta` and is
/// omitted.
pub fn loglik(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<f64, ModelError> {
    let tally = DyadTally::new(x, y, index)?;
    let pmf = dyad_pmf(theta, index)?;
    Ok(loglik_from_tally(&tally, &pmf))
}

pub(crate) fn loglik_from_tally(tally: &DyadTally, pmf: &DyadPmf) -> f64 {
    tally
        .counts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .map(|(mask, &c)| c as f64 * pmf.log_prob(mask as u16))
        .sum()
}

/// Gradient of [`loglik`]: `s(x) - ||Y||_1 * E_theta[s]`.
pub fn loglik_gradient(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<Vec<f64>, ModelError> {
    let tally = DyadTally::new(x, y, index)?;
    let pmf = dyad_pmf(theta, index)?;
    Ok(loglik_gradient_from_tally(&tally, &pmf, index))
}

pub(crate) fn loglik_gradient_from_tally(
    tally: &DyadTally,
    pmf: &DyadPmf,
    index: &InteractionIndex,
) -> Vec<f64> {
    let s = tally.suff(index);
    let e = pmf.expected_suff(index);
    s.iter().zip(e).map(|(si, ei)| si - tally.y1 as f64 * ei).collect()
}

/// Hessian of [`loglik`]: exactly `-||Y||_1 * I(theta)` for every outcome
/// configuration, since the log-normalizer is the only `theta`-curved term.
pub fn loglik_hessian(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<DMatrix<f64>, ModelError> {
    let tally = DyadTally::new(x, y, index)?;
    let info = info_dyad(theta, index)?;
    Ok(info * (-(tally.y1 as f64)))
}

/// Per-mask pseudolikelihood contribution: value, gradient, and Hessian of
/// the sum over layers of the conditional Bernoulli log-probabilities for one
/// activated dyad with the given outcome. Layers whose conditioning set is
/// empty contribute exactly zero (the conditional is a point mass at 1).
fn pl_dyad_terms(
    theta: &[f64],
    index: &InteractionIndex,
    outcome: u16,
    grad: Option<&mut [f64]>,
    hess: Option<&mut DMatrix<f64>>,
    weight: f64,
) -> f64 {
    let k = index.k();
    let mut value = 0.0;
    let mut grad = grad;
    let mut hess = hess;
    let mut active = Vec::with_capacity(index.p());
    for layer in 1..=k {
        let bit = 1u16 << (layer - 1);
        let others = outcome & !bit;
        if others == 0 {
            continue;
        }
        active.clear();
        let mut eta = 0.0;
        for (t, &sub) in index.subsets().iter().enumerate() {
            if sub & bit != 0 && (sub & !bit) & !others == 0 {
                eta += theta[t];
                active.push(t);
            }
        }
        let x_k = f64::from(outcome & bit != 0);
        value += x_k * eta - ln_1p_exp(eta);
        if grad.is_some() || hess.is_some() {
            let mu = logistic(eta);
            if let Some(g) = grad.as_deref_mut() {
                for &t in &active {
                    g[t] += weight * (x_k - mu);
                }
            }
            if let Some(h) = hess.as_deref_mut() {
                let w = weight * mu * (1.0 - mu);
                for &t in &active {
                    for &u in &active {
                        h[(t, u)] -= w;
                    }
                }
            }
        }
    }
    value
}

/// Log-pseudolikelihood: the sum over activated dyads and layers of the
/// conditional Bernoulli log-probability of each layer indicator given the
/// rest of its dyad. Non-activated dyads and layers with an empty
/// conditioning set contribute exactly zero.
pub fn log_pseudolik(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<f64, ModelError> {
    index.validate_theta(theta)?;
    let tally = DyadTally::new(x, y, index)?;
    Ok(log_pseudolik_from_tally(theta, &tally, index))
}

pub(crate) fn log_pseudolik_from_tally(
    theta: &[f64],
    tally: &DyadTally,
    index: &InteractionIndex,
) -> f64 {
    tally
        .counts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .map(|(mask, &c)| {
            c as f64 * pl_dyad_terms(theta, index, mask as u16, None, None, 1.0)
        })
        .sum()
}

/// Gradient of [`log_pseudolik`].
pub fn log_pseudolik_gradient(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<Vec<f64>, ModelError> {
    index.validate_theta(theta)?;
    let tally = DyadTally::new(x, y, index)?;
    Ok(log_pseudolik_gradient_from_tally(theta, &tally, index))
}

pub(crate) fn log_pseudolik_gradient_from_tally(
    theta: &[f64],
    tally: &DyadTally,
    index: &InteractionIndex,
) -> Vec<f64> {
    let mut grad = vec![0.0; index.p()];
    for (mask, &c) in tally.counts.iter().enumerate().skip(1) {
        if c > 0 {
            pl_dyad_terms(theta, index, mask as u16, Some(&mut grad), None, c as f64);
        }
    }
    grad
}

/// Hessian of [`log_pseudolik`].
pub fn log_pseudolik_hessian(
    theta: &[f64],
    x: &MultilayerNetwork,
    y: &BasisNetwork,
    index: &InteractionIndex,
) -> Result<DMatrix<f64>, ModelError> {
    index.validate_theta(theta)?;
    let tally = DyadTally::new(x, y, index)?;
    Ok(log_pseudolik_hessian_from_tally(theta, &tally, index))
}

pub(crate) fn log_pseudolik_hessian_from_tally(
    theta: &[f64],
    tally: &DyadTally,
    index: &InteractionIndex,
) -> DMatrix<f64> {
    let p = index.p();
    let mut hess = DMatrix::zeros(p, p);
    for (mask, &c) in tally.counts.iter().enumerate().skip(1) {
        if c > 0 {
            pl_dyad_terms(theta, index, mask as u16, None, Some(&mut hess), c as f64);
        }
    }
    hess
}

/// Dyad-level information matrix `I(theta)`: the covariance of the dyad
/// sufficient statistics under the activated-dyad outcome distribution,
/// computed by exact enumeration. Symmetric positive semidefinite; for
/// `K = 1` the lone statistic is constant on activated dyads, so `I = 0`.
pub fn info_dyad(theta: &[f64], index: &InteractionIndex) -> Result<DMatrix<f64>, ModelError> {
    let pmf = dyad_pmf(theta, index)?;
    Ok(info_from_pmf(&pmf, index))
}

pub(crate) fn info_from_pmf(pmf: &DyadPmf, index: &InteractionIndex) -> DMatrix<f64> {
    let p = index.p();
    let k = index.k();
    let mut mean = vec![0.0; p];
    let mut second = DMatrix::zeros(p, p);
    let mut s = vec![0.0; p];
    for mask in 1..(1u32 << k) as u16 {
        let w = pmf.prob(mask);
        for (t, &sub) in index.subsets().iter().enumerate() {
            s[t] = f64::from(mask & sub == sub);
        }
        for t in 0..p {
            if s[t] == 0.0 {
                continue;
            }
            mean[t] += w;
            for u in 0..p {
                if s[u] != 0.0 {
                    second[(t, u)] += w;
                }
            }
        }
    }
    for t in 0..p {
        for u in 0..p {
            second[(t, u)] -= mean[t] * mean[u];
        }
    }
    second
}

/// Pseudolikelihood analogue of the dyad-level information matrix: the
/// expectation, over the activated-dyad outcome distribution, of the negative
/// Hessian of the per-dyad pseudolikelihood contribution. Satisfies
/// `E[pseudolikelihood Hessian] = -||Y||_1 * pseudo_info_dyad(theta)` on any
/// fixed basis network.
pub fn pseudo_info_dyad(
    theta: &[f64],
    index: &InteractionIndex,
) -> Result<DMatrix<f64>, ModelError> {
    let pmf = dyad_pmf(theta, index)?;
    let p = index.p();
    let mut acc = DMatrix::zeros(p, p);
    for mask in 1..(1u32 << index.k()) as u16 {
        let w = pmf.prob(mask);
        if w > 0.0 {
            // The per-dyad Hessian does not depend on the layer indicator
            // itself, only on the conditioning sets, so weighting the
            // negative Hessian by the outcome probability is the exact
            // expectation.
            pl_dyad_terms(theta, index, mask, None, Some(&mut acc), -w);
        }
    }
    Ok(acc)
}
