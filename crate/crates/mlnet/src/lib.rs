//! Multilayer network models on a shared basis network.
//!
//! A multilayer network stacks `K` binary, undirected layers on a common node
//! set. This crate implements a *network separable* model family in which a
//! single-layer **basis network** `Y` decides which node pairs ("dyads") may
//! carry edges at all, and the layer edges on each activated dyad follow an
//! exponential-family distribution over the `2^K - 1` nonzero dyad outcomes,
//! with natural parameters attached to layer subsets (single-layer effects and
//! cross-layer interactions up to a configurable order `H`).
//!
//! The crate is organized as a set of small, pure modules:
//!
//! - [`model`]: sufficient statistics, dyad-level probability tables,
//!   conditional log-odds, log-likelihood and log-pseudolikelihood with exact
//!   gradients/Hessians, and the dyad-level information matrices.
//! - [`graphgen`]: random basis networks (Bernoulli, stochastic block model,
//!   latent space model) and exact sampling of layers given a basis network.
//! - [`estim`]: Newton-type maximization of either objective (MLE / MPLE) with
//!   step halving, separation detection, and standard errors.
//! - [`infer`]: Wald tests, four multiple-testing adjustments with FDR/power
//!   summaries, ROC curves, Hotelling's global test, and normality
//!   diagnostics for replicated estimates.
//! - [`theory`]: calculators for non-asymptotic estimation-error and
//!   normal-approximation bounds, the basis-dependence measure `D_g`, and the
//!   local minimum-eigenvalue summary `xi`.
//! - [`harness`]: config-driven simulation studies with deterministic,
//!   byte-reproducible CSV outputs, minimal SVG figures, and a hashed file
//!   manifest.
//! - [`io`]: layer-file ingestion (dense 0/1 matrices or edge lists with
//!   AND/OR symmetrization), a versioned network serialization format, and a
//!   synthetic three-layer fixture generator.
//! - [`special`]: the small set of special functions the statistics need
//!   (erfc-based normal CDF, normal quantile, regularized incomplete
//!   gamma/beta), implemented in-crate so results are reproducible to the
//!   last bit across platforms.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so everything is safe to share across threads; the only
//! parallelism lives in the harness, which fans replicates out with rayon.
//!
//! Randomness is pinned to the ChaCha8 stream cipher (`rand_chacha`), so a
//! `(spec, seed)` pair reproduces bit-identical samples across platforms and
//! releases.

pub mod estim;
pub mod graphgen;
pub mod harness;
pub mod infer;
pub mod io;
pub mod model;
pub mod special;
pub mod theory;

pub use model::{BasisNetwork, InteractionIndex, MultilayerNetwork};
