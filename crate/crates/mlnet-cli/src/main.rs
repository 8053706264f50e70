//! `mlnet`: command-line surface for the network-separable multilayer
//! model — simulate networks, fit and test parameters, run simulation
//! studies, and evaluate the finite-sample bound calculators.
//!
//! Exit codes: 0 on success, 2 for configuration errors (bad flags or
//! config files), 3 for data errors (unreadable or malformed network
//! files), 4 for estimation failures (divergence or a degenerate
//! information matrix). Every run prints its resolved configuration
//! before doing any work.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mlnet::estim::{fit, EstimError, FitOptions, FitResult, Objective};
use mlnet::graphgen::{sample_basis, sample_multilayer, BasisSpec, GraphGenError};
use mlnet::harness::{load_config, run_gof, run_study, HarnessError, StudySummary};
use mlnet::infer::{wald_tests, InferError, Method, TestReport};
use mlnet::io::{
    load_multilayer, load_multilayer_network, save_basis_network, save_multilayer_network,
    write_synthetic_fixture, IoError, LayerFileSet, LayerFormat, SymmetrizeRule,
};
use mlnet::model::{
    derive_basis, log_odds, network_suff_stats, pair_count, BasisNetwork, InteractionIndex,
    MultilayerNetwork,
};
use mlnet::theory::{
    dg, remainder_bound, thm1_bound, thm2_bernoulli, thm2_bound, xi_epsilon, BoundReport,
    TheoryError, TheoryInputs,
};

#[derive(Parser)]
#[command(
    name = "mlnet",
    version,
    about = "Multilayer-network model: simulation, estimation, inference, and bounds",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a basis network and multilayer layers from a generating model.
    Simulate(SimulateArgs),
    /// Fit the model to an observed multilayer network.
    Fit(FitArgs),
    /// Component-wise Wald tests with multiplicity adjustments.
    Test(TestArgs),
    /// Run a config-driven simulation study (CSV + SVG + manifest outputs).
    Experiment(ExperimentArgs),
    /// Goodness of fit: compare observed statistics with model simulations.
    Gof(GofArgs),
    /// Evaluate the finite-sample estimation and normality bounds.
    Bounds(BoundsArgs),
}

/// How the observed network is supplied: either one saved network file or
/// one raw data file per layer.
#[derive(Args)]
struct NetworkInput {
    /// Saved multilayer network (the versioned `mlnet-network` format).
    #[arg(long, conflicts_with = "layer", required_unless_present = "layer")]
    network: Option<PathBuf>,
    /// Per-layer data file; repeat once per layer, in layer order.
    #[arg(long)]
    layer: Vec<PathBuf>,
    /// Layer file format: `matrix` (dense 0/1) or `edgelist` (1-based pairs).
    #[arg(long, default_value = "matrix")]
    format: LayerFormat,
    /// Symmetrization rule for layer files: `and`, `or`, or `asis`.
    #[arg(long, default_value = "and")]
    rule: SymmetrizeRule,
}

impl NetworkInput {
    fn describe(&self) -> String {
        match &self.network {
            Some(path) => format!("network file {}", path.display()),
            None => {
                let names: Vec<String> =
                    self.layer.iter().map(|p| p.display().to_string()).collect();
                format!("layer files [{}] ({}, rule {})", names.join(", "), self.format, self.rule)
            }
        }
    }

    fn load(&self) -> Result<MultilayerNetwork, CliError> {
        match &self.network {
            Some(path) => Ok(load_multilayer_network(path)?),
            None => {
                let files = LayerFileSet {
                    paths: self.layer.clone(),
                    rule: self.rule,
                    format: self.format,
                };
                Ok(load_multilayer(&files)?)
            }
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Write the bundled synthetic three-layer fixture (dense matrices with
    /// the published Lazega marginals) into this directory and exit.
    #[arg(long)]
    fixture: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    nodes: Option<usize>,
    /// Number of layers K.
    #[arg(long, required_unless_present = "fixture")]
    layers: Option<usize>,
    /// Maximum interaction order in the sufficient statistics.
    #[arg(long, default_value_t = 2)]
    h: usize,
    /// Generating parameter, comma-separated, length p = sum_h C(K,h).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required_unless_present = "fixture"
    )]
    theta: Option<Vec<f64>>,
    /// Basis family as JSON: '{"bernoulli-fixed":0.8}', '{"bernoulli-sparse":5.0}',
    /// '{"sbm":{"n_blocks":2,"p_in":0.3,"p_out":0.05}}', or
    /// '{"lsm":{"density_target":0.24,"latent_dim":2}}'.
    #[arg(long, value_parser = parse_basis_spec, required_unless_present = "fixture")]
    basis: Option<BasisSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the sampled multilayer network.
    #[arg(long, required_unless_present = "fixture")]
    out: Option<PathBuf>,
    /// Also save the sampled basis network here.
    #[arg(long)]
    basis_out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: NetworkInput,
    /// Maximum interaction order in the sufficient statistics.
    #[arg(long, default_value_t = 2)]
    h: usize,
    /// Objective: `mple` (pseudolikelihood) or `mle` (exact likelihood).
    #[arg(long, default_value = "mple")]
    objective: Objective,
    /// Significance level for the reported decisions.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Multiplicity adjustment: `bonferroni`, `holm`, `hochberg`, or `bh`.
    #[arg(long, default_value = "bh")]
    adjust: Method,
    /// Conditional odds query, e.g. "1 given 2=1,3=1"; repeatable.
    #[arg(long, value_parser = parse_odds_query)]
    odds: Vec<OddsQuery>,
    /// Write the full fit report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: NetworkInput,
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value = "mple")]
    objective: Objective,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Adjustment whose decisions fill the `keep` column.
    #[arg(long, default_value = "bh")]
    adjust: Method,
    /// Null values, comma-separated (default: all zeros).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Study description (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    input: NetworkInput,
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value = "mple")]
    objective: Objective,
    /// Number of simulated networks.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundsArgs {
    /// Number of nodes.
    #[arg(long)]
    n: usize,
    /// Number of layers.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    h: usize,
    /// Generating parameter (the bound's reference point), comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
    /// Basis family as JSON (see `simulate --help` for the shapes).
    #[arg(long, value_parser = parse_basis_spec)]
    basis: BasisSpec,
    /// Ball radius for the minimum-eigenvalue level.
    #[arg(long, default_value_t = 2.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 200)]
    ball_samples: usize,
    /// Monte-Carlo replicates for the edge-dependence sum.
    #[arg(long, default_value_t = 5000)]
    dg_reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A conditional odds query: target layer and fixed values for other layers.
#[derive(Debug, Clone)]
struct OddsQuery {
    raw: String,
    layer: usize,
    given: Vec<(usize, u8)>,
}

fn parse_odds_query(s: &str) -> Result<OddsQuery, String> {
    let (target, rest) = match s.split_once(" given ") {
        Some((t, r)) => (t, Some(r)),
        None => (s, None),
    };
    let layer: usize = target
        .trim()
        .parse()
        .map_err(|_| format!("odds query '{s}': target must be a 1-based layer number"))?;
    if layer == 0 {
        return Err(format!("odds query '{s}': layers are 1-based"));
    }
    let mut given = Vec::new();
    if let Some(rest) = rest {
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("odds query '{s}': condition '{part}' is not 'layer=0|1'"))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| format!("odds query '{s}': bad layer number '{}'", k.trim()))?;
            let v: u8 = match v.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(format!("odds query '{s}': value '{other}' must be 0 or 1")),
            };
            if k == 0 {
                return Err(format!("odds query '{s}': layers are 1-based"));
            }
            if k == layer {
                return Err(format!("odds query '{s}': layer {k} cannot condition on itself"));
            }
            if given.iter().any(|&(seen, _)| seen == k) {
                return Err(format!("odds query '{s}': layer {k} conditioned twice"));
            }
            given.push((k, v));
        }
    }
    Ok(OddsQuery { raw: s.to_string(), layer, given })
}

impl OddsQuery {
    /// The `x_others` outcome mask, after checking layer numbers against K.
    fn mask_for(&self, k: usize) -> Result<u16, CliError> {
        if self.layer > k {
            return Err(CliError::Config(format!(
                "odds query '{}': layer {} exceeds K = {k}",
                self.raw, self.layer
            )));
        }
        let mut mask = 0u16;
        for &(layer, value) in &self.given {
            if layer > k {
                return Err(CliError::Config(format!(
                    "odds query '{}': layer {layer} exceeds K = {k}",
                    self.raw
                )));
            }
            if value == 1 {
                mask |= 1 << (layer - 1);
            }
        }
        Ok(mask)
    }
}

fn parse_basis_spec(s: &str) -> Result<BasisSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("basis spec is not valid JSON: {e}"))
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping.
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Bad flags or config files (exit 2).
    Config(String),
    /// Unreadable or malformed data files (exit 3).
    Data(String),
    /// Divergence or degenerate information (exit 4).
    Estimation(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Data(msg) | CliError::Estimation(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Estimation(_) => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GraphGenError> for CliError {
    fn from(e: GraphGenError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<InferError> for CliError {
    fn from(e: InferError) -> Self {
        CliError::Estimation(e.to_string())
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_)
            | HarnessError::Json(_)
            | HarnessError::Graph(_)
            | HarnessError::Theory(_) => CliError::Config(e.to_string()),
            HarnessError::Io { .. } | HarnessError::Csv(_) | HarnessError::Model(_) => {
                CliError::Data(e.to_string())
            }
            HarnessError::Estim(_)
            | HarnessError::Infer(_)
            | HarnessError::TooManyFailures { .. } => CliError::Estimation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Fit(args) => run_fit(&args),
        Command::Test(args) => run_test(&args),
        Command::Experiment(args) => run_experiment(&args),
        Command::Gof(args) => run_gof_cmd(&args),
        Command::Bounds(args) => run_bounds(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_config(pairs: &[(&str, String)]) {
    println!("config:");
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (key, value) in pairs {
        println!("  {key:<width$} = {value}");
    }
    println!();
}

/// Builds the interaction index, reporting bad K/H as a config error.
fn make_index(k: usize, h: usize) -> Result<InteractionIndex, CliError> {
    InteractionIndex::new(k, h).map_err(|e| CliError::Config(e.to_string()))
}

/// Names statistics sitting at the extremes of their range (0 or
/// `||Y||_1`), the usual culprits behind separation and degenerate
/// information.
fn extreme_statistic_note(x: &MultilayerNetwork, index: &InteractionIndex) -> String {
    let Ok(stats) = network_suff_stats(x, index) else {
        return String::new();
    };
    let y1 = x.dyads().iter().filter(|&&m| m != 0).count() as u64;
    let extremes: Vec<String> = stats
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0 || s == y1)
        .map(|(t, &s)| format!("{{{}}} (= {s} of {y1} activated dyads)", index.label(t)))
        .collect();
    if extremes.is_empty() {
        String::new()
    } else {
        format!("; statistics at the edge of their range: {}", extremes.join(", "))
    }
}

/// Fits the model, mapping the usual failure modes into exit-code-4 errors.
fn fit_converged(
    x: &MultilayerNetwork,
    h: usize,
    objective: Objective,
) -> Result<(InteractionIndex, BasisNetwork, FitResult), CliError> {
    let index = make_index(x.n_layers(), h)?;
    let basis = derive_basis(x);
    let opts = FitOptions::new(objective);
    let result = fit(x, &basis, &index, &opts).map_err(|e| match e {
        EstimError::NoActivatedDyads => CliError::Data(e.to_string()),
        EstimError::Separation { .. } | EstimError::SingularHessian { .. } => {
            CliError::Estimation(format!("{e}{}", extreme_statistic_note(x, &index)))
        }
        EstimError::Model(_) | EstimError::InvalidOptions(_) => CliError::Config(e.to_string()),
    })?;
    if !result.converged {
        return Err(CliError::Estimation(format!(
            "fit did not converge within {} iterations (gradient norm {:.3e}){}",
            result.iters,
            result.final_grad_norm,
            extreme_statistic_note(x, &index)
        )));
    }
    Ok((index, basis, result))
}

/// [`fit_converged`] plus the inference screen: commands that report
/// standard errors and p-values refuse a degenerate information matrix.
fn fit_network(
    x: &MultilayerNetwork,
    h: usize,
    objective: Objective,
) -> Result<(InteractionIndex, BasisNetwork, FitResult), CliError> {
    let (index, basis, result) = fit_converged(x, h, objective)?;
    if result.std_err.iter().any(|se| !se.is_finite()) {
        let mut msg = format!(
            "the information matrix is singular at the fitted parameter; \
             standard errors are undefined{}",
            extreme_statistic_note(x, &index)
        );
        if x.n_layers() == 1 {
            msg.push_str(
                " (with a single layer, every activated dyad must carry that layer's \
                 edge, so the layer indicator has no variation to fit)",
            );
        } else if index.h() == index.k() {
            msg.push_str(
                " (the saturated model H = K is never identifiable; reduce H)",
            );
        }
        return Err(CliError::Estimation(msg));
    }
    Ok((index, basis, result))
}

fn describe_network(x: &MultilayerNetwork, basis: &BasisNetwork) {
    let counts: Vec<String> =
        (1..=x.n_layers()).map(|l| x.layer_edge_count(l).to_string()).collect();
    println!(
        "network: N = {} nodes, K = {} layers, {} activated dyads (density {:.4})",
        x.n_nodes(),
        x.n_layers(),
        basis.edge_count(),
        basis.density()
    );
    println!("layer edge counts: {}", counts.join(" "));
    println!();
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if let Some(dir) = &args.fixture {
        print_config(&[
            ("mode", "fixture".to_string()),
            ("directory", dir.display().to_string()),
            ("seed", args.seed.to_string()),
        ]);
        let files = write_synthetic_fixture(dir, args.seed)?;
        println!("wrote {} layer files ({}, rule {}):", files.paths.len(), files.format, files.rule);
        for path in &files.paths {
            println!("  {}", path.display());
        }
        return Ok(());
    }
    let n = args.nodes.expect("required unless --fixture");
    let k = args.layers.expect("required unless --fixture");
    let theta = args.theta.clone().expect("required unless --fixture");
    let basis_spec = args.basis.clone().expect("required unless --fixture");
    let out = args.out.as_ref().expect("required unless --fixture");
    print_config(&[
        ("nodes", n.to_string()),
        ("layers", k.to_string()),
        ("h", args.h.to_string()),
        ("theta", format_vec(&theta)),
        ("basis", serde_json::to_string(&basis_spec).expect("spec serializes")),
        ("seed", args.seed.to_string()),
        ("out", out.display().to_string()),
    ]);

    let index = make_index(k, args.h)?;
    index.validate_theta(&theta).map_err(|e| CliError::Config(e.to_string()))?;
    let basis = sample_basis(&basis_spec, n, args.seed)?;
    let x = sample_multilayer(&basis.network, &theta, &index, args.seed.wrapping_add(1))?;
    describe_network(&x, &basis.network);
    save_multilayer_network(out, &x)?;
    println!("saved multilayer network to {}", out.display());
    if let Some(basis_out) = &args.basis_out {
        save_basis_network(basis_out, &basis.network)?;
        println!("saved basis network to {}", basis_out.display());
    }
    Ok(())
}

fn format_vec(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

/// JSON shape of a saved fit report.
#[derive(Serialize)]
struct FitJson {
    format_version: u32,
    objective: Objective,
    n_nodes: usize,
    k: usize,
    h: usize,
    labels: Vec<String>,
    theta_hat: Vec<f64>,
    std_err: Vec<f64>,
    z_scores: Vec<f64>,
    p_values_raw: Vec<f64>,
    adjust_method: String,
    p_values_adjusted: Vec<f64>,
    decisions: Vec<bool>,
    alpha: f64,
    converged: bool,
    iters: usize,
    final_grad_norm: f64,
    objective_value: f64,
    y_ones: u64,
    suff_stats: Vec<f64>,
    odds: Vec<OddsJson>,
}

#[derive(Serialize)]
struct OddsJson {
    query: String,
    log_odds: f64,
    odds: f64,
}

fn run_fit(args: &FitArgs) -> Result<(), CliError> {
    print_config(&[
        ("input", args.input.describe()),
        ("objective", args.objective.to_string()),
        ("h", args.h.to_string()),
        ("alpha", args.alpha.to_string()),
        ("adjust", args.adjust.to_string()),
    ]);
    let x = args.input.load()?;
    let (index, basis, result) = fit_network(&x, args.h, args.objective)?;
    describe_network(&x, &basis);
    println!(
        "fit ({}): converged in {} iterations, gradient norm {:.3e}, objective {:.6}",
        result.objective, result.iters, result.final_grad_norm, result.objective_value
    );
    println!();

    let p = index.p();
    let raw = wald_tests(&result, &vec![0.0; p], args.alpha)?;
    let adjusted = raw.adjusted(args.adjust);
    print_test_table(&index, &result, &raw, &[(args.adjust, &adjusted)], args.adjust);

    let mut odds_out = Vec::new();
    if !args.odds.is_empty() {
        println!();
        println!("odds queries:");
        for query in &args.odds {
            let mask = query.mask_for(index.k())?;
            let lo = log_odds(&result.theta_hat, &index, query.layer, mask);
            println!("  {}: log-odds {:.4}, odds {:.4}", query.raw, lo, lo.exp());
            odds_out.push(OddsJson { query: query.raw.clone(), log_odds: lo, odds: lo.exp() });
        }
    }

    if let Some(path) = &args.json {
        let report = FitJson {
            format_version: 1,
            objective: result.objective,
            n_nodes: x.n_nodes(),
            k: index.k(),
            h: index.h(),
            labels: (0..p).map(|t| index.label(t)).collect(),
            theta_hat: result.theta_hat.clone(),
            std_err: result.std_err.clone(),
            z_scores: raw.z_scores.clone(),
            p_values_raw: raw.p_values_raw.clone(),
            adjust_method: args.adjust.to_string(),
            p_values_adjusted: adjusted
                .p_values_adjusted
                .clone()
                .expect("adjusted report carries adjusted p-values"),
            decisions: adjusted.decisions.clone(),
            alpha: args.alpha,
            converged: result.converged,
            iters: result.iters,
            final_grad_norm: result.final_grad_norm,
            objective_value: result.objective_value,
            y_ones: result.y_ones,
            suff_stats: result.suff_stats.clone(),
            odds: odds_out,
        };
        let mut text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Data(format!("serializing fit report: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        println!();
        println!("wrote fit report to {}", path.display());
    }
    Ok(())
}

/// Prints the estimate table with one adjusted-p column per listed method;
/// the `keep` column reflects `decide_with`.
fn print_test_table(
    index: &InteractionIndex,
    result: &FitResult,
    raw: &TestReport,
    adjusted: &[(Method, &TestReport)],
    decide_with: Method,
) {
    let mut header = format!(
        "{:<10} {:>10} {:>9} {:>8} {:>8}",
        "statistic", "estimate", "std.err", "z", "p(raw)"
    );
    for (method, _) in adjusted {
        header.push_str(&format!(" {:>12}", format!("p({method})")));
    }
    header.push_str("  keep");
    println!("{header}");
    let decisions = &adjusted
        .iter()
        .find(|(m, _)| *m == decide_with)
        .expect("decide_with is among the adjusted methods")
        .1
        .decisions;
    for t in 0..index.p() {
        let mut line = format!(
            "{:<10} {:>10.4} {:>9.4} {:>8.3} {:>8.4}",
            format!("{{{}}}", index.label(t)),
            result.theta_hat[t],
            result.std_err[t],
            raw.z_scores[t],
            raw.p_values_raw[t],
        );
        for (_, report) in adjusted {
            let adj = report.p_values_adjusted.as_ref().expect("adjusted report");
            line.push_str(&format!(" {:>12.4}", adj[t]));
        }
        line.push_str(if decisions[t] { "  yes" } else { "  no" });
        println!("{line}");
    }
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

fn run_test(args: &TestArgs) -> Result<(), CliError> {
    print_config(&[
        ("input", args.input.describe()),
        ("objective", args.objective.to_string()),
        ("h", args.h.to_string()),
        ("alpha", args.alpha.to_string()),
        ("adjust", args.adjust.to_string()),
        ("mu", args.mu.as_deref().map(format_vec).unwrap_or_else(|| "0 (all)".into())),
    ]);
    let x = args.input.load()?;
    let (index, basis, result) = fit_network(&x, args.h, args.objective)?;
    describe_network(&x, &basis);
    let p = index.p();
    let mu = match &args.mu {
        Some(mu) => {
            if mu.len() != p {
                return Err(CliError::Config(format!(
                    "mu has length {}, but the model has p = {p} parameters",
                    mu.len()
                )));
            }
            mu.clone()
        }
        None => vec![0.0; p],
    };
    let raw = wald_tests(&result, &mu, args.alpha)?;
    let all: Vec<(Method, TestReport)> =
        Method::ALL.iter().map(|&m| (m, raw.adjusted(m))).collect();
    let refs: Vec<(Method, &TestReport)> = all.iter().map(|(m, r)| (*m, r)).collect();
    print_test_table(&index, &result, &raw, &refs, args.adjust);
    let kept: Vec<String> = refs
        .iter()
        .find(|(m, _)| *m == args.adjust)
        .expect("adjust method listed")
        .1
        .decisions
        .iter()
        .enumerate()
        .filter(|(_, &d)| d)
        .map(|(t, _)| format!("{{{}}}", index.label(t)))
        .collect();
    println!();
    println!(
        "selected model ({} at alpha = {}): {}",
        args.adjust,
        args.alpha,
        if kept.is_empty() { "(empty)".to_string() } else { kept.join(", ") }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

fn run_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    println!("config (resolved from {}):", args.config.display());
    let text = serde_json::to_string_pretty(&cfg)
        .map_err(|e| CliError::Config(format!("re-serializing config: {e}")))?;
    println!("{text}");
    println!();
    let output = run_study(&cfg)?;
    println!(
        "study {} finished: {} replicates, {} failures, {} ms",
        output.study,
        output.records.len(),
        output.failures,
        output.total_runtime_ms
    );
    match &output.summary {
        StudySummary::Consistency { per_n_median, ols_slope, .. } => {
            for (n, med) in per_n_median {
                println!("  N = {n}: median relative error {med:.6}");
            }
            if let Some(slope) = ols_slope {
                println!("  log-log OLS slope: {slope:.4}");
            }
        }
        StudySummary::Normality { anderson_darling, mardia, ad_passes } => {
            println!(
                "  Anderson-Darling: {ad_passes}/{} components pass at alpha = {}",
                anderson_darling.len(),
                cfg.alpha
            );
            println!("  Mardia: p(skew) = {:.4}, p(kurtosis) = {:.4}", mardia.p_skew, mardia.p_kurt);
        }
        StudySummary::Fdr { rows } => {
            for (n, method, fdr, power) in rows {
                println!("  N = {n} {method}: FDR {fdr:.4}, power {power:.4}");
            }
        }
        StudySummary::Roc { auc_per_n, .. } => {
            for (n, auc) in auc_per_n {
                println!("  N = {n}: AUC {auc:.4}");
            }
        }
        StudySummary::Gof(table) => {
            println!("  relative l2 error: {:.4} ({} simulations)", table.rel_l2_error, table.n_reps);
        }
        StudySummary::Bounds { rows } => {
            for row in rows {
                println!("  N = {}: thm1(mle) {:.4}, thm2 {:.4}", row.n, row.thm1_mle, row.thm2_total);
            }
        }
    }
    println!("outputs in {}:", cfg.output_dir.display());
    for file in &output.files {
        println!("  {} ({} bytes, sha256 {})", file.path, file.bytes, &file.sha256[..12]);
    }
    println!("  manifest.json");
    Ok(())
}

// ---------------------------------------------------------------------------
// gof
// ---------------------------------------------------------------------------

fn run_gof_cmd(args: &GofArgs) -> Result<(), CliError> {
    print_config(&[
        ("input", args.input.describe()),
        ("objective", args.objective.to_string()),
        ("h", args.h.to_string()),
        ("reps", args.reps.to_string()),
        ("seed", args.seed.to_string()),
    ]);
    let x = args.input.load()?;
    let (index, basis, result) = fit_converged(&x, args.h, args.objective)?;
    describe_network(&x, &basis);
    let table = run_gof(&result, &basis, &index, args.reps, args.seed)?;
    println!(
        "{:<10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}",
        "statistic", "observed", "min", "q1", "median", "q3", "max", "mean"
    );
    for row in &table.rows {
        println!(
            "{:<10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10.2}",
            format!("{{{}}}", row.label),
            row.observed,
            row.min,
            row.q1,
            row.median,
            row.q3,
            row.max,
            row.mean
        );
    }
    println!();
    println!(
        "relative l2 error (observed vs simulated mean): {:.4} over {} simulations",
        table.rel_l2_error, table.n_reps
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn print_bound(name: &str, report: &BoundReport) {
    let flag = if report.vacuous { "  [vacuous: exceeds the trivial bound]" } else { "" };
    println!("{name}: {:.6}{flag}", report.value);
    for (label, value) in &report.components {
        println!("    {label} = {value:.6}");
    }
    if let Some(floor) = report.probability_floor {
        println!("    holds with probability >= {floor:.6}");
    }
}

fn run_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    print_config(&[
        ("n", args.n.to_string()),
        ("k", args.k.to_string()),
        ("h", args.h.to_string()),
        ("theta", format_vec(&args.theta)),
        ("basis", serde_json::to_string(&args.basis).expect("spec serializes")),
        ("epsilon", args.epsilon.to_string()),
        ("ball_samples", args.ball_samples.to_string()),
        ("dg_reps", args.dg_reps.to_string()),
        ("seed", args.seed.to_string()),
    ]);
    let index = make_index(args.k, args.h)?;
    index.validate_theta(&args.theta).map_err(|e| CliError::Config(e.to_string()))?;

    let xi = xi_epsilon(&args.theta, args.epsilon, &index, args.ball_samples, args.seed, false)?;
    let xi_pseudo =
        xi_epsilon(&args.theta, args.epsilon, &index, args.ball_samples, args.seed, true)?;
    if !(xi > 0.0) || !(xi_pseudo > 0.0) {
        return Err(CliError::Estimation(
            "the information matrix is degenerate on the sampled ball \
             (minimum eigenvalue 0); the bounds are undefined. A saturated \
             model (H = K) is always degenerate — reduce H."
                .into(),
        ));
    }
    let expected_edges = match args.basis.expected_density(args.n) {
        Some(d) => d * pair_count(args.n) as f64,
        None => match args.basis {
            BasisSpec::Lsm { density_target, .. } => density_target * pair_count(args.n) as f64,
            _ => unreachable!("only the latent family lacks a closed-form density"),
        },
    };
    let dg_est = dg(&args.basis, args.n, args.dg_reps, args.seed)?;
    println!(
        "inputs: p = {}, E||Y||_1 = {:.2}, D_g = {:.4} (+part {:.4}, mc s.e. {:.4}), \
         xi = {:.6}, xi(pseudo) = {:.6}",
        index.p(),
        expected_edges,
        dg_est.dg,
        dg_est.dg_plus,
        dg_est.std_err,
        xi,
        xi_pseudo
    );
    println!();
    let inputs = TheoryInputs {
        n: args.n,
        p: index.p(),
        k: args.k,
        expected_edges,
        dg_plus: dg_est.dg_plus,
        xi,
        epsilon_star: args.epsilon,
    };
    let pseudo_inputs = TheoryInputs { xi: xi_pseudo, ..inputs.clone() };
    print_bound("estimation error, mle (theorem 1)", &thm1_bound(&inputs, Objective::Mle)?);
    print_bound("estimation error, mple (theorem 1)", &thm1_bound(&pseudo_inputs, Objective::Mple)?);
    print_bound("normal approximation error (theorem 2)", &thm2_bound(&inputs)?);
    print_bound("normal approximation remainder", &remainder_bound(&inputs)?);
    if let BasisSpec::BernoulliFixed(pi) = args.basis {
        let bern = thm2_bernoulli(pi, &inputs)?;
        println!();
        print_bound("bernoulli specialization: normal approximation", &bern.normal_approx);
        print_bound("bernoulli specialization: remainder", &bern.remainder);
        println!(
            "growth condition K <= log(N)/2: {} (limit {:.4})",
            if bern.growth_ok { "satisfied" } else { "violated" },
            bern.growth_limit
        );
    }
    Ok(())
}
