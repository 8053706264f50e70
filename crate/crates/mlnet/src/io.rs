//! Dataset ingestion and network serialization.
//!
//! Layer files come in two formats: dense whitespace-separated 0/1
//! matrices (N rows by N columns, diagonal ignored) and 1-based edge lists
//! (one `i j` pair per line). Directed input is symmetrized by rule: `And`
//! keeps a tie only when both directions report it (the convention for
//! mutually acknowledged cooperation), `Or` keeps either direction, and
//! `AsIs` trusts the upper triangle of a matrix (for edge lists any listed
//! pair counts).
//!
//! Saved networks use a small versioned text format — a header naming the
//! format version, type, and dimensions, then one edge per line — so that
//! loading a file written by an incompatible version fails loudly instead
//! of producing a silently wrong network.

use std::fs;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{pair_count, pair_index, BasisNetwork, ModelError, MultilayerNetwork};

/// Errors from reading or writing network files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("layer dimension mismatch: {msg}")]
    Dimension { msg: String },
    #[error("{path}: unsupported network file header {found:?} (expected {expected:?})")]
    Version { path: PathBuf, found: String, expected: String },
    #[error("{path}: truncated file: {msg}")]
    Truncated { path: PathBuf, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How directed or noisy input ties are reduced to undirected edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeRule {
    /// Keep a tie only when both directions report it (mutual ties).
    And,
    /// Keep a tie when either direction reports it.
    Or,
    /// Trust the input: upper triangle for matrices, any listed pair for
    /// edge lists.
    AsIs,
}

impl fmt::Display for SymmetrizeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetrizeRule::And => "and",
            SymmetrizeRule::Or => "or",
            SymmetrizeRule::AsIs => "asis",
        })
    }
}

impl FromStr for SymmetrizeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(SymmetrizeRule::And),
            "or" => Ok(SymmetrizeRule::Or),
            "asis" => Ok(SymmetrizeRule::AsIs),
            other => Err(format!("unknown symmetrization rule {other:?} (and|or|asis)")),
        }
    }
}

/// On-disk layer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerFormat {
    /// Whitespace-separated N x N matrix of 0/1 entries.
    DenseMatrix,
    /// One `i j` pair per line, 1-based node indices.
    EdgeList,
}

impl fmt::Display for LayerFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerFormat::DenseMatrix => "matrix",
            LayerFormat::EdgeList => "edgelist",
        })
    }
}

impl FromStr for LayerFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "matrix" => Ok(LayerFormat::DenseMatrix),
            "edgelist" => Ok(LayerFormat::EdgeList),
            other => Err(format!("unknown layer format {other:?} (matrix|edgelist)")),
        }
    }
}

/// An ordered set of layer files plus the rules to interpret them.
#[derive(Debug, Clone)]
pub struct LayerFileSet {
    /// One file per layer, in layer order.
    pub paths: Vec<PathBuf>,
    pub rule: SymmetrizeRule,
    pub format: LayerFormat,
}

/// A layer parsed into directed tie indicators (and, for edge lists, the
/// largest node index seen).
struct RawLayer {
    n_nodes: usize,
    /// Directed ties as (from, to), 0-based.
    ties: Vec<(usize, usize)>,
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

fn parse_matrix(path: &Path, text: &str) -> Result<RawLayer, IoError> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "empty matrix".into(),
        });
    }
    let n = rows.len();
    let mut ties = Vec::new();
    for (row, (line, toks)) in rows.iter().enumerate() {
        if toks.len() != n {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: *line,
                msg: format!("expected {n} columns (matrix has {n} rows), found {}", toks.len()),
            });
        }
        for (col, tok) in toks.iter().enumerate() {
            let present = match *tok {
                "0" => false,
                "1" => true,
                other => {
                    return Err(IoError::Parse {
                        path: path.to_path_buf(),
                        line: *line,
                        msg: format!("matrix entries must be 0 or 1, found {other:?}"),
                    })
                }
            };
            if present && row != col {
                ties.push((row, col));
            }
        }
    }
    Ok(RawLayer { n_nodes: n, ties })
}

fn parse_edge_list(path: &Path, text: &str) -> Result<RawLayer, IoError> {
    let mut ties = Vec::new();
    let mut max_node = 0usize;
    for (i, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected \"i j\", found {} tokens", toks.len()),
            });
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&toks) {
            *slot = tok.parse::<usize>().map_err(|_| IoError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("node index must be a positive integer, found {tok:?}"),
            })?;
            if *slot == 0 {
                return Err(IoError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: "node indices are 1-based".into(),
                });
            }
        }
        max_node = max_node.max(pair[0]).max(pair[1]);
        if pair[0] != pair[1] {
            ties.push((pair[0] - 1, pair[1] - 1));
        }
    }
    Ok(RawLayer { n_nodes: max_node, ties })
}

fn symmetrize(layer: &RawLayer, n: usize, rule: SymmetrizeRule, format: LayerFormat) -> Vec<bool> {
    let mut forward = vec![false; n * n];
    for &(i, j) in &layer.ties {
        forward[i * n + j] = true;
    }
    let mut edges = vec![false; pair_count(n)];
    for i in 0..n {
        for j in i + 1..n {
            let (up, down) = (forward[i * n + j], forward[j * n + i]);
            edges[pair_index(n, i, j)] = match (rule, format) {
                (SymmetrizeRule::And, _) => up && down,
                (SymmetrizeRule::Or, _) => up || down,
                (SymmetrizeRule::AsIs, LayerFormat::DenseMatrix) => up,
                (SymmetrizeRule::AsIs, LayerFormat::EdgeList) => up || down,
            };
        }
    }
    edges
}

/// Loads the layer files into a multilayer network, layers stacked in file
/// order. For edge lists the node count is inferred as the largest index
/// seen across all layers.
pub fn load_multilayer(files: &LayerFileSet) -> Result<MultilayerNetwork, IoError> {
    if files.paths.is_empty() {
        return Err(IoError::Dimension { msg: "no layer files given".into() });
    }
    let mut layers = Vec::with_capacity(files.paths.len());
    for path in &files.paths {
        let text = read_to_string(path)?;
        let raw = match files.format {
            LayerFormat::DenseMatrix => parse_matrix(path, &text)?,
            LayerFormat::EdgeList => parse_edge_list(path, &text)?,
        };
        layers.push((path.clone(), raw));
    }
    let n = match files.format {
        LayerFormat::DenseMatrix => {
            let n = layers[0].1.n_nodes;
            for (path, raw) in &layers {
                if raw.n_nodes != n {
                    return Err(IoError::Dimension {
                        msg: format!(
                            "{} has {} nodes but {} has {n}",
                            path.display(),
                            raw.n_nodes,
                            layers[0].0.display()
                        ),
                    });
                }
            }
            n
        }
        LayerFormat::EdgeList => layers.iter().map(|(_, r)| r.n_nodes).max().unwrap_or(0),
    };
    if n < 2 {
        return Err(IoError::Dimension { msg: format!("need at least 2 nodes, got {n}") });
    }
    let mut dyads = vec![0u16; pair_count(n)];
    for (k, (_, raw)) in layers.iter().enumerate() {
        let edges = symmetrize(raw, n, files.rule, files.format);
        for (d, e) in dyads.iter_mut().zip(edges) {
            if e {
                *d |= 1 << k;
            }
        }
    }
    Ok(MultilayerNetwork::from_dyads(n, layers.len(), dyads)?)
}

const FILE_HEADER: &str = "mlnet-network v1";

/// Saves a multilayer network: versioned header, then one `i j mask` line
/// (1-based nodes, decimal outcome mask) per activated dyad.
pub fn save_multilayer_network(path: &Path, x: &MultilayerNetwork) -> Result<(), IoError> {
    let n = x.n_nodes();
    let mut body = String::new();
    let mut edges = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let mask = x.dyads()[pair_index(n, i, j)];
            if mask != 0 {
                body.push_str(&format!("{} {} {}\n", i + 1, j + 1, mask));
                edges += 1;
            }
        }
    }
    let contents = format!(
        "{FILE_HEADER}\ntype multilayer\nnodes {n}\nlayers {}\nedges {edges}\n{body}",
        x.n_layers()
    );
    fs::write(path, contents).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

/// Saves a basis network: versioned header, then one `i j` line per edge.
pub fn save_basis_network(path: &Path, y: &BasisNetwork) -> Result<(), IoError> {
    let n = y.n_nodes();
    let mut body = String::new();
    let mut edges = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if y.edges()[pair_index(n, i, j)] {
                body.push_str(&format!("{} {}\n", i + 1, j + 1));
                edges += 1;
            }
        }
    }
    let contents = format!("{FILE_HEADER}\ntype basis\nnodes {n}\nedges {edges}\n{body}");
    fs::write(path, contents).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

struct HeaderReader<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> HeaderReader<'a> {
    fn field(&mut self, key: &str) -> Result<&'a str, IoError> {
        let (i, line) = self.lines.next().ok_or_else(|| IoError::Truncated {
            path: self.path.to_path_buf(),
            msg: format!("missing {key:?} header line"),
        })?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| IoError::Parse {
                path: self.path.to_path_buf(),
                line: i + 1,
                msg: format!("expected {key:?} header line, found {line:?}"),
            })
    }

    fn numeric_field(&mut self, key: &str) -> Result<usize, IoError> {
        let value = self.field(key)?;
        value.parse().map_err(|_| IoError::Parse {
            path: self.path.to_path_buf(),
            line: 0,
            msg: format!("header field {key:?} must be an integer, found {value:?}"),
        })
    }
}

fn open_network_file<'a>(
    path: &'a Path,
    text: &'a str,
    expected_type: &str,
) -> Result<HeaderReader<'a>, IoError> {
    let mut lines = text.lines().enumerate();
    let found = lines.next().map(|(_, l)| l).unwrap_or_default();
    if found != FILE_HEADER {
        return Err(IoError::Version {
            path: path.to_path_buf(),
            found: found.to_string(),
            expected: FILE_HEADER.to_string(),
        });
    }
    let mut reader = HeaderReader { path, lines };
    let kind = reader.field("type")?;
    if kind != expected_type {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            line: 2,
            msg: format!("expected a {expected_type} network file, found type {kind:?}"),
        });
    }
    Ok(reader)
}

fn parse_body_pair(
    path: &Path,
    line_no: usize,
    tokens: &[&str],
    n: usize,
) -> Result<(usize, usize), IoError> {
    let bad = |msg: String| IoError::Parse { path: path.to_path_buf(), line: line_no, msg };
    let i: usize = tokens[0].parse().map_err(|_| bad(format!("bad node index {:?}", tokens[0])))?;
    let j: usize = tokens[1].parse().map_err(|_| bad(format!("bad node index {:?}", tokens[1])))?;
    if i == 0 || j == 0 || i > n || j > n || i >= j {
        return Err(bad(format!("edge {i} {j} out of range for {n} nodes (need 1 <= i < j <= N)")));
    }
    Ok((i - 1, j - 1))
}

/// Loads a multilayer network saved by [`save_multilayer_network`].
pub fn load_multilayer_network(path: &Path) -> Result<MultilayerNetwork, IoError> {
    let text = read_to_string(path)?;
    let mut reader = open_network_file(path, &text, "multilayer")?;
    let n = reader.numeric_field("nodes")?;
    let k = reader.numeric_field("layers")?;
    let edges = reader.numeric_field("edges")?;
    let mut dyads = vec![0u16; pair_count(n)];
    let mut seen = 0usize;
    for (idx, line) in reader.lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 3 {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected \"i j mask\", found {} tokens", tokens.len()),
            });
        }
        let (i, j) = parse_body_pair(path, idx + 1, &tokens, n)?;
        let mask: u16 = tokens[2].parse().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("bad outcome mask {:?}", tokens[2]),
        })?;
        if mask == 0 || (k < 16 && mask >= 1 << k) {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("outcome mask {mask} out of range for {k} layers"),
            });
        }
        dyads[pair_index(n, i, j)] = mask;
        seen += 1;
    }
    if seen != edges {
        return Err(IoError::Truncated {
            path: path.to_path_buf(),
            msg: format!("header declares {edges} edges, body has {seen}"),
        });
    }
    Ok(MultilayerNetwork::from_dyads(n, k, dyads)?)
}

/// Loads a basis network saved by [`save_basis_network`].
pub fn load_basis_network(path: &Path) -> Result<BasisNetwork, IoError> {
    let text = read_to_string(path)?;
    let mut reader = open_network_file(path, &text, "basis")?;
    let n = reader.numeric_field("nodes")?;
    let edges = reader.numeric_field("edges")?;
    let mut flags = vec![false; pair_count(n)];
    let mut seen = 0usize;
    for (idx, line) in reader.lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected \"i j\", found {} tokens", tokens.len()),
            });
        }
        let (i, j) = parse_body_pair(path, idx + 1, &tokens, n)?;
        flags[pair_index(n, i, j)] = true;
        seen += 1;
    }
    if seen != edges {
        return Err(IoError::Truncated {
            path: path.to_path_buf(),
            msg: format!("header declares {edges} edges, body has {seen}"),
        });
    }
    Ok(BasisNetwork::from_edges(n, flags)?)
}

/// Outcome-mask allocation for the bundled synthetic fixture: 71 nodes,
/// three layers with 378/175/176 edges and 517 activated dyads (basis
/// density 517/2485 ~ 0.208), mirroring the published cooperation-network
/// marginals. Every nonzero outcome class is populated so that fits with
/// pairwise interactions stay in the interior.
const FIXTURE_NODES: usize = 71;
const FIXTURE_MASK_COUNTS: [(u16, usize); 7] = [
    (0b001, 248),
    (0b010, 53),
    (0b100, 64),
    (0b011, 40),
    (0b101, 30),
    (0b110, 22),
    (0b111, 60),
];

/// Writes a synthetic three-layer fixture (dense-matrix format,
/// AND-symmetric) into `dir` and returns the file set. Deterministic in
/// `seed`.
pub fn write_synthetic_fixture(dir: &Path, seed: u64) -> Result<LayerFileSet, IoError> {
    fs::create_dir_all(dir)
        .map_err(|source| IoError::Io { path: dir.to_path_buf(), source })?;
    let n = FIXTURE_NODES;
    let mut masks = vec![0u16; pair_count(n)];
    let mut order: Vec<usize> = (0..masks.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut cursor = order.into_iter();
    for (mask, count) in FIXTURE_MASK_COUNTS {
        for _ in 0..count {
            masks[cursor.next().expect("fixture allocation exceeds pair count")] = mask;
        }
    }
    let mut paths = Vec::with_capacity(3);
    for layer in 0..3 {
        let mut grid = vec![vec![b'0'; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if masks[pair_index(n, i, j)] >> layer & 1 == 1 {
                    grid[i][j] = b'1';
                    grid[j][i] = b'1';
                }
            }
        }
        let mut text = String::with_capacity(n * (2 * n + 1));
        for row in grid {
            let cells: Vec<String> =
                row.iter().map(|b| (*b as char).to_string()).collect();
            text.push_str(&cells.join(" "));
            text.push('\n');
        }
        let path = dir.join(format!("layer{}.txt", layer + 1));
        fs::write(&path, text)
            .map_err(|source| IoError::Io { path: path.clone(), source })?;
        paths.push(path);
    }
    Ok(LayerFileSet { paths, rule: SymmetrizeRule::And, format: LayerFormat::DenseMatrix })
}
