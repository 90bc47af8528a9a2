//! TOML experiment files.
//!
//! Player and arm ids are 1-based in files and converted to 0-based here.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use walkbandit::env::{ArmSpec, WalkModel};
use walkbandit::graph::Topology;
use walkbandit::policy::{DecisionRules, Feasibility, RankRule};
use walkbandit::sim::{Algorithm, ExperimentConfig};
use walkbandit::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        write!(f, ": {}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    graph: RawGraph,
    arms: RawArms,
    walk: RawWalk,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    n_players: usize,
    horizon: usize,
    #[serde(default = "one")]
    runs: usize,
    #[serde(default)]
    seed: u64,
    algo: Option<String>,
    #[serde(default)]
    realized_regret: bool,
    feasibility: Option<String>,
    rank_rule: Option<String>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    topology: Option<String>,
    edge_prob: Option<f64>,
    graph_seed: Option<u64>,
    edges: Option<Vec<[usize; 2]>>,
}

/// `value_k = coef · (offset − k)` for `k = 1..=n_arms`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Formula {
    offset: f64,
    coef: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArms {
    kind: String,
    n_arms: Option<usize>,
    means: Option<Vec<f64>>,
    mean_formula: Option<Formula>,
    stds: Option<Vec<f64>>,
    std_formula: Option<Formula>,
    mean_scale: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWalk {
    variant: String,
    share_prob: Option<f64>,
    set_size: Option<usize>,
    max_holders: Option<usize>,
    overlap_prob: Option<f64>,
    sets: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
}

/// A fully resolved experiment file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFile {
    pub experiment: ExperimentConfig,
    pub output: Option<PathBuf>,
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub algo: Option<String>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub out: Option<PathBuf>,
    pub realized_regret: bool,
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, Error> {
    value.ok_or_else(|| field_err(field, "missing"))
}

fn one_based(field: &str, id: usize, max: usize) -> Result<usize, Error> {
    if id == 0 || id > max {
        return Err(field_err(field, format!("id {id} outside 1..={max}")));
    }
    Ok(id - 1)
}

fn topology(raw: &RawGraph, n_players: usize) -> Result<Topology, Error> {
    let name = match (&raw.topology, &raw.edges) {
        (Some(t), _) => t.as_str(),
        (None, Some(_)) => "explicit",
        (None, None) => return Err(field_err("graph.topology", "missing")),
    };
    match name {
        "ring" => Ok(Topology::Ring),
        "complete" => Ok(Topology::Complete),
        "random" => Ok(Topology::Random {
            edge_prob: require(raw.edge_prob, "graph.edge_prob")?,
            seed: raw.graph_seed.unwrap_or(0),
        }),
        "explicit" => {
            let edges = require(raw.edges.as_ref(), "graph.edges")?;
            let edges = edges
                .iter()
                .enumerate()
                .map(|(e, &[a, b])| {
                    let field = format!("graph.edges[{e}]");
                    Ok((one_based(&field, a, n_players)?, one_based(&field, b, n_players)?))
                })
                .collect::<Result<_, Error>>()?;
            Ok(Topology::Explicit(edges))
        }
        other => {
            Err(field_err("graph.topology", format!("unknown topology {other:?} (ring, complete, random, explicit)")))
        }
    }
}

fn values(
    list: &Option<Vec<f64>>,
    formula: Option<Formula>,
    n_arms: Option<usize>,
    field: &str,
) -> Result<Option<Vec<f64>>, Error> {
    match (list, formula) {
        (Some(_), Some(_)) => Err(field_err(field, format!("give either {field}s or {field}_formula, not both"))),
        (Some(v), None) => Ok(Some(v.clone())),
        (None, Some(f)) => {
            let n = require(n_arms, "arms.n_arms")?;
            Ok(Some((1..=n).map(|k| f.coef * (f.offset - k as f64)).collect()))
        }
        (None, None) => Ok(None),
    }
}

fn arms(raw: &RawArms) -> Result<Vec<ArmSpec>, Error> {
    let scale = raw.mean_scale.unwrap_or(1.0);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(field_err("arms.mean_scale", format!("{scale} must be positive")));
    }
    let means = require(values(&raw.means, raw.mean_formula, raw.n_arms, "arms.mean")?, "arms.means")?;
    if let Some(n) = raw.n_arms {
        if n != means.len() {
            return Err(field_err("arms.n_arms", format!("{n} arms declared but {} means given", means.len())));
        }
    }
    let specs: Vec<ArmSpec> = match raw.kind.as_str() {
        "bernoulli" => {
            if raw.stds.is_some() || raw.std_formula.is_some() {
                return Err(field_err("arms.stds", "Bernoulli arms take no standard deviations"));
            }
            means.iter().map(|&m| ArmSpec::bernoulli(m * scale)).collect()
        }
        "gaussian" => {
            let stds = require(values(&raw.stds, raw.std_formula, Some(means.len()), "arms.std")?, "arms.stds")?;
            if stds.len() != means.len() {
                return Err(field_err("arms.stds", format!("{} stds for {} means", stds.len(), means.len())));
            }
            means.iter().zip(&stds).map(|(&m, &s)| ArmSpec::gaussian(m * scale, s * scale)).collect()
        }
        other => return Err(field_err("arms.kind", format!("unknown arm kind {other:?} (bernoulli, gaussian)"))),
    };
    for (k, s) in specs.iter().enumerate() {
        s.validate(k)?;
    }
    Ok(specs)
}

fn walk(raw: &RawWalk, n_players: usize, n_arms: usize) -> Result<WalkModel, Error> {
    match raw.variant.as_str() {
        "static" => {
            let sets = require(raw.sets.as_ref(), "walk.sets")?;
            if sets.len() != n_players {
                return Err(field_err("walk.sets", format!("{} sets for {n_players} players", sets.len())));
            }
            let sets = sets
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.iter().map(|&k| one_based(&format!("walk.sets[{i}]"), k, n_arms)).collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, Error>>()?;
            Ok(WalkModel::Static { sets })
        }
        "clique-share" => Ok(WalkModel::CliqueShare {
            share_prob: require(raw.share_prob, "walk.share_prob")?,
            set_size: require(raw.set_size, "walk.set_size")?,
            max_holders: raw.max_holders,
        }),
        "downlink" => Ok(WalkModel::DownlinkUniform { overlap_prob: raw.overlap_prob.unwrap_or(0.3) }),
        other => Err(field_err("walk.variant", format!("unknown walk {other:?} (static, clique-share, downlink)"))),
    }
}

fn rules(raw: &RawExperiment) -> Result<DecisionRules, Error> {
    let feasibility = match raw.feasibility.as_deref() {
        None | Some("augmenting") => Feasibility::Augmenting,
        Some("holder-count") => Feasibility::HolderCount,
        Some(other) => {
            return Err(field_err(
                "experiment.feasibility",
                format!("unknown test {other:?} (augmenting, holder-count)"),
            ))
        }
    };
    let rank = match raw.rank_rule.as_deref() {
        None | Some("canonical") => RankRule::Canonical,
        Some("player-order") => RankRule::PlayerOrder,
        Some(other) => {
            return Err(field_err("experiment.rank_rule", format!("unknown rule {other:?} (canonical, player-order)")))
        }
    };
    Ok(DecisionRules { feasibility, rank })
}

fn resolve(raw: RawConfig, overrides: &Overrides) -> Result<ExperimentFile, Error> {
    let e = &raw.experiment;
    let arms = arms(&raw.arms)?;
    let algo: Algorithm = match &overrides.algo {
        Some(a) => a.parse().map_err(|e| match e {
            Error::Config { message, .. } => field_err("--algo", message),
            other => other,
        })?,
        None => e.algo.as_deref().unwrap_or("ucb").parse()?,
    };
    let experiment = ExperimentConfig {
        n_players: e.n_players,
        horizon: overrides.horizon.unwrap_or(e.horizon),
        topology: topology(&raw.graph, e.n_players)?,
        walk: walk(&raw.walk, e.n_players, arms.len())?,
        arms,
        algo,
        n_runs: overrides.runs.unwrap_or(e.runs),
        base_seed: overrides.seed.unwrap_or(e.seed),
        realized_regret: overrides.realized_regret || e.realized_regret,
        rules: rules(e)?,
    };
    experiment.validate()?;
    Ok(ExperimentFile { experiment, output: overrides.out.clone().or(raw.output.path) })
}

/// 1-based line of the `key` assignment inside `[section]`.
fn locate(source: &str, field: &str) -> Option<usize> {
    let (section, rest) = field.split_once('.')?;
    let key = rest.split(['[', '.']).next()?;
    let header = format!("[{section}]");
    let mut inside = false;
    let mut header_line = None;
    for (n, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('[') && !line.starts_with("[[") {
            inside = line.split('#').next().map(str::trim) == Some(header.as_str());
            if inside {
                header_line = Some(n + 1);
            }
            continue;
        }
        if inside && line.split('=').next().map(str::trim) == Some(key) && line.contains('=') {
            return Some(n + 1);
        }
    }
    header_line
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Parses and validates experiment file text.
pub fn parse_config(source: &str, path: &Path, overrides: &Overrides) -> Result<ExperimentFile, ConfigError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: e.span().map(|s| line_of_offset(source, s.start)),
        field: "toml".to_string(),
        message: e.message().trim().to_string(),
    })?;
    resolve(raw, overrides).map_err(|e| {
        let (field, message) = match e {
            Error::Config { field, message } => (field, message),
            other => ("experiment".to_string(), other.to_string()),
        };
        ConfigError { path: path.to_path_buf(), line: locate(source, &field), field, message }
    })
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentFile, ConfigError> {
    let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: None,
        field: "file".to_string(),
        message: e.to_string(),
    })?;
    parse_config(&source, path, overrides)
}
