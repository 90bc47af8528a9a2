//! Round loop, per-round metrics and multi-run aggregation.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::env::{distinct_reward_value, genie_assignment, ArmSpec, RoundOutcome, WalkModel, World};
use crate::error::{Error, Result};
use crate::graph::{build_topology, metropolis_weights, ConsensusMatrix, Topology};
use crate::policy::{decide, greedy_select, select_action, DecisionRules, IndexKind, PlayerState};

/// Environment variable capping the number of runs executed in parallel.
pub const THREADS_ENV: &str = "MPMAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Consensus reward sharing with matching and ranking.
    Ucb,
    /// Matching and ranking on local estimates only.
    UcbNr,
    /// Every player pulls its best local index; no coordination.
    Greedy,
    /// Optimal assignment from the true means.
    Genie,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Ucb, Algorithm::UcbNr, Algorithm::Greedy, Algorithm::Genie];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ucb => "ucb",
            Algorithm::UcbNr => "ucb-nr",
            Algorithm::Greedy => "greedy",
            Algorithm::Genie => "genie",
        }
    }

    /// Statistic the variant decides on, which is also what its MSE measures.
    pub fn estimate_kind(self) -> IndexKind {
        match self {
            Algorithm::Ucb => IndexKind::Consensus,
            _ => IndexKind::Local,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            Error::config("experiment.algo", format!("unknown algorithm {s:?} (ucb, ucb-nr, greedy, genie)"))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_players: usize,
    pub horizon: usize,
    pub topology: Topology,
    pub arms: Vec<ArmSpec>,
    pub walk: WalkModel,
    pub algo: Algorithm,
    pub n_runs: usize,
    pub base_seed: u64,
    /// Use realized rewards instead of true means in the regret.
    pub realized_regret: bool,
    pub rules: DecisionRules,
}

impl ExperimentConfig {
    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Checks everything that can be checked before round 1, including a
    /// trial world built from the base seed.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("experiment.horizon", "must be at least 1"));
        }
        if self.n_runs == 0 {
            return Err(Error::config("experiment.runs", "must be at least 1"));
        }
        if self.n_players == 0 {
            return Err(Error::config("experiment.n_players", "must be at least 1"));
        }
        self.build_world(self.base_seed).map(|_| ())
    }

    pub fn build_world(&self, seed: u64) -> Result<World> {
        let graph = build_topology(&self.topology, self.n_players)?;
        World::new(self.arms.clone(), graph, self.walk.clone(), seed)
    }

    /// Seed of run `run_index`.
    pub fn run_seed(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }
}

/// What one round contributed to the metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub actions: Vec<usize>,
    pub outcome: RoundOutcome,
    pub genie_value: f64,
    pub regret_increment: f64,
    pub collisions: usize,
    /// Some player fell back to its local best or wrapped its rank.
    pub flagged: bool,
    pub messages: u64,
}

/// One run's state: the world, every player, and the consensus weights.
#[derive(Debug, Clone)]
pub struct Simulation {
    algo: Algorithm,
    rules: DecisionRules,
    realized_regret: bool,
    world: World,
    weights: ConsensusMatrix,
    means: Vec<f64>,
    players: Vec<PlayerState>,
    index_override: Option<Vec<f64>>,
}

impl Simulation {
    pub fn new(config: &ExperimentConfig, seed: u64) -> Result<Self> {
        let world = config.build_world(seed)?;
        let weights = metropolis_weights(world.graph());
        let means = world.true_means().to_vec();
        let players = (0..world.n_players()).map(|i| PlayerState::new(i, world.arms().len())).collect();
        Ok(Self {
            algo: config.algo,
            rules: config.rules,
            realized_regret: config.realized_regret,
            world,
            weights,
            means,
            players,
            index_override: None,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn players(&self) -> &[PlayerState] {
        &self.players
    }

    pub fn weights(&self) -> &ConsensusMatrix {
        &self.weights
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algo
    }

    /// Test hook: every coordinating player decides on `indices` instead of
    /// its own UCB indices. Learning updates still run.
    pub fn set_index_override(&mut self, indices: Option<Vec<f64>>) {
        self.index_override = indices;
    }

    /// MSE of the variant's own estimates.
    pub fn mse(&self) -> f64 {
        mse_snapshot(&self.players, &self.means, self.algo.estimate_kind())
    }

    /// Messages exchanged in one round: one arm-set message per directed
    /// edge for the coordinating variants, plus one consensus value per arm
    /// per directed edge when rewards are shared.
    pub fn messages_per_round(&self) -> u64 {
        let graph = self.world.graph();
        let directed: u64 = (0..graph.n_players()).map(|i| graph.degree(i) as u64).sum();
        let k = self.means.len() as u64;
        match self.algo {
            Algorithm::Ucb => directed + directed * k,
            Algorithm::UcbNr => directed,
            Algorithm::Greedy | Algorithm::Genie => 0,
        }
    }

    /// Plays the current round and moves the world to the next one.
    pub fn run_round(&mut self) -> Result<RoundReport> {
        let t = self.world.round();
        let n = self.players.len();
        let sets = self.world.arm_sets().clone();
        let genie = genie_assignment(&sets, &self.means);

        let mut flagged = false;
        let actions: Vec<usize> = match self.algo {
            Algorithm::Genie => genie.actions.clone(),
            Algorithm::Greedy => self.players.iter().map(|p| greedy_select(p, sets.set(p.id()), t)).collect(),
            Algorithm::Ucb | Algorithm::UcbNr => {
                let kind = self.algo.estimate_kind();
                self.players
                    .iter()
                    .map(|p| {
                        let d = match &self.index_override {
                            Some(idx) => decide(idx, &sets, p.id(), self.rules),
                            None => select_action(p, &sets, t, n, kind, self.rules),
                        };
                        flagged |= d.flagged();
                        d.arm
                    })
                    .collect()
            }
        };

        let outcome = self.world.resolve_round(&actions)?;
        for (p, pull) in self.players.iter_mut().zip(&outcome.pulls) {
            p.update_after_round(pull.arm, pull.reward, pull.collided);
        }
        if self.algo == Algorithm::Ucb {
            self.mix_consensus()?;
        }

        let regret_increment = if self.realized_regret {
            let genie_arms: Vec<usize> =
                genie.actions.iter().zip(&genie.matched).filter(|(_, &m)| m).map(|(&a, _)| a).collect();
            distinct_reward_value(&genie_arms, &outcome.draws) - distinct_reward_value(&actions, &outcome.draws)
        } else {
            // the genie value is an exact maximum; only rounding can push this below 0
            (genie.value - distinct_reward_value(&actions, &self.means)).max(0.0)
        };
        let collisions = outcome.collisions();
        let messages = self.messages_per_round();
        self.world.advance_walk()?;
        Ok(RoundReport {
            round: t,
            actions,
            outcome,
            genie_value: genie.value,
            regret_increment,
            collisions,
            flagged,
            messages,
        })
    }

    fn mix_consensus(&mut self) -> Result<()> {
        let snapshot: Vec<Vec<f64>> = self.players.iter().map(|p| p.consensus_estimates().to_vec()).collect();
        let graph = self.world.graph();
        for (i, p) in self.players.iter_mut().enumerate() {
            let estimates: Vec<(usize, &[f64])> =
                graph.neighborhood(i).into_iter().map(|j| (j, snapshot[j].as_slice())).collect();
            p.consensus_step(&estimates, self.weights.row(i))?;
        }
        Ok(())
    }
}

/// `(1/(N·K)) Σ_{i,k} (μ_k − e_{i,k})²` over the chosen estimate.
pub fn mse_snapshot(players: &[PlayerState], true_means: &[f64], kind: IndexKind) -> f64 {
    if players.is_empty() || true_means.is_empty() {
        return 0.0;
    }
    let total: f64 = players
        .iter()
        .map(|p| {
            let est = match kind {
                IndexKind::Consensus => p.consensus_estimates(),
                IndexKind::Local => p.empirical_means(),
            };
            true_means.iter().zip(est).map(|(m, e)| (m - e).powi(2)).sum::<f64>()
        })
        .sum();
    total / (players.len() * true_means.len()) as f64
}

/// Per-round metrics of one run, all cumulative except `mse`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsTrace {
    pub cum_regret: Vec<f64>,
    pub mse: Vec<f64>,
    pub cum_collisions: Vec<u64>,
    pub fallbacks: Vec<u64>,
    pub messages: Vec<u64>,
}

impl MetricsTrace {
    pub fn len(&self) -> usize {
        self.cum_regret.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum_regret.is_empty()
    }

    pub fn push(&mut self, report: &RoundReport, mse: f64) {
        let last = |v: &[u64]| v.last().copied().unwrap_or(0);
        let regret = self.cum_regret.last().copied().unwrap_or(0.0) + report.regret_increment;
        self.cum_regret.push(regret);
        self.mse.push(mse);
        self.cum_collisions.push(last(&self.cum_collisions) + report.collisions as u64);
        self.fallbacks.push(last(&self.fallbacks) + u64::from(report.flagged));
        self.messages.push(last(&self.messages) + report.messages);
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }
}

/// Full-horizon trace for one seed.
pub fn run_experiment(config: &ExperimentConfig, seed: u64) -> Result<MetricsTrace> {
    if config.horizon == 0 {
        return Err(Error::config("experiment.horizon", "must be at least 1"));
    }
    let mut sim = Simulation::new(config, seed)?;
    let mut trace = MetricsTrace::default();
    for _ in 0..config.horizon {
        let report = sim.run_round()?;
        trace.push(&report, sim.mse());
    }
    Ok(trace)
}

/// Worker count for [`run_many`]: `MPMAB_THREADS` if set, else rayon's default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got {v:?}"))),
        },
    }
}

/// Runs `n_runs` seeds in parallel. Results are in run order and do not
/// depend on scheduling.
pub fn run_many(config: &ExperimentConfig) -> Result<Vec<MetricsTrace>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::config(THREADS_ENV, e.to_string()))?;
    pool.install(|| (0..config.n_runs).into_par_iter().map(|r| run_experiment(config, config.run_seed(r))).collect())
}

/// Per-round mean and population standard deviation of one metric.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateTrace {
    pub cum_regret: Summary,
    pub mse: Summary,
    pub cum_collisions: Summary,
    pub fallbacks: Summary,
    pub messages: Summary,
}

fn summarize<F: Fn(&MetricsTrace, usize) -> f64>(traces: &[MetricsTrace], len: usize, get: F) -> Summary {
    let n = traces.len() as f64;
    let mut out = Summary { mean: Vec::with_capacity(len), std: Vec::with_capacity(len) };
    for t in 0..len {
        let mean = traces.iter().map(|tr| get(tr, t)).sum::<f64>() / n;
        let var = traces.iter().map(|tr| (get(tr, t) - mean).powi(2)).sum::<f64>() / n;
        out.mean.push(mean);
        out.std.push(var.sqrt());
    }
    out
}

pub fn aggregate_runs(traces: &[MetricsTrace]) -> Result<AggregateTrace> {
    let Some(first) = traces.first() else {
        return Ok(AggregateTrace::default());
    };
    let len = first.len();
    if let Some(bad) = traces.iter().find(|t| t.len() != len) {
        return Err(Error::TraceLength { expected: len, found: bad.len() });
    }
    Ok(AggregateTrace {
        cum_regret: summarize(traces, len, |tr, t| tr.cum_regret[t]),
        mse: summarize(traces, len, |tr, t| tr.mse[t]),
        cum_collisions: summarize(traces, len, |tr, t| tr.cum_collisions[t] as f64),
        fallbacks: summarize(traces, len, |tr, t| tr.fallbacks[t] as f64),
        messages: summarize(traces, len, |tr, t| tr.messages[t] as f64),
    })
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 ≤ |x| < 1e9`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..DIGITS).contains(&exp) {
        trim(format!("{:.*}", (DIGITS - 1 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa.to_string()), sign, exp.abs())
    }
}

pub const CSV_HEADER: &str = "run_id,t,cum_regret,mse,cum_collisions,fallbacks,messages,algo";

/// Writes one row per run per round, then the mean rows with `run_id = -1`.
pub fn write_csv<W: Write + ?Sized>(out: &mut W, algo: Algorithm, traces: &[MetricsTrace]) -> Result<(), io::Error> {
    let agg = aggregate_runs(traces).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    writeln!(out, "{CSV_HEADER}")?;
    for (r, tr) in traces.iter().enumerate() {
        for t in 0..tr.len() {
            writeln!(
                out,
                "{r},{},{},{},{},{},{},{algo}",
                t + 1,
                format_sig(tr.cum_regret[t]),
                format_sig(tr.mse[t]),
                tr.cum_collisions[t],
                tr.fallbacks[t],
                tr.messages[t],
            )?;
        }
    }
    for t in 0..agg.cum_regret.mean.len() {
        writeln!(
            out,
            "-1,{},{},{},{},{},{},{algo}",
            t + 1,
            format_sig(agg.cum_regret.mean[t]),
            format_sig(agg.mse.mean[t]),
            format_sig(agg.cum_collisions.mean[t]),
            format_sig(agg.fallbacks.mean[t]),
            format_sig(agg.messages.mean[t]),
        )?;
    }
    Ok(())
}
