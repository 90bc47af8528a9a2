//! Communication graphs between players and the Metropolis consensus matrix.
//!
//! Player ids are 0-based throughout the library. Every neighborhood is
//! self-inclusive: `neighborhood(i)` always contains `i`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Upper bound on Erdős–Rényi resampling attempts for random topologies.
pub const MAX_RANDOM_GRAPH_ATTEMPTS: usize = 1000;

/// How to wire the players together.
#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Ring,
    Complete,
    /// Erdős–Rényi `G(n, p)` redrawn until connected.
    Random {
        edge_prob: f64,
        seed: u64,
    },
    /// Undirected edges given as 0-based player pairs.
    Explicit(Vec<(usize, usize)>),
}

/// A connected, undirected communication graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    n_players: usize,
    /// Sorted graph neighbors, excluding the player itself.
    adjacency: Vec<Vec<usize>>,
}

impl CommGraph {
    /// Builds a graph from an edge list, rejecting self-loops, out-of-range ids
    /// and disconnected results.
    pub fn from_edges(n_players: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_players == 0 {
            return Err(Error::config("graph.n_players", "at least one player is required"));
        }
        let mut adjacency = vec![Vec::new(); n_players];
        for &(a, b) in edges {
            if a >= n_players || b >= n_players {
                return Err(Error::config(
                    "graph.edges",
                    format!("edge ({}, {}) references a player outside 1..={n_players}", a + 1, b + 1),
                ));
            }
            if a == b {
                return Err(Error::config("graph.edges", format!("self-loop on player {}", a + 1)));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let graph = Self { n_players, adjacency };
        if !graph.is_connected() {
            return Err(Error::config("graph.edges", "communication graph is not connected"));
        }
        Ok(graph)
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    /// Graph neighbors of `i`, not including `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Self-inclusive neighborhood `{j : (i,j) ∈ E} ∪ {i}`, sorted.
    pub fn neighborhood(&self, i: usize) -> Vec<usize> {
        let mut out = self.adjacency[i].clone();
        let pos = out.partition_point(|&j| j < i);
        out.insert(pos, i);
        out
    }

    /// Size of the self-inclusive neighborhood.
    pub fn neighborhood_size(&self, i: usize) -> usize {
        self.adjacency[i].len() + 1
    }

    /// True when `j` lies in the self-inclusive neighborhood of `i`.
    pub fn in_neighborhood(&self, i: usize, j: usize) -> bool {
        i == j || self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Each undirected edge once, as `(low, high)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        bfs_reachable(&self.adjacency, 0) == self.n_players
    }
}

fn bfs_reachable(adjacency: &[Vec<usize>], start: usize) -> usize {
    if adjacency.is_empty() {
        return 0;
    }
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count
}

/// Instantiates a topology over `n_players` players.
pub fn build_topology(spec: &Topology, n_players: usize) -> Result<CommGraph> {
    if n_players == 0 {
        return Err(Error::config("experiment.n_players", "at least one player is required"));
    }
    match spec {
        Topology::Ring => {
            let edges: Vec<_> = match n_players {
                1 => Vec::new(),
                2 => vec![(0, 1)],
                n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            };
            CommGraph::from_edges(n_players, &edges)
        }
        Topology::Complete => {
            let edges: Vec<_> = (0..n_players).flat_map(|i| (i + 1..n_players).map(move |j| (i, j))).collect();
            CommGraph::from_edges(n_players, &edges)
        }
        Topology::Random { edge_prob, seed } => {
            if !(0.0..=1.0).contains(edge_prob) {
                return Err(Error::config("graph.edge_prob", format!("{edge_prob} is not a probability")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..MAX_RANDOM_GRAPH_ATTEMPTS {
                let mut edges = Vec::new();
                for i in 0..n_players {
                    for j in i + 1..n_players {
                        if rng.random_bool(*edge_prob) {
                            edges.push((i, j));
                        }
                    }
                }
                if let Ok(graph) = CommGraph::from_edges(n_players, &edges) {
                    return Ok(graph);
                }
            }
            Err(Error::config(
                "graph.edge_prob",
                format!("no connected graph after {MAX_RANDOM_GRAPH_ATTEMPTS} draws with p = {edge_prob}"),
            ))
        }
        Topology::Explicit(edges) => CommGraph::from_edges(n_players, edges),
    }
}

/// Doubly stochastic, symmetric mixing matrix supported on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMatrix {
    weights: Vec<Vec<f64>>,
    beta: f64,
}

impl ConsensusMatrix {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Smallest strictly positive entry.
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Metropolis weights: `1 / max(|N_i|, |N_j|)` on edges (with self-inclusive
/// neighborhood sizes) and the complement on the diagonal.
pub fn metropolis_weights(graph: &CommGraph) -> ConsensusMatrix {
    let n = graph.n_players();
    let mut weights = vec![vec![0.0; n]; n];
    for (i, row) in weights.iter_mut().enumerate() {
        for &j in graph.neighbors(i) {
            let denom = graph.neighborhood_size(i).max(graph.neighborhood_size(j));
            row[j] = 1.0 / denom as f64;
        }
        let off: f64 = graph.neighbors(i).iter().map(|&j| row[j]).sum();
        row[i] = 1.0 - off;
    }
    let beta = weights.iter().flatten().copied().filter(|&w| w > 0.0).fold(f64::INFINITY, f64::min);
    ConsensusMatrix { weights, beta }
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn uniform_deviation(m: &[Vec<f64>]) -> f64 {
    let target = 1.0 / m.len() as f64;
    m.iter().flatten().map(|&x| (x - target).abs()).fold(0.0, f64::max)
}

/// `max_{i,j} |[P^t]_{ij} − 1/N|` for a single `t ≥ 1`.
pub fn consensus_power_check(p: &ConsensusMatrix, t: usize) -> f64 {
    assert!(t >= 1, "matrix power requires t >= 1");
    consensus_power_profile(p, t)[t - 1]
}

/// Deviations for every power `1..=t_max`, computed by repeated multiplication.
pub fn consensus_power_profile(p: &ConsensusMatrix, t_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(t_max);
    let mut power = p.weights.clone();
    for t in 1..=t_max {
        if t > 1 {
            power = mat_mul(&power, &p.weights);
        }
        out.push(uniform_deviation(&power));
    }
    out
}

/// Geometric bound `2 (1 + β^{−N}) (1 − β^N)^{t/N − 1}` on the deviation of
/// `P^t` from the uniform matrix.
pub fn consensus_deviation_bound(beta: f64, n: usize, t: usize) -> f64 {
    let n_f = n as f64;
    let beta_n = beta.powi(n as i32);
    2.0 * (1.0 + 1.0 / beta_n) * (1.0 - beta_n).powf(t as f64 / n_f - 1.0)
}
