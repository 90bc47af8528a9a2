//! Ground truth for a run: arm reward distributions, the walking arm sets,
//! collision resolution and the genie-aided optimal assignment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::assignment::max_weight_matching;
use crate::error::{Error, Result};
use crate::graph::CommGraph;

/// Smallest reward a non-colliding pull can return. Keeps `reward == 0`
/// an exact collision signal.
pub const REWARD_FLOOR: f64 = 1e-6;

/// Redraw budget for a random walk step.
pub const MAX_WALK_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardDistribution {
    /// Success pays 1; a failed trial pays [`REWARD_FLOOR`].
    Bernoulli { mean: f64 },
    /// Normal sample clipped into `[REWARD_FLOOR, 1]`.
    ClippedGaussian { mean: f64, std: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSpec {
    pub distribution: RewardDistribution,
}

impl ArmSpec {
    pub fn bernoulli(mean: f64) -> Self {
        Self { distribution: RewardDistribution::Bernoulli { mean } }
    }

    pub fn gaussian(mean: f64, std: f64) -> Self {
        Self { distribution: RewardDistribution::ClippedGaussian { mean, std } }
    }

    /// Nominal mean used for regret and estimation error.
    pub fn mean(&self) -> f64 {
        match self.distribution {
            RewardDistribution::Bernoulli { mean } => mean,
            RewardDistribution::ClippedGaussian { mean, .. } => mean,
        }
    }

    pub fn validate(&self, arm: usize) -> Result<()> {
        let field = format!("arms.means[{arm}]");
        match self.distribution {
            RewardDistribution::Bernoulli { mean } => {
                if !(mean > 0.0 && mean <= 1.0) {
                    return Err(Error::Config { field, message: format!("Bernoulli mean {mean} must lie in (0, 1]") });
                }
            }
            RewardDistribution::ClippedGaussian { mean, std } => {
                if !(mean > 0.0 && mean <= 1.0) {
                    return Err(Error::Config {
                        field,
                        message: format!("Gaussian mean {mean} must lie in (0, 1]; lower mean_scale"),
                    });
                }
                if !(std >= 0.0 && std.is_finite()) {
                    return Err(Error::Config {
                        field: format!("arms.stds[{arm}]"),
                        message: format!("standard deviation {std} must be finite and non-negative"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.distribution {
            RewardDistribution::Bernoulli { mean } => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    REWARD_FLOOR
                }
            }
            RewardDistribution::ClippedGaussian { mean, std } => {
                let x = Normal::new(mean, std).expect("validated std").sample(rng);
                x.clamp(REWARD_FLOOR, 1.0)
            }
        }
    }
}

/// Per-player local walking arm sets for one round. Arm ids are 0-based and
/// each set is stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArmSets {
    n_arms: usize,
    sets: Vec<Vec<usize>>,
}

impl ArmSets {
    pub fn new(n_arms: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut sets = sets;
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&bad) = set.iter().find(|&&k| k >= n_arms) {
                return Err(Error::config(
                    "walk.sets",
                    format!("player {} lists arm {} outside 1..={n_arms}", i + 1, bad + 1),
                ));
            }
        }
        Ok(Self { n_arms, sets })
    }

    fn from_holders(n_players: usize, holders: &[Vec<usize>]) -> Self {
        let mut sets = vec![Vec::new(); n_players];
        for (k, hs) in holders.iter().enumerate() {
            for &h in hs {
                sets[h].push(k);
            }
        }
        // arms were visited in ascending order, so each set is already sorted
        Self { n_arms: holders.len(), sets }
    }

    pub fn n_players(&self) -> usize {
        self.sets.len()
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    pub fn set(&self, player: usize) -> &[usize] {
        &self.sets[player]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn contains(&self, player: usize, arm: usize) -> bool {
        self.sets[player].binary_search(&arm).is_ok()
    }

    /// Players whose set contains `arm`, ascending.
    pub fn holders(&self, arm: usize) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.contains(i, arm)).collect()
    }

    /// Number of joint action tuples `Π_m |S_m|`.
    pub fn tuple_count(&self) -> u128 {
        self.sets.iter().map(|s| s.len() as u128).product()
    }

    /// Size of a largest set of players that can pull pairwise distinct arms.
    pub fn max_distinct_players(&self) -> usize {
        fn try_player(p: usize, sets: &[Vec<usize>], arm_owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
            for &k in &sets[p] {
                if seen[k] {
                    continue;
                }
                seen[k] = true;
                if arm_owner[k].is_none_or(|q| try_player(q, sets, arm_owner, seen)) {
                    arm_owner[k] = Some(p);
                    return true;
                }
            }
            false
        }
        let mut arm_owner = vec![None; self.n_arms];
        (0..self.sets.len())
            .filter(|&p| try_player(p, &self.sets, &mut arm_owner, &mut vec![false; self.n_arms]))
            .count()
    }

    /// Whether some joint action gives every player its own arm.
    pub fn admits_distinct_assignment(&self) -> bool {
        self.max_distinct_players() == self.sets.len()
    }

    /// Coverage of all arms, non-empty sets, and disjointness between
    /// players that are not graph neighbors.
    pub fn check_invariants(&self, graph: &CommGraph) -> Result<()> {
        if self.sets.len() != graph.n_players() {
            return Err(Error::contract(format!("{} arm sets for {} players", self.sets.len(), graph.n_players())));
        }
        if let Some(i) = self.sets.iter().position(Vec::is_empty) {
            return Err(Error::contract(format!("player {} has an empty arm set", i + 1)));
        }
        let mut covered = vec![false; self.n_arms];
        for set in &self.sets {
            for &k in set {
                covered[k] = true;
            }
        }
        if let Some(k) = covered.iter().position(|c| !c) {
            return Err(Error::contract(format!("arm {} is not in any player's set", k + 1)));
        }
        for k in 0..self.n_arms {
            let hs = self.holders(k);
            for (a, &i) in hs.iter().enumerate() {
                for &j in &hs[a + 1..] {
                    if !graph.in_neighborhood(i, j) {
                        return Err(Error::contract(format!(
                            "arm {} shared by non-neighbors {} and {}",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// How the local arm sets evolve from one round to the next.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkModel {
    /// Fixed sets for the whole horizon.
    Static { sets: Vec<Vec<usize>> },
    /// Every arm gets a uniformly drawn owner, then neighbors of all current
    /// holders join with `share_prob`, subject to the per-player `set_size`
    /// cap and an optional per-arm `max_holders` cap.
    CliqueShare { share_prob: f64, set_size: usize, max_holders: Option<usize> },
    /// Each arm (user) lands in one uniformly drawn region; with
    /// `overlap_prob` it is also visible to one random graph neighbor.
    DownlinkUniform { overlap_prob: f64 },
}

impl WalkModel {
    pub fn validate(&self, graph: &CommGraph, n_arms: usize) -> Result<()> {
        let n = graph.n_players();
        let check_prob = |field: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::config(field, format!("{p} is not a probability")))
            }
        };
        match self {
            WalkModel::Static { sets } => {
                let sets = ArmSets::new(n_arms, sets.clone())?;
                sets.check_invariants(graph).map_err(|e| match e {
                    Error::Contract(m) => Error::config("walk.sets", m),
                    other => other,
                })?;
                if !sets.admits_distinct_assignment() {
                    return Err(Error::config("walk.sets", "no joint action gives every player a distinct arm"));
                }
                Ok(())
            }
            WalkModel::CliqueShare { share_prob, set_size, max_holders } => {
                check_prob("walk.share_prob", *share_prob)?;
                if *set_size == 0 {
                    return Err(Error::config("walk.set_size", "must be at least 1"));
                }
                if set_size * n < n_arms {
                    return Err(Error::config(
                        "walk.set_size",
                        format!("{n} players with at most {set_size} arms each cannot cover {n_arms} arms"),
                    ));
                }
                if *max_holders == Some(0) {
                    return Err(Error::config("walk.max_holders", "must be at least 1"));
                }
                if n_arms < n {
                    return Err(Error::config(
                        "experiment.n_arms",
                        format!("random walks need n_arms >= n_players ({n_arms} < {n})"),
                    ));
                }
                Ok(())
            }
            WalkModel::DownlinkUniform { overlap_prob } => {
                check_prob("walk.overlap_prob", *overlap_prob)?;
                if n_arms < n {
                    return Err(Error::config(
                        "experiment.n_arms",
                        format!("random walks need n_arms >= n_players ({n_arms} < {n})"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Draws sets until every player can be given a distinct arm, so that a
    /// collision-free joint action exists in every round.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, graph: &CommGraph, n_arms: usize) -> Result<ArmSets> {
        for _ in 0..MAX_WALK_REDRAWS {
            let sets = self.draw_once(rng, graph, n_arms)?;
            if sets.admits_distinct_assignment() {
                return Ok(sets);
            }
        }
        Err(Error::contract(format!(
            "walk produced no arm sets with a distinct assignment in {MAX_WALK_REDRAWS} draws"
        )))
    }

    fn draw_once<R: Rng + ?Sized>(&self, rng: &mut R, graph: &CommGraph, n_arms: usize) -> Result<ArmSets> {
        let n = graph.n_players();
        match self {
            WalkModel::Static { sets } => ArmSets::new(n_arms, sets.clone()),
            WalkModel::CliqueShare { share_prob, set_size, max_holders } => {
                let max_holders = max_holders.unwrap_or(n);
                let mut holders = vec![Vec::new(); n_arms];
                let mut sizes = vec![0usize; n];
                let mut order: Vec<usize> = (0..n_arms).collect();
                order.shuffle(rng);
                for &k in &order {
                    let open: Vec<usize> = (0..n).filter(|&i| sizes[i] < *set_size).collect();
                    let owner = open[rng.random_range(0..open.len())];
                    holders[k].push(owner);
                    sizes[owner] += 1;
                }
                for &k in &order {
                    let mut candidates: Vec<usize> = (0..n).filter(|i| !holders[k].contains(i)).collect();
                    candidates.shuffle(rng);
                    for c in candidates {
                        if holders[k].len() >= max_holders {
                            break;
                        }
                        if sizes[c] >= *set_size || !holders[k].iter().all(|&h| graph.in_neighborhood(h, c)) {
                            continue;
                        }
                        if rng.random_bool(*share_prob) {
                            holders[k].push(c);
                            sizes[c] += 1;
                        }
                    }
                }
                fill_empty_sets(rng, graph, &mut holders, Repair::Extend)?;
                Ok(ArmSets::from_holders(n, &holders))
            }
            WalkModel::DownlinkUniform { overlap_prob } => {
                let mut holders = Vec::with_capacity(n_arms);
                for _ in 0..n_arms {
                    let region = rng.random_range(0..n);
                    let mut hs = vec![region];
                    if rng.random_bool(*overlap_prob) {
                        let nb = graph.neighbors(region);
                        if !nb.is_empty() {
                            hs.push(nb[rng.random_range(0..nb.len())]);
                        }
                    }
                    holders.push(hs);
                }
                fill_empty_sets(rng, graph, &mut holders, Repair::Move)?;
                Ok(ArmSets::from_holders(n, &holders))
            }
        }
    }
}

/// How an empty set is repaired.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Repair {
    /// Prefer adding the player to an arm's holder clique.
    Extend,
    /// Prefer moving an arm away from holders that keep another arm.
    Move,
}

/// Gives every player without arms one arm, by extending a holder clique
/// that can legally take the player or by moving an arm away from holders
/// that keep at least one other arm.
fn fill_empty_sets<R: Rng + ?Sized>(
    rng: &mut R,
    graph: &CommGraph,
    holders: &mut [Vec<usize>],
    prefer: Repair,
) -> Result<()> {
    let n = graph.n_players();
    let mut sizes = vec![0usize; n];
    for hs in holders.iter() {
        for &h in hs {
            sizes[h] += 1;
        }
    }
    for p in 0..n {
        if sizes[p] > 0 {
            continue;
        }
        let extendable: Vec<usize> =
            (0..holders.len()).filter(|&k| holders[k].iter().all(|&h| graph.in_neighborhood(h, p))).collect();
        let movable: Vec<usize> = (0..holders.len()).filter(|&k| holders[k].iter().all(|&h| sizes[h] >= 2)).collect();
        let extend = match prefer {
            Repair::Extend => !extendable.is_empty(),
            Repair::Move => movable.is_empty() && !extendable.is_empty(),
        };
        if extend {
            let k = extendable[rng.random_range(0..extendable.len())];
            holders[k].push(p);
            holders[k].sort_unstable();
            sizes[p] += 1;
            continue;
        }
        if movable.is_empty() {
            return Err(Error::contract(format!("cannot give player {} a non-empty arm set", p + 1)));
        }
        let k = movable[rng.random_range(0..movable.len())];
        for &h in &holders[k] {
            sizes[h] -= 1;
        }
        holders[k] = vec![p];
        sizes[p] = 1;
    }
    Ok(())
}

/// What one player experienced in a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullOutcome {
    pub arm: usize,
    pub reward: f64,
    pub collided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub pulls: Vec<PullOutcome>,
    /// This round's reward draw `X_k(t)` for every arm, pulled or not.
    pub draws: Vec<f64>,
}

impl RoundOutcome {
    pub fn collisions(&self) -> usize {
        self.pulls.iter().filter(|p| p.collided).count()
    }
}

/// Ground truth for one run. Owned by a single simulation; not shared.
#[derive(Debug, Clone)]
pub struct World {
    round: usize,
    arms: Vec<ArmSpec>,
    means: Vec<f64>,
    sets: ArmSets,
    graph: CommGraph,
    walk: WalkModel,
    walk_rng: ChaCha8Rng,
    reward_rng: ChaCha8Rng,
}

impl World {
    /// Validates the setup and draws the round-1 arm sets.
    pub fn new(arms: Vec<ArmSpec>, graph: CommGraph, walk: WalkModel, seed: u64) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::config("experiment.n_arms", "at least one arm is required"));
        }
        for (k, arm) in arms.iter().enumerate() {
            arm.validate(k)?;
        }
        walk.validate(&graph, arms.len())?;
        let mut walk_rng = ChaCha8Rng::seed_from_u64(seed);
        walk_rng.set_stream(1);
        let mut reward_rng = ChaCha8Rng::seed_from_u64(seed);
        reward_rng.set_stream(2);
        let sets = walk.draw(&mut walk_rng, &graph, arms.len())?;
        sets.check_invariants(&graph)?;
        let means = arms.iter().map(ArmSpec::mean).collect();
        Ok(Self { round: 1, arms, means, sets, graph, walk, walk_rng, reward_rng })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn true_means(&self) -> &[f64] {
        &self.means
    }

    pub fn arm_sets(&self) -> &ArmSets {
        &self.sets
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    pub fn n_players(&self) -> usize {
        self.graph.n_players()
    }

    /// Moves to the next round and draws its arm sets.
    pub fn advance_walk(&mut self) -> Result<&ArmSets> {
        if !matches!(self.walk, WalkModel::Static { .. }) {
            let sets = self.walk.draw(&mut self.walk_rng, &self.graph, self.arms.len())?;
            debug_assert!(sets.check_invariants(&self.graph).is_ok());
            self.sets = sets;
        }
        self.round += 1;
        Ok(&self.sets)
    }

    /// Resolves simultaneous pulls. Every arm's reward `X_k(t)` is drawn once
    /// per round; a player collects it only when pulling that arm alone.
    pub fn resolve_round(&mut self, actions: &[usize]) -> Result<RoundOutcome> {
        let n = self.n_players();
        if actions.len() != n {
            return Err(Error::contract(format!("{} actions for {n} players", actions.len())));
        }
        for (i, &a) in actions.iter().enumerate() {
            if !self.sets.contains(i, a) {
                return Err(Error::contract(format!(
                    "player {} pulled arm {} outside its set in round {}",
                    i + 1,
                    a + 1,
                    self.round
                )));
            }
        }
        let draws: Vec<f64> = self.arms.iter().map(|arm| arm.sample(&mut self.reward_rng)).collect();
        let mut counts = vec![0usize; self.arms.len()];
        for &a in actions {
            counts[a] += 1;
        }
        let pulls = actions
            .iter()
            .map(|&a| {
                let collided = counts[a] > 1;
                PullOutcome { arm: a, reward: if collided { 0.0 } else { draws[a] }, collided }
            })
            .collect();
        Ok(RoundOutcome { pulls, draws })
    }
}

/// Sum of `means` over distinct arms, added in ascending arm order so that
/// equal arm multisets always produce bit-identical totals.
pub fn distinct_reward_value(actions: &[usize], means: &[f64]) -> f64 {
    let mut arms: Vec<usize> = Vec::with_capacity(actions.len());
    for (i, &a) in actions.iter().enumerate() {
        let unique = actions.iter().enumerate().all(|(j, &b)| j == i || b != a);
        if unique {
            arms.push(a);
        }
    }
    arms.sort_unstable();
    arms.iter().map(|&a| means[a]).sum()
}

/// Output of the genie-aided policy for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct GenieAssignment {
    pub actions: Vec<usize>,
    /// Whether each player holds a matched (collision-free) arm.
    pub matched: Vec<bool>,
    pub value: f64,
}

/// Maximum-weight player–arm matching by the Hungarian method. Unmatched
/// players fall back to their best in-set arm and contribute nothing.
pub fn genie_assignment(sets: &ArmSets, means: &[f64]) -> GenieAssignment {
    let n = sets.n_players();
    let weights: Vec<Vec<Option<f64>>> =
        (0..n).map(|i| (0..sets.n_arms()).map(|k| sets.contains(i, k).then(|| means[k])).collect()).collect();
    let matching = max_weight_matching(&weights);
    let mut actions = Vec::with_capacity(n);
    let mut matched = Vec::with_capacity(n);
    let mut value_arms = Vec::new();
    for (i, m) in matching.iter().enumerate() {
        match m {
            Some(k) => {
                actions.push(*k);
                matched.push(true);
                value_arms.push(*k);
            }
            None => {
                let best = best_mean_arm(sets.set(i), means);
                actions.push(best);
                matched.push(false);
            }
        }
    }
    value_arms.sort_unstable();
    let value = value_arms.iter().map(|&k| means[k]).sum();
    GenieAssignment { actions, matched, value }
}

fn best_mean_arm(set: &[usize], means: &[f64]) -> usize {
    *set.iter().max_by(|&&a, &&b| means[a].total_cmp(&means[b]).then(b.cmp(&a))).expect("non-empty arm set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_topology, Topology};

    fn sets(n_arms: usize, s: &[&[usize]]) -> ArmSets {
        ArmSets::new(n_arms, s.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    fn decreasing_means(k: usize) -> Vec<f64> {
        (0..k).map(|i| 0.9 - 0.1 * i as f64).collect()
    }

    #[test]
    fn sharing_example_genie_pulls_three_one_two() {
        // 1-based {1,3}, {1,2,4}, {2,5}
        let s = sets(5, &[&[0, 2], &[0, 1, 3], &[1, 4]]);
        let g = genie_assignment(&s, &decreasing_means(5));
        assert_eq!(g.actions, vec![2, 0, 1]);
        assert!(g.matched.iter().all(|&m| m));
    }

    #[test]
    fn single_player_genie_takes_best_arm() {
        let s = sets(5, &[&[1, 4]]);
        let means = [0.1, 0.3, 0.2, 0.9, 0.5];
        let g = genie_assignment(&s, &means);
        assert_eq!(g.actions, vec![4]);
        assert_eq!(g.value, 0.5);
    }

    #[test]
    fn forced_collision_has_zero_genie_contribution_for_loser() {
        let s = sets(1, &[&[0], &[0]]);
        let g = genie_assignment(&s, &[0.7]);
        assert_eq!(g.actions, vec![0, 0]);
        assert_eq!(g.matched.iter().filter(|&&m| m).count(), 1);
        assert_eq!(g.value, 0.7);
    }

    #[test]
    fn collisions_zero_both_rewards() {
        let graph = build_topology(&Topology::Complete, 2).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 4];
        let walk = WalkModel::Static { sets: vec![vec![0, 2, 3], vec![1, 2]] };
        let mut world = World::new(arms, graph, walk, 3).unwrap();
        let out = world.resolve_round(&[2, 2]).unwrap();
        for p in &out.pulls {
            assert!(p.collided);
            assert_eq!(p.reward, 0.0);
        }
    }

    #[test]
    fn solo_player_never_collides() {
        let graph = build_topology(&Topology::Complete, 1).unwrap();
        let arms = vec![ArmSpec::gaussian(0.5, 0.3); 3];
        let walk = WalkModel::Static { sets: vec![vec![0, 1, 2]] };
        let mut world = World::new(arms, graph, walk, 3).unwrap();
        for t in 0..200 {
            let out = world.resolve_round(&[t % 3]).unwrap();
            assert!(!out.pulls[0].collided);
            assert!(out.pulls[0].reward > 0.0 && out.pulls[0].reward <= 1.0);
        }
    }

    #[test]
    fn distinct_pulls_do_not_collide() {
        let graph = build_topology(&Topology::Complete, 3).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.9); 3];
        let walk = WalkModel::Static { sets: vec![vec![0, 1, 2]; 3] };
        let mut world = World::new(arms, graph, walk, 1).unwrap();
        let out = world.resolve_round(&[2, 0, 1]).unwrap();
        assert_eq!(out.collisions(), 0);
        assert!(out.pulls.iter().all(|p| p.reward > 0.0));
    }

    #[test]
    fn pull_outside_set_is_contract_violation() {
        let graph = build_topology(&Topology::Complete, 2).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 2];
        let walk = WalkModel::Static { sets: vec![vec![0], vec![1]] };
        let mut world = World::new(arms, graph, walk, 1).unwrap();
        assert!(matches!(world.resolve_round(&[1, 1]), Err(Error::Contract(_))));
    }

    #[test]
    fn static_walk_is_identity() {
        let graph = build_topology(&Topology::Ring, 3).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 3];
        let walk = WalkModel::Static { sets: vec![vec![0], vec![1], vec![2]] };
        let mut world = World::new(arms, graph, walk, 1).unwrap();
        let before = world.arm_sets().clone();
        world.advance_walk().unwrap();
        assert_eq!(world.arm_sets(), &before);
        assert_eq!(world.round(), 2);
    }

    #[test]
    fn downlink_without_overlap_partitions_arms() {
        let graph = build_topology(&Topology::Ring, 6).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 10];
        let mut world = World::new(arms, graph, WalkModel::DownlinkUniform { overlap_prob: 0.0 }, 9).unwrap();
        for _ in 0..500 {
            let s = world.arm_sets();
            for k in 0..10 {
                assert_eq!(s.holders(k).len(), 1);
            }
            assert_eq!(s.sets().iter().map(Vec::len).sum::<usize>(), 10);
            world.advance_walk().unwrap();
        }
    }

    #[test]
    fn clique_share_never_shares_with_non_neighbors() {
        // ring of six with the three long diagonals
        let mut edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.extend([(0, 3), (1, 4), (2, 5)]);
        let graph = build_topology(&Topology::Explicit(edges), 6).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 100];
        let walk = WalkModel::CliqueShare { share_prob: 0.5, set_size: 25, max_holders: None };
        let mut world = World::new(arms, graph.clone(), walk, 5).unwrap();
        for _ in 0..10_000 {
            world.arm_sets().check_invariants(&graph).unwrap();
            assert!(world.arm_sets().sets().iter().all(|s| s.len() <= 25));
            world.advance_walk().unwrap();
        }
    }

    #[test]
    fn clique_share_rejects_uncoverable_configuration() {
        let graph = build_topology(&Topology::Ring, 6).unwrap();
        let arms = vec![ArmSpec::bernoulli(0.5); 100];
        let walk = WalkModel::CliqueShare { share_prob: 0.5, set_size: 10, max_holders: None };
        assert!(matches!(World::new(arms, graph, walk, 1), Err(Error::Config { .. })));
    }

    #[test]
    fn negative_mean_is_config_error_naming_field() {
        let err = ArmSpec::bernoulli(-0.2).validate(3).unwrap_err();
        assert!(err.to_string().contains("arms.means[3]"));
    }

    #[test]
    fn same_seed_same_world() {
        let graph = build_topology(&Topology::Ring, 6).unwrap();
        let arms: Vec<_> = (0..10).map(|k| ArmSpec::bernoulli(0.95 - 0.05 * k as f64)).collect();
        let walk = WalkModel::DownlinkUniform { overlap_prob: 0.3 };
        let mut a = World::new(arms.clone(), graph.clone(), walk.clone(), 42).unwrap();
        let mut b = World::new(arms, graph, walk, 42).unwrap();
        for _ in 0..300 {
            assert_eq!(a.arm_sets(), b.arm_sets());
            let actions: Vec<usize> = (0..6).map(|i| a.arm_sets().set(i)[0]).collect();
            let ra = a.resolve_round(&actions).unwrap();
            let rb = b.resolve_round(&actions).unwrap();
            assert_eq!(ra, rb);
            a.advance_walk().unwrap();
            b.advance_walk().unwrap();
        }
    }
}
