//! Per-player decision logic.
//!
//! A player keeps its own pull/collision counters, an empirical mean per arm
//! and (for the sharing variant) a consensus estimate mixed with its graph
//! neighbors. Each round it turns those into UCB indices, solves the joint
//! matching problem from its own perspective with [`learn2match`], and picks
//! its own arm out of the optimal joint actions with [`learn2rank`].
//!
//! Arm ordering is always "decreasing index, then ascending arm id", so two
//! players holding identical index vectors order arms identically.

use std::cmp::Ordering;

use crate::env::ArmSets;
use crate::error::{Error, Result};

/// Which statistic drives the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    /// Consensus estimate plus `sqrt(3 ln t / (2 N V))`.
    Consensus,
    /// Local empirical mean plus `sqrt(3 ln t / (2 V))` (no reward sharing).
    Local,
}

/// UCB exploration bonus; `+∞` for an arm never pulled alone.
pub fn exploration_bonus(kind: IndexKind, t: usize, n_players: usize, solo_pulls: u64) -> f64 {
    if solo_pulls == 0 {
        return f64::INFINITY;
    }
    let log_t = (t as f64).ln();
    let denom = match kind {
        IndexKind::Consensus => 2.0 * n_players as f64 * solo_pulls as f64,
        IndexKind::Local => 2.0 * solo_pulls as f64,
    };
    (3.0 * log_t / denom).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerState {
    id: usize,
    pulls: Vec<u64>,
    collisions: Vec<u64>,
    reward_sum: Vec<f64>,
    mean: Vec<f64>,
    /// Empirical means as of the previous consensus step.
    mean_at_last_mix: Vec<f64>,
    consensus: Vec<f64>,
}

impl PlayerState {
    pub fn new(id: usize, n_arms: usize) -> Self {
        Self {
            id,
            pulls: vec![0; n_arms],
            collisions: vec![0; n_arms],
            reward_sum: vec![0.0; n_arms],
            mean: vec![0.0; n_arms],
            mean_at_last_mix: vec![0.0; n_arms],
            consensus: vec![0.0; n_arms],
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn n_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn collisions(&self) -> &[u64] {
        &self.collisions
    }

    /// Rounds in which this player pulled `arm` and nobody else did.
    pub fn solo_pulls(&self, arm: usize) -> u64 {
        self.pulls[arm] - self.collisions[arm]
    }

    pub fn reward_sum(&self) -> &[f64] {
        &self.reward_sum
    }

    pub fn empirical_means(&self) -> &[f64] {
        &self.mean
    }

    pub fn consensus_estimates(&self) -> &[f64] {
        &self.consensus
    }

    /// Records this round's pull. A collision counts as a pull but never
    /// enters the empirical mean.
    pub fn update_after_round(&mut self, pulled: usize, reward: f64, collided: bool) {
        debug_assert_eq!(collided, reward == 0.0, "collision flag must match a zero reward");
        self.pulls[pulled] += 1;
        if collided {
            self.collisions[pulled] += 1;
        } else {
            self.reward_sum[pulled] += reward;
            self.mean[pulled] = self.reward_sum[pulled] / self.solo_pulls(pulled) as f64;
        }
    }

    /// One synchronous gossip step:
    /// `r_i(t+1) = Σ_j P_ij r_j(t) + μ̂_i(t+1) − μ̂_i(t)`.
    ///
    /// `neighbor_estimates` holds the round-`t` consensus vectors of every
    /// player with a non-zero weight in `p_row`, including this player.
    pub fn consensus_step(&mut self, neighbor_estimates: &[(usize, &[f64])], p_row: &[f64]) -> Result<()> {
        let expected: Vec<usize> = (0..p_row.len()).filter(|&j| j == self.id || p_row[j] > 0.0).collect();
        let mut given: Vec<usize> = neighbor_estimates.iter().map(|&(j, _)| j).collect();
        given.sort_unstable();
        if given != expected {
            let missing: Vec<usize> = expected.iter().filter(|j| !given.contains(j)).map(|j| j + 1).collect();
            return Err(Error::contract(format!(
                "player {} consensus step expects estimates from {:?}, missing {:?}",
                self.id + 1,
                expected.iter().map(|j| j + 1).collect::<Vec<_>>(),
                missing
            )));
        }
        let n_arms = self.n_arms();
        if let Some(&(j, _)) = neighbor_estimates.iter().find(|(_, e)| e.len() != n_arms) {
            return Err(Error::contract(format!("estimate from player {} has the wrong length", j + 1)));
        }
        let mut mixed = vec![0.0; n_arms];
        for &(j, est) in neighbor_estimates {
            let w = p_row[j];
            for (m, e) in mixed.iter_mut().zip(est) {
                *m += w * e;
            }
        }
        for (k, c) in self.consensus.iter_mut().enumerate() {
            *c = mixed[k] + (self.mean[k] - self.mean_at_last_mix[k]);
        }
        self.mean_at_last_mix.copy_from_slice(&self.mean);
        Ok(())
    }

    /// Per-arm UCB index at round `t`.
    pub fn compute_index(&self, t: usize, n_players: usize, kind: IndexKind) -> Vec<f64> {
        let base = match kind {
            IndexKind::Consensus => &self.consensus,
            IndexKind::Local => &self.mean,
        };
        base.iter()
            .enumerate()
            .map(|(k, &b)| {
                let v = self.solo_pulls(k);
                if v == 0 {
                    f64::INFINITY
                } else {
                    b + exploration_bonus(kind, t, n_players, v)
                }
            })
            .collect()
    }
}

fn index_order(indices: &[f64], a: usize, b: usize) -> Ordering {
    indices[b].total_cmp(&indices[a]).then(a.cmp(&b))
}

/// All arms sorted by decreasing index with ascending-id tie-break.
pub fn arm_ranking(indices: &[f64]) -> Vec<usize> {
    let mut arms: Vec<usize> = (0..indices.len()).collect();
    arms.sort_by(|&a, &b| index_order(indices, a, b));
    arms
}

/// Admission test used while growing the feasible arm set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Feasibility {
    /// Admit an arm only if the admitted arms plus it can still be given to
    /// distinct players (augmenting-path check).
    #[default]
    Augmenting,
    /// Admit an arm if the players holding the admitted arms number at least
    /// as many as the arms. Necessary but not sufficient for a distinct
    /// assignment.
    HolderCount,
}

/// A player's solution of the joint matching problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub self_id: usize,
    /// Admitted arms in admission (decreasing index) order.
    pub feasible: Vec<usize>,
    /// `S_m ∩ O` for every player, in decreasing index order.
    pub reduced_sets: Vec<Vec<usize>>,
    /// Arms this player may pull in some optimal joint action.
    pub own_options: Vec<usize>,
}

impl MatchResult {
    /// Every joint action with `a_m ∈ S*_m` and pairwise distinct arms.
    pub fn optimal_tuples(&self) -> Vec<Vec<usize>> {
        fn go(sets: &[Vec<usize>], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == sets.len() {
                out.push(prefix.clone());
                return;
            }
            for &a in &sets[prefix.len()] {
                if !prefix.contains(&a) {
                    prefix.push(a);
                    go(sets, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&self.reduced_sets, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Kuhn augmenting step from `arm` into the players that hold it.
fn augment(arm: usize, holders: &[Vec<usize>], player_arm: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for &p in &holders[arm] {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let free = match player_arm[p] {
            None => true,
            Some(prev) => augment(prev, holders, player_arm, visited),
        };
        if free {
            player_arm[p] = Some(arm);
            return true;
        }
    }
    false
}

/// Greedy construction of the feasible arm set with the default
/// [`Feasibility::Augmenting`] test.
pub fn learn2match(indices: &[f64], sets: &ArmSets, self_id: usize) -> MatchResult {
    learn2match_with(indices, sets, self_id, Feasibility::Augmenting)
}

/// Scans arms by decreasing index and admits each one that passes the
/// feasibility test, until one arm per player is admitted or arms run out.
/// A rejected arm is discarded and the same slot is retried with the next.
pub fn learn2match_with(indices: &[f64], sets: &ArmSets, self_id: usize, test: Feasibility) -> MatchResult {
    let n = sets.n_players();
    let n_arms = sets.n_arms();
    assert_eq!(indices.len(), n_arms, "one index per arm");
    let mut holders = vec![Vec::new(); n_arms];
    for (p, set) in sets.sets().iter().enumerate() {
        for &k in set {
            holders[k].push(p);
        }
    }

    let mut feasible = Vec::with_capacity(n);
    let mut player_arm: Vec<Option<usize>> = vec![None; n];
    let mut holder_union = vec![false; n];
    let mut union_size = 0;

    for arm in arm_ranking(indices) {
        if feasible.len() == n {
            break;
        }
        if holders[arm].is_empty() {
            continue;
        }
        let admit = match test {
            Feasibility::Augmenting => {
                let mut visited = vec![false; n];
                augment(arm, &holders, &mut player_arm, &mut visited)
            }
            Feasibility::HolderCount => {
                let extra = holders[arm].iter().filter(|&&p| !holder_union[p]).count();
                if union_size + extra > feasible.len() {
                    for &p in &holders[arm] {
                        holder_union[p] = true;
                    }
                    union_size += extra;
                    true
                } else {
                    false
                }
            }
        };
        if admit {
            feasible.push(arm);
        }
    }

    // `feasible` is already in ranking order, so filtering keeps that order.
    let reduced_sets: Vec<Vec<usize>> =
        (0..n).map(|m| feasible.iter().copied().filter(|&k| sets.contains(m, k)).collect()).collect();
    let own_options = reduced_sets[self_id].clone();
    MatchResult { self_id, feasible, reduced_sets, own_options }
}

/// How a player picks its own arm from the optimal joint actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankRule {
    /// Players are visited in decreasing id order; each takes its
    /// highest-index reduced arm that still lets the remaining players be
    /// matched at full size. Every player with the same indices and sets
    /// computes the same joint action.
    #[default]
    Canonical,
    /// Position of this player, by decreasing id, among players whose reduced
    /// set contains all of this player's options; that position selects the
    /// option. Out-of-range positions wrap around.
    PlayerOrder,
}

/// Outcome of the ranking step.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// `None` when the player has no arm in the joint action.
    pub arm: Option<usize>,
    /// Players whose reduced set contains all of this player's options,
    /// in decreasing id order.
    pub indifferent: Vec<usize>,
    /// 1-based position of this player in `indifferent`.
    pub beta: usize,
    /// The position exceeded the option count and was wrapped.
    pub wrapped: bool,
}

/// Picks this player's arm out of `m`'s optimal joint actions.
pub fn learn2rank(m: &MatchResult, rule: RankRule) -> Ranking {
    let options = &m.own_options;
    let mut indifferent: Vec<usize> =
        (0..m.reduced_sets.len()).filter(|&j| options.iter().all(|a| m.reduced_sets[j].contains(a))).collect();
    indifferent.reverse();
    let beta = indifferent.iter().position(|&j| j == m.self_id).map_or(0, |p| p + 1);
    if options.is_empty() {
        return Ranking { arm: None, indifferent, beta, wrapped: false };
    }
    match rule {
        RankRule::PlayerOrder => {
            let wrapped = beta > options.len();
            let slot = (beta.max(1) - 1) % options.len();
            Ranking { arm: Some(options[slot]), indifferent, beta, wrapped }
        }
        RankRule::Canonical => {
            let arm = canonical_assignment(m)[m.self_id];
            Ranking { arm, indifferent, beta, wrapped: false }
        }
    }
}

fn max_matching_size(reduced: &[Vec<usize>], active: &[bool], taken: &[bool], n_arms: usize) -> usize {
    // arm -> holder list restricted to active players and free arms
    let n = reduced.len();
    let mut holders = vec![Vec::new(); n_arms];
    for p in (0..n).filter(|&p| active[p]) {
        for &a in &reduced[p] {
            if !taken[a] {
                holders[a].push(p);
            }
        }
    }
    let mut player_arm = vec![None; n];
    (0..n_arms)
        .filter(|&a| {
            let mut visited = vec![false; n];
            augment(a, &holders, &mut player_arm, &mut visited)
        })
        .count()
}

/// Joint action every player derives identically from `m`.
pub fn canonical_assignment(m: &MatchResult) -> Vec<Option<usize>> {
    let n = m.reduced_sets.len();
    let n_arms = m.reduced_sets.iter().flatten().copied().max().map_or(0, |a| a + 1);
    let mut active = vec![true; n];
    let mut taken = vec![false; n_arms];
    let mut target = max_matching_size(&m.reduced_sets, &active, &taken, n_arms);
    let mut out = vec![None; n];
    for p in (0..n).rev() {
        active[p] = false;
        for &a in &m.reduced_sets[p] {
            if taken[a] {
                continue;
            }
            taken[a] = true;
            if target > 0 && max_matching_size(&m.reduced_sets, &active, &taken, n_arms) == target - 1 {
                out[p] = Some(a);
                target -= 1;
                break;
            }
            taken[a] = false;
        }
    }
    out
}

/// Knobs for the exploitation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecisionRules {
    pub feasibility: Feasibility,
    pub rank: RankRule,
}

/// A player's chosen arm for the round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub arm: usize,
    /// The ranking gave no arm and the player fell back to its local best.
    pub fallback: bool,
    /// The player-order rank had to wrap around.
    pub wrapped: bool,
}

impl Decision {
    pub fn flagged(&self) -> bool {
        self.fallback || self.wrapped
    }
}

fn local_best(indices: &[f64], own_set: &[usize]) -> usize {
    *own_set.iter().min_by(|&&a, &&b| index_order(indices, a, b)).expect("non-empty arm set")
}

/// Matching plus ranking on a given index vector.
pub fn decide(indices: &[f64], sets: &ArmSets, self_id: usize, rules: DecisionRules) -> Decision {
    let m = learn2match_with(indices, sets, self_id, rules.feasibility);
    let r = learn2rank(&m, rules.rank);
    match r.arm {
        Some(arm) => Decision { arm, fallback: false, wrapped: r.wrapped },
        None => Decision { arm: local_best(indices, sets.set(self_id)), fallback: true, wrapped: false },
    }
}

/// Index computation, matching and ranking for one player. Reads only this
/// player's own state and the shared arm sets.
pub fn select_action(
    state: &PlayerState,
    sets: &ArmSets,
    t: usize,
    n_players: usize,
    kind: IndexKind,
    rules: DecisionRules,
) -> Decision {
    let indices = state.compute_index(t, n_players, kind);
    decide(&indices, sets, state.id(), rules)
}

/// No-coordination baseline: best local index in the player's own set.
pub fn greedy_select(state: &PlayerState, own_set: &[usize], t: usize) -> usize {
    let indices = state.compute_index(t, 1, IndexKind::Local);
    local_best(&indices, own_set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(n_arms: usize, s: &[&[usize]]) -> ArmSets {
        ArmSets::new(n_arms, s.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    /// Ranking example instance, 0-based: {1,2,3}, {1,2,5}, {4,5}.
    fn ranking_example() -> ArmSets {
        sets(5, &[&[0, 1, 2], &[0, 1, 4], &[3, 4]])
    }

    const DECREASING: [f64; 5] = [0.9, 0.8, 0.7, 0.6, 0.5];

    #[test]
    fn solo_pull_updates_counters() {
        let mut s = PlayerState::new(0, 4);
        s.update_after_round(1, 0.7, false);
        assert_eq!((s.pulls()[1], s.collisions()[1], s.solo_pulls(1)), (1, 0, 1));
        assert_eq!(s.empirical_means()[1], 0.7);
    }

    #[test]
    fn collision_is_excluded_from_mean() {
        let mut s = PlayerState::new(0, 4);
        s.update_after_round(1, 0.0, true);
        assert_eq!((s.pulls()[1], s.collisions()[1], s.solo_pulls(1)), (1, 1, 0));
        assert_eq!(s.empirical_means()[1], 0.0);
    }

    #[test]
    fn mean_over_solo_pulls_only() {
        let mut s = PlayerState::new(0, 6);
        s.update_after_round(4, 0.4, false);
        s.update_after_round(4, 0.0, true);
        s.update_after_round(4, 0.8, false);
        assert_eq!((s.pulls()[4], s.collisions()[4]), (3, 1));
        assert!((s.empirical_means()[4] - 0.6).abs() < 1e-15);
        assert!(s.empirical_means().iter().enumerate().all(|(k, &m)| k == 4 || m == 0.0));
    }

    #[test]
    fn consensus_single_player_tracks_mean() {
        let mut s = PlayerState::new(0, 2);
        for (arm, r) in [(0, 0.3), (1, 0.9), (0, 0.5)] {
            s.update_after_round(arm, r, false);
            let own = s.consensus_estimates().to_vec();
            s.consensus_step(&[(0, &own)], &[1.0]).unwrap();
            assert_eq!(s.consensus_estimates(), s.empirical_means());
        }
    }

    #[test]
    fn consensus_zero_fixed_point() {
        let mut s = PlayerState::new(1, 3);
        let zeros = vec![0.0; 3];
        s.consensus_step(&[(0, &zeros), (1, &zeros)], &[0.5, 0.5]).unwrap();
        assert_eq!(s.consensus_estimates(), &[0.0; 3]);
    }

    #[test]
    fn consensus_two_players_average() {
        let mut a = PlayerState::new(0, 1);
        let mut b = PlayerState::new(1, 1);
        a.consensus = vec![0.4];
        b.consensus = vec![0.8];
        let (ea, eb) = (a.consensus.clone(), b.consensus.clone());
        a.consensus_step(&[(0, &ea), (1, &eb)], &[0.5, 0.5]).unwrap();
        b.consensus_step(&[(0, &ea), (1, &eb)], &[0.5, 0.5]).unwrap();
        assert!((a.consensus[0] - 0.6).abs() < 1e-15);
        assert!((b.consensus[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn consensus_missing_neighbor_is_error() {
        let mut s = PlayerState::new(0, 1);
        let e = vec![0.0];
        let err = s.consensus_step(&[(0, &e)], &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn unexplored_arm_has_infinite_index() {
        let s = PlayerState::new(0, 3);
        assert!(s.compute_index(10, 4, IndexKind::Consensus).iter().all(|x| x.is_infinite()));
        assert!(s.compute_index(10, 4, IndexKind::Local).iter().all(|x| x.is_infinite()));
    }

    #[test]
    fn bonus_values() {
        // sqrt(3 ln 100 / 24) and sqrt(3 ln 100 / 12)
        let ln100 = 100f64.ln();
        assert!((exploration_bonus(IndexKind::Consensus, 100, 2, 6) - (3.0 * ln100 / 24.0).sqrt()).abs() < 1e-15);
        assert!((0.5 + exploration_bonus(IndexKind::Consensus, 100, 2, 6) - 1.2587).abs() < 1e-4);
        assert!((0.5 + exploration_bonus(IndexKind::Local, 100, 2, 6) - 1.5730).abs() < 1e-4);
    }

    #[test]
    fn index_uses_consensus_or_local_base() {
        let mut s = PlayerState::new(0, 1);
        for _ in 0..6 {
            s.update_after_round(0, 0.5, false);
        }
        s.consensus = vec![0.5];
        let q = s.compute_index(100, 2, IndexKind::Consensus)[0];
        let g = s.compute_index(100, 2, IndexKind::Local)[0];
        assert!((q - 1.2587).abs() < 1e-4);
        assert!((g - 1.5730).abs() < 1e-4);
    }

    #[test]
    fn ranking_breaks_ties_by_arm_id() {
        let idx = [0.5, f64::INFINITY, 0.5, f64::INFINITY];
        assert_eq!(arm_ranking(&idx), vec![1, 3, 0, 2]);
    }

    #[test]
    fn ranking_example_match() {
        for test in [Feasibility::Augmenting, Feasibility::HolderCount] {
            let m = learn2match_with(&DECREASING, &ranking_example(), 1, test);
            assert_eq!(m.feasible, vec![0, 1, 3]);
            assert_eq!(m.reduced_sets, vec![vec![0, 1], vec![0, 1], vec![3]]);
            assert_eq!(m.own_options, vec![0, 1]);
            assert_eq!(m.optimal_tuples(), vec![vec![0, 1, 3], vec![1, 0, 3]]);
        }
    }

    #[test]
    fn ranking_example_rank_both_rules() {
        for rule in [RankRule::Canonical, RankRule::PlayerOrder] {
            let pulls: Vec<usize> = (0..3)
                .map(|i| learn2rank(&learn2match(&DECREASING, &ranking_example(), i), rule).arm.unwrap())
                .collect();
            assert_eq!(pulls, vec![1, 0, 3], "{rule:?}");
        }
        let r = learn2rank(&learn2match(&DECREASING, &ranking_example(), 1), RankRule::PlayerOrder);
        assert_eq!(r.indifferent, vec![1, 0]);
        assert_eq!(r.beta, 1);
        let r = learn2rank(&learn2match(&DECREASING, &ranking_example(), 0), RankRule::PlayerOrder);
        assert_eq!(r.beta, 2);
    }

    #[test]
    fn single_player_takes_best_arm() {
        let s = sets(3, &[&[0, 2]]);
        let m = learn2match(&[0.1, 0.9, 0.4], &s, 0);
        assert_eq!(m.feasible, vec![2]);
        assert_eq!(m.own_options, vec![2]);
        assert_eq!(learn2rank(&m, RankRule::PlayerOrder).arm, Some(2));
    }

    #[test]
    fn single_option_ignores_rank() {
        let s = sets(2, &[&[0], &[0, 1]]);
        let m = learn2match(&[0.9, 0.1], &s, 0);
        assert_eq!(m.own_options, vec![0]);
        assert_eq!(learn2rank(&m, RankRule::PlayerOrder).arm, Some(0));
    }

    #[test]
    fn holder_count_can_admit_unassignable_arms() {
        // {1,2,3}, {1,4}, {1,4}: the count test admits arm 3, which only
        // player 1 can take, while player 2 and 3 both need arm 1 or 4.
        let s = sets(4, &[&[0, 1, 2], &[0, 3], &[0, 3]]);
        let idx = [0.9, 0.8, 0.7, 0.6];
        let loose = learn2match_with(&idx, &s, 0, Feasibility::HolderCount);
        assert_eq!(loose.feasible, vec![0, 1, 2]);
        assert!(loose.optimal_tuples().is_empty());
        let exact = learn2match(&idx, &s, 0);
        assert_eq!(exact.feasible, vec![0, 1, 3]);
        assert_eq!(exact.optimal_tuples(), vec![vec![1, 0, 3], vec![1, 3, 0]]);
    }

    #[test]
    fn player_order_rank_can_collide_where_canonical_does_not() {
        // {a,b}, {a,b}, {b,c}: player order sends players 1 and 3 to b.
        let s = sets(3, &[&[0, 1], &[0, 1], &[1, 2]]);
        let idx = [0.9, 0.8, 0.7];
        let pick =
            |rule| -> Vec<usize> { (0..3).map(|i| learn2rank(&learn2match(&idx, &s, i), rule).arm.unwrap()).collect() };
        assert_eq!(pick(RankRule::PlayerOrder), vec![1, 0, 1]);
        assert_eq!(pick(RankRule::Canonical), vec![1, 0, 2]);
    }

    #[test]
    fn player_order_wraps_out_of_range_rank() {
        let s = sets(1, &[&[0], &[0]]);
        let r = learn2rank(&learn2match(&[0.5], &s, 0), RankRule::PlayerOrder);
        assert_eq!(r.beta, 2);
        assert!(r.wrapped);
        assert_eq!(r.arm, Some(0));
    }

    #[test]
    fn empty_reduced_set_falls_back() {
        // Two players share a single arm; player 1 (lower id) loses it.
        let s = sets(1, &[&[0], &[0]]);
        let d = decide(&[0.5], &s, 0, DecisionRules::default());
        assert!(d.fallback);
        assert_eq!(d.arm, 0);
        let d = decide(&[0.5], &s, 1, DecisionRules::default());
        assert!(!d.fallback);
    }

    #[test]
    fn round_one_selection_is_in_own_set() {
        let s = sets(5, &[&[0, 2], &[0, 1, 3], &[1, 4]]);
        for i in 0..3 {
            let state = PlayerState::new(i, 5);
            let d = select_action(&state, &s, 1, 3, IndexKind::Consensus, DecisionRules::default());
            assert!(s.contains(i, d.arm));
        }
    }

    #[test]
    fn sharing_example_accurate_indices() {
        let s = sets(5, &[&[0, 2], &[0, 1, 3], &[1, 4]]);
        let picks: Vec<usize> = (0..3).map(|i| decide(&DECREASING, &s, i, DecisionRules::default()).arm).collect();
        assert_eq!(picks, vec![2, 0, 1]);
    }

    #[test]
    fn greedy_prefers_lowest_id_when_unexplored() {
        let state = PlayerState::new(0, 6);
        assert_eq!(greedy_select(&state, &[5, 2, 4], 1), 2);
    }

    #[test]
    fn greedy_players_collide_on_shared_best_arm() {
        // Sharing example sets with accurate means: players 1 and 2 both want arm 1.
        let mut p1 = PlayerState::new(0, 5);
        let mut p2 = PlayerState::new(1, 5);
        for _ in 0..2000 {
            for (k, &mu) in DECREASING.iter().enumerate() {
                p1.update_after_round(k, mu, false);
                p2.update_after_round(k, mu, false);
            }
        }
        assert_eq!(greedy_select(&p1, &[0, 2], 10_000), 0);
        assert_eq!(greedy_select(&p2, &[0, 1, 3], 10_000), 0);
    }
}
