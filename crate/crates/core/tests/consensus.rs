use proptest::prelude::*;
use walkbandit::graph::{
    build_topology, consensus_deviation_bound, consensus_power_profile, metropolis_weights, CommGraph, Topology,
};
use walkbandit::policy::PlayerState;

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn naive_deviation(p: &[Vec<f64>], t: usize) -> f64 {
    let n = p.len();
    let mut acc = p.to_vec();
    for _ in 1..t {
        acc = matmul(&acc, p);
    }
    acc.iter().flatten().map(|x| (x - 1.0 / n as f64).abs()).fold(0.0, f64::max)
}

fn random_graph(n: usize, edge_prob: f64, seed: u64) -> CommGraph {
    build_topology(&Topology::Random { edge_prob, seed }, n).unwrap()
}

#[test]
fn power_profile_matches_repeated_multiplication() {
    for (n, seed) in [(4, 1), (7, 2), (12, 3)] {
        let g = random_graph(n, 0.4, seed);
        let p = metropolis_weights(&g);
        let profile = consensus_power_profile(&p, 60);
        for t in [1, 2, 5, 17, 60] {
            assert!((profile[t - 1] - naive_deviation(p.rows(), t)).abs() < 1e-12, "n={n} t={t}");
        }
    }
}

#[test]
fn deviation_is_non_increasing_on_random_suite() {
    for seed in 0..30 {
        let n = 2 + (seed as usize % 15);
        let p = metropolis_weights(&random_graph(n, 0.3, seed));
        let profile = consensus_power_profile(&p, 200);
        for w in profile.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "seed {seed}: {} > {}", w[1], w[0]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metropolis_is_symmetric_doubly_stochastic(n in 1usize..=20, prob in 0.1f64..0.9, seed in any::<u64>()) {
        let g = random_graph(n, prob, seed);
        let p = metropolis_weights(&g);
        for i in 0..n {
            let row: f64 = p.row(i).iter().sum();
            let col: f64 = (0..n).map(|j| p.weight(j, i)).sum();
            prop_assert!((row - 1.0).abs() < 1e-12);
            prop_assert!((col - 1.0).abs() < 1e-12);
            for j in 0..n {
                prop_assert_eq!(p.weight(i, j), p.weight(j, i));
                if !g.in_neighborhood(i, j) {
                    prop_assert_eq!(p.weight(i, j), 0.0);
                }
            }
        }
        let min_pos = p.rows().iter().flatten().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(p.beta(), min_pos);
    }

    #[test]
    fn gossip_preserves_network_totals(
        n in 2usize..=8,
        seed in any::<u64>(),
        rounds in proptest::collection::vec(proptest::collection::vec((0usize..3, 0.01f64..1.0, any::<bool>()), 8), 1..30),
    ) {
        let g = random_graph(n, 0.5, seed);
        let p = metropolis_weights(&g);
        let mut players: Vec<PlayerState> = (0..n).map(|i| PlayerState::new(i, 3)).collect();
        for round in &rounds {
            for (i, pl) in players.iter_mut().enumerate() {
                let (arm, r, collided) = round[i];
                pl.update_after_round(arm, if collided { 0.0 } else { r }, collided);
            }
            let snap: Vec<Vec<f64>> = players.iter().map(|pl| pl.consensus_estimates().to_vec()).collect();
            for (i, pl) in players.iter_mut().enumerate() {
                let est: Vec<(usize, &[f64])> = g.neighborhood(i).into_iter().map(|j| (j, snap[j].as_slice())).collect();
                pl.consensus_step(&est, p.row(i)).unwrap();
            }
            for k in 0..3 {
                let sum_r: f64 = players.iter().map(|pl| pl.consensus_estimates()[k]).sum();
                let sum_m: f64 = players.iter().map(|pl| pl.empirical_means()[k]).sum();
                prop_assert!((sum_r - sum_m).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn bound_holds_on_path() {
    let g = CommGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let p = metropolis_weights(&g);
    for (t, dev) in consensus_power_profile(&p, 200).into_iter().enumerate() {
        assert!(dev <= consensus_deviation_bound(p.beta(), 3, t + 1));
    }
}
