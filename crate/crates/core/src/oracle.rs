//! Exhaustive reference solvers for small instances.

use crate::env::{distinct_reward_value, ArmSets};
use crate::error::{Error, Result};

/// Largest joint-action space the exhaustive solvers will enumerate.
pub const MAX_ORACLE_TUPLES: u128 = 1_000_000;

/// Best joint-action value and every tuple attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveOptimum {
    pub value: f64,
    /// Maximizers in lexicographic order.
    pub argmax: Vec<Vec<usize>>,
}

fn enumerate(sets: &ArmSets, values: &[f64]) -> Result<ExhaustiveOptimum> {
    let tuples = sets.tuple_count();
    if tuples > MAX_ORACLE_TUPLES {
        return Err(Error::OracleGuard { tuples, limit: MAX_ORACLE_TUPLES });
    }
    let n = sets.n_players();
    let mut best = ExhaustiveOptimum { value: f64::NEG_INFINITY, argmax: Vec::new() };
    let mut digits = vec![0usize; n];
    let mut tuple: Vec<usize> = (0..n).map(|i| sets.set(i)[0]).collect();
    loop {
        let v = distinct_reward_value(&tuple, values);
        if v > best.value {
            best.value = v;
            best.argmax.clear();
        }
        if v == best.value {
            best.argmax.push(tuple.clone());
        }
        // odometer step, last player fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < sets.set(i).len() {
                tuple[i] = sets.set(i)[digits[i]];
                break;
            }
            digits[i] = 0;
            tuple[i] = sets.set(i)[0];
        }
    }
}

/// Maximizes `Σ_m v_{a_m} 1{a_m pulled once}` over all `a ∈ S_1 × … × S_N`
/// for index values `v`.
pub fn brute_force_match(indices: &[f64], sets: &ArmSets) -> Result<ExhaustiveOptimum> {
    enumerate(sets, indices)
}

/// The same search over true means.
pub fn brute_force_genie(sets: &ArmSets, means: &[f64]) -> Result<(f64, Vec<usize>)> {
    let opt = enumerate(sets, means)?;
    let first = opt.argmax.into_iter().next().expect("at least one tuple");
    Ok((opt.value, first))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(n_arms: usize, s: &[&[usize]]) -> ArmSets {
        ArmSets::new(n_arms, s.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn ranking_example_optimal_tuples() {
        let s = sets(5, &[&[0, 1, 2], &[0, 1, 4], &[3, 4]]);
        let opt = brute_force_match(&[0.9, 0.8, 0.7, 0.6, 0.5], &s).unwrap();
        assert_eq!(opt.argmax, vec![vec![0, 1, 3], vec![1, 0, 3]]);
        // summed in ascending arm order
        assert_eq!(opt.value, 0.9 + 0.8 + 0.6);
    }

    #[test]
    fn sharing_example_genie() {
        let s = sets(5, &[&[0, 2], &[0, 1, 3], &[1, 4]]);
        let (_, a) = brute_force_genie(&s, &[0.9, 0.8, 0.7, 0.6, 0.5]).unwrap();
        assert_eq!(a, vec![2, 0, 1]);
    }

    #[test]
    fn forced_collision_scores_zero() {
        let s = sets(1, &[&[0], &[0]]);
        assert_eq!(brute_force_genie(&s, &[0.7]).unwrap().0, 0.0);
    }

    #[test]
    fn guard_refuses_huge_instances() {
        let all: Vec<usize> = (0..40).collect();
        let s = ArmSets::new(40, vec![all; 4]).unwrap();
        assert!(matches!(brute_force_match(&[0.5; 40], &s), Err(Error::OracleGuard { tuples: 2_560_000, .. })));
    }
}
