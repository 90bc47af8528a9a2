//! The two worked examples, checked end to end. Output ids are 1-based.

use std::io::{self, Write};

use walkbandit::env::{genie_assignment, ArmSets};
use walkbandit::oracle::brute_force_match;
use walkbandit::policy::{decide, greedy_select, learn2match, learn2rank, DecisionRules, PlayerState, RankRule};

/// Strictly decreasing values so that arm 1 ranks first.
const DECREASING: [f64; 5] = [0.9, 0.8, 0.7, 0.6, 0.5];

fn sets(s: &[&[usize]]) -> ArmSets {
    ArmSets::new(5, s.iter().map(|x| x.iter().map(|k| k - 1).collect()).collect()).expect("valid fixture")
}

fn ids(v: &[usize]) -> Vec<usize> {
    v.iter().map(|k| k + 1).collect()
}

fn set_str(v: &[usize]) -> String {
    let mut v = ids(v);
    v.sort_unstable();
    format!("{{{}}}", v.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

fn tuple_str(v: &[usize]) -> String {
    format!("({})", ids(v).iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

struct Report<'a> {
    out: &'a mut dyn Write,
    failed: usize,
}

impl Report<'_> {
    fn check(&mut self, name: &str, got: String, want: &str) -> io::Result<()> {
        let ok = got == want;
        if !ok {
            self.failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        if ok {
            writeln!(self.out, "{status} {name}: {got}")
        } else {
            writeln!(self.out, "{status} {name}: {got} (expected {want})")
        }
    }
}

/// Prints one line per check and returns the number of failures.
pub fn run_fixtures(out: &mut dyn Write) -> io::Result<usize> {
    let mut r = Report { out, failed: 0 };

    // Sharing example: S_1={1,3}, S_2={1,2,4}, S_3={2,5}
    let ex1 = sets(&[&[1, 3], &[1, 2, 4], &[2, 5]]);
    let genie = genie_assignment(&ex1, &DECREASING);
    r.check("sharing-example genie assignment", tuple_str(&genie.actions), "(3,1,2)")?;
    let accurate: Vec<usize> = (0..3).map(|i| decide(&DECREASING, &ex1, i, DecisionRules::default()).arm).collect();
    r.check("sharing-example pulls with accurate indices", tuple_str(&accurate), "(3,1,2)")?;
    let mut learned: Vec<PlayerState> = (0..3).map(|i| PlayerState::new(i, 5)).collect();
    for p in learned.iter_mut() {
        for _ in 0..1000 {
            for (k, &mu) in DECREASING.iter().enumerate() {
                p.update_after_round(k, mu, false);
            }
        }
    }
    let greedy: Vec<usize> = learned.iter().map(|p| greedy_select(p, ex1.set(p.id()), 10_000)).collect();
    r.check("sharing-example greedy pulls", tuple_str(&greedy), "(1,1,2)")?;

    // Ranking example: S_1={1,2,3}, S_2={1,2,5}, S_3={4,5}
    let ex2 = sets(&[&[1, 2, 3], &[1, 2, 5], &[4, 5]]);
    let m = learn2match(&DECREASING, &ex2, 0);
    r.check("ranking-example feasible arms", set_str(&m.feasible), "{1,2,4}")?;
    let reduced: Vec<String> = m.reduced_sets.iter().map(|s| set_str(s)).collect();
    r.check("ranking-example reduced sets", reduced.join(" "), "{1,2} {1,2} {4}")?;
    let tuples: Vec<String> = m.optimal_tuples().iter().map(|t| tuple_str(t)).collect();
    r.check("ranking-example optimal joint actions", tuples.join(" "), "(1,2,4) (2,1,4)")?;
    let brute: Vec<String> = brute_force_match(&DECREASING, &ex2)
        .map(|b| b.argmax.iter().map(|t| tuple_str(t)).collect())
        .unwrap_or_default();
    r.check("ranking-example exhaustive maximizers", brute.join(" "), "(1,2,4) (2,1,4)")?;
    for (rule, name) in [(RankRule::Canonical, "canonical"), (RankRule::PlayerOrder, "player-order")] {
        let pulls: Vec<usize> = (0..3)
            .map(|i| learn2rank(&learn2match(&DECREASING, &ex2, i), rule).arm.map_or(usize::MAX, |a| a))
            .collect();
        let shown = if pulls.contains(&usize::MAX) { "unassigned".to_string() } else { tuple_str(&pulls) };
        r.check(&format!("ranking-example pulls ({name} rank)"), shown, "(2,1,4)")?;
    }

    let summary =
        if r.failed == 0 { "all fixtures passed".to_string() } else { format!("{} fixture(s) failed", r.failed) };
    writeln!(r.out, "{summary}")?;
    Ok(r.failed)
}
