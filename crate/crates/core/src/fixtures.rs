//! Small named structures used throughout the tests, examples and CLI docs.
//!
//! States are `blue` (index 0) and `red` (index 1). Edges carry equal weight
//! unless stated otherwise.

use serde_json::Value;

use crate::exactlp::{q, Rational};
use crate::structures::{Garbling, InfoStructure, PayoffStructure};

pub fn two_states() -> Vec<String> {
    vec!["blue".to_string(), "red".to_string()]
}

fn uniform(edges: &[(usize, usize, usize)]) -> InfoStructure {
    let w = q(1, edges.len() as i64);
    InfoStructure::new(two_states(), edges.iter().map(|&e| (e, w.clone()))).expect("fixture is valid")
}

/// Complete information: both players see the state.
pub fn u1() -> InfoStructure {
    uniform(&[(0, 0, 0), (1, 1, 1)])
}

/// Player 1 knows the state, player 2 does not.
pub fn u2() -> InfoStructure {
    uniform(&[(0, 0, 0), (1, 1, 0)])
}

/// Player 2 knows the state, player 1 does not.
pub fn u2_prime() -> InfoStructure {
    uniform(&[(0, 0, 0), (1, 0, 1)])
}

/// `u2_prime` with both players' signals 0 and 1 exchanged.
pub fn u2_second() -> InfoStructure {
    uniform(&[(0, 1, 1), (1, 1, 0)])
}

/// `u2` with player 1's signals 0 and 1 exchanged.
pub fn u2_relabeled() -> InfoStructure {
    uniform(&[(0, 1, 0), (1, 0, 0)])
}

pub fn u4() -> InfoStructure {
    uniform(&[(0, 0, 0), (0, 1, 1), (1, 1, 0), (1, 2, 1)])
}

/// Chain of signals: blue edges `(c, c)` and red edges `(c, c + 1)` for `c = 0..=n`.
pub fn chain(n: usize) -> InfoStructure {
    let edges: Vec<_> = (0..=n).flat_map(|c| [(0, c, c), (1, c, c + 1)]).collect();
    uniform(&edges)
}

/// Two equally likely states and no information for anyone.
pub fn trivial() -> InfoStructure {
    uniform(&[(0, 0, 0), (1, 0, 0)])
}

/// Player 1 learns the state; player 2 learns nothing.
pub fn u_max(prior: &[Rational]) -> InfoStructure {
    let states = (0..prior.len()).map(|k| format!("k{k}")).collect();
    InfoStructure::new(states, prior.iter().enumerate().map(|(k, p)| ((k, k, 0), p.clone()))).expect("prior is a distribution")
}

/// Player 2 learns the state; player 1 learns nothing.
pub fn u_min(prior: &[Rational]) -> InfoStructure {
    let states = (0..prior.len()).map(|k| format!("k{k}")).collect();
    InfoStructure::new(states, prior.iter().enumerate().map(|(k, p)| ((k, 0, k), p.clone()))).expect("prior is a distribution")
}

fn blocks(b: [[i64; 4]; 2], den: i64) -> PayoffStructure {
    let m = |r: [i64; 4]| vec![vec![q(r[0], den), q(r[1], den)], vec![q(r[2], den), q(r[3], den)]];
    PayoffStructure::from_blocks(two_states(), vec![m(b[0]), m(b[1])]).expect("fixture is valid")
}

/// blue `[[0,0],[-3/5,1]]`, red `[[1,-3/5],[0,0]]`.
pub fn g_ex2() -> PayoffStructure {
    blocks([[0, 0, -3, 5], [5, -3, 0, 0]], 5)
}

/// blue `[[0,1],[0,-1]]`, red `[[-1,0],[1,0]]`.
pub fn g_ex4() -> PayoffStructure {
    blocks([[0, 1, 0, -1], [-1, 0, 1, 0]], 1)
}

/// blue `[[-1,1],[-1,1]]`, red `[[1,-1],[1,-1]]`.
pub fn g_ex4_prime() -> PayoffStructure {
    blocks([[-1, 1, -1, 1], [1, -1, 1, -1]], 1)
}

/// `g(k, i, j) = 1` if `i = k`, else `-1`, on an `n × n` block.
pub fn guess_state(n: usize) -> PayoffStructure {
    let states = (0..n).map(|k| format!("k{k}")).collect();
    let entries = (0..n).flat_map(|k| {
        (0..n).flat_map(move |i| (0..n).map(move |j| ((k, i, j), if i == k { Rational::ONE } else { -Rational::ONE })))
    });
    PayoffStructure::new(states, n, entries).expect("fixture is valid")
}

/// Player 1 garbling for `u4`: signal 2 is merged into 1.
pub fn ex4_q1() -> Garbling {
    Garbling::deterministic([(0, 0), (1, 1), (2, 1)])
}

/// Player 2 garbling for `u2`: signal 0 becomes a fair coin over {0, 1}.
pub fn ex4_q2() -> Garbling {
    Garbling::new([(0, vec![(0, q(1, 2)), (1, q(1, 2))])]).expect("fixture is valid")
}

pub fn all_named() -> Vec<(&'static str, InfoStructure)> {
    vec![
        ("u1", u1()),
        ("u2", u2()),
        ("u2_prime", u2_prime()),
        ("u2_second", u2_second()),
        ("u3", chain(3)),
        ("u4", u4()),
        ("chain1", chain(1)),
        ("trivial", trivial()),
    ]
}

/// Priors of the `u_max` / `u_min` family in the shipped corpus, tagged by percentage of state 0.
pub fn extreme_priors() -> Vec<(u32, Vec<Rational>)> {
    vec![(50, vec![q(1, 2), q(1, 2)]), (60, vec![q(3, 5), q(2, 5)]), (90, vec![q(9, 10), q(1, 10)])]
}

/// The JSON corpus under `fixtures/`: file stem, note, and document.
pub fn corpus() -> Vec<(String, String, Value)> {
    let info = |u: InfoStructure| serde_json::to_value(u).expect("structures serialize");
    let pay = |g: PayoffStructure| serde_json::to_value(g).expect("structures serialize");
    let mut out: Vec<(String, String, Value)> = vec![
        ("u1".into(), "complete information: both players see the state".into(), info(u1())),
        ("u2".into(), "player 1 sees the state, player 2 sees nothing".into(), info(u2())),
        ("u2_prime".into(), "player 2 sees the state, player 1 sees nothing".into(), info(u2_prime())),
        ("u2_second".into(), "u2_prime with both players' signals exchanged".into(), info(u2_second())),
        ("u2_relabeled".into(), "u2 with player 1's signals exchanged".into(), info(u2_relabeled())),
        ("u3".into(), "signal chain of length 3; game value 1/10 against g_ex2".into(), info(chain(3))),
        ("u4".into(), "distance 1/2 from u2 and 1 from u2_prime".into(), info(u4())),
        ("trivial".into(), "no information for anyone; limit of the u_n".into(), info(trivial())),
        ("g_ex2".into(), "values 0, 1/5, 1/10 on u1, u2, u3".into(), pay(g_ex2())),
        ("g_ex4a".into(), "separates u2 from u4".into(), pay(g_ex4())),
        ("g_ex4b".into(), "separates u2_prime from u4".into(), pay(g_ex4_prime())),
    ];
    for (tag, prior) in extreme_priors() {
        let note = format!("prior ({}, {}); distance between the pair is 2(1 - max prior)", prior[0], prior[1]);
        out.push((format!("u_max_p{tag}"), format!("player 1 informed, {note}"), info(u_max(&prior))));
        out.push((format!("u_min_p{tag}"), format!("player 2 informed, {note}"), info(u_min(&prior))));
    }
    for n in 1..=10 {
        out.push((format!("u_n{n}"), format!("signal chain of length {n}; within 1/{} of trivial", n + 1), info(chain(n))));
    }
    out
}
