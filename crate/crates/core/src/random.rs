//! Seeded generators of small random instances with exact rational weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlp::{q, Rational};
use crate::structures::{Garbling, InfoStructure, PayoffStructure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn states(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("k{k}")).collect()
}

/// Random weights with denominators bounded by `5 * cells`, on at least one cell.
pub fn info_structure(rng: &mut impl Rng, num_states: usize, n1: usize, n2: usize) -> InfoStructure {
    let cells = num_states * n1 * n2;
    loop {
        let w: Vec<i64> = (0..cells).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=5) } else { 0 }).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        let entries = w.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| {
            let (k, rest) = (i / (n1 * n2), i % (n1 * n2));
            ((k, rest / n2, rest % n2), q(x, total))
        });
        return InfoStructure::new(states(num_states), entries).expect("weights are normalized");
    }
}

/// A garbling of signals `0..n_in` into `0..n_out`.
pub fn garbling(rng: &mut impl Rng, n_in: usize, n_out: usize) -> Garbling {
    let rows = (0..n_in).map(|s| {
        let mut w: Vec<i64> = (0..n_out).map(|_| if rng.gen_bool(0.6) { rng.gen_range(1..=3) } else { 0 }).collect();
        if w.iter().all(|&x| x == 0) {
            w[rng.gen_range(0..n_out)] = 1;
        }
        let total: i64 = w.iter().sum();
        (s, w.into_iter().enumerate().filter(|(_, x)| *x > 0).map(move |(t, x)| (t, q(x, total))).collect::<Vec<_>>())
    });
    Garbling::new(rows.collect::<Vec<_>>()).expect("rows are normalized")
}

/// Block entries drawn from `{-1, -1 + 1/den, ..., 1}`.
pub fn payoff_structure(rng: &mut impl Rng, num_states: usize, size: usize, den: i64) -> PayoffStructure {
    let mut entries = Vec::new();
    for k in 0..num_states {
        for i in 0..size {
            for j in 0..size {
                let n: i64 = rng.gen_range(-den..=den);
                entries.push(((k, i, j), q(n, den)));
            }
        }
    }
    PayoffStructure::new(states(num_states), size, entries).expect("entries lie in [-1,1]")
}

/// A uniformly random distribution on `n` points with denominators up to `5n`.
pub fn distribution(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| q(x, total)).collect()
}
