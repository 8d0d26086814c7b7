//! The information structures `u^l` and payoff structures `g^p` of the chain.

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::structures::{InfoStructure, PayoffStructure};

use super::chain::{ChainSpec, NicenessVerdict, NicenessStatus};
use super::{checked_pow, decode_tuple, encode_tuple, epsilon_limit};

fn binary_states() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

/// Every nice sequence of the given length, in lexicographic order.
pub(crate) fn nice_paths(chain: &ChainSpec, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len);
    fn walk(chain: &ChainSpec, len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if path.len() == len {
            out.push(path.clone());
            return;
        }
        let next: Vec<usize> = match path.last() {
            None => (1..=chain.n()).collect(),
            Some(&a) => chain.successors(a).to_vec(),
        };
        for b in next {
            path.push(b);
            walk(chain, len, path, out);
            path.pop();
        }
    }
    walk(chain, len, &mut path, &mut out);
    out
}

/// Number of positive entries of `u^l`: two states per nice sequence of length `2l`.
pub fn u_l_support_size(n: usize, l: usize) -> u128 {
    2u128.saturating_mul(n as u128).saturating_mul(checked_pow(n / 2, 2 * l - 1))
}

/// `u^l`: a nice sequence `(c_1, d_1, ..., c_l, d_l)` drawn from the chain,
/// player 1 sees the `c`'s, player 2 the `d`'s, and the state is 1 with
/// probability `c_1/(N+1)`. Signals are tuple ids.
pub fn build_u_l(chain: &ChainSpec, l: usize) -> Result<InfoStructure> {
    if l == 0 {
        return Err(Error::validation("l >= 1", "l = 0"));
    }
    let n = chain.n();
    let path_prob = Rational::new(1, n as i64) * Rational::new(2, n as i64).pow(2 * l as i32 - 1);
    let np1 = n as i64 + 1;
    let mut entries = Vec::new();
    for path in nice_paths(chain, 2 * l) {
        let cs: Vec<usize> = path.iter().step_by(2).copied().collect();
        let ds: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();
        let (c, d) = (encode_tuple(n, &cs), encode_tuple(n, &ds));
        let high = Rational::new(cs[0] as i64, np1);
        entries.push(((1, c, d), &path_prob * &high));
        entries.push(((0, c, d), &path_prob * (Rational::ONE - high)));
    }
    InfoStructure::new(binary_states(), entries)
}

/// Drops the last coordinate of both players' signal tuples.
pub fn prefix_marginal(u: &InfoStructure, n: usize) -> Result<InfoStructure> {
    InfoStructure::new(u.states().to_vec(), u.entries().map(|((k, c, d), p)| ((k, c / n, d / n), p.clone())))
}

/// Payoff of reporting `c1` as first signal in state `k`, centred so that
/// the reporting problem is worth 0.
pub fn g0(n: usize, k: usize, c1: usize) -> Rational {
    let np1 = n as i64 + 1;
    let gap = Rational::from_integer(k as i64) - Rational::new(c1 as i64, np1);
    Rational::new(n as i64 + 2, 6 * np1) - &gap * &gap
}

/// The reporting problem for the first signal alone: player 1 sees `c_1`
/// (id `c_1 - 1`) and picks a report; player 2 has a single signal.
pub fn decision_problem(n: usize) -> Result<(InfoStructure, PayoffStructure)> {
    let np1 = n as i64 + 1;
    let mut u0 = Vec::new();
    for c in 1..=n {
        let high = Rational::new(c as i64, np1);
        let w = Rational::new(1, n as i64);
        u0.push(((1, c - 1), &w * &high));
        u0.push(((0, c - 1), w * (Rational::ONE - high)));
    }
    let mut g = Vec::new();
    for k in 0..2 {
        for i in 0..n {
            for j in 0..n {
                g.push(((k, i, j), g0(n, k, i + 1)));
            }
        }
    }
    Ok((InfoStructure::one_player(binary_states(), u0)?, PayoffStructure::new(binary_states(), n, g)?))
}

fn interleave(cs: &[usize], ds: &[usize], len: usize) -> Vec<usize> {
    (0..len).map(|t| if t % 2 == 0 { cs[t / 2] } else { ds[t / 2] }).collect()
}

pub(crate) fn bonus(verdict: NicenessVerdict, epsilon: &Rational) -> Rational {
    match verdict.status {
        NicenessStatus::Nice => epsilon.clone(),
        NicenessStatus::NotNicePlayer2 => Rational::from_integer(5) * epsilon,
        NicenessStatus::NotNicePlayer1 => Rational::from_integer(-5) * epsilon,
    }
}

/// `g^p`: player 1 reports `c' ∈ C^p` (action id of the tuple), player 2
/// reports `d' ∈ D^(p-1)`. The block has size `N^p`; player-2 actions past
/// `N^(p-1)` repeat action 0.
pub fn build_g_p(chain: &ChainSpec, p: usize, epsilon: &Rational) -> Result<PayoffStructure> {
    let n = chain.n();
    if p == 0 {
        return Err(Error::validation("p >= 1", "p = 0"));
    }
    if !epsilon.is_positive() || *epsilon >= epsilon_limit(n) {
        return Err(Error::structural(format!("epsilon {epsilon} outside (0, {})", epsilon_limit(n))));
    }
    let size = checked_pow(n, p);
    let cols = checked_pow(n, p - 1) as usize;
    if size > 1 << 12 {
        return Err(Error::BudgetExceeded { what: format!("payoff block N^p for p = {p}"), needed: size, limit: 1 << 12 });
    }
    let size = size as usize;
    let cap = Rational::new(5, 6) + Rational::from_integer(5) * epsilon;
    let mut entries = Vec::with_capacity(2 * size * size);
    for i in 0..size {
        let cs = decode_tuple(n, p, i);
        let row: Vec<(Rational, Rational)> = (0..cols)
            .map(|j| {
                let ds = decode_tuple(n, p - 1, j);
                let h = bonus(NicenessVerdict::from_break(chain.first_break(&interleave(&cs, &ds, 2 * p - 1))), epsilon);
                (g0(n, 0, cs[0]) + &h, g0(n, 1, cs[0]) + h)
            })
            .collect();
        for j in 0..size {
            let (v0, v1) = &row[if j < cols { j } else { 0 }];
            if v0.abs() > cap || v1.abs() > cap {
                return Err(Error::Certification(format!("payoff at ({i},{j}) exceeds 5/6 + 5 epsilon")));
            }
            entries.push(((0, i, j), v0.clone()));
            entries.push(((1, i, j), v1.clone()));
        }
    }
    PayoffStructure::new(binary_states(), size, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{default_epsilon, sample_chain};
    use crate::exactlp::q;
    use crate::game_value::decision_value;
    use crate::structures::Player;
    use std::collections::BTreeMap;

    #[test]
    fn support_of_first_structure() {
        for seed in 0..5 {
            let c = sample_chain(4, seed).unwrap();
            let u = build_u_l(&c, 1).unwrap();
            // 8 nice pairs, both states positive on each
            assert_eq!(u.support_len(), 16);
            assert_eq!(u.support_len() as u128, u_l_support_size(4, 1));
            assert_eq!(u.state_marginal(), vec![q(1, 2), q(1, 2)]);
            let u2 = build_u_l(&c, 2).unwrap();
            assert_eq!(u2.support_len() as u128, u_l_support_size(4, 2));
        }
    }

    #[test]
    fn truncation_recovers_shorter_structure() {
        for seed in 0..4 {
            let c = sample_chain(4, seed).unwrap();
            let u1 = build_u_l(&c, 1).unwrap();
            let u2 = build_u_l(&c, 2).unwrap();
            let u3 = build_u_l(&c, 3).unwrap();
            assert_eq!(prefix_marginal(&u2, 4).unwrap(), u1);
            assert_eq!(prefix_marginal(&u3, 4).unwrap(), u2);
        }
    }

    #[test]
    fn first_signal_is_uniform() {
        let c = sample_chain(6, 2).unwrap();
        let u = build_u_l(&c, 2).unwrap();
        let mut first: BTreeMap<usize, Rational> = BTreeMap::new();
        for ((_, s), p) in u.marginal(Player::One) {
            *first.entry(s / 6).or_insert(Rational::ZERO) += p;
        }
        assert_eq!(first.len(), 6);
        assert!(first.values().all(|p| *p == q(1, 6)));
    }

    #[test]
    fn reporting_problem_is_worth_zero() {
        assert_eq!(g0(4, 1, 2), q(-4, 25));
        for n in [2, 4, 6, 8] {
            let (u0, g) = decision_problem(n).unwrap();
            assert_eq!(decision_value(&u0, &g).unwrap(), Rational::ZERO);
            // misreporting costs at least 1/(N+1)^2
            let np1 = (n as i64 + 1) * (n as i64 + 1);
            for c in 1..=n {
                let w = q(c as i64, n as i64 + 1);
                let payoff = |r: usize| &w * g0(n, 1, r) + (Rational::ONE - &w) * g0(n, 0, r);
                for r in (1..=n).filter(|&r| r != c) {
                    assert!(payoff(c) - payoff(r) >= q(1, np1));
                }
            }
        }
    }

    #[test]
    fn payoffs_follow_niceness() {
        let c = sample_chain(4, 5).unwrap();
        let eps = default_epsilon(4);
        let g = build_g_p(&c, 2, &eps).unwrap();
        assert_eq!(g.size(), 16);
        for i in 0..16 {
            let cs = decode_tuple(4, 2, i);
            for j in 0..16 {
                let d = if j < 4 { j + 1 } else { 1 };
                let h = g.get(1, i, j) - g0(4, 1, cs[0]);
                let expect = if !c.x(cs[0], d) {
                    q(5, 1) * &eps
                } else if !c.x(d, cs[1]) {
                    q(-5, 1) * &eps
                } else {
                    eps.clone()
                };
                assert_eq!(h, expect);
                assert_eq!(g.get(0, i, j) - g0(4, 0, cs[0]), expect);
            }
        }
        let g1 = build_g_p(&c, 1, &eps).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| g1.get(1, i, j) == g0(4, 1, i + 1) + &eps)));
    }

    #[test]
    fn epsilon_range_is_enforced() {
        let c = sample_chain(4, 0).unwrap();
        assert!(build_g_p(&c, 1, &Rational::ZERO).is_err());
        assert!(build_g_p(&c, 1, &q(1, 250)).is_err());
        assert!(build_g_p(&c, 1, &q(1, 251)).is_ok());
        assert!(build_u_l(&c, 0).is_err());
    }
}
