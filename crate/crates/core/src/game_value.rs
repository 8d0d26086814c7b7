//! Values of the zero-sum Bayesian game played on an information structure.
//!
//! Player 1 maximizes. Actions are restricted to the payoff block `0..L`:
//! leaving the block alone costs the deviator the full unit payoff, so the
//! restricted game has the same value (see `block_restriction_is_harmless`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::{lp_solve, Bound, LinearProgram, LpOutcome, Rational, Relation, Sense};
use crate::structures::{Garbling, InfoStructure, PayoffStructure, Player, Signal};

/// A mixed action for each signal a player may receive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorStrategy {
    pub player: Player,
    /// signal -> (action -> probability); signals without a row play action 0.
    pub rows: BTreeMap<Signal, BTreeMap<usize, Rational>>,
}

impl BehaviorStrategy {
    pub fn new(player: Player, rows: BTreeMap<Signal, BTreeMap<usize, Rational>>) -> Result<Self> {
        for (s, row) in &rows {
            if row.values().any(Rational::is_negative) {
                return Err(Error::validation("mixed actions are distributions", format!("negative weight at signal {s}")));
            }
            let total: Rational = row.values().sum();
            if total != Rational::ONE {
                return Err(Error::validation("mixed actions are distributions", format!("signal {s} sums to {total}")));
            }
        }
        let rows = rows
            .into_iter()
            .map(|(s, mut r)| {
                r.retain(|_, p| !p.is_zero());
                (s, r)
            })
            .collect();
        Ok(BehaviorStrategy { player, rows })
    }

    /// A pure strategy given as `signal -> action`.
    pub fn pure<I: IntoIterator<Item = (Signal, usize)>>(player: Player, map: I) -> Self {
        let rows = map.into_iter().map(|(s, a)| (s, BTreeMap::from([(a, Rational::ONE)]))).collect();
        BehaviorStrategy { player, rows }
    }

    /// Reads a garbling as a strategy: the garbled signal is the action.
    pub fn from_garbling(player: Player, q: &Garbling, signals: &[Signal]) -> Self {
        let rows = signals.iter().map(|&s| (s, q.row(s).into_iter().collect())).collect();
        BehaviorStrategy { player, rows }
    }

    pub fn to_garbling(&self) -> Garbling {
        Garbling::new(self.rows.iter().map(|(s, r)| (*s, r.iter().map(|(a, p)| (*a, p.clone())).collect::<Vec<_>>())))
            .expect("strategy rows are distributions")
    }

    pub fn action(&self, s: Signal) -> Vec<(usize, Rational)> {
        match self.rows.get(&s) {
            Some(r) => r.iter().map(|(a, p)| (*a, p.clone())).collect(),
            None => vec![(0, Rational::ONE)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSolution {
    pub value: Rational,
    pub sigma: BehaviorStrategy,
    pub tau: BehaviorStrategy,
}

fn check_states(u: &InfoStructure, g: &PayoffStructure) -> Result<()> {
    if u.states() != g.states() {
        return Err(Error::structural(format!(
            "information structure states {:?} differ from payoff states {:?}",
            u.states(),
            g.states()
        )));
    }
    Ok(())
}

/// One representative per class of player-1 actions (rows) or player-2 actions (columns) with identical payoffs.
fn distinct_actions(g: &PayoffStructure, rows: bool) -> Vec<usize> {
    let l = g.size();
    let mut reps: Vec<usize> = Vec::new();
    for a in 0..l {
        let same = |b: usize| {
            (0..g.num_states()).all(|k| {
                (0..l).all(|o| if rows { g.block_ref(k, a, o) == g.block_ref(k, b, o) } else { g.block_ref(k, o, a) == g.block_ref(k, o, b) })
            })
        };
        if !reps.iter().any(|&b| same(b)) {
            reps.push(a);
        }
    }
    reps
}

/// Exact value of the game with optimal behavior strategies for both players.
pub fn bayesian_value(u: &InfoStructure, g: &PayoffStructure) -> Result<GameSolution> {
    check_states(u, g)?;
    let cs = u.signals(Player::One);
    let ds = u.signals(Player::Two);
    let acts1 = distinct_actions(g, true);
    let acts2 = distinct_actions(g, false);
    let ci: BTreeMap<Signal, usize> = cs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let di: BTreeMap<Signal, usize> = ds.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let (n1, n2) = (acts1.len(), acts2.len());
    let xvar = |c: usize, a: usize| c * n1 + a;
    let tvar = |d: usize| cs.len() * n1 + d;
    let nvars = cs.len() * n1 + ds.len();

    // coef[d][j][c*n1+a] = Σ_k u(k,c,d) g(k,a,j)
    let mut coef = vec![vec![BTreeMap::<usize, Rational>::new(); n2]; ds.len()];
    for ((k, c, d), p) in u.entries() {
        let (c, d) = (ci[&c], di[&d]);
        for (jj, &j) in acts2.iter().enumerate() {
            for (aa, &a) in acts1.iter().enumerate() {
                let gv = g.block_ref(k, a, j);
                if !gv.is_zero() {
                    *coef[d][jj].entry(xvar(c, aa)).or_insert(Rational::ZERO) += p * gv;
                }
            }
        }
    }

    let mut obj = vec![Rational::ZERO; nvars];
    for d in 0..ds.len() {
        obj[tvar(d)] = Rational::ONE;
    }
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for d in 0..ds.len() {
        lp.set_bound(tvar(d), Bound::free());
    }
    let mut row_of = Vec::new();
    for (d, per_j) in coef.iter().enumerate() {
        for (jj, terms) in per_j.iter().enumerate() {
            let mut t: Vec<(usize, Rational)> = terms.iter().map(|(v, a)| (*v, -a)).collect();
            t.push((tvar(d), Rational::ONE));
            row_of.push((d, jj, lp.add_sparse_constraint(&t, Relation::Le, Rational::ZERO)));
        }
    }
    for c in 0..cs.len() {
        let t: Vec<(usize, Rational)> = (0..n1).map(|a| (xvar(c, a), Rational::ONE)).collect();
        lp.add_sparse_constraint(&t, Relation::Eq, Rational::ONE);
    }

    let sol = match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Certification(format!("game LP did not solve: {other:?}"))),
    };

    let mut sigma_rows = BTreeMap::new();
    for (c, &sig) in cs.iter().enumerate() {
        let row: BTreeMap<usize, Rational> = (0..n1)
            .filter(|&a| !sol.primal[xvar(c, a)].is_zero())
            .map(|a| (acts1[a], sol.primal[xvar(c, a)].clone()))
            .collect();
        sigma_rows.insert(sig, row);
    }
    let mut tau_rows: BTreeMap<Signal, BTreeMap<usize, Rational>> = ds.iter().map(|&d| (d, BTreeMap::new())).collect();
    for (d, jj, r) in row_of {
        let y = &sol.dual[r];
        if !y.is_zero() {
            tau_rows.get_mut(&ds[d]).expect("signal present").insert(acts2[jj], y.clone());
        }
    }
    let out = GameSolution {
        value: sol.value,
        sigma: BehaviorStrategy::new(Player::One, sigma_rows)?,
        tau: BehaviorStrategy::new(Player::Two, tau_rows)
            .map_err(|e| Error::Certification(format!("dual does not yield a strategy: {e}")))?,
    };
    let lo = best_response_value(u, g, &out.sigma)?;
    let hi = best_response_value(u, g, &out.tau)?;
    if lo != out.value || hi != out.value {
        return Err(Error::Certification(format!(
            "strategies guarantee [{lo}, {hi}] but the LP value is {}",
            out.value
        )));
    }
    Ok(out)
}

/// Payoff the opponent concedes when best-replying to `fixed` with block actions.
pub fn best_response_value(u: &InfoStructure, g: &PayoffStructure, fixed: &BehaviorStrategy) -> Result<Rational> {
    check_states(u, g)?;
    let l = g.size();
    // For each opponent signal, accumulate the payoff of each reply.
    let mut per_signal: BTreeMap<Signal, Vec<Rational>> = BTreeMap::new();
    for ((k, c, d), p) in u.entries() {
        let (own, opp) = if fixed.player == Player::One { (c, d) } else { (d, c) };
        let replies = per_signal.entry(opp).or_insert_with(|| vec![Rational::ZERO; l]);
        for (a, w) in fixed.action(own) {
            let pw = p * &w;
            for (r, acc) in replies.iter_mut().enumerate() {
                let gv = if fixed.player == Player::One { g.get(k, a, r) } else { g.get(k, r, a) };
                if !gv.is_zero() {
                    *acc += &pw * &gv;
                }
            }
        }
    }
    let pick = |v: Vec<Rational>| {
        let it = v.into_iter();
        if fixed.player == Player::One {
            it.min()
        } else {
            it.max()
        }
        .expect("L >= 1")
    };
    Ok(per_signal.into_values().map(pick).sum())
}

/// Expected payoff of a strategy pair.
pub fn expected_payoff(
    u: &InfoStructure,
    g: &PayoffStructure,
    sigma: &BehaviorStrategy,
    tau: &BehaviorStrategy,
) -> Result<Rational> {
    check_states(u, g)?;
    let mut total = Rational::ZERO;
    for ((k, c, d), p) in u.entries() {
        for (i, x) in sigma.action(c) {
            for (j, y) in tau.action(d) {
                let gv = g.get(k, i, j);
                if !gv.is_zero() {
                    total += p * &x * &y * gv;
                }
            }
        }
    }
    Ok(total)
}

/// Value of a 1-player decision problem: `u0` must give player 2 a single signal,
/// and the payoff of action `i` in state `k` is read from `g0(k, i, 0)`.
pub fn decision_value(u0: &InfoStructure, g0: &PayoffStructure) -> Result<Rational> {
    check_states(u0, g0)?;
    if u0.signals(Player::Two).len() != 1 {
        return Err(Error::structural("decision problems need a constant player-2 signal"));
    }
    let mut per_signal: BTreeMap<Signal, Vec<Rational>> = BTreeMap::new();
    for ((k, c, _), p) in u0.entries() {
        let acc = per_signal.entry(c).or_insert_with(|| vec![Rational::ZERO; g0.size()]);
        for (i, a) in acc.iter_mut().enumerate() {
            *a += p * g0.block_ref(k, i, 0);
        }
    }
    Ok(per_signal.into_values().map(|v| v.into_iter().max().expect("L >= 1")).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{matrix_game_value, q};
    use crate::fixtures;
    use crate::random;
    use crate::structures::{garble_p1, garble_p2, l1_distance, scalar_product};
    use proptest::prelude::*;

    #[test]
    fn values_on_named_structures() {
        let g = fixtures::g_ex2();
        assert_eq!(bayesian_value(&fixtures::u1(), &g).unwrap().value, Rational::ZERO);
        assert_eq!(bayesian_value(&fixtures::u2(), &g).unwrap().value, q(1, 5));
        assert_eq!(bayesian_value(&fixtures::chain(3), &g).unwrap().value, q(1, 10));
    }

    #[test]
    fn bottom_then_top_is_optimal_on_u2() {
        let sigma = BehaviorStrategy::pure(Player::One, [(0, 1), (1, 0)]);
        assert_eq!(best_response_value(&fixtures::u2(), &fixtures::g_ex2(), &sigma).unwrap(), q(1, 5));
    }

    #[test]
    fn left_right_is_optimal_on_u4() {
        let g = fixtures::g_ex4();
        let tau = BehaviorStrategy::pure(Player::Two, [(0, 0), (1, 1)]);
        assert_eq!(best_response_value(&fixtures::u4(), &g, &tau).unwrap(), Rational::ZERO);
        assert_eq!(bayesian_value(&fixtures::u4(), &g).unwrap().value, Rational::ZERO);
    }

    #[test]
    fn optimal_strategies_certify_the_value() {
        for (_, u) in fixtures::all_named() {
            for g in [fixtures::g_ex2(), fixtures::g_ex4(), fixtures::g_ex4_prime()] {
                let s = bayesian_value(&u, &g).unwrap();
                assert_eq!(best_response_value(&u, &g, &s.sigma).unwrap(), s.value);
                assert_eq!(best_response_value(&u, &g, &s.tau).unwrap(), s.value);
                assert_eq!(expected_payoff(&u, &g, &s.sigma, &s.tau).unwrap(), s.value);
            }
        }
    }

    #[test]
    fn state_mismatch_is_structural() {
        let g = fixtures::guess_state(3);
        assert!(matches!(bayesian_value(&fixtures::u1(), &g), Err(Error::Structural(_))));
    }

    #[test]
    fn duplicate_actions_do_not_change_the_value() {
        let g = fixtures::g_ex2();
        let doubled = g.extend(3).unwrap();
        let mut entries = Vec::new();
        for k in 0..2 {
            for i in 0..3 {
                for j in 0..3 {
                    // action 2 copies action 0 for both players
                    let (a, b) = (if i == 2 { 0 } else { i }, if j == 2 { 0 } else { j });
                    entries.push(((k, i, j), g.get(k, a, b)));
                }
            }
        }
        let dup = PayoffStructure::new(g.states().to_vec(), 3, entries).unwrap();
        assert_ne!(dup, doubled);
        assert_eq!(bayesian_value(&fixtures::u2(), &dup).unwrap().value, q(1, 5));
    }

    #[test]
    fn decision_value_without_information() {
        let st = vec!["a".to_string(), "b".to_string()];
        let u0 = InfoStructure::one_player(st.clone(), [((0, 0), q(1, 3)), ((1, 0), q(2, 3))]).unwrap();
        let g0 = PayoffStructure::new(st, 2, [((0, 0, 0), q(1, 1)), ((1, 0, 0), q(-1, 1)), ((0, 1, 0), q(-1, 2)), ((1, 1, 0), q(1, 2))]).unwrap();
        // action 0: 1/3 - 2/3 = -1/3; action 1: -1/6 + 1/3 = 1/6
        assert_eq!(decision_value(&u0, &g0).unwrap(), q(1, 6));
        assert!(decision_value(&fixtures::u1(), &fixtures::g_ex2()).is_err());
    }

    #[test]
    fn block_restriction_is_harmless() {
        for (_, u) in fixtures::all_named() {
            let g = fixtures::g_ex2();
            let v = bayesian_value(&u, &g).unwrap().value;
            assert_eq!(bayesian_value(&u, &g.extend(3).unwrap()).unwrap().value, v);
        }
    }

    /// Pure strategies are maps from the signal list to actions.
    fn normal_form(u: &InfoStructure, g: &PayoffStructure) -> Vec<Vec<Rational>> {
        let l = g.size();
        let maps = |signals: &[Signal]| -> Vec<BTreeMap<Signal, usize>> {
            let mut out = vec![BTreeMap::new()];
            for &s in signals {
                out = out
                    .into_iter()
                    .flat_map(|m| (0..l).map(move |a| {
                        let mut m2 = m.clone();
                        m2.insert(s, a);
                        m2
                    }))
                    .collect();
            }
            out
        };
        let rows = maps(&u.signals(Player::One));
        let cols = maps(&u.signals(Player::Two));
        rows.iter()
            .map(|r| {
                cols.iter()
                    .map(|c| u.entries().map(|((k, a, b), p)| p * &g.get(k, r[&a], c[&b])).sum())
                    .collect()
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_expanded_normal_form(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 2, 2);
            let g = random::payoff_structure(&mut rng, 2, 2, 3);
            let v = bayesian_value(&u, &g).unwrap().value;
            prop_assert_eq!(v, matrix_game_value(&normal_form(&u, &g)).unwrap().value);
        }

        #[test]
        fn duality_sandwich(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 3, 3);
            let g = random::payoff_structure(&mut rng, 2, 3, 4);
            let s = bayesian_value(&u, &g).unwrap();
            let hi = scalar_product(&g, &garble_p1(&s.sigma.to_garbling(), &u)).unwrap();
            let lo = scalar_product(&g, &garble_p2(&u, &s.tau.to_garbling())).unwrap();
            prop_assert!(lo <= s.value && s.value <= hi);
        }

        #[test]
        fn scalar_product_of_garbled_structure_is_payoff(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 3, 3);
            let g = random::payoff_structure(&mut rng, 2, 3, 4);
            let q1 = random::garbling(&mut rng, 3, 3);
            let q2 = random::garbling(&mut rng, 3, 3);
            let both = garble_p2(&garble_p1(&q1, &u), &q2);
            let sigma = BehaviorStrategy::from_garbling(Player::One, &q1, &u.signals(Player::One));
            let tau = BehaviorStrategy::from_garbling(Player::Two, &q2, &u.signals(Player::Two));
            prop_assert_eq!(scalar_product(&g, &both).unwrap(), expected_payoff(&u, &g, &sigma, &tau).unwrap());
        }

        #[test]
        fn value_is_lipschitz_in_l1(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 2, 3);
            let v = random::info_structure(&mut rng, 2, 3, 2);
            let g = random::payoff_structure(&mut rng, 2, 3, 4);
            let gap = (bayesian_value(&u, &g).unwrap().value - bayesian_value(&v, &g).unwrap().value).abs();
            prop_assert!(gap <= l1_distance(&u, &v).unwrap());
        }

        #[test]
        fn garbling_monotonicity(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 3, 3);
            let qa = random::garbling(&mut rng, 3, 3);
            let g = random::payoff_structure(&mut rng, 2, 3, 4);
            let v = bayesian_value(&u, &g).unwrap().value;
            prop_assert!(bayesian_value(&garble_p1(&qa, &u), &g).unwrap().value <= v);
            prop_assert!(bayesian_value(&garble_p2(&u, &qa), &g).unwrap().value >= v);
        }
    }
}
