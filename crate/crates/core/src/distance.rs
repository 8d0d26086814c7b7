//! Value-based distance between information structures, the informativeness
//! order, witness payoff structures and strategy transfer.
//!
//! The one-sided deviation from `u` to `v` is
//! `max_g (val(v,g) - val(u,g)) = min_{q1,q2} ‖q1.u - v.q2‖₁`,
//! computed as one LP whose dual yields a maximizing payoff structure.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::{lp_solve, LinearProgram, LpOutcome, Rational, Relation, Sense};
use crate::game_value::{bayesian_value, BehaviorStrategy};
use crate::structures::{
    garble_p1, garble_p2, l1_distance, same_states, Garbling, InfoStructure, PayoffStructure, Player, Signal,
};

/// Optimal garblings for one direction of the distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub delta: Rational,
    /// Applied to player 1's signal in the first structure.
    pub q1: Garbling,
    /// Applied to player 2's signal in the second structure.
    pub q2: Garbling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d: Rational,
    /// Deviation from `u` to `v`: the most player 1 can gain by moving from `u` to `v`.
    pub forward: Deviation,
    pub backward: Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "u>=v")]
    FirstDominates,
    #[serde(rename = "v>=u")]
    SecondDominates,
    #[serde(rename = "equivalent")]
    Equivalent,
    #[serde(rename = "incomparable")]
    Incomparable,
}

impl Order {
    fn from_deviations(uv: &Rational, vu: &Rational) -> Order {
        match (uv.is_zero(), vu.is_zero()) {
            (true, true) => Order::Equivalent,
            (true, false) => Order::FirstDominates,
            (false, true) => Order::SecondDominates,
            (false, false) => Order::Incomparable,
        }
    }
}

/// Outcome of comparing `u` and `v` in the informativeness order.
///
/// `witnesses` holds `[q1, q2]` with `q1.u = v.q2` when `u ⪰ v`, `[q1, q2]`
/// with `q1.v = u.q2` when `v ⪰ u`, and all four (`q1.u = v.q2`, `u.q3 = q4.v`)
/// when the two are equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCertificate {
    pub direction: Order,
    pub deviation_uv: Rational,
    pub deviation_vu: Rational,
    pub witnesses: Vec<Garbling>,
}

impl OrderCertificate {
    /// Re-checks the witness identities exactly.
    pub fn verify(&self, u: &InfoStructure, v: &InfoStructure) -> bool {
        let w = &self.witnesses;
        match self.direction {
            Order::FirstDominates => w.len() == 2 && garble_p1(&w[0], u) == garble_p2(v, &w[1]),
            Order::SecondDominates => w.len() == 2 && garble_p1(&w[0], v) == garble_p2(u, &w[1]),
            Order::Equivalent => {
                w.len() == 4 && garble_p1(&w[0], u) == garble_p2(v, &w[1]) && garble_p2(u, &w[2]) == garble_p1(&w[3], v)
            }
            Order::Incomparable => w.is_empty() && !self.deviation_uv.is_zero() && !self.deviation_vu.is_zero(),
        }
    }
}

struct DeviationLp {
    deviation: Deviation,
    /// Block entries read off the dual, before certification.
    payoff: PayoffStructure,
}

fn deviation_lp(u: &InfoStructure, v: &InfoStructure) -> Result<DeviationLp> {
    same_states(u, v)?;
    let nk = u.num_states();
    let cu = u.signals(Player::One);
    let cv = v.signals(Player::One);
    let du = u.signals(Player::Two);
    let dv = v.signals(Player::Two);
    let size = u.signal_bound().max(v.signal_bound());

    // Only targets in the other structure's support matter: mass sent elsewhere
    // can be merged into any supported target without increasing the L1 gap.
    let q1var = |c: usize, x: usize| c * cv.len() + x;
    let q2base = cu.len() * cv.len();
    let q2var = |d: usize, y: usize| q2base + d * du.len() + y;
    let tbase = q2base + dv.len() * du.len();

    let cu_i: BTreeMap<Signal, usize> = cu.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let cv_i: BTreeMap<Signal, usize> = cv.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let du_i: BTreeMap<Signal, usize> = du.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let dv_i: BTreeMap<Signal, usize> = dv.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    // diff(k,x,y) = Σ_c u(k,c,y) q1(c,x) - Σ_d v(k,x,d) q2(d,y), as sparse terms.
    let mut cells: BTreeMap<(usize, usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
    for ((k, c, y), p) in u.entries() {
        for x in 0..cv.len() {
            cells.entry((k, x, du_i[&y])).or_default().push((q1var(cu_i[&c], x), p.clone()));
        }
    }
    for ((k, x, d), p) in v.entries() {
        for y in 0..du.len() {
            cells.entry((k, cv_i[&x], y)).or_default().push((q2var(dv_i[&d], y), -p));
        }
    }

    let nvars = tbase + cells.len();
    let mut obj = vec![Rational::ZERO; nvars];
    for o in obj.iter_mut().skip(tbase) {
        *o = Rational::ONE;
    }
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    let mut cell_rows = Vec::with_capacity(cells.len());
    for (t, (key, terms)) in cells.iter().enumerate() {
        let tv = tbase + t;
        // t - diff >= 0 and t + diff >= 0
        let mut plus: Vec<(usize, Rational)> = terms.iter().map(|(j, a)| (*j, -a)).collect();
        plus.push((tv, Rational::ONE));
        let mut minus = terms.clone();
        minus.push((tv, Rational::ONE));
        let rp = lp.add_sparse_constraint(&plus, Relation::Ge, Rational::ZERO);
        let rm = lp.add_sparse_constraint(&minus, Relation::Ge, Rational::ZERO);
        cell_rows.push((*key, rp, rm));
    }
    for c in 0..cu.len() {
        let t: Vec<_> = (0..cv.len()).map(|x| (q1var(c, x), Rational::ONE)).collect();
        lp.add_sparse_constraint(&t, Relation::Eq, Rational::ONE);
    }
    for d in 0..dv.len() {
        let t: Vec<_> = (0..du.len()).map(|y| (q2var(d, y), Rational::ONE)).collect();
        lp.add_sparse_constraint(&t, Relation::Eq, Rational::ONE);
    }

    let sol = match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Certification(format!("deviation LP did not solve: {other:?}"))),
    };

    let q1 = Garbling::new(cu.iter().enumerate().map(|(c, &s)| {
        (s, (0..cv.len()).map(|x| (cv[x], sol.primal[q1var(c, x)].clone())).collect::<Vec<_>>())
    }))?;
    let q2 = Garbling::new(dv.iter().enumerate().map(|(d, &s)| {
        (s, (0..du.len()).map(|y| (du[y], sol.primal[q2var(d, y)].clone())).collect::<Vec<_>>())
    }))?;

    let in_cv: BTreeSet<Signal> = cv.iter().copied().collect();
    let in_du: BTreeSet<Signal> = du.iter().copied().collect();
    let mut entries = BTreeMap::new();
    for k in 0..nk {
        for i in 0..size {
            for j in 0..size {
                let g = match (in_cv.contains(&i), in_du.contains(&j)) {
                    (false, true) => -Rational::ONE,
                    (true, false) => Rational::ONE,
                    _ => Rational::ZERO,
                };
                entries.insert((k, i, j), g);
            }
        }
    }
    for ((k, x, y), rp, rm) in cell_rows {
        entries.insert((k, cv[x], du[y]), &sol.dual[rm] - &sol.dual[rp]);
    }
    let payoff = PayoffStructure::new(u.states().to_vec(), size, entries)
        .map_err(|e| Error::Certification(format!("dual payoff out of range: {e}")))?;

    let deviation = Deviation { delta: sol.value, q1, q2 };
    let achieved = l1_distance(&garble_p1(&deviation.q1, u), &garble_p2(v, &deviation.q2))?;
    if achieved != deviation.delta {
        return Err(Error::Certification(format!(
            "garblings achieve {achieved}, LP reports {}",
            deviation.delta
        )));
    }
    Ok(DeviationLp { deviation, payoff })
}

/// `max_g (val(v,g) - val(u,g))` with garblings attaining `min ‖q1.u - v.q2‖`.
pub fn one_sided_deviation(u: &InfoStructure, v: &InfoStructure) -> Result<Deviation> {
    Ok(deviation_lp(u, v)?.deviation)
}

pub fn value_distance(u: &InfoStructure, v: &InfoStructure) -> Result<DistanceReport> {
    let forward = one_sided_deviation(u, v)?;
    let backward = one_sided_deviation(v, u)?;
    let d = forward.delta.clone().max(backward.delta.clone());
    Ok(DistanceReport { d, forward, backward })
}

pub fn compare(u: &InfoStructure, v: &InfoStructure) -> Result<OrderCertificate> {
    let r = value_distance(u, v)?;
    let direction = Order::from_deviations(&r.forward.delta, &r.backward.delta);
    let witnesses = match direction {
        Order::FirstDominates => vec![r.forward.q1, r.forward.q2],
        Order::SecondDominates => vec![r.backward.q1, r.backward.q2],
        Order::Equivalent => vec![r.forward.q1, r.forward.q2, r.backward.q2, r.backward.q1],
        Order::Incomparable => vec![],
    };
    let cert = OrderCertificate { direction, deviation_uv: r.forward.delta, deviation_vu: r.backward.delta, witnesses };
    if !cert.verify(u, v) {
        return Err(Error::Certification("order witnesses fail their identities".into()));
    }
    Ok(cert)
}

/// A payoff structure `g` with `val(v,g) - val(u,g)` equal to the one-sided
/// deviation from `u` to `v`. Both values are recomputed before returning.
pub fn witness_payoff(u: &InfoStructure, v: &InfoStructure) -> Result<PayoffStructure> {
    let lp = deviation_lp(u, v)?;
    let gap = bayesian_value(v, &lp.payoff)?.value - bayesian_value(u, &lp.payoff)?.value;
    if gap != lp.deviation.delta {
        return Err(Error::Certification(format!(
            "witness gap {gap} differs from deviation {}",
            lp.deviation.delta
        )));
    }
    Ok(lp.payoff)
}

/// Player 1 strategy for the game on `u` built from `sigma` (a strategy for the
/// game on `v`) by first garbling the signal with `q1`. The result is defined on
/// the signals that have a row in `q1`.
pub fn transfer_strategy(sigma: &BehaviorStrategy, q1: &Garbling) -> BehaviorStrategy {
    let mut rows = BTreeMap::new();
    for &c in q1.rows().keys() {
        let mut mix: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c2, w) in q1.row(c) {
            for (a, p) in sigma.action(c2) {
                *mix.entry(a).or_insert(Rational::ZERO) += &w * &p;
            }
        }
        rows.insert(c, mix);
    }
    BehaviorStrategy { player: sigma.player, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlackwellReport {
    pub d0: Rational,
    pub direction: Order,
    /// `min_q ‖q.u0 - v0‖` and its minimizer.
    pub forward: Rational,
    pub forward_garbling: Garbling,
    /// `min_q ‖q.v0 - u0‖` and its minimizer.
    pub backward: Rational,
    pub backward_garbling: Garbling,
}

fn as_one_player(u: &InfoStructure) -> Result<InfoStructure> {
    if u.signals(Player::Two).len() != 1 {
        return Err(Error::structural("1-player structures need a constant player-2 signal"));
    }
    InfoStructure::new(u.states().to_vec(), u.entries().map(|((k, c, _), p)| ((k, c, 0), p.clone())))
}

/// Blackwell comparison of two 1-player experiments.
pub fn blackwell_compare_1p(u0: &InfoStructure, v0: &InfoStructure) -> Result<BlackwellReport> {
    let (u, v) = (as_one_player(u0)?, as_one_player(v0)?);
    let f = one_sided_deviation(&u, &v)?;
    let b = one_sided_deviation(&v, &u)?;
    Ok(BlackwellReport {
        d0: f.delta.clone().max(b.delta.clone()),
        direction: Order::from_deviations(&f.delta, &b.delta),
        forward: f.delta,
        forward_garbling: f.q1,
        backward: b.delta,
        backward_garbling: b.q1,
    })
}
