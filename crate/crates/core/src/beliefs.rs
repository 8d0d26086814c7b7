//! Finite-order belief hierarchies induced by an information structure.
//!
//! A player's order-1 belief is the conditional law of the state given the
//! signal; the order-n belief is the conditional law of the state together
//! with the opponent's order-(n-1) belief. Beliefs are stored as nested,
//! canonically sorted laws, so equal beliefs compare equal across structures
//! regardless of signal labels.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::structures::{InfoStructure, Player, Signal};

/// A belief of some order: a sorted law over (state, opponent belief of the previous order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Belief {
    pub order: usize,
    /// `(state, opponent belief or None at order 1, probability)`, sorted, no zero weights.
    pub law: Vec<(usize, Option<Arc<Belief>>, Rational)>,
}

impl Belief {
    /// Marginal law of the state.
    pub fn state_law(&self) -> BTreeMap<usize, Rational> {
        let mut m = BTreeMap::new();
        for (k, _, p) in &self.law {
            *m.entry(*k).or_insert(Rational::ZERO) += p;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePartition {
    pub order: usize,
    pub player: Player,
    /// Classes of signals sharing a belief, in the order of their beliefs.
    pub classes: Vec<Vec<Signal>>,
    pub fingerprints: Vec<Arc<Belief>>,
}

impl TypePartition {
    pub fn class_of(&self, s: Signal) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&s))
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &TypePartition) -> bool {
        self.classes.iter().all(|cls| {
            let owner = coarser.class_of(cls[0]);
            cls.iter().all(|&s| coarser.class_of(s) == owner)
        })
    }

    pub fn same_classes(&self, other: &TypePartition) -> bool {
        let norm = |p: &TypePartition| p.classes.iter().cloned().collect::<BTreeSet<_>>();
        norm(self) == norm(other)
    }
}

/// Joint law of the state and both players' order-n beliefs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyDistribution {
    pub order: usize,
    pub states: Vec<String>,
    /// `(state, player-1 belief, player-2 belief, probability)`, sorted.
    pub support: Vec<(usize, Arc<Belief>, Arc<Belief>, Rational)>,
}

/// Beliefs of every support signal of both players at orders `1..=n`.
struct Ladder {
    p1: Vec<BTreeMap<Signal, Arc<Belief>>>,
    p2: Vec<BTreeMap<Signal, Arc<Belief>>>,
}

fn intern(pool: &mut BTreeMap<Belief, Arc<Belief>>, b: Belief) -> Arc<Belief> {
    pool.entry(b.clone()).or_insert_with(|| Arc::new(b)).clone()
}

fn conditional(
    u: &InfoStructure,
    player: Player,
    opp: Option<&BTreeMap<Signal, Arc<Belief>>>,
    order: usize,
) -> BTreeMap<Signal, Arc<Belief>> {
    let mut raw: BTreeMap<Signal, BTreeMap<(usize, Option<Arc<Belief>>), Rational>> = BTreeMap::new();
    for ((k, c, d), p) in u.entries() {
        let (own, other) = if player == Player::One { (c, d) } else { (d, c) };
        let key = (k, opp.map(|m| m[&other].clone()));
        *raw.entry(own).or_default().entry(key).or_insert(Rational::ZERO) += p;
    }
    let mut pool = BTreeMap::new();
    raw.into_iter()
        .map(|(s, law)| {
            let mass: Rational = law.values().sum();
            let law = law.into_iter().map(|((k, o), p)| (k, o, p / &mass)).collect();
            (s, intern(&mut pool, Belief { order, law }))
        })
        .collect()
}

fn ladder(u: &InfoStructure, n: usize) -> Ladder {
    let mut l = Ladder { p1: Vec::with_capacity(n), p2: Vec::with_capacity(n) };
    for m in 1..=n {
        let (o1, o2) = if m == 1 { (None, None) } else { (Some(&l.p2[m - 2]), Some(&l.p1[m - 2])) };
        let b1 = conditional(u, Player::One, o1, m);
        let b2 = conditional(u, Player::Two, o2, m);
        l.p1.push(b1);
        l.p2.push(b2);
    }
    l
}

fn partition_from(beliefs: &BTreeMap<Signal, Arc<Belief>>, player: Player, order: usize) -> TypePartition {
    let mut groups: BTreeMap<Arc<Belief>, Vec<Signal>> = BTreeMap::new();
    for (s, b) in beliefs {
        groups.entry(b.clone()).or_default().push(*s);
    }
    let (fingerprints, classes) = groups.into_iter().unzip();
    TypePartition { order, player, classes, fingerprints }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("belief order >= 1", "order 0 requested"));
    }
    Ok(())
}

/// Partition of a player's signals by their order-n beliefs.
pub fn belief_partition(u: &InfoStructure, player: Player, n: usize) -> Result<TypePartition> {
    check_order(n)?;
    let l = ladder(u, n);
    let beliefs = if player == Player::One { &l.p1[n - 1] } else { &l.p2[n - 1] };
    Ok(partition_from(beliefs, player, n))
}

pub fn hierarchy_distribution(u: &InfoStructure, n: usize) -> Result<HierarchyDistribution> {
    check_order(n)?;
    let l = ladder(u, n);
    let mut joint: BTreeMap<(usize, Arc<Belief>, Arc<Belief>), Rational> = BTreeMap::new();
    for ((k, c, d), p) in u.entries() {
        let key = (k, l.p1[n - 1][&c].clone(), l.p2[n - 1][&d].clone());
        *joint.entry(key).or_insert(Rational::ZERO) += p;
    }
    Ok(HierarchyDistribution {
        order: n,
        states: u.states().to_vec(),
        support: joint.into_iter().map(|((k, a, b), p)| (k, a, b, p)).collect(),
    })
}

pub fn hierarchy_equal(u: &InfoStructure, v: &InfoStructure, n: usize) -> Result<bool> {
    Ok(hierarchy_distribution(u, n)? == hierarchy_distribution(v, n)?)
}

/// First order at which both players' partitions stop changing, searched up to `max_order`.
pub fn stabilization_order(u: &InfoStructure, max_order: usize) -> Option<usize> {
    let l = ladder(u, max_order.max(1) + 1);
    (1..=max_order).find(|&m| {
        partition_from(&l.p1[m - 1], Player::One, m).same_classes(&partition_from(&l.p1[m], Player::One, m + 1))
            && partition_from(&l.p2[m - 1], Player::Two, m).same_classes(&partition_from(&l.p2[m], Player::Two, m + 1))
    })
}

#[derive(Serialize)]
struct LawEntry<'a> {
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    opponent: Option<usize>,
    p: &'a Rational,
}

#[derive(Serialize)]
struct Node<'a> {
    id: usize,
    order: usize,
    law: Vec<LawEntry<'a>>,
}

#[derive(Serialize)]
struct SupportEntry<'a> {
    k: usize,
    type1: usize,
    type2: usize,
    p: &'a Rational,
}

#[derive(Serialize)]
struct Dump<'a> {
    order: usize,
    states: &'a [String],
    nodes: Vec<Node<'a>>,
    support: Vec<SupportEntry<'a>>,
}

impl Serialize for HierarchyDistribution {
    /// Beliefs are flattened into a node list numbered by (order, belief) so
    /// that shared sub-beliefs appear once and the dump is canonical.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut all: BTreeSet<(usize, &Belief)> = BTreeSet::new();
        fn collect<'a>(b: &'a Belief, all: &mut BTreeSet<(usize, &'a Belief)>) {
            if all.insert((b.order, b)) {
                for (_, o, _) in &b.law {
                    if let Some(o) = o {
                        collect(o, all);
                    }
                }
            }
        }
        for (_, a, b, _) in &self.support {
            collect(a, &mut all);
            collect(b, &mut all);
        }
        let ids: BTreeMap<&Belief, usize> = all.iter().enumerate().map(|(i, (_, b))| (*b, i)).collect();
        let nodes = all
            .iter()
            .map(|(_, b)| Node {
                id: ids[b],
                order: b.order,
                law: b
                    .law
                    .iter()
                    .map(|(k, o, p)| LawEntry { k: *k, opponent: o.as_ref().map(|o| ids[&**o]), p })
                    .collect(),
            })
            .collect();
        let support = self
            .support
            .iter()
            .map(|(k, a, b, p)| SupportEntry { k: *k, type1: ids[&**a], type2: ids[&**b], p })
            .collect();
        Dump { order: self.order, states: &self.states, nodes, support }.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{compare, Order};
    use crate::exactlp::q;
    use crate::fixtures;
    use crate::random;
    use proptest::prelude::*;

    #[test]
    fn complete_information_beliefs() {
        let p = belief_partition(&fixtures::u1(), Player::One, 1).unwrap();
        assert_eq!(p.classes, vec![vec![0], vec![1]]);
        let delta = |k| BTreeMap::from([(k, Rational::ONE)]);
        assert_eq!(p.fingerprints[0].state_law(), delta(0));
        assert_eq!(p.fingerprints[1].state_law(), delta(1));
    }

    #[test]
    fn same_first_order_different_second_order() {
        let u = fixtures::chain(1);
        let p1 = belief_partition(&u, Player::One, 1).unwrap();
        assert_eq!(p1.classes, vec![vec![0, 1]]);
        assert_eq!(p1.fingerprints[0].state_law(), BTreeMap::from([(0, q(1, 2)), (1, q(1, 2))]));
        let p2 = belief_partition(&u, Player::One, 2).unwrap();
        assert_eq!(p2.classes.len(), 2);
    }

    #[test]
    fn middle_signals_of_u3_agree_up_to_order_three() {
        let u3 = fixtures::chain(3);
        for n in 1..=3 {
            let p = belief_partition(&u3, Player::One, n).unwrap();
            assert_eq!(p.class_of(1), p.class_of(2), "order {n}");
        }
        let p = belief_partition(&u3, Player::One, 4).unwrap();
        assert_ne!(p.class_of(1), p.class_of(2));
    }

    #[test]
    fn relabeling_preserves_hierarchies() {
        for n in 1..=4 {
            assert!(hierarchy_equal(&fixtures::u2_prime(), &fixtures::u2_second(), n).unwrap());
            assert!(hierarchy_equal(&fixtures::u4(), &fixtures::u4(), n).unwrap());
        }
        assert!(!hierarchy_equal(&fixtures::u2(), &fixtures::u2_prime(), 1).unwrap());
    }

    #[test]
    fn dump_is_canonical() {
        let a = serde_json::to_string(&hierarchy_distribution(&fixtures::u2_prime(), 3).unwrap()).unwrap();
        let b = serde_json::to_string(&hierarchy_distribution(&fixtures::u2_second(), 3).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"nodes\""));
    }

    #[test]
    fn partitions_stabilize() {
        let n = stabilization_order(&fixtures::chain(3), 12).unwrap();
        let l = ladder(&fixtures::chain(3), n + 3);
        for m in n..n + 3 {
            assert!(partition_from(&l.p1[m - 1], Player::One, m).same_classes(&partition_from(&l.p1[m], Player::One, m + 1)));
        }
        assert!(belief_partition(&fixtures::u1(), Player::One, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn higher_orders_refine(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 3, 3);
            for player in [Player::One, Player::Two] {
                for n in 1..4 {
                    let fine = belief_partition(&u, player, n + 1).unwrap();
                    let coarse = belief_partition(&u, player, n).unwrap();
                    prop_assert!(fine.refines(&coarse));
                }
            }
            let dist = hierarchy_distribution(&u, 3).unwrap();
            prop_assert_eq!(dist.support.iter().map(|e| e.3.clone()).sum::<Rational>(), Rational::ONE);
        }

        #[test]
        fn equivalent_structures_share_hierarchies(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let u = random::info_structure(&mut rng, 2, 2, 3);
            let p1: BTreeMap<Signal, Signal> = [(0, 1), (1, 0)].into();
            let p2: BTreeMap<Signal, Signal> = [(0, 2), (1, 0), (2, 1)].into();
            let v = u.relabel(&p1, &p2).unwrap();
            prop_assert_eq!(compare(&u, &v).unwrap().direction, Order::Equivalent);
            for n in 1..5 {
                prop_assert!(hierarchy_equal(&u, &v, n).unwrap());
            }
        }
    }
}
