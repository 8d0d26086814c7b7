//! Information structures, payoff structures and garblings.
//!
//! Signals are dense non-negative ids. Probabilities are exact and only
//! positive entries are stored, so two structures are equal as values iff they
//! describe the same distribution with the same labels. Use [`canonicalize`]
//! to compare up to relabeling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::Rational;

pub type Signal = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A finite-support probability on states × player-1 signals × player-2 signals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "InfoStructureDoc", into = "InfoStructureDoc")]
pub struct InfoStructure {
    states: Vec<String>,
    entries: BTreeMap<(usize, Signal, Signal), Rational>,
}

fn check_states(states: &[String]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::validation("nonempty state set", "no states given"));
    }
    let distinct: BTreeSet<&String> = states.iter().collect();
    if distinct.len() != states.len() {
        return Err(Error::validation("distinct state labels", format!("{states:?}")));
    }
    Ok(())
}

impl InfoStructure {
    /// Builds a structure from `(k, c, d)` weights. Repeated keys accumulate and zero weights are dropped.
    pub fn new<I>(states: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, Signal, Signal), Rational)>,
    {
        check_states(&states)?;
        let mut map: BTreeMap<(usize, Signal, Signal), Rational> = BTreeMap::new();
        for ((k, c, d), p) in entries {
            if k >= states.len() {
                return Err(Error::structural(format!("state index {k} out of range for {} states", states.len())));
            }
            if p.is_negative() {
                return Err(Error::validation("nonnegative probabilities", format!("entry ({k},{c},{d}) = {p}")));
            }
            *map.entry((k, c, d)).or_insert(Rational::ZERO) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let total: Rational = map.values().sum();
        if total != Rational::ONE {
            return Err(Error::validation("probabilities sum to 1", format!("total is {total}")));
        }
        Ok(InfoStructure { states, entries: map })
    }

    /// A 1-player structure over `(k, c)` weights; player 2's signal is constantly 0.
    pub fn one_player<I>(states: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, Signal), Rational)>,
    {
        Self::new(states, entries.into_iter().map(|((k, c), p)| ((k, c, 0), p)))
    }

    // Callers guarantee the invariants (used by garbling, which preserves mass).
    fn from_parts(states: Vec<String>, mut entries: BTreeMap<(usize, Signal, Signal), Rational>) -> Self {
        entries.retain(|_, p| !p.is_zero());
        InfoStructure { states, entries }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, Signal, Signal), &Rational)> + '_ {
        self.entries.iter().map(|(k, p)| (*k, p))
    }

    pub fn prob(&self, k: usize, c: Signal, d: Signal) -> Rational {
        self.entries.get(&(k, c, d)).cloned().unwrap_or(Rational::ZERO)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Signals a player receives with positive probability, ascending.
    pub fn signals(&self, player: Player) -> Vec<Signal> {
        let set: BTreeSet<Signal> = self
            .entries
            .keys()
            .map(|&(_, c, d)| if player == Player::One { c } else { d })
            .collect();
        set.into_iter().collect()
    }

    /// One more than the largest signal id used by either player.
    pub fn signal_bound(&self) -> usize {
        self.entries.keys().map(|&(_, c, d)| c.max(d) + 1).max().unwrap_or(1)
    }

    pub fn state_marginal(&self) -> Vec<Rational> {
        let mut m = vec![Rational::ZERO; self.states.len()];
        for (&(k, _, _), p) in &self.entries {
            m[k] += p;
        }
        m
    }

    /// Marginal on states × the given player's signals.
    pub fn marginal(&self, player: Player) -> BTreeMap<(usize, Signal), Rational> {
        let mut m = BTreeMap::new();
        for (&(k, c, d), p) in &self.entries {
            let s = if player == Player::One { c } else { d };
            *m.entry((k, s)).or_insert(Rational::ZERO) += p;
        }
        m
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mixture(&self, other: &InfoStructure, alpha: &Rational) -> Result<InfoStructure> {
        same_states(self, other)?;
        if alpha.is_negative() || alpha > &Rational::ONE {
            return Err(Error::validation("mixture weight in [0,1]", alpha.to_string()));
        }
        let beta = Rational::ONE - alpha;
        let mut map = BTreeMap::new();
        for (key, p) in &self.entries {
            *map.entry(*key).or_insert(Rational::ZERO) += alpha * p;
        }
        for (key, p) in &other.entries {
            *map.entry(*key).or_insert(Rational::ZERO) += &beta * p;
        }
        Ok(InfoStructure::from_parts(self.states.clone(), map))
    }

    /// Renames signals with injective maps; unmapped signals keep their id.
    pub fn relabel(&self, p1: &BTreeMap<Signal, Signal>, p2: &BTreeMap<Signal, Signal>) -> Result<InfoStructure> {
        let apply = |m: &BTreeMap<Signal, Signal>, s: Signal| *m.get(&s).unwrap_or(&s);
        for (player, m) in [(Player::One, p1), (Player::Two, p2)] {
            let used = self.signals(player);
            let images: BTreeSet<Signal> = used.iter().map(|&s| apply(m, s)).collect();
            if images.len() != used.len() {
                return Err(Error::structural(format!("relabeling of player {player} signals is not injective")));
            }
        }
        let map = self.entries.iter().map(|(&(k, c, d), p)| ((k, apply(p1, c), apply(p2, d)), p.clone())).collect();
        Ok(InfoStructure::from_parts(self.states.clone(), map))
    }
}

pub fn same_states(u: &InfoStructure, v: &InfoStructure) -> Result<()> {
    if u.states != v.states {
        return Err(Error::structural(format!("state sets differ: {:?} vs {:?}", u.states, v.states)));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    k: usize,
    c: Signal,
    d: Signal,
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct InfoStructureDoc {
    states: Vec<String>,
    entries: Vec<EntryDoc>,
}

impl TryFrom<InfoStructureDoc> for InfoStructure {
    type Error = Error;
    fn try_from(doc: InfoStructureDoc) -> Result<Self> {
        InfoStructure::new(doc.states, doc.entries.into_iter().map(|e| ((e.k, e.c, e.d), e.p)))
    }
}

impl From<InfoStructure> for InfoStructureDoc {
    fn from(u: InfoStructure) -> Self {
        InfoStructureDoc {
            states: u.states,
            entries: u.entries.into_iter().map(|((k, c, d), p)| EntryDoc { k, c, d, p }).collect(),
        }
    }
}

/// Payoffs on an `L × L` block per state; outside the block the payoff is
/// −1 when only player 1 leaves it, +1 when only player 2 does, and 0 when both do.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PayoffDoc", into = "PayoffDoc")]
pub struct PayoffStructure {
    states: Vec<String>,
    size: usize,
    block: Vec<Rational>,
}

impl PayoffStructure {
    pub fn new<I>(states: Vec<String>, size: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), Rational)>,
    {
        check_states(&states)?;
        if size == 0 {
            return Err(Error::validation("size L >= 1", "L = 0"));
        }
        let mut block = vec![Rational::ZERO; states.len() * size * size];
        for ((k, i, j), g) in entries {
            if k >= states.len() || i >= size || j >= size {
                return Err(Error::structural(format!("payoff index ({k},{i},{j}) outside the {size}x{size} block")));
            }
            if g > Rational::ONE || g < -Rational::ONE {
                return Err(Error::validation("payoffs in [-1,1]", format!("g({k},{i},{j}) = {g}")));
            }
            block[(k * size + i) * size + j] = g;
        }
        Ok(PayoffStructure { states, size, block })
    }

    /// `blocks[k][i][j]`; every state must carry a full `L × L` matrix.
    pub fn from_blocks(states: Vec<String>, blocks: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let size = blocks.first().map_or(0, Vec::len);
        if blocks.len() != states.len() {
            return Err(Error::structural(format!("{} blocks for {} states", blocks.len(), states.len())));
        }
        let mut entries = Vec::new();
        for (k, m) in blocks.into_iter().enumerate() {
            if m.len() != size || m.iter().any(|r| r.len() != size) {
                return Err(Error::structural(format!("block for state {k} is not {size}x{size}")));
            }
            for (i, row) in m.into_iter().enumerate() {
                for (j, g) in row.into_iter().enumerate() {
                    entries.push(((k, i, j), g));
                }
            }
        }
        Self::new(states, size, entries)
    }

    pub fn zero(states: Vec<String>, size: usize) -> Result<Self> {
        Self::new(states, size, std::iter::empty())
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Payoff for any action pair, applying the out-of-block convention.
    pub fn get(&self, k: usize, i: usize, j: usize) -> Rational {
        let l = self.size;
        match (i < l, j < l) {
            (true, true) => self.block[(k * l + i) * l + j].clone(),
            (false, true) => -Rational::ONE,
            (true, false) => Rational::ONE,
            (false, false) => Rational::ZERO,
        }
    }

    pub(crate) fn block_ref(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.block[(k * self.size + i) * self.size + j]
    }

    /// Largest absolute entry difference on the common block of two same-size structures.
    pub fn sup_distance(&self, other: &PayoffStructure) -> Result<Rational> {
        if self.states != other.states || self.size != other.size {
            return Err(Error::structural("sup distance needs equal states and size"));
        }
        Ok(self.block.iter().zip(&other.block).map(|(a, b)| (a - b).abs()).max().unwrap_or(Rational::ZERO))
    }

    /// The same payoff function stored with a larger block.
    pub fn extend(&self, size: usize) -> Result<PayoffStructure> {
        if size < self.size {
            return Err(Error::structural("cannot shrink a payoff structure"));
        }
        let mut entries = Vec::new();
        for k in 0..self.num_states() {
            for i in 0..size {
                for j in 0..size {
                    entries.push(((k, i, j), self.get(k, i, j)));
                }
            }
        }
        PayoffStructure::new(self.states.clone(), size, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct PayoffEntryDoc {
    k: usize,
    i: usize,
    j: usize,
    g: Rational,
}

#[derive(Serialize, Deserialize)]
struct PayoffDoc {
    states: Vec<String>,
    #[serde(rename = "L")]
    size: usize,
    payoffs: Vec<PayoffEntryDoc>,
}

impl TryFrom<PayoffDoc> for PayoffStructure {
    type Error = Error;
    fn try_from(doc: PayoffDoc) -> Result<Self> {
        PayoffStructure::new(doc.states, doc.size, doc.payoffs.into_iter().map(|e| ((e.k, e.i, e.j), e.g)))
    }
}

impl From<PayoffStructure> for PayoffDoc {
    fn from(g: PayoffStructure) -> Self {
        let mut payoffs = Vec::new();
        for k in 0..g.num_states() {
            for i in 0..g.size {
                for j in 0..g.size {
                    let v = g.block_ref(k, i, j);
                    if !v.is_zero() {
                        payoffs.push(PayoffEntryDoc { k, i, j, g: v.clone() });
                    }
                }
            }
        }
        PayoffDoc { states: g.states, size: g.size, payoffs }
    }
}

/// A map from signals to finite-support distributions over signals.
/// Signals without a row are sent to themselves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "GarblingDoc", into = "GarblingDoc")]
pub struct Garbling {
    rows: BTreeMap<Signal, BTreeMap<Signal, Rational>>,
}

impl Garbling {
    pub fn identity() -> Self {
        Garbling::default()
    }

    pub fn new<I, R>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Signal, R)>,
        R: IntoIterator<Item = (Signal, Rational)>,
    {
        let mut out = BTreeMap::new();
        for (from, row) in rows {
            let mut dist: BTreeMap<Signal, Rational> = BTreeMap::new();
            for (to, p) in row {
                if p.is_negative() {
                    return Err(Error::validation("nonnegative garbling weights", format!("q({from})({to}) = {p}")));
                }
                *dist.entry(to).or_insert(Rational::ZERO) += p;
            }
            dist.retain(|_, p| !p.is_zero());
            let total: Rational = dist.values().sum();
            if total != Rational::ONE {
                return Err(Error::validation("garbling rows sum to 1", format!("row {from} sums to {total}")));
            }
            if out.insert(from, dist).is_some() {
                return Err(Error::structural(format!("duplicate garbling row for signal {from}")));
            }
        }
        Ok(Garbling { rows: out })
    }

    /// The deterministic garbling `from -> to`.
    pub fn deterministic<I: IntoIterator<Item = (Signal, Signal)>>(map: I) -> Self {
        let rows = map
            .into_iter()
            .map(|(a, b)| (a, BTreeMap::from([(b, Rational::ONE)])))
            .collect();
        Garbling { rows }
    }

    /// Distribution of the output signal given input `s`.
    pub fn row(&self, s: Signal) -> Vec<(Signal, Rational)> {
        match self.rows.get(&s) {
            Some(r) => r.iter().map(|(t, p)| (*t, p.clone())).collect(),
            None => vec![(s, Rational::ONE)],
        }
    }

    pub fn rows(&self) -> &BTreeMap<Signal, BTreeMap<Signal, Rational>> {
        &self.rows
    }

    /// Drops rows that are the identity, giving the normal form used for equality.
    pub fn normalized(&self) -> Garbling {
        let rows = self
            .rows
            .iter()
            .filter(|(s, r)| !(r.len() == 1 && r.get(s) == Some(&Rational::ONE)))
            .map(|(s, r)| (*s, r.clone()))
            .collect();
        Garbling { rows }
    }

    /// `(self ∘ then)(s) = Σ_t self(s)(t) · then(t)`: apply `self` first, then `then`.
    pub fn then(&self, then: &Garbling) -> Garbling {
        let mut keys: BTreeSet<Signal> = self.rows.keys().copied().collect();
        keys.extend(then.rows.keys().copied());
        let rows = keys
            .into_iter()
            .map(|s| {
                let mut dist = BTreeMap::new();
                for (t, p) in self.row(s) {
                    for (u, w) in then.row(t) {
                        *dist.entry(u).or_insert(Rational::ZERO) += &p * &w;
                    }
                }
                (s, dist)
            })
            .collect();
        Garbling { rows }
    }
}

#[derive(Serialize, Deserialize)]
struct TargetDoc {
    signal: Signal,
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct RowDoc {
    from: Signal,
    to: Vec<TargetDoc>,
}

#[derive(Serialize, Deserialize)]
struct GarblingDoc {
    rows: Vec<RowDoc>,
}

impl TryFrom<GarblingDoc> for Garbling {
    type Error = Error;
    fn try_from(doc: GarblingDoc) -> Result<Self> {
        Garbling::new(doc.rows.into_iter().map(|r| (r.from, r.to.into_iter().map(|t| (t.signal, t.p)))))
    }
}

impl From<Garbling> for GarblingDoc {
    fn from(q: Garbling) -> Self {
        GarblingDoc {
            rows: q
                .rows
                .into_iter()
                .map(|(from, r)| RowDoc { from, to: r.into_iter().map(|(signal, p)| TargetDoc { signal, p }).collect() })
                .collect(),
        }
    }
}

/// `q.u`: player 1's signal is passed through `q`.
pub fn garble_p1(q: &Garbling, u: &InfoStructure) -> InfoStructure {
    let mut map = BTreeMap::new();
    for (&(k, c, d), p) in &u.entries {
        for (c2, w) in q.row(c) {
            *map.entry((k, c2, d)).or_insert(Rational::ZERO) += p * &w;
        }
    }
    InfoStructure::from_parts(u.states.clone(), map)
}

/// `u.q`: player 2's signal is passed through `q`.
pub fn garble_p2(u: &InfoStructure, q: &Garbling) -> InfoStructure {
    let mut map = BTreeMap::new();
    for (&(k, c, d), p) in &u.entries {
        for (d2, w) in q.row(d) {
            *map.entry((k, c, d2)).or_insert(Rational::ZERO) += p * &w;
        }
    }
    InfoStructure::from_parts(u.states.clone(), map)
}

pub fn l1_distance(u: &InfoStructure, v: &InfoStructure) -> Result<Rational> {
    same_states(u, v)?;
    let keys: BTreeSet<_> = u.entries.keys().chain(v.entries.keys()).collect();
    Ok(keys
        .into_iter()
        .map(|&(k, c, d)| (u.prob(k, c, d) - v.prob(k, c, d)).abs())
        .sum())
}

/// Expected payoff when both players play their signal as action.
pub fn scalar_product(g: &PayoffStructure, u: &InfoStructure) -> Result<Rational> {
    if g.states() != u.states() {
        return Err(Error::structural("payoff and information structures have different states"));
    }
    Ok(u.entries.iter().map(|(&(k, c, d), p)| p * &g.get(k, c, d)).sum())
}

/// Relabels signals to `0..n` per player in an order that depends only on
/// the structure up to relabeling.
pub fn canonicalize(u: &InfoStructure) -> InfoStructure {
    let s1 = u.signals(Player::One);
    let s2 = u.signals(Player::Two);
    let idx1: BTreeMap<Signal, usize> = s1.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let idx2: BTreeMap<Signal, usize> = s2.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let entries: Vec<(usize, usize, usize, Rational)> =
        u.entries.iter().map(|(&(k, c, d), p)| (k, idx1[&c], idx2[&d], p.clone())).collect();
    let g = Canon { entries: &entries, n1: s1.len(), n2: s2.len() };
    let best = g.search(vec![0; s1.len()], vec![0; s2.len()]);
    InfoStructure::from_parts(u.states.clone(), best.into_iter().map(|(k, c, d, p)| ((k, c, d), p)).collect())
}

type Labeled = Vec<(usize, usize, usize, Rational)>;

struct Canon<'a> {
    entries: &'a [(usize, usize, usize, Rational)],
    n1: usize,
    n2: usize,
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let sorted: BTreeSet<T> = sigs.iter().cloned().collect();
    let order: BTreeMap<T, usize> = sorted.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    sigs.iter().map(|s| order[s]).collect()
}

fn classes(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

impl Canon<'_> {
    fn refine(&self, mut c1: Vec<usize>, mut c2: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        loop {
            let mut sig1: Vec<(usize, Vec<(usize, usize, Rational)>)> = c1.iter().map(|&c| (c, Vec::new())).collect();
            let mut sig2: Vec<(usize, Vec<(usize, usize, Rational)>)> = c2.iter().map(|&c| (c, Vec::new())).collect();
            for (k, a, b, p) in self.entries {
                sig1[*a].1.push((*k, c2[*b], p.clone()));
                sig2[*b].1.push((*k, c1[*a], p.clone()));
            }
            for s in sig1.iter_mut().chain(sig2.iter_mut()) {
                s.1.sort();
            }
            let (n1, n2) = (rank(&sig1), rank(&sig2));
            let stable = classes(&n1) == classes(&c1) && classes(&n2) == classes(&c2);
            c1 = n1;
            c2 = n2;
            if stable {
                return (c1, c2);
            }
        }
    }

    fn search(&self, c1: Vec<usize>, c2: Vec<usize>) -> Labeled {
        let (c1, c2) = self.refine(c1, c2);
        let target = [(&c1, true), (&c2, false)].into_iter().find_map(|(cols, first)| {
            let mut count = BTreeMap::new();
            for &c in cols.iter() {
                *count.entry(c).or_insert(0usize) += 1;
            }
            count.into_iter().find(|&(_, n)| n > 1).map(|(c, _)| (first, c))
        });
        let Some((first, color)) = target else {
            let mut out: Labeled = self.entries.iter().map(|(k, a, b, p)| (*k, c1[*a], c2[*b], p.clone())).collect();
            out.sort();
            return out;
        };
        let cols = if first { &c1 } else { &c2 };
        let mut seen_rows: Vec<Vec<(usize, usize, Rational)>> = Vec::new();
        let mut best: Option<Labeled> = None;
        for m in (0..if first { self.n1 } else { self.n2 }).filter(|&m| cols[m] == color) {
            // Members with identical rows are interchangeable; trying one suffices.
            let mut row: Vec<(usize, usize, Rational)> = self
                .entries
                .iter()
                .filter(|e| if first { e.1 == m } else { e.2 == m })
                .map(|(k, a, b, p)| (*k, if first { *b } else { *a }, p.clone()))
                .collect();
            row.sort();
            if seen_rows.contains(&row) {
                continue;
            }
            seen_rows.push(row);
            let bump = |cs: &Vec<usize>, me: Option<usize>| -> Vec<usize> {
                cs.iter().enumerate().map(|(i, &c)| if Some(i) == me { 2 * c } else { 2 * c + 1 }).collect()
            };
            let (n1, n2) = if first { (bump(&c1, Some(m)), bump(&c2, None)) } else { (bump(&c1, None), bump(&c2, Some(m))) };
            let cand = self.search(n1, n2);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        best.expect("a class with two members has at least one candidate")
    }
}
