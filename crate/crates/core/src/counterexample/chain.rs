//! The random transition structure and nice sequences.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random;

/// A chain on `1..=N` starting uniformly and moving with probability `2/N`
/// to each member of the successor set of the current state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainDoc", into = "ChainDoc")]
pub struct ChainSpec {
    n: usize,
    seed: Option<u64>,
    successors: Vec<Vec<usize>>,
    // succ[a-1] and pred[b-1] as bit masks over 0-based states
    succ: Vec<Vec<u64>>,
    pred: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct ChainDoc {
    #[serde(rename = "N")]
    n: usize,
    seed: Option<u64>,
    successors: Vec<Vec<usize>>,
}

impl TryFrom<ChainDoc> for ChainSpec {
    type Error = Error;
    fn try_from(doc: ChainDoc) -> Result<Self> {
        ChainSpec::with_seed(doc.n, doc.successors, doc.seed)
    }
}

impl From<ChainSpec> for ChainDoc {
    fn from(c: ChainSpec) -> Self {
        ChainDoc { n: c.n, seed: c.seed, successors: c.successors }
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::structural(format!("N must be even and at least 2, got {n}")));
    }
    Ok(())
}

impl ChainSpec {
    /// Successor sets are given per state `1..=N` and must each hold `N/2` distinct states.
    pub fn new(n: usize, successors: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_seed(n, successors, None)
    }

    fn with_seed(n: usize, mut successors: Vec<Vec<usize>>, seed: Option<u64>) -> Result<Self> {
        check_size(n)?;
        if successors.len() != n {
            return Err(Error::structural(format!("{} successor sets for N = {n}", successors.len())));
        }
        let mut succ = vec![vec![0u64; words(n)]; n];
        let mut pred = vec![vec![0u64; words(n)]; n];
        for (a, set) in successors.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.len() != n / 2 || set.iter().any(|&b| b == 0 || b > n) {
                return Err(Error::validation(
                    "successor sets are N/2 distinct states in 1..=N",
                    format!("state {} has successors {set:?}", a + 1),
                ));
            }
            for &b in set.iter() {
                succ[a][(b - 1) / 64] |= 1 << ((b - 1) % 64);
                pred[b - 1][a / 64] |= 1 << (a % 64);
            }
        }
        Ok(ChainSpec { n, seed, successors, succ, pred })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.successors[a - 1]
    }

    /// Whether `b` follows `a` with positive probability.
    pub fn x(&self, a: usize, b: usize) -> bool {
        self.succ[a - 1][(b - 1) / 64] >> ((b - 1) % 64) & 1 == 1
    }

    pub(crate) fn succ_mask(&self, a: usize) -> &[u64] {
        &self.succ[a - 1]
    }

    pub(crate) fn pred_mask(&self, b: usize) -> &[u64] {
        &self.pred[b - 1]
    }

    pub(crate) fn full_mask(&self) -> Vec<u64> {
        let mut m = vec![u64::MAX; words(self.n)];
        if !self.n.is_multiple_of(64) {
            *m.last_mut().expect("N >= 2") = (1u64 << (self.n % 64)) - 1;
        }
        m
    }

    /// 1-based position of the first transition outside the chain, if any.
    pub(crate) fn first_break(&self, seq: &[usize]) -> Option<usize> {
        seq.windows(2).position(|w| !self.x(w[0], w[1])).map(|t| t + 2)
    }
}

/// `N/2`-subsets drawn independently and uniformly, one per state.
pub fn sample_successors(rng: &mut impl Rng, n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|_| sample(rng, n, n / 2).into_iter().map(|b| b + 1).collect()).collect()
}

pub fn sample_chain(n: usize, seed: u64) -> Result<ChainSpec> {
    check_size(n)?;
    let mut rng = random::rng(seed);
    let successors = sample_successors(&mut rng, n);
    ChainSpec::with_seed(n, successors, Some(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NicenessStatus {
    #[serde(rename = "nice")]
    Nice,
    #[serde(rename = "not-nice-player-1")]
    NotNicePlayer1,
    #[serde(rename = "not-nice-player-2")]
    NotNicePlayer2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NicenessVerdict {
    pub status: NicenessStatus,
    /// Shortest prefix length with probability 0; odd positions belong to player 1.
    pub failing_index: Option<usize>,
}

impl NicenessVerdict {
    pub(crate) fn from_break(t: Option<usize>) -> Self {
        let status = match t {
            None => NicenessStatus::Nice,
            Some(t) if t % 2 == 1 => NicenessStatus::NotNicePlayer1,
            Some(_) => NicenessStatus::NotNicePlayer2,
        };
        NicenessVerdict { status, failing_index: t }
    }
}

pub fn niceness(chain: &ChainSpec, seq: &[usize]) -> Result<NicenessVerdict> {
    if seq.is_empty() {
        return Err(Error::structural("niceness of an empty sequence"));
    }
    if let Some(s) = seq.iter().find(|&&s| s == 0 || s > chain.n()) {
        return Err(Error::structural(format!("state {s} outside 1..={}", chain.n())));
    }
    Ok(NicenessVerdict::from_break(chain.first_break(seq)))
}
