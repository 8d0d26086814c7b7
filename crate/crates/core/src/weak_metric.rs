//! A fixed dense enumeration of payoff structures and truncated weak distances.
//!
//! Enumeration `diag-v1`: blocks `(L, m)` with `L, m >= 1` are visited by
//! increasing `L + m`, and by increasing `L` within a diagonal. Block `(L, m)`
//! lists every structure of size `L` whose entries lie on the grid
//! `{-1 + j * 2^(1-m) : 0 <= j <= 2^m}`, in lexicographic order of the entry
//! vector indexed by `(k, i, j)` with the first entry most significant.
//! Indices start at 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::game_value::bayesian_value;
use crate::structures::{same_states, InfoStructure, PayoffStructure};

pub const ENUMERATION_VERSION: &str = "diag-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffEnumeration {
    states: Vec<String>,
}

fn block_len(num_states: usize, size: usize, m: u32) -> u128 {
    let base = (1u128 << m) + 1;
    let cells = (num_states * size * size) as u32;
    base.checked_pow(cells).unwrap_or(u128::MAX)
}

fn grid_value(m: u32, j: u128) -> Rational {
    -Rational::ONE + Rational::new(j as i64, 1i64 << (m - 1))
}

impl PayoffEnumeration {
    pub fn new(states: Vec<String>) -> Self {
        PayoffEnumeration { states }
    }

    pub fn version(&self) -> &'static str {
        ENUMERATION_VERSION
    }

    /// Block `(L, m)` containing index `n` and the offset inside it.
    fn locate(&self, n: u64) -> (usize, u32, u128) {
        let k = self.states.len();
        let mut rest = (n - 1) as u128;
        let mut diag = 2usize;
        loop {
            for size in 1..diag {
                let m = (diag - size) as u32;
                let len = block_len(k, size, m);
                if rest < len {
                    return (size, m, rest);
                }
                rest -= len;
            }
            diag += 1;
        }
    }

    /// The `n`-th structure, `n >= 1`.
    pub fn get(&self, n: u64) -> Result<PayoffStructure> {
        if n == 0 {
            return Err(Error::validation("enumeration index >= 1", "index 0"));
        }
        let (size, m, mut offset) = self.locate(n);
        let base = (1u128 << m) + 1;
        let cells = self.states.len() * size * size;
        let mut digits = vec![0u128; cells];
        for d in digits.iter_mut().rev() {
            *d = offset % base;
            offset /= base;
        }
        let entries = digits.into_iter().enumerate().map(|(c, j)| {
            let (k, rest) = (c / (size * size), c % (size * size));
            ((k, rest / size, rest % size), grid_value(m, j))
        });
        PayoffStructure::new(self.states.clone(), size, entries)
    }

    pub fn iter(&self) -> impl Iterator<Item = PayoffStructure> + '_ {
        (1u64..).map(move |n| self.get(n).expect("indices from 1 are valid"))
    }
}

/// The `n`-th payoff structure of the enumeration over `states`.
pub fn enumerate_payoff(states: &[String], n: u64) -> Result<PayoffStructure> {
    PayoffEnumeration::new(states.to_vec()).get(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakDistance {
    pub lower: Rational,
    pub upper: Rational,
    pub terms: u64,
    pub version: &'static str,
}

/// Bracket `[lower, upper]` on `Σ_n 2^-n |val(u,g_n) - val(v,g_n)|` from the first `terms` terms.
pub fn weak_distance(u: &InfoStructure, v: &InfoStructure, terms: u64) -> Result<WeakDistance> {
    same_states(u, v)?;
    if terms == 0 {
        return Err(Error::validation("terms >= 1", "0 terms requested"));
    }
    let e = PayoffEnumeration::new(u.states().to_vec());
    let mut lower = Rational::ZERO;
    let mut weight = Rational::ONE;
    for n in 1..=terms {
        weight /= Rational::from_integer(2);
        let g = e.get(n)?;
        let gap = (bayesian_value(u, &g)?.value - bayesian_value(v, &g)?.value).abs();
        if !gap.is_zero() {
            lower += &weight * gap;
        }
    }
    let upper = &lower + Rational::from_integer(2) * &weight;
    Ok(WeakDistance { lower, upper, terms, version: ENUMERATION_VERSION })
}
