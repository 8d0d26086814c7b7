//! Scaled overlap counts of the successor sets and the concentration event
//! built from their ratios.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::random;

use super::alpha;
use super::chain::ChainSpec;

/// `2^(|cols| + |rows|)` times the number of states `i` with every `a` in
/// `cols` a successor of `i` and `i` a successor of every `c` in `rows`.
/// Callers pass distinct indices.
pub fn y_count(chain: &ChainSpec, cols: &[usize], rows: &[usize]) -> u64 {
    let mut mask = chain.full_mask();
    for &a in cols {
        for (w, p) in mask.iter_mut().zip(chain.pred_mask(a)) {
            *w &= p;
        }
    }
    for &c in rows {
        for (w, s) in mask.iter_mut().zip(chain.succ_mask(c)) {
            *w &= s;
        }
    }
    let hits: u64 = mask.iter().map(|w| w.count_ones() as u64).sum();
    hits << (cols.len() + rows.len())
}

/// The eight statistics for one `(a, b, c, d)`; each has mean close to `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YStatistics {
    #[serde(rename = "Y_a")]
    pub y_a: u64,
    #[serde(rename = "Y^c")]
    pub y_c: u64,
    #[serde(rename = "Y_ab")]
    pub y_ab: u64,
    #[serde(rename = "Y^cd")]
    pub y_cd: u64,
    #[serde(rename = "Y^c_a")]
    pub y_a_c: u64,
    #[serde(rename = "Y^c_ab")]
    pub y_ab_c: u64,
    #[serde(rename = "Y^cd_a")]
    pub y_a_cd: u64,
    #[serde(rename = "Y^cd_ab")]
    pub y_ab_cd: u64,
}

impl YStatistics {
    pub fn values(&self) -> [(&'static str, u64); 8] {
        [
            ("Y_a", self.y_a),
            ("Y^c", self.y_c),
            ("Y_ab", self.y_ab),
            ("Y^cd", self.y_cd),
            ("Y^c_a", self.y_a_c),
            ("Y^c_ab", self.y_ab_c),
            ("Y^cd_a", self.y_a_cd),
            ("Y^cd_ab", self.y_ab_cd),
        ]
    }

    /// The seven ratios whose closeness to 1 defines the event, as (name, numerator, denominator).
    pub fn ratios(&self) -> [(&'static str, u64, u64); 7] {
        [
            ("Y_ab/Y_a", self.y_ab, self.y_a),
            ("Y^c_ab/Y^c_a", self.y_ab_c, self.y_a_c),
            ("Y^cd_a/Y^c_a", self.y_a_cd, self.y_a_c),
            ("Y^cd_ab/Y^cd_a", self.y_ab_cd, self.y_a_cd),
            ("Y^cd/Y^c", self.y_cd, self.y_c),
            ("Y^c_a/Y^c", self.y_a_c, self.y_c),
            ("Y^cd_a/Y^cd", self.y_a_cd, self.y_cd),
        ]
    }

    /// Ratios outside `[1 - 2α, 1 + 2α]`; a zero denominator counts as outside.
    pub fn failing_ratios(&self) -> Vec<(&'static str, Option<Rational>)> {
        let band = Rational::from_integer(2) * alpha();
        self.ratios()
            .into_iter()
            .filter_map(|(name, num, den)| {
                if den == 0 {
                    return Some((name, None));
                }
                let r = Rational::new(num as i64, den as i64);
                ((&r - Rational::ONE).abs() > band).then_some((name, Some(r)))
            })
            .collect()
    }
}

fn check_index(chain: &ChainSpec, i: usize) -> Result<()> {
    if i == 0 || i > chain.n() {
        return Err(Error::structural(format!("state {i} outside 1..={}", chain.n())));
    }
    Ok(())
}

pub fn y_statistics(chain: &ChainSpec, a: usize, b: usize, c: usize, d: usize) -> Result<YStatistics> {
    for i in [a, b, c, d] {
        check_index(chain, i)?;
    }
    if a == b || c == d {
        return Err(Error::structural(format!("statistics need a != b and c != d, got ({a},{b},{c},{d})")));
    }
    Ok(stats_unchecked(chain, a, b, c, d))
}

fn stats_unchecked(chain: &ChainSpec, a: usize, b: usize, c: usize, d: usize) -> YStatistics {
    YStatistics {
        y_a: y_count(chain, &[a], &[]),
        y_c: y_count(chain, &[], &[c]),
        y_ab: y_count(chain, &[a, b], &[]),
        y_cd: y_count(chain, &[], &[c, d]),
        y_a_c: y_count(chain, &[a], &[c]),
        y_ab_c: y_count(chain, &[a, b], &[c]),
        y_a_cd: y_count(chain, &[a], &[c, d]),
        y_ab_cd: y_count(chain, &[a, b], &[c, d]),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub ratio: String,
    /// Absent when the denominator is 0.
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventReport {
    #[serde(rename = "N")]
    pub n: usize,
    /// "exhaustive" or "sampled".
    pub mode: String,
    pub total_tuples: u64,
    pub scanned: u64,
    /// Scanned tuples with at least one ratio out of band.
    pub violating: u64,
    pub ratio_checks: u64,
    pub ratio_violations: u64,
    pub holds: bool,
    pub first_violation: Option<EventViolation>,
    pub note: Option<String>,
}

impl EventReport {
    pub fn ratio_violation_fraction(&self) -> Rational {
        Rational::new(self.ratio_violations as i64, self.ratio_checks.max(1) as i64)
    }
}

/// Scans every `(a, b, c, d)` with `a != b`, `c != d`, or a seeded random
/// sample of them when the full scan exceeds `budget`.
pub fn event_e_check(chain: &ChainSpec, budget: u128, seed: u64) -> Result<EventReport> {
    let n = chain.n();
    if n < 2 {
        return Err(Error::structural("the event needs at least two states"));
    }
    let pairs = (n * (n - 1)) as u64;
    let total = pairs * pairs;
    let per_tuple = 8 * n.div_ceil(64) as u128;
    let exhaustive = total as u128 * per_tuple <= budget;
    let mut report = EventReport {
        n,
        mode: if exhaustive { "exhaustive" } else { "sampled" }.to_string(),
        total_tuples: total,
        scanned: 0,
        violating: 0,
        ratio_checks: 0,
        ratio_violations: 0,
        holds: true,
        first_violation: None,
        note: None,
    };
    let mut visit = |a: usize, b: usize, c: usize, d: usize| {
        let fails = stats_unchecked(chain, a, b, c, d).failing_ratios();
        report.scanned += 1;
        report.ratio_checks += 7;
        report.ratio_violations += fails.len() as u64;
        if let Some((name, value)) = fails.into_iter().next() {
            report.violating += 1;
            report.holds = false;
            if report.first_violation.is_none() {
                report.first_violation = Some(EventViolation { a, b, c, d, ratio: name.to_string(), value });
            }
        }
    };
    if exhaustive {
        for a in 1..=n {
            for b in (1..=n).filter(|&b| b != a) {
                for c in 1..=n {
                    for d in (1..=n).filter(|&d| d != c) {
                        visit(a, b, c, d);
                    }
                }
            }
        }
    } else {
        let samples = (budget / per_tuple).max(1) as u64;
        let mut rng = random::rng(seed);
        let distinct_pair = |rng: &mut rand_chacha::ChaCha8Rng| {
            let x = rng.gen_range(1..=n);
            let y = rng.gen_range(1..n);
            (x, if y >= x { y + 1 } else { y })
        };
        for _ in 0..samples {
            let (a, b) = distinct_pair(&mut rng);
            let (c, d) = distinct_pair(&mut rng);
            visit(a, b, c, d);
        }
        report.note = Some(format!(
            "sampled {samples} of {total} tuples; a holding verdict only means no sampled tuple violated the bounds"
        ));
    }
    Ok(report)
}
