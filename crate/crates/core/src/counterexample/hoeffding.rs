//! Monte Carlo tails of the overlap statistics against their exponential
//! bounds, and the factorial bounds behind them.

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::random;

use super::chain::{sample_successors, ChainSpec};
use super::ystats::y_count;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub statistic: String,
    /// Trials with deviation at least `γN` from the centre.
    pub exceedances: u64,
    pub frequency: Rational,
    pub bound: f64,
    pub std_error: f64,
    /// Frequency at most the bound plus three standard errors.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub gamma: Rational,
    pub trials: u64,
    pub seed: u64,
    /// `γ >= 1/(2N-2)`, needed for the single-column bounds.
    pub column_regime: bool,
    /// `γ >= 64/N`, needed for the bound on the scaled statistics.
    pub scaled_regime: bool,
    pub rows: Vec<TailRow>,
}

impl HoeffdingReport {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within)
    }
}

struct Statistic {
    name: &'static str,
    // the deviation is |count - centre * N|
    centre: Rational,
    bound: f64,
    count: fn(&ChainSpec) -> u64,
}

fn statistics(n: usize, gamma: f64) -> Vec<Statistic> {
    let nf = n as f64;
    let e4 = 4f64.exp();
    let scaled = e4 * nf * (-(nf / 32.0) * (gamma / 10.0).powi(2)).exp();
    let quarter = Rational::new(1, 4);
    let one = Rational::ONE;
    let mut out = vec![
        Statistic {
            name: "intersection",
            centre: quarter.clone(),
            bound: 0.5 * e4 * nf * (-2.0 * gamma * gamma * nf).exp(),
            count: |c| {
                let s1 = c.succ_mask(1);
                c.succ_mask(2).iter().zip(s1).map(|(a, b)| (a & b).count_ones() as u64).sum()
            },
        },
        Statistic {
            name: "column-sum",
            centre: Rational::new(1, 2),
            bound: 2.0 * (-2.0 * nf * gamma * gamma).exp(),
            count: |c| y_count(c, &[1], &[]) / 2,
        },
        Statistic {
            name: "column-pair-sum",
            centre: quarter,
            bound: 2.0 * (-0.5 * nf * gamma * gamma).exp(),
            count: |c| y_count(c, &[1, 2], &[]) / 4,
        },
    ];
    let scaled_stats: [(&'static str, fn(&ChainSpec) -> u64); 8] = [
        ("Y_a", |c| y_count(c, &[1], &[])),
        ("Y^c", |c| y_count(c, &[], &[3])),
        ("Y_ab", |c| y_count(c, &[1, 2], &[])),
        ("Y^cd", |c| y_count(c, &[], &[3, 4])),
        ("Y^c_a", |c| y_count(c, &[1], &[3])),
        ("Y^c_ab", |c| y_count(c, &[1, 2], &[3])),
        ("Y^cd_a", |c| y_count(c, &[1], &[3, 4])),
        ("Y^cd_ab", |c| y_count(c, &[1, 2], &[3, 4])),
    ];
    for (name, count) in scaled_stats {
        out.push(Statistic { name, centre: one.clone(), bound: scaled, count });
    }
    out
}

/// Tail frequencies over `trials` sampled chains, for states `a, b, c, d = 1, 2, 3, 4`.
pub fn hoeffding_experiment(n: usize, gamma: &Rational, trials: u64, seed: u64) -> Result<HoeffdingReport> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::structural(format!("the experiment needs an even N >= 4, got {n}")));
    }
    if !gamma.is_positive() || trials == 0 {
        return Err(Error::validation("gamma > 0 and trials >= 1", format!("gamma = {gamma}, trials = {trials}")));
    }
    let stats = statistics(n, gamma.to_f64());
    let nr = Rational::from_integer(n as i64);
    let threshold = gamma * &nr;
    let mut hits = vec![0u64; stats.len()];
    let mut master = random::rng(seed);
    for _ in 0..trials {
        let mut rng = random::rng(master.gen());
        let chain = ChainSpec::new(n, sample_successors(&mut rng, n))?;
        for (s, h) in stats.iter().zip(hits.iter_mut()) {
            let dev = (Rational::from_integer((s.count)(&chain) as i64) - &s.centre * &nr).abs();
            if dev >= threshold {
                *h += 1;
            }
        }
    }
    let rows = stats
        .iter()
        .zip(hits)
        .map(|(s, h)| {
            let f = h as f64 / trials as f64;
            let std_error = (f * (1.0 - f) / trials as f64).sqrt();
            TailRow {
                statistic: s.name.to_string(),
                exceedances: h,
                frequency: Rational::new(h as i64, trials as i64),
                bound: s.bound,
                std_error,
                within: f <= s.bound + 3.0 * std_error,
            }
        })
        .collect();
    Ok(HoeffdingReport {
        n,
        gamma: gamma.clone(),
        trials,
        seed,
        column_regime: *gamma >= Rational::new(1, 2 * n as i64 - 2),
        scaled_regime: *gamma >= Rational::new(64, n as i64),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StirlingRow {
    pub n: u32,
    /// `n^(n+1/2) e^(-n) <= n!`
    pub lower: bool,
    /// `n! <= e n^(n+1/2) e^(-n)`
    pub upper: bool,
}

/// Exact check of the factorial sandwich for `n = 1..=n_max`, with `e`
/// enclosed between a partial sum of its series and that sum plus a tail bound.
pub fn stirling_check(n_max: u32) -> Vec<StirlingRow> {
    let mut fact = BigInt::from(1);
    let mut e_low = Rational::ZERO;
    for k in 0..30 {
        if k > 0 {
            fact *= k;
        }
        e_low += Rational::from_bigints(BigInt::from(1), fact.clone());
    }
    // Σ_{k>=30} 1/k! < 2/30!
    let e_high = &e_low + Rational::from_bigints(BigInt::from(2), fact * 30);
    let mut nfact = BigInt::from(1);
    (1..=n_max)
        .map(|n| {
            nfact *= n;
            let sq = Rational::from(&nfact * &nfact);
            let power = Rational::from(BigInt::from(n).pow(2 * n + 1));
            // squared: n^(2n+1) <= (n!)^2 e^(2n) and (n!)^2 e^(2n-2) <= n^(2n+1)
            let lower = power <= &sq * e_low.pow(2 * n as i32);
            let upper = &sq * e_high.pow(2 * n as i32 - 2) <= power;
            StirlingRow { n, lower, upper }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_sandwich_holds() {
        let rows = stirling_check(50);
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.lower && r.upper), "{:?}", rows.iter().find(|r| !(r.lower && r.upper)));
    }

    #[test]
    fn tails_respect_bounds() {
        let r = hoeffding_experiment(64, &Rational::new(1, 4), 2000, 3).unwrap();
        assert_eq!(r.rows.len(), 11);
        assert!(r.all_within(), "{:?}", r.rows);
        assert!(r.column_regime);
        assert!(!r.scaled_regime);
        // the row sums are exactly N/2, so the centred count never moves
        let yc = r.rows.iter().find(|t| t.statistic == "Y^c").unwrap();
        assert_eq!(yc.exceedances, 0);
    }

    #[test]
    fn bounded_statistics_have_empty_far_tails() {
        let r = hoeffding_experiment(16, &Rational::ONE, 300, 1).unwrap();
        for name in ["intersection", "column-sum", "column-pair-sum"] {
            assert_eq!(r.rows.iter().find(|t| t.statistic == name).unwrap().exceedances, 0);
        }
        // the scaled statistics never exceed 8N
        let r = hoeffding_experiment(16, &Rational::from_integer(8), 300, 1).unwrap();
        assert!(r.rows.iter().all(|t| t.exceedances == 0));
    }

    #[test]
    fn deterministic_and_validated() {
        let a = hoeffding_experiment(8, &Rational::new(1, 8), 50, 9).unwrap();
        assert_eq!(a, hoeffding_experiment(8, &Rational::new(1, 8), 50, 9).unwrap());
        assert!(hoeffding_experiment(7, &Rational::new(1, 8), 50, 9).is_err());
        assert!(hoeffding_experiment(8, &Rational::ZERO, 50, 9).is_err());
    }
}
