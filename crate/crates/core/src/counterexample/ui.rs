//! Conditional niceness probabilities under misreports, computed by direct
//! summation over the opponent's signals.
//!
//! Given a player's own tuple, the opponent's coordinates are conditionally
//! independent and uniform over their admissible values, so the conditional
//! law of the opponent is uniform on a product of candidate lists.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::random;
use crate::structures::Player;

use super::build::bonus;
use super::chain::{sample_chain, ChainSpec, NicenessVerdict};
use super::ystats::y_count;
use super::{alpha, checked_pow, decode_tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UiCondition {
    /// Player 1 guesses one signal beyond those received.
    #[serde(rename = "ui1-extra-signal")]
    Ui1Extra,
    /// Player 1 misreports a received signal.
    #[serde(rename = "ui1-misreport")]
    Ui1Misreport,
    /// Player 2 misreports a received signal.
    #[serde(rename = "ui2-misreport")]
    Ui2Misreport,
}

impl UiCondition {
    pub fn reporter(self) -> Player {
        match self {
            UiCondition::Ui2Misreport => Player::Two,
            _ => Player::One,
        }
    }
}

/// One conditional probability: niceness at level `r + 1` given niceness at
/// level `r` and the reporter's own tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiCheck {
    pub condition: UiCondition,
    pub l: usize,
    pub own: Vec<usize>,
    pub report: Vec<usize>,
    /// Index of the first misreported coordinate, absent for the extra-signal condition.
    pub m: Option<usize>,
    pub r: usize,
    pub probability: Rational,
    pub pass: bool,
}

fn in_band(p: &Rational) -> bool {
    let half = Rational::new(1, 2);
    let a = alpha();
    *p >= &half - &a && *p <= half + a
}

/// Candidate values per opponent coordinate given the reporter's own tuple;
/// `None` when the own tuple has probability 0.
fn candidates(chain: &ChainSpec, reporter: Player, own: &[usize]) -> Option<Vec<Vec<usize>>> {
    let n = chain.n();
    let l = own.len();
    let bit = |m: &[u64], i: usize| m[(i - 1) / 64] >> ((i - 1) % 64) & 1 == 1;
    let lists: Vec<Vec<usize>> = (0..l)
        .map(|t| {
            (1..=n)
                .filter(|&z| match reporter {
                    // d_t follows c_t and precedes c_{t+1}
                    Player::One => chain.x(own[t], z) && (t + 1 == l || chain.x(z, own[t + 1])),
                    // c_t follows d_{t-1} and precedes d_t
                    Player::Two => bit(chain.pred_mask(own[t]), z) && (t == 0 || chain.x(own[t - 1], z)),
                })
                .collect()
        })
        .collect();
    if lists.iter().any(Vec::is_empty) {
        None
    } else {
        Some(lists)
    }
}

/// Reported sequence length and the number of opponent coordinates it reads.
fn shape(reporter: Player, own_len: usize, report_len: usize) -> Result<(usize, usize)> {
    match reporter {
        Player::One if report_len >= 1 && report_len <= own_len + 1 => Ok((2 * report_len - 1, report_len - 1)),
        Player::Two if report_len < own_len => Ok((2 * report_len + 1, report_len + 1)),
        _ => Err(Error::structural(format!(
            "player {reporter} with {own_len} signals cannot report {report_len} of them against a truthful opponent"
        ))),
    }
}

/// Calls `f` with each reported sequence, one per opponent tuple.
fn for_each_sequence(
    reporter: Player,
    lists: &[Vec<usize>],
    report: &[usize],
    len: usize,
    opp: usize,
    mut f: impl FnMut(&[usize]),
) {
    let mut idx = vec![0usize; opp];
    let mut seq = vec![0usize; len];
    loop {
        for (t, s) in seq.iter_mut().enumerate() {
            let mine = (t % 2 == 0) == (reporter == Player::One);
            *s = if mine { report[t / 2] } else { lists[t / 2][idx[t / 2]] };
        }
        f(&seq);
        let mut pos = opp;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Counts `s[r]` of opponent tuples keeping the report nice through level `r`, `r = 0..=len`.
fn survival_counts(chain: &ChainSpec, reporter: Player, own: &[usize], report: &[usize]) -> Result<Option<Vec<u64>>> {
    let (len, opp) = shape(reporter, own.len(), report.len())?;
    let Some(lists) = candidates(chain, reporter, own) else { return Ok(None) };
    let mut hist = vec![0u64; len + 2];
    for_each_sequence(reporter, &lists, report, len, opp, |seq| {
        hist[chain.first_break(seq).unwrap_or(len + 1)] += 1;
    });
    // hist[t] counts first breaks at t; survival through r means the break is after r
    let mut s = vec![0u64; len + 1];
    let mut acc = 0u64;
    for r in (0..=len).rev() {
        acc += hist[r + 1];
        s[r] = acc;
    }
    Ok(Some(s))
}

fn check_inputs(chain: &ChainSpec, tuples: &[&[usize]]) -> Result<()> {
    for t in tuples {
        if let Some(s) = t.iter().find(|&&s| s == 0 || s > chain.n()) {
            return Err(Error::structural(format!("state {s} outside 1..={}", chain.n())));
        }
    }
    Ok(())
}

/// `P(report nice through level r | own)` for `r = 0..=2p-1`, the opponent reporting truthfully.
pub fn survival_profile(chain: &ChainSpec, reporter: Player, own: &[usize], report: &[usize]) -> Result<Vec<Rational>> {
    check_inputs(chain, &[own, report])?;
    let s = survival_counts(chain, reporter, own, report)?
        .ok_or_else(|| Error::validation("received tuple has positive probability", format!("{own:?}")))?;
    Ok(s.iter().map(|&x| Rational::new(x as i64, s[0] as i64)).collect())
}

/// Expected bonus read off the survival profile: a break at an even position
/// pays `5ε`, at an odd position `-5ε`, and a fully nice report pays `ε`.
pub fn payoff_from_survival(survival: &[Rational], epsilon: &Rational) -> Rational {
    let len = survival.len() - 1;
    let five = Rational::from_integer(5) * epsilon;
    let mut total = &survival[len] * epsilon;
    for t in 2..=len {
        let lost = &survival[t - 1] - &survival[t];
        if t % 2 == 0 {
            total += &lost * &five;
        } else {
            total -= &lost * &five;
        }
    }
    total
}

/// Exact expected bonus of a report given the reporter's received tuple,
/// the opponent reporting truthfully. Player 1 reports `p` signals and
/// player 2 `p - 1`.
pub fn truthful_payoff_bound(
    chain: &ChainSpec,
    reporter: Player,
    received: &[usize],
    reported: &[usize],
    epsilon: &Rational,
) -> Result<Rational> {
    check_inputs(chain, &[received, reported])?;
    let (len, opp) = shape(reporter, received.len(), reported.len())?;
    let lists = candidates(chain, reporter, received)
        .ok_or_else(|| Error::validation("received tuple has positive probability", format!("{received:?}")))?;
    let mut total = Rational::ZERO;
    let mut count = 0i64;
    for_each_sequence(reporter, &lists, reported, len, opp, |seq| {
        total += bonus(NicenessVerdict::from_break(chain.first_break(seq)), epsilon);
        count += 1;
    });
    Ok(total / Rational::from_integer(count))
}

fn make_check(condition: UiCondition, l: usize, own: &[usize], report: &[usize], m: Option<usize>, r: usize, s: &[u64]) -> Option<UiCheck> {
    if s[r] == 0 {
        return None;
    }
    let probability = Rational::new(s[r + 1] as i64, s[r] as i64);
    let pass = in_band(&probability);
    Some(UiCheck { condition, l, own: own.to_vec(), report: report.to_vec(), m, r, probability, pass })
}

/// Visits every non-vacuous check of `u^l`; returns the number of vacuous ones.
fn level_checks(chain: &ChainSpec, l: usize, mut visit: impl FnMut(UiCheck)) -> u64 {
    let n = chain.n();
    let mut vacuous = 0;
    for id in 0..checked_pow(n, l) as usize {
        let c = decode_tuple(n, l, id);
        for rid in 0..checked_pow(n, l) as usize {
            let mut cp = vec![c[0]];
            cp.extend(decode_tuple(n, l, rid));
            let s = match survival_counts(chain, Player::One, &c, &cp).expect("shape is valid") {
                Some(s) => s,
                None => {
                    vacuous += 1;
                    continue;
                }
            };
            match make_check(UiCondition::Ui1Extra, l, &c, &cp, None, 2 * l, &s) {
                Some(chk) => visit(chk),
                None => vacuous += 1,
            }
            // misreport checks ignore the extra signal; visit them once
            if cp[l] != 1 {
                continue;
            }
            for m in (2..=l).filter(|&m| cp[m - 1] != c[m - 1]) {
                for r in [2 * m - 2, 2 * m - 1] {
                    match make_check(UiCondition::Ui1Misreport, l, &c, &cp[..l], Some(m), r, &s) {
                        Some(chk) => visit(chk),
                        None => vacuous += 1,
                    }
                }
            }
        }
    }
    for p in 2..=l {
        for id in 0..checked_pow(n, l) as usize {
            let d = decode_tuple(n, l, id);
            for rid in 0..checked_pow(n, p - 1) as usize {
                let dp = decode_tuple(n, p - 1, rid);
                let Some(s) = survival_counts(chain, Player::Two, &d, &dp).expect("shape is valid") else {
                    vacuous += 1;
                    continue;
                };
                for m in (1..p).filter(|&m| dp[m - 1] != d[m - 1]) {
                    for r in [2 * m - 1, 2 * m] {
                        match make_check(UiCondition::Ui2Misreport, l, &d, &dp, Some(m), r, &s) {
                            Some(chk) => visit(chk),
                            None => vacuous += 1,
                        }
                    }
                }
            }
        }
    }
    vacuous
}

fn level_work(n: usize, l: usize) -> u128 {
    let half = checked_pow(n / 2, l);
    let mut w = checked_pow(n, 2 * l).saturating_mul(half).saturating_mul(2 * l as u128 + 1);
    for p in 2..=l {
        w = w.saturating_add(checked_pow(n, l + p - 1).saturating_mul(checked_pow(n / 2, p)).saturating_mul(2 * p as u128));
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub l: usize,
    pub tested: BTreeMap<UiCondition, u64>,
    pub violated: BTreeMap<UiCondition, u64>,
    /// Checks skipped because the conditioning event has probability 0.
    pub vacuous: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub l_max: usize,
    pub alpha: Rational,
    pub interval: [Rational; 2],
    pub levels: Vec<LevelSummary>,
    pub violations: BTreeMap<UiCondition, Vec<UiCheck>>,
}

impl UiReport {
    pub fn passes_at(&self, l: usize) -> bool {
        self.levels.iter().any(|s| s.l == l && s.violated.values().all(|&v| v == 0))
    }

    pub fn passes(&self) -> bool {
        (1..=self.l_max).all(|l| self.passes_at(l))
    }

    pub fn total_violations(&self) -> u64 {
        self.levels.iter().flat_map(|s| s.violated.values()).sum()
    }

    /// Violated over tested checks at level `l`; 0 when nothing was tested.
    pub fn violation_fraction(&self, l: usize) -> Rational {
        let Some(s) = self.levels.iter().find(|s| s.l == l) else { return Rational::ZERO };
        let tested: u64 = s.tested.values().sum();
        if tested == 0 {
            return Rational::ZERO;
        }
        Rational::new(s.violated.values().sum::<u64>() as i64, tested as i64)
    }
}

/// Every incentive condition of `u^1, ..., u^l_max`, exhaustively.
pub fn check_ui(chain: &ChainSpec, l_max: usize, budget: u128) -> Result<UiReport> {
    if l_max == 0 {
        return Err(Error::validation("l_max >= 1", "l_max = 0"));
    }
    let needed = (1..=l_max).fold(0u128, |acc, l| acc.saturating_add(level_work(chain.n(), l)));
    if needed > budget {
        return Err(Error::BudgetExceeded { what: format!("exhaustive incentive scan to level {l_max}"), needed, limit: budget });
    }
    let a = alpha();
    let half = Rational::new(1, 2);
    let mut levels = Vec::new();
    let mut violations: BTreeMap<UiCondition, Vec<UiCheck>> = BTreeMap::new();
    for l in 1..=l_max {
        let mut tested = BTreeMap::new();
        let mut violated = BTreeMap::new();
        for cond in [UiCondition::Ui1Extra, UiCondition::Ui1Misreport, UiCondition::Ui2Misreport] {
            tested.insert(cond, 0);
            violated.insert(cond, 0);
        }
        let vacuous = level_checks(chain, l, |chk| {
            *tested.get_mut(&chk.condition).expect("all conditions present") += 1;
            if !chk.pass {
                *violated.get_mut(&chk.condition).expect("all conditions present") += 1;
                violations.entry(chk.condition).or_default().push(chk);
            }
        });
        levels.push(LevelSummary { l, tested, violated, vacuous });
    }
    Ok(UiReport { n: chain.n(), l_max, alpha: a.clone(), interval: [&half - &a, half + a], levels, violations })
}

/// Median over seeds of the violation fraction of `u^l` for sampled chains.
pub fn violation_fraction_median(n: usize, seeds: impl IntoIterator<Item = u64>, l: usize, budget: u128) -> Result<Rational> {
    let mut fractions = Vec::new();
    for seed in seeds {
        fractions.push(check_ui(&sample_chain(n, seed)?, l, budget)?.violation_fraction(l));
    }
    if fractions.is_empty() {
        return Err(Error::validation("at least one seed", "no seeds"));
    }
    fractions.sort();
    let k = fractions.len();
    Ok(if k % 2 == 1 {
        fractions[k / 2].clone()
    } else {
        (&fractions[k / 2 - 1] + &fractions[k / 2]) / Rational::from_integer(2)
    })
}

fn distinct(a: usize, b: usize) -> Vec<usize> {
    if a == b {
        vec![a]
    } else {
        vec![a, b]
    }
}

/// Which closed form applies to a check.
pub fn formula_kind(chk: &UiCheck) -> &'static str {
    let m = chk.m.unwrap_or(0);
    match chk.condition {
        UiCondition::Ui1Extra => "extra-signal",
        UiCondition::Ui1Misreport if chk.r == 2 * m - 2 => "p1-before-opponent",
        UiCondition::Ui1Misreport if m == chk.l => "p1-last-signal",
        UiCondition::Ui1Misreport => "p1-after-opponent",
        UiCondition::Ui2Misreport if chk.r == 2 * m => "p2-after-opponent",
        UiCondition::Ui2Misreport if m == 1 => "p2-first-signal",
        UiCondition::Ui2Misreport => "p2-before-opponent",
    }
}

/// The check's probability as half a ratio of two overlap statistics.
/// `None` when the denominator vanishes.
pub fn ui_formula(chain: &ChainSpec, chk: &UiCheck) -> Option<Rational> {
    let (o, rep) = (&chk.own, &chk.report);
    let m = chk.m.unwrap_or(0);
    // 1-based coordinate access
    let own = |i: usize| o[i - 1];
    let rp = |i: usize| rep[i - 1];
    let (num, den) = match formula_kind(chk) {
        "extra-signal" => {
            let l = chk.l;
            let rows = distinct(own(l), rp(l));
            (y_count(chain, &[rp(l + 1)], &rows), y_count(chain, &[], &rows))
        }
        "p1-before-opponent" => {
            let rows = distinct(rp(m - 1), own(m - 1));
            (y_count(chain, &[rp(m), own(m)], &rows), y_count(chain, &[own(m)], &rows))
        }
        "p1-last-signal" => (y_count(chain, &[], &[rp(m), own(m)]), y_count(chain, &[], &[own(m)])),
        "p1-after-opponent" => (y_count(chain, &[own(m + 1)], &[rp(m), own(m)]), y_count(chain, &[own(m + 1)], &[own(m)])),
        "p2-first-signal" => (y_count(chain, &[own(1), rp(1)], &[]), y_count(chain, &[own(1)], &[])),
        "p2-before-opponent" => {
            let rows = distinct(own(m - 1), rp(m - 1));
            (y_count(chain, &[own(m), rp(m)], &rows), y_count(chain, &[own(m)], &rows))
        }
        _ => (y_count(chain, &[own(m + 1)], &[rp(m), own(m)]), y_count(chain, &[own(m + 1)], &[own(m)])),
    };
    if den == 0 {
        return None;
    }
    Some(Rational::new(num as i64, 2 * den as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrosscheckScope {
    /// Every check of `u^1, ..., u^l_max`.
    Exhaustive { l_max: usize },
    /// Random non-vacuous checks with signal tuples of length at most `l_max`.
    Sampled { l_max: usize, cases: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub check: UiCheck,
    pub formula: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub scope: CrosscheckScope,
    pub cases: u64,
    pub by_kind: BTreeMap<String, u64>,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.cases > 0
    }
}

fn random_path(chain: &ChainSpec, rng: &mut impl Rng, len: usize) -> Vec<usize> {
    let mut path = vec![rng.gen_range(1..=chain.n())];
    while path.len() < len {
        let succ = chain.successors(*path.last().expect("nonempty"));
        path.push(succ[rng.gen_range(0..succ.len())]);
    }
    path
}

fn random_other(rng: &mut impl Rng, n: usize, avoid: usize) -> usize {
    let z = rng.gen_range(1..n);
    if z >= avoid {
        z + 1
    } else {
        z
    }
}

fn random_check(chain: &ChainSpec, rng: &mut impl Rng, l_max: usize) -> Option<UiCheck> {
    let n = chain.n();
    let l = rng.gen_range(1..=l_max);
    let path = random_path(chain, rng, 2 * l);
    let cs: Vec<usize> = path.iter().step_by(2).copied().collect();
    let ds: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();
    let kind = if l == 1 { 0 } else { rng.gen_range(0..3) };
    match kind {
        0 => {
            let mut cp = vec![cs[0]];
            cp.extend((0..l).map(|_| rng.gen_range(1..=n)));
            let s = survival_counts(chain, Player::One, &cs, &cp).ok()??;
            make_check(UiCondition::Ui1Extra, l, &cs, &cp, None, 2 * l, &s)
        }
        1 => {
            let m = rng.gen_range(2..=l);
            let mut cp: Vec<usize> = (0..l).map(|t| if t == 0 || rng.gen_bool(0.5) { cs[t] } else { rng.gen_range(1..=n) }).collect();
            cp[m - 1] = random_other(rng, n, cs[m - 1]);
            let r = if rng.gen_bool(0.5) { 2 * m - 2 } else { 2 * m - 1 };
            let mut padded = cp.clone();
            padded.push(1);
            let s = survival_counts(chain, Player::One, &cs, &padded).ok()??;
            make_check(UiCondition::Ui1Misreport, l, &cs, &cp, Some(m), r, &s)
        }
        _ => {
            let p = rng.gen_range(2..=l);
            let m = rng.gen_range(1..p);
            let mut dp: Vec<usize> = (0..p - 1).map(|t| if rng.gen_bool(0.5) { ds[t] } else { rng.gen_range(1..=n) }).collect();
            dp[m - 1] = random_other(rng, n, ds[m - 1]);
            let r = if rng.gen_bool(0.5) { 2 * m - 1 } else { 2 * m };
            let s = survival_counts(chain, Player::Two, &ds, &dp).ok()??;
            make_check(UiCondition::Ui2Misreport, l, &ds, &dp, Some(m), r, &s)
        }
    }
}

/// Compares every directly summed probability in scope with its closed form.
pub fn ui_formula_crosscheck(chain: &ChainSpec, scope: CrosscheckScope, budget: u128) -> Result<CrosscheckReport> {
    let mut report = CrosscheckReport { n: chain.n(), scope, cases: 0, by_kind: BTreeMap::new(), mismatches: Vec::new() };
    let mut record = |chk: UiCheck| {
        let f = ui_formula(chain, &chk);
        report.cases += 1;
        *report.by_kind.entry(formula_kind(&chk).to_string()).or_insert(0) += 1;
        if f.as_ref() != Some(&chk.probability) {
            report.mismatches.push(Mismatch { check: chk, formula: f });
        }
    };
    match scope {
        CrosscheckScope::Exhaustive { l_max } => {
            let needed = (1..=l_max).fold(0u128, |acc, l| acc.saturating_add(level_work(chain.n(), l)));
            if needed > budget {
                return Err(Error::BudgetExceeded { what: "exhaustive formula cross-check".into(), needed, limit: budget });
            }
            for l in 1..=l_max {
                level_checks(chain, l, &mut record);
            }
        }
        CrosscheckScope::Sampled { l_max, cases, seed } => {
            if l_max == 0 {
                return Err(Error::validation("l_max >= 1", "l_max = 0"));
            }
            let mut rng = random::rng(seed);
            let mut found = 0;
            for _ in 0..cases.saturating_mul(1000) {
                if found == cases {
                    break;
                }
                if let Some(chk) = random_check(chain, &mut rng, l_max) {
                    record(chk);
                    found += 1;
                }
            }
        }
    }
    Ok(report)
}
