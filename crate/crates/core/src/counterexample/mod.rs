//! The Markov-chain family of information structures that are pairwise far
//! apart yet share belief hierarchies up to any fixed order, with the
//! machinery to check its incentive conditions at small sizes.
//!
//! Chain states are `1..=N`. A tuple of signals `(s_1, ..., s_l)` is encoded as
//! the single id `Σ (s_i - 1) N^(l-i)`, so dropping the last coordinate of a
//! tuple is integer division of its id by `N`.
//!
//! Nothing here establishes the asymptotic existence statement. What is
//! checked exactly is the algebra (conditional probabilities against their
//! closed forms, marginal consistency, belief equality) and the implication
//! from the incentive conditions to the value bounds, instance by instance.

mod build;
mod chain;
mod hoeffding;
mod separation;
mod ui;
mod ystats;

pub use build::{build_g_p, build_u_l, decision_problem, g0, prefix_marginal, u_l_support_size};
pub use chain::{niceness, sample_chain, sample_successors, ChainSpec, NicenessStatus, NicenessVerdict};
pub use hoeffding::{hoeffding_experiment, stirling_check, HoeffdingReport, StirlingRow, TailRow};
pub use separation::{induction_constants, verify_separation, BoundKind, InductionConstants, SeparationReport};
pub use ui::{
    check_ui, payoff_from_survival, survival_profile, truthful_payoff_bound, ui_formula, ui_formula_crosscheck,
    violation_fraction_median, CrosscheckReport, CrosscheckScope, UiCheck, UiCondition, UiReport,
};
pub use ystats::{event_e_check, y_count, y_statistics, EventReport, EventViolation, YStatistics};

use crate::exactlp::Rational;

/// Default work-unit cap for exhaustive scans and LP solves.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Tolerance of the incentive conditions around 1/2.
pub fn alpha() -> Rational {
    Rational::new(1, 25)
}

/// Largest `1/(10(N+1)^2 + 1)`, strictly inside the admissible range.
pub fn default_epsilon(n: usize) -> Rational {
    let m = (n as i64 + 1) * (n as i64 + 1);
    Rational::new(1, 10 * m + 1)
}

/// Exclusive upper limit on the bonus size.
pub fn epsilon_limit(n: usize) -> Rational {
    let m = (n as i64 + 1) * (n as i64 + 1);
    Rational::new(1, 10 * m)
}

/// Id of a tuple over `1..=n`.
pub fn encode_tuple(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &s| acc * n + (s - 1))
}

/// Tuple of length `len` with the given id.
pub fn decode_tuple(n: usize, len: usize, mut id: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for s in out.iter_mut().rev() {
        *s = id % n + 1;
        id /= n;
    }
    out
}

pub(crate) fn checked_pow(n: usize, e: usize) -> u128 {
    (n as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}
