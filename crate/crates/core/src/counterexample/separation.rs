//! Values of the reporting games and the constants of the backward induction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::game_value::bayesian_value;

use super::build::{build_g_p, build_u_l};
use super::chain::ChainSpec;
use super::checked_pow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `val(u^l, g^p) >= ε` for `p <= l`.
    Lower,
    /// `val(u^l, g^(l+1)) <= -ε`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub l: usize,
    pub p: usize,
    pub epsilon: Rational,
    pub value: Rational,
    pub kind: BoundKind,
    pub meets_bound: bool,
}

/// Exact value of the reporting game `Γ(u^l, g^p)` for `p <= l + 1`,
/// compared with `ε` (or `-ε` when `p = l + 1`).
pub fn verify_separation(chain: &ChainSpec, l: usize, p: usize, epsilon: &Rational, budget: u128) -> Result<SeparationReport> {
    if l == 0 || p == 0 || p > l + 1 {
        return Err(Error::structural(format!("need 1 <= p <= l + 1, got l = {l}, p = {p}")));
    }
    let n = chain.n();
    // LP size: player-1 (signal, action) pairs times player-2 (signal, action) pairs
    let needed = checked_pow(n, l + p).saturating_mul(checked_pow(n, l + p - 1));
    if needed > budget {
        return Err(Error::BudgetExceeded { what: format!("reporting game with l = {l}, p = {p}"), needed, limit: budget });
    }
    let u = build_u_l(chain, l)?;
    let g = build_g_p(chain, p, epsilon)?;
    let value = bayesian_value(&u, &g)?.value;
    let (kind, meets_bound) = if p <= l {
        (BoundKind::Lower, value >= *epsilon)
    } else {
        (BoundKind::Upper, value <= -epsilon.clone())
    };
    Ok(SeparationReport { n, l, p, epsilon: epsilon.clone(), value, kind, meets_bound })
}

/// Per-step margins of the backward induction, in units of `ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionConstants {
    pub alpha: Rational,
    /// Player 2 misreports: continuation, detection bonus and penalty; must be at least 1.
    pub p2_misreport_step: Rational,
    /// Player 1 guesses the extra signal; must be at most -1.
    pub p1_extra_signal_step: Rational,
    /// Player 1 misreports; must be at most -1.
    pub p1_misreport_step: Rational,
}

impl InductionConstants {
    pub fn hold(&self) -> bool {
        self.p2_misreport_step >= Rational::ONE
            && self.p1_extra_signal_step <= -Rational::ONE
            && self.p1_misreport_step <= -Rational::ONE
    }
}

pub fn induction_constants(alpha: &Rational) -> InductionConstants {
    let half = Rational::new(1, 2);
    let quarter = Rational::new(1, 4);
    let five = Rational::from_integer(5);
    let a2 = alpha * alpha;
    let stay_low = &quarter - alpha + &a2;
    let stay_high = &quarter + alpha + &a2;
    let caught = &half - alpha;
    InductionConstants {
        alpha: alpha.clone(),
        p2_misreport_step: &stay_low + &five * &caught - &five * &stay_high,
        p1_extra_signal_step: (&half + alpha) - &five * &caught,
        p1_misreport_step: -stay_low - &five * &caught + &five * &stay_high,
    }
}
