//! Score distributions: independent and bivariate Poisson, and three-way outcome
//! probabilities from the goal difference.
//!
//! The bivariate model writes the scores as `X_home + X_C` and `X_away + X_C` with three
//! independent Poisson components. The goal difference does not depend on `X_C`, so
//! both models share the same outcome probabilities for given `(λ_home, λ_away)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::OutcomeDistribution;
use crate::scalar::{ln_factorial, log_sum_exp, Scalar};

/// Largest absolute log-rate accepted before a fit is treated as divergent.
pub const RATE_EXPONENT_GUARD: f64 = 30.0;

/// Default score-grid cap for outcome probabilities.
pub const DEFAULT_GOAL_CAP: u32 = 30;

/// Smallest cap accepted by [`skellam_outcome`].
pub const MIN_GOAL_CAP: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringRates<S> {
    pub lambda_home: S,
    pub lambda_away: S,
    /// Shared component; zero for the independent model.
    pub lambda_c: S,
}

impl<S: Scalar> ScoringRates<S> {
    pub fn independent(lambda_home: S, lambda_away: S) -> Self {
        Self { lambda_home, lambda_away, lambda_c: S::zero() }
    }

    pub fn bivariate(lambda_home: S, lambda_away: S, lambda_c: S) -> Self {
        Self { lambda_home, lambda_away, lambda_c }
    }

    /// Builds rates from log-rates, rejecting exponents beyond the overflow guard.
    pub fn from_log_rates(ln_home: S, ln_away: S, lambda_c: S) -> Result<Self> {
        let guard = S::lit(RATE_EXPONENT_GUARD);
        for e in [ln_home, ln_away] {
            if !(e.abs() <= guard) {
                return Err(Error::RateOverflow(e.to_f64_lossy()));
            }
        }
        Ok(Self { lambda_home: ln_home.exp(), lambda_away: ln_away.exp(), lambda_c })
    }
}

/// Rates for one strength per team: `exp(c + (r_home + h) - r_away)` and
/// `exp(c + r_away - (r_home + h))`.
pub fn single_strength_rates<S: Scalar>(
    intercept: S,
    r_home: S,
    r_away: S,
    home_effect: S,
    lambda_c: S,
    neutral: bool,
) -> Result<ScoringRates<S>> {
    let h = if neutral { S::zero() } else { home_effect };
    let gap = r_home + h - r_away;
    ScoringRates::from_log_rates(intercept + gap, intercept - gap, lambda_c)
}

/// Rates for attack/defence strengths: `exp(c + (o_home + h) - d_away)` and
/// `exp(c + o_away - (d_home + h))`.
#[allow(clippy::too_many_arguments)]
pub fn def_att_rates<S: Scalar>(
    intercept: S,
    attack_home: S,
    defence_home: S,
    attack_away: S,
    defence_away: S,
    home_effect: S,
    lambda_c: S,
    neutral: bool,
) -> Result<ScoringRates<S>> {
    let h = if neutral { S::zero() } else { home_effect };
    ScoringRates::from_log_rates(
        intercept + attack_home + h - defence_away,
        intercept + attack_away - (defence_home + h),
        lambda_c,
    )
}

pub fn poisson_log_pmf<S: Scalar>(lambda: S, k: u32) -> S {
    S::from_count(k as usize) * lambda.ln() - lambda - ln_factorial(k)
}

/// Log of the product of two Poisson masses. Uses only `lambda_home` and `lambda_away`.
pub fn independent_log_pmf<S: Scalar>(rates: &ScoringRates<S>, x: u32, y: u32) -> S {
    poisson_log_pmf(rates.lambda_home, x) + poisson_log_pmf(rates.lambda_away, y)
}

pub fn independent_pmf<S: Scalar>(rates: &ScoringRates<S>, x: u32, y: u32) -> S {
    independent_log_pmf(rates, x, y).exp()
}

/// Log bivariate Poisson mass and the posterior mean of the shared component
/// `E[X_C | x, y]`, which is what the score equations need.
pub(crate) fn bivariate_log_pmf_parts<S: Scalar>(rates: &ScoringRates<S>, x: u32, y: u32) -> (S, S) {
    let base = independent_log_pmf(rates, x, y);
    if rates.lambda_c == S::zero() {
        return (base, S::zero());
    }
    let ln_theta = rates.lambda_c.ln() - rates.lambda_home.ln() - rates.lambda_away.ln();
    let kmax = x.min(y);
    let mut terms = Vec::with_capacity(kmax as usize + 1);
    let mut t = S::zero();
    terms.push(t);
    for k in 0..kmax {
        let ratio = S::from_count(((x - k) * (y - k)) as usize) / S::from_count(k as usize + 1);
        t += ratio.ln() + ln_theta;
        terms.push(t);
    }
    let ln_sum = log_sum_exp(&terms);
    let mean_shared = terms.iter().enumerate().map(|(k, &lt)| S::from_count(k) * (lt - ln_sum).exp()).sum();
    (base - rates.lambda_c + ln_sum, mean_shared)
}

pub fn bivariate_log_pmf<S: Scalar>(rates: &ScoringRates<S>, x: u32, y: u32) -> S {
    bivariate_log_pmf_parts(rates, x, y).0
}

/// Bivariate Poisson mass; identical to [`independent_pmf`] when `lambda_c == 0`.
pub fn bivariate_pmf<S: Scalar>(rates: &ScoringRates<S>, x: u32, y: u32) -> S {
    bivariate_log_pmf(rates, x, y).exp()
}

fn truncated_masses<S: Scalar>(lambda: S, cap: u32) -> Vec<S> {
    (0..=cap).map(|k| poisson_log_pmf(lambda, k).exp()).collect()
}

/// Home win / draw / away win probabilities from the Skellam distribution of
/// `X_home - X_away`, summed over the `0..=max_goals` score grid.
///
/// The grid mass is checked against 1: a deficit up to `1e-10` (or a few ulps for
/// single precision) is renormalized away, anything larger is an error.
pub fn skellam_outcome<S: Scalar>(rates: &ScoringRates<S>, max_goals: u32) -> Result<OutcomeDistribution<S>> {
    if max_goals < MIN_GOAL_CAP {
        return Err(Error::InvalidParameter(format!("goal cap {max_goals} is below the minimum of {MIN_GOAL_CAP}")));
    }
    let home = truncated_masses(rates.lambda_home, max_goals);
    let away = truncated_masses(rates.lambda_away, max_goals);
    let home_mass: S = home.iter().copied().sum();
    let away_mass: S = away.iter().copied().sum();
    let total = home_mass * away_mass;
    let tol = S::lit(1e-10).max(S::epsilon() * S::lit(64.0));
    let deficit = S::one() - total;
    if !(deficit <= tol) {
        return Err(Error::Truncation { cap: max_goals, deficit: deficit.to_f64_lossy() });
    }
    let n = home.len();
    // above[k] = Σ_{j > k} p[j]
    let tail_above = |p: &[S]| {
        let mut above = vec![S::zero(); n];
        for k in (0..n - 1).rev() {
            above[k] = above[k + 1] + p[k + 1];
        }
        above
    };
    let home_above = tail_above(&home);
    let away_above = tail_above(&away);
    let p_home: S = (0..n).map(|y| away[y] * home_above[y]).sum();
    let p_away: S = (0..n).map(|x| home[x] * away_above[x]).sum();
    let p_draw: S = (0..n).map(|k| home[k] * away[k]).sum();
    Ok(OutcomeDistribution { p_home: p_home / total, p_draw: p_draw / total, p_away: p_away / total })
}

/// A cap that keeps the truncation deficit negligible for the given rates.
pub fn goal_cap_for<S: Scalar>(rates: &ScoringRates<S>) -> u32 {
    let lam = rates.lambda_home.max(rates.lambda_away).to_f64_lossy();
    let needed = lam + 12.0 * lam.sqrt() + 20.0;
    DEFAULT_GOAL_CAP.max(needed.ceil().min(1.0e6) as u32)
}

/// Mean home and away scores, `λ + λ_C` each.
pub fn expected_scores<S: Scalar>(rates: &ScoringRates<S>) -> (S, S) {
    (rates.lambda_home + rates.lambda_c, rates.lambda_away + rates.lambda_c)
}
