//! Outcome probabilities for the paired-comparison models: Thurstone-Mosteller
//! (normal latent performances), Bradley-Terry (logistic) and Bradley-Terry-Davidson
//! (multiplicative draw term).
//!
//! Draw probabilities are never formed as `1 - p_home - p_away`. They are evaluated
//! as a difference of two CDF values taken from whichever tail keeps precision, so a
//! lopsided fixture cannot produce a negative draw probability through cancellation.

use serde::{Deserialize, Serialize};

use crate::data::OutcomeLabel;
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};
use crate::special::{logistic, normal_cdf_pair, normal_pdf};

/// `(p_home, p_draw, p_away)` on the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution<S> {
    pub p_home: S,
    pub p_draw: S,
    pub p_away: S,
}

impl<S: Scalar> OutcomeDistribution<S> {
    /// Checks every entry lies in `[0, 1]` and the total is 1 within `1e-9`.
    pub fn new(p_home: S, p_draw: S, p_away: S) -> Result<Self> {
        let d = Self { p_home, p_draw, p_away };
        let unit = |p: S| p >= S::zero() && p <= S::one();
        if !(unit(p_home) && unit(p_draw) && unit(p_away)) || (d.total() - S::one()).abs() > S::lit(1e-9) {
            return Err(Error::InvalidParameter(format!(
                "({p_home}, {p_draw}, {p_away}) is not a probability distribution"
            )));
        }
        Ok(d)
    }

    pub fn uniform() -> Self {
        let third = S::one() / S::lit(3.0);
        Self { p_home: third, p_draw: third, p_away: third }
    }

    pub fn prob(&self, label: OutcomeLabel) -> S {
        match label {
            OutcomeLabel::Home => self.p_home,
            OutcomeLabel::Draw => self.p_draw,
            OutcomeLabel::Away => self.p_away,
        }
    }

    pub fn total(&self) -> S {
        self.p_home + self.p_draw + self.p_away
    }

    /// Swaps the roles of the two sides.
    pub fn mirrored(&self) -> Self {
        Self { p_home: self.p_away, p_draw: self.p_draw, p_away: self.p_home }
    }

    fn from_array(p: [S; 3]) -> Self {
        Self { p_home: p[0], p_draw: p[1], p_away: p[2] }
    }
}

pub(crate) const HOME: usize = 0;
pub(crate) const DRAW: usize = 1;
pub(crate) const AWAY: usize = 2;

pub(crate) fn outcome_slot(label: OutcomeLabel) -> usize {
    match label {
        OutcomeLabel::Home => HOME,
        OutcomeLabel::Draw => DRAW,
        OutcomeLabel::Away => AWAY,
    }
}

/// Probabilities of a threshold model plus their derivatives with respect to the
/// strength gap `delta` and the draw half-width `d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThresholdEval<S> {
    pub prob: [S; 3],
    pub d_delta: [S; 3],
    pub d_draw: [S; 3],
}

fn check_threshold<S: Scalar>(d: S, scale: S, scale_name: &str) -> Result<()> {
    if !(d >= S::zero()) {
        return Err(Error::InvalidParameter(format!("draw parameter must be nonnegative, got {d}")));
    }
    if !(scale > S::zero()) {
        return Err(Error::InvalidParameter(format!("{scale_name} must be positive, got {scale}")));
    }
    Ok(())
}

fn clamp_draw<S: Scalar>(p: S) -> S {
    // Rounding can leave a residue of order 1e-17 below zero.
    if p < S::zero() {
        S::zero()
    } else {
        p
    }
}

/// Thurstone-Mosteller: performance gap `~ N(delta, 2σ²)`, draw when `|gap| < d`.
pub(crate) fn tm_eval<S: Scalar>(delta: S, d: S, sigma: S) -> ThresholdEval<S> {
    let k = sigma * S::SQRT_2();
    let z_home = (delta - d) / k;
    let z_away = (-delta - d) / k;
    let (p_home, q_home) = normal_cdf_pair(z_home);
    let (p_away, q_away) = normal_cdf_pair(z_away);
    // P(draw) = Φ(-z_home) - Φ(z_away), taken from the upper tail when the away side
    // is a heavy favourite.
    let p_draw = if z_away > S::zero() { q_away - p_home } else { q_home - p_away };
    let f_home = normal_pdf(z_home) / k;
    let f_away = normal_pdf(z_away) / k;
    ThresholdEval {
        prob: [p_home, clamp_draw(p_draw), p_away],
        d_delta: [f_home, f_away - f_home, -f_away],
        d_draw: [-f_home, f_home + f_away, -f_away],
    }
}

/// Bradley-Terry: performance gap logistic with scale `s`, draw when `|gap| < d`.
pub(crate) fn bt_eval<S: Scalar>(delta: S, d: S, s: S) -> ThresholdEval<S> {
    let z_home = (delta - d) / s;
    let z_away = (-delta - d) / s;
    let p_home = logistic(z_home);
    let p_away = logistic(z_away);
    // σ(u) - σ(l) = σ(u)·σ(-l)·(1 - e^{l-u}) with u = -z_home, l = z_away, l - u = -2d/s.
    let p_draw = logistic(-z_home) * logistic(-z_away) * -(S::lit(-2.0) * d / s).exp_m1();
    let f_home = p_home * logistic(-z_home) / s;
    let f_away = p_away * logistic(-z_away) / s;
    ThresholdEval {
        prob: [p_home, clamp_draw(p_draw), p_away],
        d_delta: [f_home, f_away - f_home, -f_away],
        d_draw: [-f_home, f_home + f_away, -f_away],
    }
}

/// Davidson log-probabilities from `a = ln(h*·r*_home)`, `b = ln r*_away`,
/// `ln_draw = ln d*`. Returns `(log_probs, probs)`.
pub(crate) fn davidson_eval<S: Scalar>(a: S, b: S, ln_draw: S) -> ([S; 3], [S; 3]) {
    let c = ln_draw + (a + b) * S::lit(0.5);
    let z = log_sum_exp(&[a, c, b]);
    let lp = [a - z, c - z, b - z];
    (lp, [lp[0].exp(), lp[1].exp(), lp[2].exp()])
}

fn home_gap<S: Scalar>(r_home: S, r_away: S, h: S, neutral: bool) -> S {
    if neutral {
        r_home - r_away
    } else {
        r_home + h - r_away
    }
}

/// Thurstone-Mosteller outcome probabilities. The home effect is dropped on neutral ground.
pub fn tm_outcome<S: Scalar>(
    r_home: S,
    r_away: S,
    h: S,
    d: S,
    sigma: S,
    neutral: bool,
) -> Result<OutcomeDistribution<S>> {
    check_threshold(d, sigma, "sigma")?;
    Ok(OutcomeDistribution::from_array(tm_eval(home_gap(r_home, r_away, h, neutral), d, sigma).prob))
}

/// Bradley-Terry outcome probabilities. The home effect is dropped on neutral ground.
pub fn bt_outcome<S: Scalar>(r_home: S, r_away: S, h: S, d: S, s: S, neutral: bool) -> Result<OutcomeDistribution<S>> {
    check_threshold(d, s, "scale")?;
    Ok(OutcomeDistribution::from_array(bt_eval(home_gap(r_home, r_away, h, neutral), d, s).prob))
}

/// Bradley-Terry-Davidson outcome probabilities on the multiplicative scale.
/// Neutral ground sets `h* = 1`.
pub fn btd_outcome<S: Scalar>(
    rstar_home: S,
    rstar_away: S,
    hstar: S,
    dstar: S,
    neutral: bool,
) -> Result<OutcomeDistribution<S>> {
    if !(rstar_home > S::zero() && rstar_away > S::zero() && hstar > S::zero()) {
        return Err(Error::InvalidParameter("Davidson strengths and home factor must be positive".into()));
    }
    if !(dstar >= S::zero()) {
        return Err(Error::InvalidParameter(format!("draw factor must be nonnegative, got {dstar}")));
    }
    let ln_h = if neutral { S::zero() } else { hstar.ln() };
    let (_, p) = davidson_eval(ln_h + rstar_home.ln(), rstar_away.ln(), dstar.ln());
    Ok(OutcomeDistribution::from_array(p))
}
