//! Per-match likelihood weights: exponential time decay, match importance and
//! goal-difference emphasis.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::data::{days_between, ImportanceClass, MatchRecord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig<S> {
    pub half_period_days: S,
    pub reference_date: NaiveDate,
    pub use_importance: bool,
    pub use_goal_diff: bool,
}

impl<S: Scalar> WeightConfig<S> {
    pub fn new(half_period_days: S, reference_date: NaiveDate) -> Result<Self> {
        if !(half_period_days > S::zero()) || !half_period_days.is_finite() {
            return Err(Error::InvalidParameter(format!("half period must be positive, got {half_period_days}")));
        }
        Ok(Self { half_period_days, reference_date, use_importance: false, use_goal_diff: false })
    }

    pub fn with_importance(mut self, on: bool) -> Self {
        self.use_importance = on;
        self
    }

    pub fn with_goal_diff(mut self, on: bool) -> Self {
        self.use_goal_diff = on;
        self
    }

    pub fn with_reference_date(mut self, date: NaiveDate) -> Self {
        self.reference_date = date;
        self
    }

    /// Weights for one match relative to this config's reference date.
    pub fn weights(&self, m: &MatchRecord) -> Result<MatchWeights<S>> {
        let days = days_between(m.date, self.reference_date);
        if days < 0 {
            return Err(Error::InvalidParameter(format!(
                "match on {} is after the reference date {}",
                m.date, self.reference_date
            )));
        }
        let w_time = time_weight(S::lit(days as f64), self.half_period_days)?;
        let w_type = if self.use_importance { importance_weight(m.importance) } else { S::one() };
        let w_goal_diff = if self.use_goal_diff { goal_diff_weight(m.home_goals, m.away_goals) } else { S::one() };
        Ok(MatchWeights { w_time, w_type, w_goal_diff, combined: w_time * w_type * w_goal_diff })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchWeights<S> {
    pub w_time: S,
    pub w_type: S,
    pub w_goal_diff: S,
    pub combined: S,
}

/// `(1/2)^(days_back / half_period)`: a match one half period old counts half.
pub fn time_weight<S: Scalar>(days_back: S, half_period: S) -> Result<S> {
    if days_back < S::zero() {
        return Err(Error::InvalidParameter(format!(
            "negative days back ({days_back}): match lies in the future of the reference date"
        )));
    }
    if !(half_period > S::zero()) {
        return Err(Error::InvalidParameter(format!("half period must be positive, got {half_period}")));
    }
    Ok(S::lit(0.5).powf(days_back / half_period))
}

pub fn importance_weight<S: Scalar>(class: ImportanceClass) -> S {
    S::lit(match class {
        ImportanceClass::Friendly => 1.0,
        ImportanceClass::Qualifier => 2.5,
        ImportanceClass::ConfederationTournament => 3.0,
        ImportanceClass::WorldCup => 4.0,
        ImportanceClass::DomesticLeague => 1.0,
    })
}

/// 1 for a draw, otherwise `log2(|goal difference| + 1)`.
pub fn goal_diff_weight<S: Scalar>(home_goals: u32, away_goals: u32) -> S {
    let gd = home_goals.abs_diff(away_goals);
    if gd == 0 {
        S::one()
    } else {
        S::from_count(gd as usize + 1).log2()
    }
}

const FIFA_BAND_DAYS: f64 = 365.0;
const FIFA_BANDS: [f64; 4] = [1.0, 0.5, 0.3, 0.2];

/// Step-wise FIFA-style decay on 365-day bands; only used for comparison plots.
pub fn fifa_decay_curve<S: Scalar>(days_back: S) -> S {
    let band = (days_back / S::lit(FIFA_BAND_DAYS)).floor();
    match band.to_f64_lossy() {
        b if b < 0.0 => S::one(),
        b => FIFA_BANDS.get(b as usize).map_or(S::zero(), |&v| S::lit(v)),
    }
}

/// Rows of `(days_back, smooth weight, FIFA step weight)` for days `0..=max_days`.
pub fn decay_curves<S: Scalar>(half_period: S, max_days: u32, step: u32) -> Result<Vec<(u32, S, S)>> {
    let step = step.max(1);
    (0..=max_days)
        .step_by(step as usize)
        .map(|d| {
            let x = S::from_count(d as usize);
            Ok((d, time_weight(x, half_period)?, fifa_decay_curve(x)))
        })
        .collect()
}
