//! The ten model classes, their specification, and fitted parameters in both the
//! unconstrained optimizer coordinates and the natural ones.
//!
//! Free vector layout, for `T` teams:
//!
//! | block                    | length                      |
//! |--------------------------|-----------------------------|
//! | strengths (or attack)    | `T - 1`                     |
//! | defence (def/att only)   | `T - 1`                     |
//! | home effect `h`          | 1                           |
//! | `ln d` / `ln d*`         | 1 (paired-comparison)       |
//! | intercept `c`            | 1 (Poisson)                 |
//! | `ln λ_C`                 | 1 (bivariate Poisson)       |
//!
//! Each strength block is completed to `T` entries by `r_T = -Σ r_i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{bt_eval, davidson_eval, tm_eval, OutcomeDistribution};
use crate::poisson::{def_att_rates, goal_cap_for, single_strength_rates, skellam_outcome, ScoringRates};
use crate::scalar::Scalar;
use crate::weighting::WeightConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelClass {
    #[serde(rename = "thurstone-mosteller")]
    ThurstoneMosteller,
    #[serde(rename = "bradley-terry")]
    BradleyTerry,
    #[serde(rename = "bradley-terry-davidson")]
    BradleyTerryDavidson,
    #[serde(rename = "thurstone-mosteller+gd")]
    ThurstoneMostellerGd,
    #[serde(rename = "bradley-terry+gd")]
    BradleyTerryGd,
    #[serde(rename = "bradley-terry-davidson+gd")]
    BradleyTerryDavidsonGd,
    #[serde(rename = "independent-poisson")]
    IndependentPoisson,
    #[serde(rename = "bivariate-poisson")]
    BivariatePoisson,
    #[serde(rename = "independent-poisson-def-att")]
    IndependentPoissonDefAtt,
    #[serde(rename = "bivariate-poisson-def-att")]
    BivariatePoissonDefAtt,
}

/// Latent-performance family of a paired-comparison class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalKernel {
    Normal,
    Logistic,
    Davidson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ordinal(OrdinalKernel),
    Poisson { bivariate: bool, def_att: bool },
}

impl ModelClass {
    pub const ALL: [ModelClass; 10] = [
        ModelClass::ThurstoneMosteller,
        ModelClass::BradleyTerry,
        ModelClass::BradleyTerryDavidson,
        ModelClass::ThurstoneMostellerGd,
        ModelClass::BradleyTerryGd,
        ModelClass::BradleyTerryDavidsonGd,
        ModelClass::IndependentPoisson,
        ModelClass::BivariatePoisson,
        ModelClass::IndependentPoissonDefAtt,
        ModelClass::BivariatePoissonDefAtt,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelClass::ThurstoneMosteller => "thurstone-mosteller",
            ModelClass::BradleyTerry => "bradley-terry",
            ModelClass::BradleyTerryDavidson => "bradley-terry-davidson",
            ModelClass::ThurstoneMostellerGd => "thurstone-mosteller+gd",
            ModelClass::BradleyTerryGd => "bradley-terry+gd",
            ModelClass::BradleyTerryDavidsonGd => "bradley-terry-davidson+gd",
            ModelClass::IndependentPoisson => "independent-poisson",
            ModelClass::BivariatePoisson => "bivariate-poisson",
            ModelClass::IndependentPoissonDefAtt => "independent-poisson-def-att",
            ModelClass::BivariatePoissonDefAtt => "bivariate-poisson-def-att",
        }
    }

    /// Human-readable name for report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelClass::ThurstoneMosteller => "Thurstone-Mosteller",
            ModelClass::BradleyTerry => "Bradley-Terry",
            ModelClass::BradleyTerryDavidson => "Bradley-Terry-Davidson",
            ModelClass::ThurstoneMostellerGd => "Thurstone-Mosteller + Goal Difference",
            ModelClass::BradleyTerryGd => "Bradley-Terry + Goal Difference",
            ModelClass::BradleyTerryDavidsonGd => "Bradley-Terry-Davidson + Goal Difference",
            ModelClass::IndependentPoisson => "Independent Poisson",
            ModelClass::BivariatePoisson => "Bivariate Poisson",
            ModelClass::IndependentPoissonDefAtt => "Independent Poisson Def. & Att.",
            ModelClass::BivariatePoissonDefAtt => "Bivariate Poisson Def. & Att.",
        }
    }

    pub fn family(self) -> Family {
        use ModelClass::*;
        match self {
            ThurstoneMosteller | ThurstoneMostellerGd => Family::Ordinal(OrdinalKernel::Normal),
            BradleyTerry | BradleyTerryGd => Family::Ordinal(OrdinalKernel::Logistic),
            BradleyTerryDavidson | BradleyTerryDavidsonGd => Family::Ordinal(OrdinalKernel::Davidson),
            IndependentPoisson => Family::Poisson { bivariate: false, def_att: false },
            BivariatePoisson => Family::Poisson { bivariate: true, def_att: false },
            IndependentPoissonDefAtt => Family::Poisson { bivariate: false, def_att: true },
            BivariatePoissonDefAtt => Family::Poisson { bivariate: true, def_att: true },
        }
    }

    pub fn uses_goal_diff(self) -> bool {
        matches!(
            self,
            ModelClass::ThurstoneMostellerGd | ModelClass::BradleyTerryGd | ModelClass::BradleyTerryDavidsonGd
        )
    }

    pub fn is_poisson(self) -> bool {
        matches!(self.family(), Family::Poisson { .. })
    }

    pub fn is_def_att(self) -> bool {
        matches!(self.family(), Family::Poisson { def_att: true, .. })
    }

    pub fn is_bivariate(self) -> bool {
        matches!(self.family(), Family::Poisson { bivariate: true, .. })
    }

    pub fn strength_blocks(self) -> usize {
        if self.is_def_att() {
            2
        } else {
            1
        }
    }

    /// Length of the free parameter vector for `teams` teams.
    pub fn free_len(self, teams: usize) -> usize {
        let extra = match self.family() {
            Family::Ordinal(_) => 2,
            Family::Poisson { bivariate, .. } => 2 + bivariate as usize,
        };
        self.strength_blocks() * teams.saturating_sub(1) + extra
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|c| c.label()).collect()
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL.iter().copied().find(|c| c.label() == key).ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// A model class together with its weighting and fixed constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec<S> {
    pub class: ModelClass,
    pub weights: WeightConfig<S>,
    /// σ for Thurstone-Mosteller, s for Bradley-Terry. Fixed, never estimated.
    pub scale: S,
}

impl<S: Scalar> ModelSpec<S> {
    /// Sets the goal-difference flag from the class.
    pub fn new(class: ModelClass, weights: WeightConfig<S>) -> Self {
        Self { class, weights: weights.with_goal_diff(class.uses_goal_diff()), scale: S::one() }
    }

    pub fn with_scale(mut self, scale: S) -> Self {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.use_goal_diff != self.class.uses_goal_diff() {
            return Err(Error::InvalidParameter(format!(
                "goal-difference weighting must be {} for {}",
                if self.class.uses_goal_diff() { "on" } else { "off" },
                self.class
            )));
        }
        if !(self.scale > S::zero()) {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        if !(self.weights.half_period_days > S::zero()) {
            return Err(Error::InvalidParameter("half period must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strengths<S> {
    Single { strengths: Vec<S> },
    AttackDefence { attack: Vec<S>, defence: Vec<S> },
}

fn complete_sum_zero<S: Scalar>(free: &[S]) -> Vec<S> {
    let mut v = free.to_vec();
    let last = -free.iter().copied().sum::<S>();
    v.push(last);
    v
}

/// Fitted parameters in natural coordinates.
///
/// Strengths are additive and sum to zero for every class. For Bradley-Terry-Davidson
/// they are `ln r*`, and `home_effect` is `ln h*`; [`ParameterSet::davidson_factors`]
/// returns the multiplicative form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet<S> {
    pub class: ModelClass,
    pub teams: Vec<String>,
    #[serde(flatten)]
    pub strengths: Strengths<S>,
    pub home_effect: S,
    /// `d` for Thurstone-Mosteller / Bradley-Terry, `d*` for Davidson.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub draw: Option<S>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intercept: Option<S>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub covariance: Option<S>,
    pub scale: S,
}

impl<S: Scalar> ParameterSet<S> {
    /// Maps a free vector to natural coordinates (sum-zero completion, exponentiated
    /// positive parameters).
    pub fn from_free(class: ModelClass, teams: Vec<String>, scale: S, free: &[S]) -> Result<Self> {
        let t = teams.len();
        if t < 2 {
            return Err(Error::InvalidParameter("at least two teams are required".into()));
        }
        let expected = class.free_len(t);
        if free.len() != expected {
            return Err(Error::LengthMismatch { expected, got: free.len() });
        }
        let k = t - 1;
        let strengths = if class.is_def_att() {
            Strengths::AttackDefence {
                attack: complete_sum_zero(&free[..k]),
                defence: complete_sum_zero(&free[k..2 * k]),
            }
        } else {
            Strengths::Single { strengths: complete_sum_zero(&free[..k]) }
        };
        let rest = &free[class.strength_blocks() * k..];
        let home_effect = rest[0];
        let (draw, intercept, covariance) = match class.family() {
            Family::Ordinal(_) => (Some(rest[1].exp()), None, None),
            Family::Poisson { bivariate, .. } => (None, Some(rest[1]), bivariate.then(|| rest[2].exp())),
        };
        Ok(Self { class, teams, strengths, home_effect, draw, intercept, covariance, scale })
    }

    /// Inverse of [`ParameterSet::from_free`].
    pub fn to_free(&self) -> Vec<S> {
        let t = self.teams.len();
        let mut free = Vec::with_capacity(self.class.free_len(t));
        match &self.strengths {
            Strengths::Single { strengths } => free.extend_from_slice(&strengths[..t - 1]),
            Strengths::AttackDefence { attack, defence } => {
                free.extend_from_slice(&attack[..t - 1]);
                free.extend_from_slice(&defence[..t - 1]);
            }
        }
        free.push(self.home_effect);
        match self.class.family() {
            Family::Ordinal(_) => free.push(self.draw.unwrap_or(S::one()).ln()),
            Family::Poisson { bivariate, .. } => {
                free.push(self.intercept.unwrap_or(S::zero()));
                if bivariate {
                    free.push(self.covariance.unwrap_or(S::one()).ln());
                }
            }
        }
        free
    }

    /// Default starting point: every free coordinate zero, so strengths and h start at 0 and the
    /// positive parameters at 1.
    pub fn initial_free(class: ModelClass, teams: usize) -> Vec<S> {
        vec![S::zero(); class.free_len(teams)]
    }

    /// Free vector for a new team list, carrying over this fit's values by team name.
    /// Teams without a previous value start at 0; each block is re-centred.
    pub fn warm_start_for(&self, class: ModelClass, teams: &[String]) -> Option<Vec<S>> {
        if class != self.class || teams.len() < 2 {
            return None;
        }
        let lookup = |values: &[S]| -> Vec<S> {
            let mut v: Vec<S> = teams.iter().map(|n| self.team_index(n).map_or(S::zero(), |i| values[i])).collect();
            let mean = v.iter().copied().sum::<S>() / S::from_count(v.len());
            v.iter_mut().for_each(|x| *x -= mean);
            v
        };
        let mut free = Vec::with_capacity(class.free_len(teams.len()));
        match &self.strengths {
            Strengths::Single { strengths } => free.extend_from_slice(&lookup(strengths)[..teams.len() - 1]),
            Strengths::AttackDefence { attack, defence } => {
                free.extend_from_slice(&lookup(attack)[..teams.len() - 1]);
                free.extend_from_slice(&lookup(defence)[..teams.len() - 1]);
            }
        }
        let tail = self.to_free();
        free.extend_from_slice(&tail[class.strength_blocks() * (self.teams.len() - 1)..]);
        Some(free)
    }

    pub fn team_index(&self, name: &str) -> Option<usize> {
        self.teams.iter().position(|t| t == name)
    }

    pub fn single_strengths(&self) -> Option<&[S]> {
        match &self.strengths {
            Strengths::Single { strengths } => Some(strengths),
            Strengths::AttackDefence { .. } => None,
        }
    }

    /// `(r*, h*, d*)` for a Davidson fit.
    pub fn davidson_factors(&self) -> Option<(Vec<S>, S, S)> {
        match (self.class.family(), &self.strengths) {
            (Family::Ordinal(OrdinalKernel::Davidson), Strengths::Single { strengths }) => Some((
                strengths.iter().map(|r| r.exp()).collect(),
                self.home_effect.exp(),
                self.draw.unwrap_or(S::one()),
            )),
            _ => None,
        }
    }

    /// Scoring rates for a fixture; Poisson classes only.
    pub fn scoring_rates(&self, home: usize, away: usize, neutral: bool) -> Result<ScoringRates<S>> {
        if home == away {
            return Err(Error::InvalidParameter("a team cannot play itself".into()));
        }
        let intercept =
            self.intercept.ok_or_else(|| Error::WrongModelKind(format!("{} has no scoring rates", self.class)))?;
        let lambda_c = self.covariance.unwrap_or(S::zero());
        match &self.strengths {
            Strengths::Single { strengths } => {
                single_strength_rates(intercept, strengths[home], strengths[away], self.home_effect, lambda_c, neutral)
            }
            Strengths::AttackDefence { attack, defence } => def_att_rates(
                intercept,
                attack[home],
                defence[home],
                attack[away],
                defence[away],
                self.home_effect,
                lambda_c,
                neutral,
            ),
        }
    }

    /// Outcome probabilities for a fixture between two fitted teams.
    pub fn predict(&self, home: usize, away: usize, neutral: bool) -> Result<OutcomeDistribution<S>> {
        if home >= self.teams.len() || away >= self.teams.len() {
            return Err(Error::InvalidParameter("team index out of range".into()));
        }
        match (self.class.family(), &self.strengths) {
            (Family::Poisson { .. }, _) => {
                let rates = self.scoring_rates(home, away, neutral)?;
                skellam_outcome(&rates, goal_cap_for(&rates))
            }
            (Family::Ordinal(kernel), Strengths::Single { strengths }) => {
                if home == away {
                    return Err(Error::InvalidParameter("a team cannot play itself".into()));
                }
                let h = if neutral { S::zero() } else { self.home_effect };
                let d = self.draw.unwrap_or(S::one());
                let p = match kernel {
                    OrdinalKernel::Normal => tm_eval(strengths[home] + h - strengths[away], d, self.scale).prob,
                    OrdinalKernel::Logistic => bt_eval(strengths[home] + h - strengths[away], d, self.scale).prob,
                    OrdinalKernel::Davidson => davidson_eval(strengths[home] + h, strengths[away], d.ln()).1,
                };
                Ok(OutcomeDistribution { p_home: p[0], p_draw: p[1], p_away: p[2] })
            }
            (Family::Ordinal(_), Strengths::AttackDefence { .. }) => {
                Err(Error::WrongModelKind("paired-comparison fits carry one strength per team".into()))
            }
        }
    }

    pub fn predict_by_name(&self, home: &str, away: &str, neutral: bool) -> Result<OutcomeDistribution<S>> {
        let h = self.team_index(home).ok_or_else(|| Error::UnknownTeam(home.to_string()))?;
        let a = self.team_index(away).ok_or_else(|| Error::UnknownTeam(away.to_string()))?;
        self.predict(h, a, neutral)
    }
}
