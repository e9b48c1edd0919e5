//! Weighted maximum-likelihood estimation for all ten classes.
//!
//! Every match contributes `w_m · log P(observed result)`, where `w_m` is the product of
//! the enabled weights. Paired-comparison classes score the three-way outcome; Poisson
//! classes score the exact result.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MatchRecord, OutcomeLabel, TeamId};
use crate::error::{Error, Result};
use crate::model::{Family, ModelClass, ModelSpec, OrdinalKernel, ParameterSet, Strengths};
use crate::optim::{minimize, BfgsOptions, Objective, Termination};
use crate::ordinal::{bt_eval, davidson_eval, outcome_slot, tm_eval, DRAW, HOME};
use crate::poisson::{bivariate_log_pmf_parts, independent_log_pmf, ScoringRates, RATE_EXPONENT_GUARD};
use crate::scalar::Scalar;
use crate::weighting::WeightConfig;

/// Absolute strength beyond which a fit is flagged as drifting to the boundary.
pub const STRENGTH_GUARD: f64 = 10.0;

/// One weighted match in estimation coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation<S> {
    pub home: usize,
    pub away: usize,
    pub home_goals: u32,
    pub away_goals: u32,
    pub neutral: bool,
    pub weight: S,
}

impl<S> Observation<S> {
    pub fn outcome(&self) -> OutcomeLabel {
        OutcomeLabel::from_goals(self.home_goals, self.away_goals)
    }
}

/// Matches with precomputed weights over a compact team list.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<S> {
    teams: Vec<String>,
    observations: Vec<Observation<S>>,
    first_date: Option<NaiveDate>,
    last_date: Option<NaiveDate>,
}

impl<S: Scalar> TrainingSet<S> {
    /// Training set over `matches`, keeping only the teams that appear in them.
    pub fn from_matches(data: &Dataset, matches: &[MatchRecord], weights: &WeightConfig<S>) -> Result<Self> {
        let mut remap: Vec<Option<usize>> = vec![None; data.teams().len()];
        let mut teams = Vec::new();
        let mut local = |id: TeamId, teams: &mut Vec<String>| {
            *remap[id.0].get_or_insert_with(|| {
                teams.push(data.team_name(id).to_string());
                teams.len() - 1
            })
        };
        let mut observations = Vec::with_capacity(matches.len());
        for m in matches {
            let w = weights.weights(m)?;
            observations.push(Observation {
                home: local(m.home, &mut teams),
                away: local(m.away, &mut teams),
                home_goals: m.home_goals,
                away_goals: m.away_goals,
                neutral: m.neutral,
                weight: w.combined,
            });
        }
        Ok(Self {
            teams,
            observations,
            first_date: matches.iter().map(|m| m.date).min(),
            last_date: matches.iter().map(|m| m.date).max(),
        })
    }

    /// Training set over a whole dataset, keeping its full team table.
    pub fn from_dataset(data: &Dataset, weights: &WeightConfig<S>) -> Result<Self> {
        let observations = data
            .matches()
            .iter()
            .map(|m| {
                Ok(Observation {
                    home: m.home.0,
                    away: m.away.0,
                    home_goals: m.home_goals,
                    away_goals: m.away_goals,
                    neutral: m.neutral,
                    weight: weights.weights(m)?.combined,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            teams: data.teams().names().to_vec(),
            observations,
            first_date: data.first_date(),
            last_date: data.last_date(),
        })
    }

    pub fn from_observations(teams: Vec<String>, observations: Vec<Observation<S>>) -> Result<Self> {
        for o in &observations {
            if o.home >= teams.len() || o.away >= teams.len() || o.home == o.away {
                return Err(Error::InvalidParameter("observation refers to invalid teams".into()));
            }
            if !(o.weight >= S::zero()) || !o.weight.is_finite() {
                return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
            }
        }
        Ok(Self { teams, observations, first_date: None, last_date: None })
    }

    pub fn teams(&self) -> &[String] {
        &self.teams
    }

    pub fn observations(&self) -> &[Observation<S>] {
        &self.observations
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.first_date
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.last_date
    }

    pub fn total_weight(&self) -> S {
        self.observations.iter().map(|o| o.weight).sum()
    }

    /// Same matches with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: S) -> Self {
        let mut out = self.clone();
        out.observations.iter_mut().for_each(|o| o.weight *= factor);
        out
    }

    /// Teams that have no positively weighted match.
    pub fn unplayed_teams(&self) -> Vec<&str> {
        let mut seen = vec![false; self.teams.len()];
        for o in self.observations.iter().filter(|o| o.weight > S::zero()) {
            seen[o.home] = true;
            seen[o.away] = true;
        }
        seen.iter().zip(&self.teams).filter(|(s, _)| !**s).map(|(_, n)| n.as_str()).collect()
    }

    /// Number of connected components of the comparison graph.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.teams.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for o in self.observations.iter().filter(|o| o.weight > S::zero()) {
            let (a, b) = (root(&mut parent, o.home), root(&mut parent, o.away));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.teams.len()).filter(|&i| root(&mut parent, i) == i).count()
    }
}

/// Weighted log-likelihood and gradient with respect to the free vector.
struct Likelihood<'a, S> {
    class: ModelClass,
    scale: S,
    data: &'a TrainingSet<S>,
    natural: Vec<S>,
}

impl<'a, S: Scalar> Likelihood<'a, S> {
    fn new(spec: &ModelSpec<S>, data: &'a TrainingSet<S>) -> Self {
        Self { class: spec.class, scale: spec.scale, data, natural: Vec::new() }
    }

    /// Returns `-inf` at inadmissible points (zero probability or rate overflow).
    fn eval(&mut self, free: &[S], grad: Option<&mut [S]>) -> S {
        let t = self.data.teams.len();
        let k = t - 1;
        let blocks = self.class.strength_blocks();
        // Natural layout: [strength block(s) of length T][h][δ or c][γ]
        let n_nat = blocks * t + (free.len() - blocks * k);
        self.natural.clear();
        self.natural.resize(n_nat, S::zero());
        for b in 0..blocks {
            let src = &free[b * k..(b + 1) * k];
            let dst = &mut self.natural[b * t..(b + 1) * t];
            dst[..k].copy_from_slice(src);
            dst[k] = -src.iter().copied().sum::<S>();
        }
        let tail = blocks * t;
        self.natural[tail..].copy_from_slice(&free[blocks * k..]);
        let mut g_nat = vec![S::zero(); n_nat];
        let value = match self.class.family() {
            Family::Ordinal(kernel) => self.ordinal(kernel, &mut g_nat),
            Family::Poisson { bivariate, def_att } => self.poisson(bivariate, def_att, &mut g_nat),
        };
        if let Some(grad) = grad {
            for b in 0..blocks {
                let last = g_nat[b * t + k];
                for i in 0..k {
                    grad[b * k + i] = g_nat[b * t + i] - last;
                }
            }
            grad[blocks * k..].copy_from_slice(&g_nat[tail..]);
        }
        value
    }

    fn ordinal(&self, kernel: OrdinalKernel, g: &mut [S]) -> S {
        let t = self.data.teams.len();
        let r = &self.natural[..t];
        let h = self.natural[t];
        let ln_d = self.natural[t + 1];
        let d = ln_d.exp();
        let (ih, id) = (t, t + 1);
        let half = S::lit(0.5);
        let mut total = S::zero();
        for o in &self.data.observations {
            if o.weight == S::zero() {
                continue;
            }
            let slot = outcome_slot(o.outcome());
            let hh = if o.neutral { S::zero() } else { h };
            let (log_p, g_home_side, g_away_side, g_ln_draw) = match kernel {
                OrdinalKernel::Normal | OrdinalKernel::Logistic => {
                    let delta = r[o.home] + hh - r[o.away];
                    let e = if kernel == OrdinalKernel::Normal {
                        tm_eval(delta, d, self.scale)
                    } else {
                        bt_eval(delta, d, self.scale)
                    };
                    let p = e.prob[slot];
                    if !(p > S::zero()) {
                        return S::neg_infinity();
                    }
                    let gd = e.d_delta[slot] / p;
                    (p.ln(), gd, -gd, e.d_draw[slot] / p * d)
                }
                OrdinalKernel::Davidson => {
                    let (lp, p) = davidson_eval(r[o.home] + hh, r[o.away], ln_d);
                    let ind = |s: usize| if s == slot { S::one() } else { S::zero() };
                    let ga = ind(HOME) + half * ind(DRAW) - (p[0] + half * p[1]);
                    let gb = ind(2) + half * ind(DRAW) - (p[2] + half * p[1]);
                    (lp[slot], ga, gb, ind(DRAW) - p[1])
                }
            };
            if !log_p.is_finite() {
                return S::neg_infinity();
            }
            let w = o.weight;
            total += w * log_p;
            g[o.home] += w * g_home_side;
            g[o.away] += w * g_away_side;
            if !o.neutral {
                g[ih] += w * g_home_side;
            }
            g[id] += w * g_ln_draw;
        }
        total
    }

    fn poisson(&self, bivariate: bool, def_att: bool, g: &mut [S]) -> S {
        let t = self.data.teams.len();
        let blocks = if def_att { 2 } else { 1 };
        let base = blocks * t;
        let h = self.natural[base];
        let c = self.natural[base + 1];
        let lambda_c = if bivariate { self.natural[base + 2].exp() } else { S::zero() };
        let guard = S::lit(RATE_EXPONENT_GUARD);
        let mut total = S::zero();
        for o in &self.data.observations {
            if o.weight == S::zero() {
                continue;
            }
            let hh = if o.neutral { S::zero() } else { h };
            let (ln_home, ln_away) = if def_att {
                let (att, def) = self.natural[..2 * t].split_at(t);
                (c + att[o.home] + hh - def[o.away], c + att[o.away] - (def[o.home] + hh))
            } else {
                let r = &self.natural[..t];
                let gap = r[o.home] + hh - r[o.away];
                (c + gap, c - gap)
            };
            if !(ln_home.abs() <= guard && ln_away.abs() <= guard) {
                return S::neg_infinity();
            }
            let rates = ScoringRates::bivariate(ln_home.exp(), ln_away.exp(), lambda_c);
            let x = S::from_count(o.home_goals as usize);
            let y = S::from_count(o.away_goals as usize);
            let (log_p, shared) = if bivariate {
                bivariate_log_pmf_parts(&rates, o.home_goals, o.away_goals)
            } else {
                (independent_log_pmf(&rates, o.home_goals, o.away_goals), S::zero())
            };
            if !log_p.is_finite() {
                return S::neg_infinity();
            }
            // d log p / d ln λ for each component
            let g1 = x - rates.lambda_home - shared;
            let g2 = y - rates.lambda_away - shared;
            let w = o.weight;
            total += w * log_p;
            if def_att {
                g[o.home] += w * g1;
                g[t + o.away] -= w * g1;
                g[o.away] += w * g2;
                g[t + o.home] -= w * g2;
            } else {
                g[o.home] += w * (g1 - g2);
                g[o.away] -= w * (g1 - g2);
            }
            if !o.neutral {
                g[base] += w * (g1 - g2);
            }
            g[base + 1] += w * (g1 + g2);
            if bivariate {
                g[base + 2] += w * (shared - lambda_c);
            }
        }
        total
    }
}

fn check_point<S: Scalar>(spec: &ModelSpec<S>, data: &TrainingSet<S>, free: &[S]) -> Result<()> {
    if data.teams.len() < 2 {
        return Err(Error::InvalidParameter("at least two teams are required".into()));
    }
    let expected = spec.class.free_len(data.teams.len());
    if free.len() != expected {
        return Err(Error::LengthMismatch { expected, got: free.len() });
    }
    if free.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("free parameter vector"));
    }
    Ok(())
}

/// Weighted log-likelihood at `free`. Inadmissible points (a zero-probability observed
/// result, an overflowing scoring rate) evaluate to `-inf`.
pub fn weighted_loglik<S: Scalar>(spec: &ModelSpec<S>, data: &TrainingSet<S>, free: &[S]) -> Result<S> {
    check_point(spec, data, free)?;
    Ok(Likelihood::new(spec, data).eval(free, None))
}

/// Analytic gradient of [`weighted_loglik`] with respect to the free vector.
pub fn gradient<S: Scalar>(spec: &ModelSpec<S>, data: &TrainingSet<S>, free: &[S]) -> Result<Vec<S>> {
    check_point(spec, data, free)?;
    let mut g = vec![S::zero(); free.len()];
    let v = Likelihood::new(spec, data).eval(free, Some(&mut g));
    if !v.is_finite() {
        return Err(Error::NonFinite("log-likelihood"));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(g)
}

impl<S: Scalar> Objective<S> for Likelihood<'_, S> {
    fn evaluate(&mut self, x: &[S], grad: &mut [S]) -> S {
        let v = self.eval(x, Some(grad));
        grad.iter_mut().for_each(|g| *g = -*g);
        -v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// Some strength exceeded the magnitude guard: likely perfect separation.
    StrengthBoundary,
    /// `d` or `d*` collapsed towards zero.
    DrawBoundary,
    /// `λ_C` collapsed towards zero; the fit is effectively independent.
    EffectivelyIndependent,
    /// The comparison graph has several components; strengths only compare within one.
    Disconnected {
        components: usize,
    },
    NotConverged {
        termination: String,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions<S> {
    pub optimizer: BfgsOptions<S>,
}

impl<S: Scalar> Default for FitOptions<S> {
    fn default() -> Self {
        Self { optimizer: BfgsOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<S> {
    #[serde(rename = "model")]
    pub class: ModelClass,
    pub half_period_days: S,
    pub reference_date: NaiveDate,
    pub params: ParameterSet<S>,
    pub objective: S,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: S,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip)]
    pub free: Vec<S>,
}

impl<S: Scalar> FitResult<S> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut fit: Self = serde_json::from_str(s)?;
        fit.free = fit.params.to_free();
        Ok(fit)
    }
}

/// Maximizes the weighted log-likelihood, starting from `init` when given
/// (warm start) and from the all-zero free vector otherwise.
pub fn fit<S: Scalar>(
    spec: &ModelSpec<S>,
    data: &TrainingSet<S>,
    init: Option<&[S]>,
    options: &FitOptions<S>,
) -> Result<FitResult<S>> {
    spec.validate()?;
    if data.observations.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if let Some(team) = data.unplayed_teams().first() {
        return Err(Error::DisconnectedTeam(team.to_string()));
    }
    let start = match init {
        Some(v) => v.to_vec(),
        None => ParameterSet::initial_free(spec.class, data.teams.len()),
    };
    check_point(spec, data, &start)?;
    let mut objective = Likelihood::new(spec, data);
    let min = minimize(&mut objective, &start, &options.optimizer);
    let params = ParameterSet::from_free(spec.class, data.teams.clone(), spec.scale, &min.x)?;
    let mut diagnostics = Vec::new();
    let components = data.components();
    if components > 1 {
        diagnostics.push(Diagnostic::Disconnected { components });
    }
    let guard = S::lit(STRENGTH_GUARD);
    let over = |v: &[S]| v.iter().any(|x| x.abs() > guard);
    let boundary = match &params.strengths {
        Strengths::Single { strengths } => over(strengths),
        Strengths::AttackDefence { attack, defence } => over(attack) || over(defence),
    };
    if boundary {
        diagnostics.push(Diagnostic::StrengthBoundary);
    }
    let ln_floor = S::lit(-STRENGTH_GUARD);
    if params.draw.is_some_and(|d| d.ln() < ln_floor) {
        diagnostics.push(Diagnostic::DrawBoundary);
    }
    if params.covariance.is_some_and(|c| c.ln() < ln_floor) {
        diagnostics.push(Diagnostic::EffectivelyIndependent);
    }
    let converged = min.converged();
    if !converged {
        let termination = match min.termination {
            Termination::GradientTolerance => "gradient tolerance",
            Termination::MaxIterations => "iteration limit reached",
            Termination::LineSearchFailed => "line search failed",
            Termination::InvalidStart => "start point has zero likelihood",
        };
        diagnostics.push(Diagnostic::NotConverged { termination: termination.to_string() });
    }
    Ok(FitResult {
        class: spec.class,
        half_period_days: spec.weights.half_period_days,
        reference_date: spec.weights.reference_date,
        params,
        objective: -min.value,
        converged,
        iterations: min.iterations,
        gradient_norm: min.gradient_norm,
        diagnostics,
        free: min.x,
    })
}

/// Fits on every match of `data` up to its reference date.
pub fn fit_dataset<S: Scalar>(spec: &ModelSpec<S>, data: &Dataset, options: &FitOptions<S>) -> Result<FitResult<S>> {
    let until = spec.weights.reference_date + chrono::Days::new(1);
    let first = data.first_date().ok_or(Error::EmptyTrainingSet)?;
    let matches = data.between(first, until);
    let set = TrainingSet::from_matches(data, matches, &spec.weights)?;
    fit(spec, &set, None, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ImportanceClass, NamedMatch};

    fn day(n: u64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(n)
    }

    fn named(d: u64, h: &str, a: &str, hg: u32, ag: u32) -> NamedMatch {
        NamedMatch {
            date: day(d),
            home: h.into(),
            away: a.into(),
            home_goals: hg,
            away_goals: ag,
            neutral: false,
            importance: ImportanceClass::DomesticLeague,
        }
    }

    fn spec(class: ModelClass) -> ModelSpec<f64> {
        ModelSpec::new(class, WeightConfig::new(365.0, day(100)).unwrap())
    }

    fn small_league() -> TrainingSet<f64> {
        let rows = vec![
            named(0, "A", "B", 2, 1),
            named(1, "B", "C", 1, 1),
            named(2, "C", "A", 0, 3),
            named(3, "B", "A", 2, 2),
            named(4, "C", "B", 1, 0),
            named(5, "A", "C", 1, 1),
            named(6, "A", "B", 0, 1),
            named(7, "C", "A", 2, 0),
        ];
        let d = Dataset::from_named(rows).unwrap();
        let w = WeightConfig::new(365.0, day(100)).unwrap();
        TrainingSet::from_dataset(&d, &w).unwrap()
    }

    #[test]
    fn single_draw_loglik() {
        let set = TrainingSet::from_observations(
            vec!["A".into(), "B".into()],
            vec![Observation { home: 0, away: 1, home_goals: 1, away_goals: 1, neutral: false, weight: 1.0 }],
        )
        .unwrap();
        let s = spec(ModelClass::ThurstoneMosteller);
        let ll = weighted_loglik(&s, &set, &[0.0, 0.0, 0.5f64.ln()]).unwrap();
        assert!((ll - 0.27632639016823696f64.ln()).abs() < 1e-13);
        assert!((ll + 1.28617).abs() < 1e-5);
    }

    #[test]
    fn poisson_loglik_arithmetic() {
        let set = TrainingSet::from_observations(
            vec!["A".into(), "B".into()],
            vec![Observation { home: 0, away: 1, home_goals: 2, away_goals: 1, neutral: false, weight: 1.0 }],
        )
        .unwrap();
        let ll = weighted_loglik(&spec(ModelClass::IndependentPoisson), &set, &[0.0, 0.0, 0.0]).unwrap();
        assert!((ll - (-2.0 - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn doubling_weights_doubles_loglik() {
        let set = small_league();
        for class in ModelClass::ALL {
            let s = spec(class);
            let x: Vec<f64> = (0..class.free_len(3)).map(|i| 0.1 * i as f64 - 0.15).collect();
            let a = weighted_loglik(&s, &set, &x).unwrap();
            let b = weighted_loglik(&s, &set.scaled(2.0), &x).unwrap();
            assert_eq!(b, 2.0 * a, "{class}");
        }
    }

    #[test]
    fn symmetric_pair_has_opposite_gradients() {
        let set = TrainingSet::from_observations(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                Observation { home: 0, away: 1, home_goals: 2, away_goals: 0, neutral: false, weight: 1.0 },
                Observation { home: 1, away: 0, home_goals: 2, away_goals: 0, neutral: false, weight: 1.0 },
                Observation { home: 0, away: 2, home_goals: 1, away_goals: 1, neutral: false, weight: 1.0 },
                Observation { home: 1, away: 2, home_goals: 1, away_goals: 1, neutral: false, weight: 1.0 },
            ],
        )
        .unwrap();
        // A and B have identical records, so at r = (0.3, -0.3, 0) their
        // natural strength gradients mirror each other.
        for class in [ModelClass::BradleyTerry, ModelClass::IndependentPoisson] {
            let s = spec(class);
            let mut x = vec![0.3, -0.3];
            x.extend(std::iter::repeat_n(0.0, class.free_len(3) - 2));
            let g = gradient(&s, &set, &x).unwrap();
            // free gradient = natural g_i - g_C; with g_C = 0 by symmetry of C's record.
            assert!((g[0] + g[1]).abs() < 1e-12, "{class}: {g:?}");
        }
    }

    #[test]
    fn length_and_team_errors() {
        let set = small_league();
        assert!(matches!(
            weighted_loglik(&spec(ModelClass::BradleyTerry), &set, &[0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        let lonely = TrainingSet::from_observations(
            vec!["A".into(), "B".into(), "C".into()],
            vec![Observation { home: 0, away: 1, home_goals: 2, away_goals: 0, neutral: false, weight: 1.0 }],
        )
        .unwrap();
        let err = fit(&spec(ModelClass::BradleyTerry), &lonely, None, &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DisconnectedTeam(t) if t == "C"));
    }

    #[test]
    fn separation_is_flagged() {
        let mut obs = Vec::new();
        for i in 0..6 {
            obs.push(Observation {
                home: 0,
                away: 1 + i % 2,
                home_goals: 2,
                away_goals: 0,
                neutral: false,
                weight: 1.0,
            });
            obs.push(Observation {
                home: 1 + i % 2,
                away: 0,
                home_goals: 0,
                away_goals: 1,
                neutral: false,
                weight: 1.0,
            });
            obs.push(Observation { home: 1, away: 2, home_goals: 1, away_goals: 1, neutral: false, weight: 1.0 });
            obs.push(Observation { home: 2, away: 1, home_goals: 2, away_goals: 1, neutral: false, weight: 1.0 });
        }
        let set = TrainingSet::from_observations(vec!["A".into(), "B".into(), "C".into()], obs).unwrap();
        let f = fit(&spec(ModelClass::BradleyTerry), &set, None, &FitOptions::default()).unwrap();
        assert!(f.diagnostics.contains(&Diagnostic::StrengthBoundary), "{:?}", f);
    }

    #[test]
    fn disconnected_components_warn() {
        let mut obs = Vec::new();
        for (h, a, hg, ag) in [(0, 1, 1, 0), (1, 0, 1, 1), (2, 3, 2, 1), (3, 2, 0, 0), (0, 1, 0, 2), (2, 3, 1, 1)] {
            obs.push(Observation { home: h, away: a, home_goals: hg, away_goals: ag, neutral: false, weight: 1.0 });
        }
        let set = TrainingSet::from_observations((0..4).map(|i| i.to_string()).collect(), obs).unwrap();
        assert_eq!(set.components(), 2);
        let f = fit(&spec(ModelClass::IndependentPoisson), &set, None, &FitOptions::default()).unwrap();
        assert!(f.diagnostics.contains(&Diagnostic::Disconnected { components: 2 }));
    }

    #[test]
    fn fit_json_round_trip() {
        let set = small_league();
        for class in
            [ModelClass::BivariatePoisson, ModelClass::IndependentPoissonDefAtt, ModelClass::BradleyTerryDavidson]
        {
            let f = fit(&spec(class), &set, None, &FitOptions::default()).unwrap();
            let back = FitResult::<f64>::from_json(&f.to_json().unwrap()).unwrap();
            assert_eq!(back.params, f.params);
            assert_eq!(back.class, class);
            for (a, b) in back.free.iter().zip(&f.free) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_fit() {
        let rows = small_league();
        let obs: Vec<Observation<f32>> = rows
            .observations()
            .iter()
            .map(|o| Observation {
                home: o.home,
                away: o.away,
                home_goals: o.home_goals,
                away_goals: o.away_goals,
                neutral: o.neutral,
                weight: o.weight as f32,
            })
            .collect();
        let set = TrainingSet::from_observations(rows.teams().to_vec(), obs).unwrap();
        let s = ModelSpec::new(ModelClass::IndependentPoisson, WeightConfig::new(365.0f32, day(100)).unwrap());
        let opts = FitOptions { optimizer: BfgsOptions { grad_tol: 1e-4, ..BfgsOptions::default() } };
        let f = fit(&s, &set, None, &opts).unwrap();
        assert!(f.converged);
        let f64_fit = fit(&spec(ModelClass::IndependentPoisson), &rows, None, &FitOptions::default()).unwrap();
        for (a, b) in f.params.single_strengths().unwrap().iter().zip(f64_fit.params.single_strengths().unwrap()) {
            assert!((*a as f64 - b).abs() < 1e-3, "{a} vs {b}");
        }
    }
}
