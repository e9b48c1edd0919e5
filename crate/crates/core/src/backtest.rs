//! Rolling-window out-of-sample evaluation scored by the Rank Probability Score.
//!
//! Matches are predicted block by block. Before each block every model is refitted on
//! the trailing training window ending the day before the block, warm-started from its
//! previous fit.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use chrono::{Days, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ImportanceClass, MatchRecord, OutcomeLabel};
use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, TrainingSet};
use crate::model::{ModelClass, ModelSpec, ParameterSet, Strengths};
use crate::ordinal::OutcomeDistribution;
use crate::scalar::Scalar;

/// Gap between consecutive match dates that starts a new league season.
pub const DEFAULT_SEASON_GAP_DAYS: i64 = 60;

/// Two RPS values closer than this count as equal when picking a half period.
pub const RPS_TIE_TOLERANCE: f64 = 1e-6;

/// Rank Probability Score of one forecast over the ordered outcomes (H, D, A).
pub fn rps<S: Scalar>(pred: &OutcomeDistribution<S>, realized: OutcomeLabel) -> S {
    let (y_h, y_a) = match realized {
        OutcomeLabel::Home => (S::one(), S::zero()),
        OutcomeLabel::Draw => (S::zero(), S::zero()),
        OutcomeLabel::Away => (S::zero(), S::one()),
    };
    let dh = pred.p_home - y_h;
    let da = pred.p_away - y_a;
    (dh * dh + da * da) * S::lit(0.5)
}

/// How matches are grouped into prediction blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockScheme {
    /// League rounds derived from the fixture list; seasons split at long breaks.
    LeagueRounds { season_gap_days: i64 },
    /// All matches on one calendar date form a block.
    CalendarDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateGranularity {
    /// Refit once per block of the configured scheme.
    Round,
    /// Refit before every match date.
    Match,
}

/// Which matches are scored.
#[derive(Clone, Default)]
pub enum EvaluationFilter {
    #[default]
    All,
    ExcludeImportance(Vec<ImportanceClass>),
    Custom(Arc<dyn Fn(&MatchRecord) -> bool + Send + Sync>),
}

impl EvaluationFilter {
    pub fn exclude_friendlies() -> Self {
        Self::ExcludeImportance(vec![ImportanceClass::Friendly])
    }

    pub fn accepts(&self, m: &MatchRecord) -> bool {
        match self {
            Self::All => true,
            Self::ExcludeImportance(classes) => !classes.contains(&m.importance),
            Self::Custom(f) => f(m),
        }
    }
}

impl fmt::Debug for EvaluationFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("All"),
            Self::ExcludeImportance(c) => f.debug_tuple("ExcludeImportance").field(c).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BacktestConfig<S> {
    pub training_window_days: u32,
    /// Rounds at the start of every season that are trained on but not scored.
    /// Only meaningful with [`BlockScheme::LeagueRounds`].
    pub burn_in_rounds: usize,
    pub half_period_grid: Vec<S>,
    pub evaluation_filter: EvaluationFilter,
    /// Whether matches rejected by the filter still enter training.
    pub train_on_filtered: bool,
    pub update_granularity: UpdateGranularity,
    pub block_scheme: BlockScheme,
    /// First date eligible for scoring; defaults to the first match date plus the window.
    pub evaluation_start: Option<NaiveDate>,
    /// Scoring stops before this date.
    pub evaluation_end: Option<NaiveDate>,
    pub fit_options: FitOptions<S>,
}

impl<S: Scalar> BacktestConfig<S> {
    /// Two-year window, five burn-in rounds, half periods 30..=720 in steps of 30.
    pub fn premier_league() -> Self {
        Self {
            training_window_days: 730,
            burn_in_rounds: 5,
            half_period_grid: (1..=24).map(|k| S::from_count(30 * k)).collect(),
            evaluation_filter: EvaluationFilter::All,
            train_on_filtered: true,
            update_granularity: UpdateGranularity::Round,
            block_scheme: BlockScheme::LeagueRounds { season_gap_days: DEFAULT_SEASON_GAP_DAYS },
            evaluation_start: None,
            evaluation_end: None,
            fit_options: FitOptions::default(),
        }
    }

    /// Eight-year window, calendar-date blocks, friendlies trained on but not scored,
    /// half periods of 0.5 to 6 years in half-year steps.
    pub fn national_teams() -> Self {
        Self {
            training_window_days: 8 * 365 + 2,
            burn_in_rounds: 0,
            half_period_grid: (1..=12).map(|k| S::lit(182.5 * k as f64)).collect(),
            evaluation_filter: EvaluationFilter::exclude_friendlies(),
            train_on_filtered: true,
            update_granularity: UpdateGranularity::Round,
            block_scheme: BlockScheme::CalendarDate,
            evaluation_start: None,
            evaluation_end: None,
            fit_options: FitOptions::default(),
        }
    }

    /// Returns warnings for settings that are legal but suspicious.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.training_window_days == 0 {
            return Err(Error::InvalidParameter("training window must be positive".into()));
        }
        if self.half_period_grid.is_empty() {
            return Err(Error::InvalidParameter("half-period grid is empty".into()));
        }
        if self.half_period_grid.iter().any(|h| !(*h > S::zero()) || !h.is_finite()) {
            return Err(Error::InvalidParameter("half periods must be positive".into()));
        }
        let mut warnings = Vec::new();
        let max_hp = self.half_period_grid.iter().copied().fold(S::zero(), S::max);
        if S::from_count(self.training_window_days as usize) <= max_hp {
            warnings.push(format!(
                "training window of {} days does not exceed the largest half period ({max_hp} days)",
                self.training_window_days
            ));
        }
        Ok(warnings)
    }
}

/// A strategy that produces forecasts for a block.
#[derive(Debug, Clone, PartialEq)]
pub enum Forecaster<S> {
    Model(ModelSpec<S>),
    /// The same distribution for every match; a baseline.
    Constant(OutcomeDistribution<S>),
}

impl<S: Scalar> Forecaster<S> {
    pub fn label(&self) -> String {
        match self {
            Self::Model(spec) => spec.class.label().to_string(),
            Self::Constant(_) => "constant".to_string(),
        }
    }

    pub fn class(&self) -> Option<ModelClass> {
        match self {
            Self::Model(spec) => Some(spec.class),
            Self::Constant(_) => None,
        }
    }

    pub fn half_period(&self) -> Option<S> {
        match self {
            Self::Model(spec) => Some(spec.weights.half_period_days),
            Self::Constant(_) => None,
        }
    }
}

/// Every class paired with every half period of `cfg`'s grid.
pub fn grid_forecasters<S: Scalar>(
    classes: &[ModelClass],
    cfg: &BacktestConfig<S>,
    reference: NaiveDate,
    use_importance: bool,
) -> Result<Vec<Forecaster<S>>> {
    let mut out = Vec::with_capacity(classes.len() * cfg.half_period_grid.len());
    for &class in classes {
        for &hp in &cfg.half_period_grid {
            let weights = crate::weighting::WeightConfig::new(hp, reference)?.with_importance(use_importance);
            out.push(Forecaster::Model(ModelSpec::new(class, weights)));
        }
    }
    Ok(out)
}

/// `(season, round)` of every match, both starting at 1. A season starts after a gap
/// of at least `season_gap_days` between consecutive match dates; a match's round is
/// the larger of the two teams' match counts in the season so far, including this one.
pub fn derive_rounds(data: &Dataset, season_gap_days: i64) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(data.len());
    let mut played = vec![0usize; data.teams().len()];
    let mut season = 0;
    let mut prev: Option<NaiveDate> = None;
    for m in data.matches() {
        if prev.is_none_or(|p| (m.date - p).num_days() >= season_gap_days) {
            season += 1;
            played.iter_mut().for_each(|c| *c = 0);
        }
        prev = Some(m.date);
        played[m.home.0] += 1;
        played[m.away.0] += 1;
        out.push((season, played[m.home.0].max(played[m.away.0])));
    }
    out
}

/// A set of matches predicted from one fit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Indices into the dataset's match list, in date order.
    pub matches: Vec<usize>,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
}

fn build_blocks(data: &Dataset, scheme: BlockScheme, granularity: UpdateGranularity) -> Vec<Block> {
    let mut groups: BTreeMap<(usize, usize, NaiveDate), Vec<usize>> = BTreeMap::new();
    let rounds = match (scheme, granularity) {
        (BlockScheme::LeagueRounds { season_gap_days }, UpdateGranularity::Round) => {
            Some(derive_rounds(data, season_gap_days))
        }
        _ => None,
    };
    for (i, m) in data.matches().iter().enumerate() {
        let key = match &rounds {
            Some(r) => (r[i].0, r[i].1, NaiveDate::MIN),
            None => (0, 0, m.date),
        };
        groups.entry(key).or_default().push(i);
    }
    let matches = data.matches();
    let mut blocks: Vec<Block> = groups
        .into_values()
        .map(|idx| Block {
            first_date: matches[idx[0]].date,
            last_date: matches[*idx.last().unwrap()].date,
            matches: idx,
        })
        .collect();
    blocks.sort_by_key(|b| (b.first_date, b.matches[0]));
    blocks
}

/// Training slice for a block together with the facts needed to audit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAudit {
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub scored_matches: usize,
    pub training_matches: usize,
    pub training_first_date: Option<NaiveDate>,
    pub training_last_date: Option<NaiveDate>,
}

impl BlockAudit {
    /// True when no training match is dated on or after the block's first date.
    pub fn leak_free(&self) -> bool {
        self.training_last_date.is_none_or(|d| d < self.first_date)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord<S> {
    pub match_index: usize,
    pub date: NaiveDate,
    pub home: String,
    pub away: String,
    pub forecaster: String,
    pub class: Option<ModelClass>,
    pub half_period_days: Option<S>,
    pub distribution: OutcomeDistribution<S>,
    pub realized: OutcomeLabel,
    pub rps: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary<S> {
    pub forecaster: String,
    pub class: Option<ModelClass>,
    pub half_period_days: Option<S>,
    pub matches: usize,
    pub mean_rps: S,
    /// Blocks skipped because the fit failed to converge or could not be built.
    pub convergence_failures: usize,
    pub skipped_matches: usize,
    /// Predictions involving a team absent from the training window, rated at the
    /// league average.
    pub cold_start_predictions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestHalfPeriod<S> {
    pub forecaster: String,
    pub class: Option<ModelClass>,
    pub half_period_days: Option<S>,
    pub mean_rps: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport<S> {
    pub summaries: Vec<SpecSummary<S>>,
    /// One entry per forecaster label, ordered by mean RPS.
    pub best: Vec<BestHalfPeriod<S>>,
    pub blocks: Vec<BlockAudit>,
    #[serde(skip)]
    pub predictions: Vec<PredictionRecord<S>>,
    pub warnings: Vec<String>,
}

/// Smallest half period whose RPS is within the tie tolerance of the minimum.
pub fn pick_half_period<S: Scalar>(curve: &[(S, S)]) -> Option<(S, S)> {
    let best = curve.iter().map(|p| p.1).fold(S::infinity(), S::min);
    if !best.is_finite() {
        return None;
    }
    let tol = S::lit(RPS_TIE_TOLERANCE);
    curve.iter().filter(|p| p.1 - best < tol).min_by(|a, b| a.0.partial_cmp(&b.0).unwrap()).copied()
}

impl<S: Scalar> BacktestReport<S> {
    pub fn total_predictions(&self, forecaster: &str) -> usize {
        self.predictions.iter().filter(|p| p.forecaster == forecaster).count()
    }

    pub fn summary(&self, forecaster: &str, half_period: Option<S>) -> Option<&SpecSummary<S>> {
        self.summaries.iter().find(|s| s.forecaster == forecaster && s.half_period_days == half_period)
    }

    pub fn best_for(&self, forecaster: &str) -> Option<&BestHalfPeriod<S>> {
        self.best.iter().find(|b| b.forecaster == forecaster)
    }

    pub fn all_leak_free(&self) -> bool {
        self.blocks.iter().all(BlockAudit::leak_free)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per forecaster: `model_class,optimal_half_period_days,mean_rps`.
    pub fn write_table_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["model_class", "optimal_half_period_days", "mean_rps"])?;
        for b in &self.best {
            w.write_record([
                b.forecaster.clone(),
                b.half_period_days.map(|h| h.to_string()).unwrap_or_default(),
                format!("{:.6}", b.mean_rps),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Every (forecaster, half period) evaluated.
    pub fn write_curve_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record([
            "model_class",
            "half_period_days",
            "matches",
            "mean_rps",
            "convergence_failures",
            "cold_start_predictions",
        ])?;
        for s in &self.summaries {
            w.write_record([
                s.forecaster.clone(),
                s.half_period_days.map(|h| h.to_string()).unwrap_or_default(),
                s.matches.to_string(),
                format!("{:.8}", s.mean_rps),
                s.convergence_failures.to_string(),
                s.cold_start_predictions.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_predictions_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record([
            "date",
            "home",
            "away",
            "model_class",
            "half_period_days",
            "p_home",
            "p_draw",
            "p_away",
            "realized",
            "rps",
        ])?;
        for p in &self.predictions {
            w.write_record([
                p.date.to_string(),
                p.home.clone(),
                p.away.clone(),
                p.forecaster.clone(),
                p.half_period_days.map(|h| h.to_string()).unwrap_or_default(),
                format!("{:.8}", p.distribution.p_home),
                format!("{:.8}", p.distribution.p_draw),
                format!("{:.8}", p.distribution.p_away),
                p.realized.to_string(),
                format!("{:.8}", p.rps),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Training matches for a block: inside the window and dated before the block.
fn training_slice(
    data: &Dataset,
    block: &Block,
    window_days: u32,
    filter: &EvaluationFilter,
    train_on_filtered: bool,
) -> Vec<MatchRecord> {
    let from = block.first_date - Days::new(window_days as u64);
    let slice = data.between(from, block.first_date);
    if train_on_filtered {
        slice.to_vec()
    } else {
        slice.iter().filter(|m| filter.accepts(m)).cloned().collect()
    }
}

/// Prediction for two named teams from a fit that may not contain them. Absent teams
/// get strength 0 (the sum-zero average).
fn predict_names<S: Scalar>(
    params: &ParameterSet<S>,
    home: &str,
    away: &str,
    neutral: bool,
) -> Result<(OutcomeDistribution<S>, bool)> {
    let missing = params.team_index(home).is_none() || params.team_index(away).is_none();
    if !missing {
        return Ok((params.predict_by_name(home, away, neutral)?, false));
    }
    let mut extended = params.clone();
    for name in [home, away] {
        if extended.team_index(name).is_none() {
            extended.teams.push(name.to_string());
            match &mut extended.strengths {
                Strengths::Single { strengths } => strengths.push(S::zero()),
                Strengths::AttackDefence { attack, defence } => {
                    attack.push(S::zero());
                    defence.push(S::zero());
                }
            }
        }
    }
    Ok((extended.predict_by_name(home, away, neutral)?, true))
}

struct Prepared {
    block: Block,
    scored: Vec<usize>,
    training: Vec<MatchRecord>,
}

struct SpecRun<S> {
    summary: SpecSummary<S>,
    predictions: Vec<PredictionRecord<S>>,
}

fn run_one<S: Scalar>(
    forecaster: &Forecaster<S>,
    data: &Dataset,
    blocks: &[Prepared],
    cfg: &BacktestConfig<S>,
) -> SpecRun<S> {
    let mut predictions = Vec::new();
    let mut failures = 0;
    let mut skipped = 0;
    let mut cold = 0;
    let mut previous: Option<ParameterSet<S>> = None;
    for p in blocks {
        let params = match forecaster {
            Forecaster::Constant(_) => None,
            Forecaster::Model(spec) => {
                let reference = p.block.first_date - Days::new(1);
                let spec = ModelSpec { weights: spec.weights.with_reference_date(reference), ..*spec };
                let fitted = TrainingSet::from_matches(data, &p.training, &spec.weights).and_then(|set| {
                    if set.observations().is_empty() {
                        return Err(Error::EmptyTrainingSet);
                    }
                    let init = previous.as_ref().and_then(|prev| prev.warm_start_for(spec.class, set.teams()));
                    fit(&spec, &set, init.as_deref(), &cfg.fit_options)
                });
                match fitted {
                    Ok(f) if f.converged => {
                        previous = Some(f.params.clone());
                        Some(f.params)
                    }
                    _ => {
                        if !p.scored.is_empty() {
                            failures += 1;
                            skipped += p.scored.len();
                        }
                        continue;
                    }
                }
            }
        };
        for &i in &p.scored {
            let m = &data.matches()[i];
            let (home, away) = (data.team_name(m.home), data.team_name(m.away));
            let distribution = match (forecaster, &params) {
                (Forecaster::Constant(d), _) => *d,
                (Forecaster::Model(_), Some(params)) => match predict_names(params, home, away, m.neutral) {
                    Ok((d, was_cold)) => {
                        cold += was_cold as usize;
                        d
                    }
                    Err(_) => {
                        skipped += 1;
                        continue;
                    }
                },
                (Forecaster::Model(_), None) => unreachable!(),
            };
            let realized = m.outcome();
            predictions.push(PredictionRecord {
                match_index: i,
                date: m.date,
                home: home.to_string(),
                away: away.to_string(),
                forecaster: forecaster.label(),
                class: forecaster.class(),
                half_period_days: forecaster.half_period(),
                distribution,
                realized,
                rps: rps(&distribution, realized),
            });
        }
    }
    let total: S = predictions.iter().map(|p| p.rps).sum();
    let mean_rps = if predictions.is_empty() { S::nan() } else { total / S::from_count(predictions.len()) };
    SpecRun {
        summary: SpecSummary {
            forecaster: forecaster.label(),
            class: forecaster.class(),
            half_period_days: forecaster.half_period(),
            matches: predictions.len(),
            mean_rps,
            convergence_failures: failures,
            skipped_matches: skipped,
            cold_start_predictions: cold,
        },
        predictions,
    }
}

/// Runs every forecaster over the same blocks. Forecasters run in parallel; blocks
/// within one forecaster run in order.
pub fn run_backtest<S: Scalar>(
    forecasters: &[Forecaster<S>],
    data: &Dataset,
    cfg: &BacktestConfig<S>,
) -> Result<BacktestReport<S>> {
    let warnings = cfg.validate()?;
    if forecasters.is_empty() {
        return Err(Error::InvalidParameter("no forecasters to evaluate".into()));
    }
    for f in forecasters {
        if let Forecaster::Model(spec) = f {
            spec.validate()?;
        }
    }
    let first = data.first_date().ok_or(Error::EmptyEvaluation)?;
    let eval_start = cfg.evaluation_start.unwrap_or(first + Days::new(cfg.training_window_days as u64));
    let burn_in_rounds = match cfg.block_scheme {
        BlockScheme::LeagueRounds { season_gap_days } if cfg.burn_in_rounds > 0 => {
            Some(derive_rounds(data, season_gap_days))
        }
        _ => None,
    };
    let in_evaluation = |i: usize| {
        let m = &data.matches()[i];
        m.date >= eval_start
            && cfg.evaluation_end.is_none_or(|end| m.date < end)
            && cfg.evaluation_filter.accepts(m)
            && burn_in_rounds.as_ref().is_none_or(|r| r[i].1 > cfg.burn_in_rounds)
    };
    let mut prepared = Vec::new();
    let mut audits = Vec::new();
    for block in build_blocks(data, cfg.block_scheme, cfg.update_granularity) {
        let scored: Vec<usize> = block.matches.iter().copied().filter(|&i| in_evaluation(i)).collect();
        if scored.is_empty() {
            continue;
        }
        let training =
            training_slice(data, &block, cfg.training_window_days, &cfg.evaluation_filter, cfg.train_on_filtered);
        let audit = BlockAudit {
            first_date: block.first_date,
            last_date: block.last_date,
            scored_matches: scored.len(),
            training_matches: training.len(),
            training_first_date: training.first().map(|m| m.date),
            training_last_date: training.last().map(|m| m.date),
        };
        assert!(
            audit.leak_free(),
            "training data for block starting {} reaches {:?}",
            block.first_date,
            audit.training_last_date
        );
        audits.push(audit);
        prepared.push(Prepared { block, scored, training });
    }
    if prepared.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let runs: Vec<SpecRun<S>> = forecasters.par_iter().map(|f| run_one(f, data, &prepared, cfg)).collect();
    let mut summaries = Vec::with_capacity(runs.len());
    let mut predictions = Vec::new();
    for run in runs {
        summaries.push(run.summary);
        predictions.extend(run.predictions);
    }
    let mut by_label: Vec<(String, Option<ModelClass>, Vec<(S, S)>)> = Vec::new();
    for s in summaries.iter().filter(|s| s.matches > 0) {
        let hp = s.half_period_days.unwrap_or(S::zero());
        match by_label.iter_mut().find(|e| e.0 == s.forecaster) {
            Some(e) => e.2.push((hp, s.mean_rps)),
            None => by_label.push((s.forecaster.clone(), s.class, vec![(hp, s.mean_rps)])),
        }
    }
    let mut best: Vec<BestHalfPeriod<S>> = by_label
        .into_iter()
        .filter_map(|(label, class, curve)| {
            let (hp, rps) = pick_half_period(&curve)?;
            Some(BestHalfPeriod { forecaster: label, class, half_period_days: class.map(|_| hp), mean_rps: rps })
        })
        .collect();
    best.sort_by(|a, b| a.mean_rps.partial_cmp(&b.mean_rps).unwrap_or(std::cmp::Ordering::Equal));
    Ok(BacktestReport { summaries, best, blocks: audits, predictions, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult<S> {
    pub class: ModelClass,
    pub best_half_period: S,
    pub best_rps: S,
    /// `(half period, mean RPS)` for every grid point with at least one prediction.
    pub curve: Vec<(S, S)>,
}

/// Backtests `class` at every half period of the grid and picks the best one.
pub fn grid_search<S: Scalar>(
    class: ModelClass,
    data: &Dataset,
    cfg: &BacktestConfig<S>,
    use_importance: bool,
) -> Result<GridSearchResult<S>> {
    let forecasters = grid_forecasters(&[class], cfg, data.reference_date(), use_importance)?;
    let report = run_backtest(&forecasters, data, cfg)?;
    let curve: Vec<(S, S)> = report
        .summaries
        .iter()
        .filter(|s| s.matches > 0)
        .map(|s| (s.half_period_days.unwrap_or(S::zero()), s.mean_rps))
        .collect();
    let (best_half_period, best_rps) = pick_half_period(&curve).ok_or(Error::EmptyEvaluation)?;
    Ok(GridSearchResult { class, best_half_period, best_rps, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::LeagueSimulation;
    use crate::weighting::WeightConfig;

    fn dist(h: f64, d: f64, a: f64) -> OutcomeDistribution<f64> {
        OutcomeDistribution::new(h, d, a).unwrap()
    }

    #[test]
    fn rps_examples() {
        let third = 1.0 / 3.0;
        let u = dist(third, third, third);
        assert_eq!(rps(&dist(1.0, 0.0, 0.0), OutcomeLabel::Home), 0.0);
        assert!((rps(&u, OutcomeLabel::Home) - 5.0 / 18.0).abs() < 1e-15);
        assert!((rps(&u, OutcomeLabel::Away) - 5.0 / 18.0).abs() < 1e-15);
        assert!((rps(&u, OutcomeLabel::Draw) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(rps(&dist(0.0, 1.0, 0.0), OutcomeLabel::Home), 0.5);
        assert_eq!(rps(&dist(0.0, 0.0, 1.0), OutcomeLabel::Home), 1.0);
    }

    #[test]
    fn half_period_ties_go_to_the_smaller_value() {
        let curve = [(30.0, 0.2000004), (60.0, 0.2), (90.0, 0.19999995), (120.0, 0.21)];
        assert_eq!(pick_half_period(&curve), Some((30.0, 0.2000004)));
        let curve = [(30.0, 0.2001), (60.0, 0.2)];
        assert_eq!(pick_half_period(&curve), Some((60.0, 0.2)));
        assert_eq!(pick_half_period(&[(390.0, 0.3)]), Some((390.0, 0.3)));
    }

    #[test]
    fn derived_rounds_follow_schedule() {
        let sim = LeagueSimulation { seasons: 2, ..LeagueSimulation::default() };
        let league = sim.generate().unwrap();
        let rounds = derive_rounds(&league.dataset, DEFAULT_SEASON_GAP_DAYS);
        for (k, chunk) in rounds.chunks(10).enumerate() {
            let want = (k / 38 + 1, k % 38 + 1);
            assert!(chunk.iter().all(|&r| r == want), "block {k}: {chunk:?}");
        }
    }

    #[test]
    fn constant_forecaster_matches_closed_form() {
        let sim = LeagueSimulation { seasons: 3, ..LeagueSimulation::default() };
        let league = sim.generate().unwrap();
        let cfg = BacktestConfig::<f64> {
            evaluation_start: Some(league.season_starts[2]),
            ..BacktestConfig::premier_league()
        };
        let third = 1.0 / 3.0;
        let report = run_backtest(&[Forecaster::Constant(dist(third, third, third))], &league.dataset, &cfg).unwrap();
        let (mut decisive, mut draws) = (0usize, 0usize);
        for p in &report.predictions {
            match p.realized {
                OutcomeLabel::Draw => draws += 1,
                _ => decisive += 1,
            }
        }
        assert_eq!(decisive + draws, 330);
        let want = (decisive as f64 * 5.0 / 18.0 + draws as f64 / 9.0) / 330.0;
        assert!((report.summaries[0].mean_rps - want).abs() < 1e-14);
    }

    #[test]
    fn round_and_match_granularity_agree_on_single_day_rounds() {
        let sim = LeagueSimulation { seasons: 3, ..LeagueSimulation::default() };
        let league = sim.generate().unwrap();
        let spec = ModelSpec::new(
            ModelClass::BradleyTerry,
            WeightConfig::new(390.0, league.dataset.reference_date()).unwrap(),
        );
        let mut cfg = BacktestConfig::<f64> {
            evaluation_start: Some(league.season_starts[2]),
            evaluation_end: Some(league.season_starts[2] + Days::new(50)),
            ..BacktestConfig::premier_league()
        };
        let by_round = run_backtest(&[Forecaster::Model(spec)], &league.dataset, &cfg).unwrap();
        cfg.update_granularity = UpdateGranularity::Match;
        let by_match = run_backtest(&[Forecaster::Model(spec)], &league.dataset, &cfg).unwrap();
        assert_eq!(by_round.predictions, by_match.predictions);
        assert!(!by_round.predictions.is_empty());
    }

    #[test]
    fn empty_evaluation_is_an_error() {
        let sim = LeagueSimulation { seasons: 1, ..LeagueSimulation::default() };
        let league = sim.generate().unwrap();
        let cfg = BacktestConfig::<f64>::premier_league();
        let third = 1.0 / 3.0;
        let err = run_backtest(&[Forecaster::Constant(dist(third, third, third))], &league.dataset, &cfg).unwrap_err();
        assert!(matches!(err, Error::EmptyEvaluation));
        assert_eq!(err.to_string(), "no matches to evaluate");
    }

    #[test]
    fn mean_is_mean_of_records() {
        let sim = LeagueSimulation { seasons: 3, ..LeagueSimulation::default() };
        let league = sim.generate().unwrap();
        let cfg = BacktestConfig::<f64> {
            evaluation_start: Some(league.season_starts[2]),
            evaluation_end: Some(league.season_starts[2] + Days::new(120)),
            half_period_grid: vec![180.0, 390.0],
            ..BacktestConfig::premier_league()
        };
        let forecasters =
            grid_forecasters(&[ModelClass::IndependentPoisson], &cfg, league.dataset.reference_date(), false).unwrap();
        let report = run_backtest(&forecasters, &league.dataset, &cfg).unwrap();
        assert!(report.all_leak_free());
        for s in &report.summaries {
            let rows: Vec<f64> =
                report.predictions.iter().filter(|p| p.half_period_days == s.half_period_days).map(|p| p.rps).collect();
            assert_eq!(rows.len(), s.matches);
            assert_eq!(s.mean_rps, rows.iter().sum::<f64>() / rows.len() as f64);
            assert!(rows.iter().all(|r| (0.0..=1.0).contains(r)));
        }
        let mut out = Vec::new();
        report.write_table_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("model_class,optimal_half_period_days,mean_rps\nindependent-poisson,"));
    }
}
