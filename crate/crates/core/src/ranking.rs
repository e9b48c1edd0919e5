//! Rankings from fitted parameters, and ranking time series.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, TrainingSet};
use crate::model::{ModelSpec, ParameterSet, Strengths};
use crate::scalar::Scalar;

/// Relative gap below which two scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry<S> {
    /// 1-based. Tied teams share the better position (1, 1, 3, ...).
    pub position: usize,
    pub team: String,
    pub score: S,
    pub tied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Display {
    #[default]
    Raw,
    Exponentiated,
}

impl std::str::FromStr for Display {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Self::Raw),
            "exponentiated" | "exp" => Ok(Self::Exponentiated),
            other => Err(Error::InvalidParameter(format!("unknown display `{other}` (raw, exponentiated)"))),
        }
    }
}

fn same_score<S: Scalar>(a: S, b: S) -> bool {
    let scale = a.abs().max(b.abs()).max(S::min_positive_value());
    (a - b).abs() <= S::lit(TIE_TOLERANCE) * scale
}

/// Sorts descending by score, breaking ties by team name.
pub fn rank_scores<S: Scalar>(teams: &[String], scores: &[S]) -> Vec<RankingEntry<S>> {
    let mut order: Vec<usize> = (0..teams.len()).collect();
    order.sort_by(|&i, &j| {
        if same_score(scores[i], scores[j]) {
            teams[i].cmp(&teams[j])
        } else {
            scores[j].partial_cmp(&scores[i]).unwrap_or(Ordering::Equal)
        }
    });
    let mut out: Vec<RankingEntry<S>> = Vec::with_capacity(order.len());
    for (k, &i) in order.iter().enumerate() {
        let position = match out.last() {
            Some(prev) if same_score(prev.score, scores[i]) => prev.position,
            _ => k + 1,
        };
        out.push(RankingEntry { position, team: teams[i].clone(), score: scores[i], tied: false });
    }
    for k in 1..out.len() {
        if out[k].position == out[k - 1].position {
            out[k].tied = true;
            out[k - 1].tied = true;
        }
    }
    out
}

/// Ranking by overall strength.
pub fn rank_single<S: Scalar>(params: &ParameterSet<S>, display: Display) -> Result<Vec<RankingEntry<S>>> {
    let Strengths::Single { strengths } = &params.strengths else {
        return Err(Error::WrongModelKind(format!(
            "{} has separate attack and defence strengths; use the def/att or round-robin ranking",
            params.class
        )));
    };
    let scores: Vec<S> = match display {
        Display::Raw => strengths.clone(),
        Display::Exponentiated => strengths.iter().map(|r| r.exp()).collect(),
    };
    Ok(rank_scores(&params.teams, &scores))
}

/// Attack ranking by `o` and defence ranking by `d`, both descending; a larger `d`
/// lowers the opponent's scoring rate.
pub fn rank_def_att<S: Scalar>(params: &ParameterSet<S>) -> Result<(Vec<RankingEntry<S>>, Vec<RankingEntry<S>>)> {
    match &params.strengths {
        Strengths::AttackDefence { attack, defence } => {
            Ok((rank_scores(&params.teams, attack), rank_scores(&params.teams, defence)))
        }
        Strengths::Single { .. } => {
            Err(Error::WrongModelKind(format!("{} has a single strength per team", params.class)))
        }
    }
}

/// Expected league points when every team hosts every other team once:
/// 3 per expected win and 1 per expected draw.
pub fn round_robin_points<S: Scalar>(params: &ParameterSet<S>, neutral: bool) -> Result<Vec<S>> {
    if !params.class.is_poisson() {
        return Err(Error::WrongModelKind(format!("{} has no scoring rates for a round robin", params.class)));
    }
    let t = params.teams.len();
    let three = S::lit(3.0);
    let mut points = vec![S::zero(); t];
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let p = params.predict(i, j, neutral)?;
            points[i] += three * p.p_home + p.p_draw;
            points[j] += three * p.p_away + p.p_draw;
        }
    }
    Ok(points)
}

pub fn rank_round_robin<S: Scalar>(params: &ParameterSet<S>, neutral: bool) -> Result<Vec<RankingEntry<S>>> {
    Ok(rank_scores(&params.teams, &round_robin_points(params, neutral)?))
}

/// Overall ranking for any fit: strengths for single-strength classes,
/// round-robin expected points for def/att classes.
pub fn rank_overall<S: Scalar>(params: &ParameterSet<S>, display: Display) -> Result<Vec<RankingEntry<S>>> {
    match params.strengths {
        Strengths::Single { .. } => rank_single(params, display),
        Strengths::AttackDefence { .. } => rank_round_robin(params, false),
    }
}

pub fn write_ranking_csv<S: Scalar, W: Write>(entries: &[RankingEntry<S>], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["position", "team", "score", "tied"])?;
    for e in entries {
        w.write_record([e.position.to_string(), e.team.clone(), format!("{:.6}", e.score), e.tied.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SeriesConfig<S> {
    pub training_window_days: u32,
    pub display: Display,
    pub warm_start: bool,
    pub fit_options: FitOptions<S>,
}

impl<S: Scalar> Default for SeriesConfig<S> {
    fn default() -> Self {
        Self { training_window_days: 730, display: Display::Raw, warm_start: true, fit_options: FitOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint<S> {
    pub date: NaiveDate,
    /// `None` when the fit for this date failed.
    pub entries: Option<Vec<RankingEntry<S>>>,
    pub training_last_date: Option<NaiveDate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSeries<S> {
    pub points: Vec<SeriesPoint<S>>,
}

/// Evenly spaced dates from `start` through `end`.
pub fn every(start: NaiveDate, end: NaiveDate, step_days: u64) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    let mut d = start;
    while d <= end && step_days > 0 {
        out.push(d);
        d = d + Days::new(step_days);
    }
    out
}

/// Refits on the window before each date and ranks. Matches dated on or after a
/// ranking date are never used for it.
pub fn ranking_series<S: Scalar>(
    spec: &ModelSpec<S>,
    data: &Dataset,
    dates: &[NaiveDate],
    cfg: &SeriesConfig<S>,
) -> Result<RankingSeries<S>> {
    spec.validate()?;
    if dates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("ranking dates must be strictly increasing".into()));
    }
    let mut previous: Option<ParameterSet<S>> = None;
    let mut points = Vec::with_capacity(dates.len());
    for &date in dates {
        let from = date - Days::new(cfg.training_window_days as u64);
        let matches = data.between(from, date);
        let reference = date - Days::new(1);
        let day_spec = ModelSpec { weights: spec.weights.with_reference_date(reference), ..*spec };
        let result = TrainingSet::from_matches(data, matches, &day_spec.weights).and_then(|set| {
            let init = if cfg.warm_start {
                previous.as_ref().and_then(|p| p.warm_start_for(spec.class, set.teams()))
            } else {
                None
            };
            let f = fit(&day_spec, &set, init.as_deref(), &cfg.fit_options)?;
            let entries = rank_overall(&f.params, cfg.display)?;
            Ok((f, entries))
        });
        let training_last_date = matches.last().map(|m| m.date);
        match result {
            Ok((f, entries)) if f.converged => {
                previous = Some(f.params);
                points.push(SeriesPoint { date, entries: Some(entries), training_last_date, error: None });
            }
            Ok(_) => points.push(SeriesPoint {
                date,
                entries: None,
                training_last_date,
                error: Some("fit did not converge".into()),
            }),
            Err(e) => points.push(SeriesPoint { date, entries: None, training_last_date, error: Some(e.to_string()) }),
        }
    }
    Ok(RankingSeries { points })
}

impl<S: Scalar> RankingSeries<S> {
    /// `(date, position)` for one team over the dates where it was ranked.
    pub fn trace(&self, team: &str) -> Vec<(NaiveDate, usize)> {
        self.points
            .iter()
            .filter_map(|p| {
                let e = p.entries.as_ref()?.iter().find(|e| e.team == team)?;
                Some((p.date, e.position))
            })
            .collect()
    }

    /// Long format: `date,team,position,score`.
    pub fn write_long_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["date", "team", "position", "score"])?;
        for p in &self.points {
            for e in p.entries.iter().flatten() {
                w.write_record([
                    p.date.to_string(),
                    e.team.clone(),
                    e.position.to_string(),
                    format!("{:.6}", e.score),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Side-by-side trace for `team` next to an external ranking:
    /// `date,team,model_position,model_score,external_position`. External positions
    /// are taken from the latest external date not after each series date.
    pub fn write_comparison_csv<W: Write>(&self, team: &str, external: &ExternalRanking, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["date", "team", "model_position", "model_score", "external_position"])?;
        for p in &self.points {
            let entry = p.entries.as_ref().and_then(|es| es.iter().find(|e| e.team == team));
            w.write_record([
                p.date.to_string(),
                team.to_string(),
                entry.map(|e| e.position.to_string()).unwrap_or_default(),
                entry.map(|e| format!("{:.6}", e.score)).unwrap_or_default(),
                external.position_at(team, p.date).map(|x| x.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest absolute position change between consecutive points of a trace.
pub fn max_position_jump(trace: &[(NaiveDate, usize)]) -> usize {
    trace.windows(2).map(|w| w[0].1.abs_diff(w[1].1)).max().unwrap_or(0)
}

/// Largest position change between consecutive calendar months, using the last
/// position recorded in each month.
pub fn max_monthly_jump(trace: &[(NaiveDate, usize)]) -> usize {
    let mut monthly: BTreeMap<(i32, u32), usize> = BTreeMap::new();
    for &(d, p) in trace {
        use chrono::Datelike;
        monthly.insert((d.year(), d.month()), p);
    }
    let v: Vec<(NaiveDate, usize)> = monthly.into_values().map(|p| (NaiveDate::MIN, p)).collect();
    max_position_jump(&v)
}

/// Positions from an outside source such as the FIFA ranking, read from a CSV with
/// `date`, `team`, `position` columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExternalRanking {
    by_team: HashMap<String, Vec<(NaiveDate, usize)>>,
}

impl ExternalRanking {
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            date: NaiveDate,
            team: String,
            position: usize,
        }
        let mut by_team: HashMap<String, Vec<(NaiveDate, usize)>> = HashMap::new();
        for row in csv::Reader::from_reader(source).deserialize() {
            let row: Row = row?;
            by_team.entry(row.team).or_default().push((row.date, row.position));
        }
        by_team.values_mut().for_each(|v| v.sort());
        Ok(Self { by_team })
    }

    pub fn trace(&self, team: &str) -> &[(NaiveDate, usize)] {
        self.by_team.get(team).map_or(&[], |v| v.as_slice())
    }

    pub fn position_at(&self, team: &str, date: NaiveDate) -> Option<usize> {
        let t = self.trace(team);
        let k = t.partition_point(|&(d, _)| d <= date);
        (k > 0).then(|| t[k - 1].1)
    }
}
