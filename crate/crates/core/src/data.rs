//! Match records, the team table and the match CSV format.
//!
//! The CSV needs a header row with at least `date,home,away,home_goals,away_goals`.
//! Two optional columns are understood: `neutral` (`0`/`1`, also `true`/`false`) and
//! `importance` (`friendly`, `qualifier`, `confederation`, `worldcup`, `league`,
//! case-insensitive). Dates are ISO-8601 `YYYY-MM-DD`.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a team inside one [`TeamTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TeamId(pub usize);

impl TeamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Bijection between team names and contiguous indices `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TeamTable {
    names: Vec<String>,
    ids: HashMap<String, TeamId>,
}

impl TeamTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, N>(names: I) -> Self
    where
        I: IntoIterator<Item = N>,
        N: Into<String>,
    {
        let mut table = Self::new();
        for n in names {
            table.intern(n);
        }
        table
    }

    /// Returns the id of `name`, assigning the next free index on first sight.
    pub fn intern(&mut self, name: impl Into<String>) -> TeamId {
        let name = name.into();
        if let Some(&id) = self.ids.get(&name) {
            return id;
        }
        let id = TeamId(self.names.len());
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn get(&self, name: &str) -> Option<TeamId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: TeamId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceClass {
    Friendly,
    Qualifier,
    #[serde(rename = "confederation")]
    ConfederationTournament,
    WorldCup,
    #[serde(rename = "league")]
    DomesticLeague,
}

impl ImportanceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ImportanceClass::Friendly => "friendly",
            ImportanceClass::Qualifier => "qualifier",
            ImportanceClass::ConfederationTournament => "confederation",
            ImportanceClass::WorldCup => "worldcup",
            ImportanceClass::DomesticLeague => "league",
        }
    }
}

impl fmt::Display for ImportanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ImportanceClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "friendly" => Ok(ImportanceClass::Friendly),
            "qualifier" => Ok(ImportanceClass::Qualifier),
            "confederation" => Ok(ImportanceClass::ConfederationTournament),
            "worldcup" => Ok(ImportanceClass::WorldCup),
            "league" => Ok(ImportanceClass::DomesticLeague),
            other => Err(format!("unknown importance `{other}`")),
        }
    }
}

/// Three-way result from the home side's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeLabel {
    #[serde(rename = "H")]
    Home,
    #[serde(rename = "D")]
    Draw,
    #[serde(rename = "A")]
    Away,
}

impl OutcomeLabel {
    pub fn from_goals(home_goals: u32, away_goals: u32) -> Self {
        match home_goals.cmp(&away_goals) {
            std::cmp::Ordering::Greater => OutcomeLabel::Home,
            std::cmp::Ordering::Equal => OutcomeLabel::Draw,
            std::cmp::Ordering::Less => OutcomeLabel::Away,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            OutcomeLabel::Home => 'H',
            OutcomeLabel::Draw => 'D',
            OutcomeLabel::Away => 'A',
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub date: NaiveDate,
    pub home: TeamId,
    pub away: TeamId,
    pub home_goals: u32,
    pub away_goals: u32,
    pub neutral: bool,
    pub importance: ImportanceClass,
}

impl MatchRecord {
    pub fn outcome(&self) -> OutcomeLabel {
        OutcomeLabel::from_goals(self.home_goals, self.away_goals)
    }

    pub fn goal_difference(&self) -> i64 {
        self.home_goals as i64 - self.away_goals as i64
    }

    pub fn involves(&self, team: TeamId) -> bool {
        self.home == team || self.away == team
    }
}

pub fn outcome_label(m: &MatchRecord) -> OutcomeLabel {
    m.outcome()
}

/// Whole days from `date` back to `reference`; negative when `date` is later.
pub fn days_between(date: NaiveDate, reference: NaiveDate) -> i64 {
    (reference - date).num_days()
}

/// Date-ordered matches over one team table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    matches: Vec<MatchRecord>,
    teams: TeamTable,
    reference_date: NaiveDate,
}

impl Dataset {
    /// Validates and stably sorts `matches` by date.
    pub fn new(mut matches: Vec<MatchRecord>, teams: TeamTable, reference_date: NaiveDate) -> Result<Self> {
        for m in &matches {
            if m.home.0 >= teams.len() || m.away.0 >= teams.len() {
                return Err(Error::InvalidParameter("match refers to a team outside the team table".into()));
            }
            if m.home == m.away {
                return Err(Error::InvalidParameter(format!("team `{}` cannot play itself", teams.name(m.home))));
            }
        }
        matches.sort_by_key(|m| m.date);
        Ok(Self { matches, teams, reference_date })
    }

    /// Builds a dataset from named results, assigning ids in first-appearance order.
    pub fn from_named<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = NamedMatch>,
    {
        let mut rows: Vec<NamedMatch> = rows.into_iter().collect();
        rows.sort_by_key(|r| r.date);
        let mut teams = TeamTable::new();
        let mut matches = Vec::with_capacity(rows.len());
        for r in rows {
            let home = teams.intern(r.home);
            let away = teams.intern(r.away);
            matches.push(MatchRecord {
                date: r.date,
                home,
                away,
                home_goals: r.home_goals,
                away_goals: r.away_goals,
                neutral: r.neutral,
                importance: r.importance,
            });
        }
        let reference = matches
            .last()
            .map(|m| m.date)
            .ok_or_else(|| Error::InvalidParameter("dataset contains no matches".into()))?;
        Self::new(matches, teams, reference)
    }

    pub fn matches(&self) -> &[MatchRecord] {
        &self.matches
    }

    pub fn teams(&self) -> &TeamTable {
        &self.teams
    }

    pub fn reference_date(&self) -> NaiveDate {
        self.reference_date
    }

    pub fn with_reference_date(mut self, date: NaiveDate) -> Self {
        self.reference_date = date;
        self
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.matches.first().map(|m| m.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.matches.last().map(|m| m.date)
    }

    /// Matches with `from <= date < until`.
    pub fn between(&self, from: NaiveDate, until: NaiveDate) -> &[MatchRecord] {
        let lo = self.matches.partition_point(|m| m.date < from);
        let hi = self.matches.partition_point(|m| m.date < until);
        &self.matches[lo..hi.max(lo)]
    }

    pub fn team_name(&self, id: TeamId) -> &str {
        self.teams.name(id)
    }

    /// `(home wins, draws, away wins)`.
    pub fn outcome_counts(&self) -> (usize, usize, usize) {
        self.matches.iter().fold((0, 0, 0), |(h, d, a), m| match m.outcome() {
            OutcomeLabel::Home => (h + 1, d, a),
            OutcomeLabel::Draw => (h, d + 1, a),
            OutcomeLabel::Away => (h, d, a + 1),
        })
    }
}

/// A result keyed by team names, before team ids are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMatch {
    pub date: NaiveDate,
    pub home: String,
    pub away: String,
    pub home_goals: u32,
    pub away_goals: u32,
    pub neutral: bool,
    pub importance: ImportanceClass,
}

/// Header names used to locate each field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub date: String,
    pub home: String,
    pub away: String,
    pub home_goals: String,
    pub away_goals: String,
    pub neutral: String,
    pub importance: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            date: "date".into(),
            home: "home".into(),
            away: "away".into(),
            home_goals: "home_goals".into(),
            away_goals: "away_goals".into(),
            neutral: "neutral".into(),
            importance: "importance".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Abort on the first malformed row.
    #[default]
    Strict,
    /// Skip malformed rows and report them.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at line {}", self.message, self.line)
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub dataset: Dataset,
    pub skipped: Vec<RowError>,
}

struct Columns {
    date: usize,
    home: usize,
    away: usize,
    home_goals: usize,
    away_goals: usize,
    neutral: Option<usize>,
    importance: Option<usize>,
}

impl Columns {
    fn locate(headers: &csv::StringRecord, map: &ColumnMap) -> Result<Self> {
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let need = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.to_string()));
        Ok(Self {
            date: need(&map.date)?,
            home: need(&map.home)?,
            away: need(&map.away)?,
            home_goals: need(&map.home_goals)?,
            away_goals: need(&map.away_goals)?,
            neutral: find(&map.neutral),
            importance: find(&map.importance),
        })
    }
}

fn parse_row(rec: &csv::StringRecord, cols: &Columns) -> std::result::Result<NamedMatch, String> {
    let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
    let date = NaiveDate::parse_from_str(field(cols.date), "%Y-%m-%d")
        .map_err(|_| format!("malformed date `{}`", field(cols.date)))?;
    let home = field(cols.home);
    let away = field(cols.away);
    if home.is_empty() || away.is_empty() {
        return Err("empty team name".into());
    }
    if home == away {
        return Err(format!("home and away are both `{home}`"));
    }
    let goals = |i: usize| -> std::result::Result<u32, String> {
        let raw = field(i);
        let v: i64 = raw.parse().map_err(|_| format!("malformed goals `{raw}`"))?;
        if v < 0 {
            return Err("negative goals".into());
        }
        u32::try_from(v).map_err(|_| format!("goal count `{raw}` out of range"))
    };
    let home_goals = goals(cols.home_goals)?;
    let away_goals = goals(cols.away_goals)?;
    let neutral = match cols.neutral.map(field).unwrap_or("") {
        "" | "0" => false,
        "1" => true,
        s if s.eq_ignore_ascii_case("false") => false,
        s if s.eq_ignore_ascii_case("true") => true,
        s => return Err(format!("malformed neutral flag `{s}`")),
    };
    let importance = match cols.importance.map(field).unwrap_or("") {
        "" => ImportanceClass::DomesticLeague,
        s => s.parse()?,
    };
    Ok(NamedMatch { date, home: home.to_string(), away: away.to_string(), home_goals, away_goals, neutral, importance })
}

/// Parses match CSV. Team ids follow first appearance in date order, so writing a
/// dataset back out and re-parsing it reproduces the same ids.
pub fn parse_csv<R: Read>(source: R, columns: &ColumnMap, mode: ParseMode) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let cols = Columns::locate(reader.headers()?, columns)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&rec, &cols) {
            Ok(row) => rows.push(row),
            Err(message) => match mode {
                ParseMode::Strict => return Err(Error::Row { line, message }),
                ParseMode::Lenient => skipped.push(RowError { line, message }),
            },
        }
    }
    Ok(ParseOutcome { dataset: Dataset::from_named(rows)?, skipped })
}

/// Writes the dataset in the same CSV layout [`parse_csv`] reads, with all columns.
pub fn write_csv<W: Write>(data: &Dataset, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["date", "home", "away", "home_goals", "away_goals", "neutral", "importance"])?;
    for m in data.matches() {
        w.write_record([
            m.date.format("%Y-%m-%d").to_string(),
            data.team_name(m.home).to_string(),
            data.team_name(m.away).to_string(),
            m.home_goals.to_string(),
            m.away_goals.to_string(),
            (m.neutral as u8).to_string(),
            m.importance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
