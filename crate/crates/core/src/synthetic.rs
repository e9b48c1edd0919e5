//! Seeded match simulators with a known bivariate Poisson ground truth.
//!
//! Used by tests, the acceptance suite, and the `simulate` subcommand.

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ImportanceClass, NamedMatch};
use crate::error::{Error, Result};

/// Single-strength scoring truth: `λ_home = exp(c + r_h + h - r_a)`,
/// `λ_away = exp(c + r_a - r_h - h)`, shared component `λ_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringTruth {
    pub intercept: f64,
    pub home_effect: f64,
    pub covariance: f64,
}

impl Default for ScoringTruth {
    fn default() -> Self {
        Self { intercept: 0.1, home_effect: 0.25, covariance: 0.15 }
    }
}

impl ScoringTruth {
    fn sample<R: Rng>(&self, rng: &mut R, r_home: f64, r_away: f64, neutral: bool) -> Result<(u32, u32)> {
        let h = if neutral { 0.0 } else { self.home_effect };
        let gap = r_home + h - r_away;
        let draw = |rng: &mut R, lambda: f64| -> Result<u32> {
            if lambda == 0.0 {
                return Ok(0);
            }
            let p = Poisson::new(lambda).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(p.sample(rng) as u32)
        };
        let x = draw(rng, (self.intercept + gap).exp())?;
        let y = draw(rng, (self.intercept - gap).exp())?;
        let shared = draw(rng, self.covariance)?;
        Ok((x + shared, y + shared))
    }
}

fn normal(mean: f64, sd: f64) -> Result<Normal<f64>> {
    Normal::new(mean, sd).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Random pairings among a fixed set of teams with constant strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingSimulation {
    pub strengths: Vec<f64>,
    pub truth: ScoringTruth,
    pub matches: usize,
    /// Matches sharing one calendar date before the date advances.
    pub matches_per_day: usize,
    pub start: NaiveDate,
    pub seed: u64,
}

impl PairingSimulation {
    pub fn new(strengths: Vec<f64>, truth: ScoringTruth, matches: usize, seed: u64) -> Self {
        Self {
            strengths,
            truth,
            matches,
            matches_per_day: matches.max(1),
            start: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            seed,
        }
    }

    pub fn team_name(i: usize) -> String {
        format!("Team {:02}", i + 1)
    }

    pub fn generate(&self) -> Result<Dataset> {
        let t = self.strengths.len();
        if t < 2 || self.matches_per_day == 0 {
            return Err(Error::InvalidParameter("need at least two teams and one match per day".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut rows = Vec::with_capacity(self.matches);
        for m in 0..self.matches {
            let home = rng.random_range(0..t);
            let away = (home + rng.random_range(1..t)) % t;
            let (hg, ag) = self.truth.sample(&mut rng, self.strengths[home], self.strengths[away], false)?;
            rows.push(NamedMatch {
                date: self.start + Days::new((m / self.matches_per_day) as u64),
                home: Self::team_name(home),
                away: Self::team_name(away),
                home_goals: hg,
                away_goals: ag,
                neutral: false,
                importance: ImportanceClass::DomesticLeague,
            });
        }
        Dataset::from_named(rows)
    }
}

/// Double round-robin league seasons with drifting strengths and promotion/relegation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeagueSimulation {
    pub teams: usize,
    pub seasons: usize,
    /// Teams replaced by newcomers after each season, chosen by final table position.
    pub relegated: usize,
    pub truth: ScoringTruth,
    /// Standard deviation of initial strengths.
    pub strength_sd: f64,
    /// Standard deviation of the per-round random-walk step of every strength.
    pub drift_sd: f64,
    /// Mean strength of promoted newcomers.
    pub newcomer_mean: f64,
    pub first_season_start: NaiveDate,
    pub days_between_rounds: u64,
    pub seed: u64,
}

impl Default for LeagueSimulation {
    fn default() -> Self {
        Self {
            teams: 20,
            seasons: 10,
            relegated: 3,
            truth: ScoringTruth::default(),
            strength_sd: 0.35,
            drift_sd: 0.02,
            newcomer_mean: -0.2,
            first_season_start: NaiveDate::from_ymd_opt(2006, 8, 12).unwrap(),
            days_between_rounds: 7,
            seed: 1,
        }
    }
}

/// Simulated matches plus the true strengths at the end of each season.
#[derive(Debug, Clone)]
pub struct SimulatedLeague {
    pub dataset: Dataset,
    pub season_starts: Vec<NaiveDate>,
    pub final_strengths: Vec<Vec<(String, f64)>>,
}

/// Circle-method schedule: `n - 1` rounds of `n / 2` pairings, each team once per round.
pub fn round_robin_schedule(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut ring: Vec<usize> = (1..n).collect();
    let mut rounds = Vec::with_capacity(n - 1);
    for r in 0..n - 1 {
        let mut pairs = Vec::with_capacity(n / 2);
        let (a, b) = if r % 2 == 0 { (0, ring[0]) } else { (ring[0], 0) };
        pairs.push((a, b));
        for k in 1..n / 2 {
            let (x, y) = (ring[k], ring[n - 1 - k]);
            pairs.push(if k % 2 == 0 { (x, y) } else { (y, x) });
        }
        rounds.push(pairs);
        ring.rotate_right(1);
    }
    rounds
}

impl LeagueSimulation {
    pub fn rounds_per_season(&self) -> usize {
        2 * (self.teams - 1)
    }

    pub fn generate(&self) -> Result<SimulatedLeague> {
        if self.teams < 2 || !self.teams.is_multiple_of(2) {
            return Err(Error::InvalidParameter("league simulation needs an even number of teams".into()));
        }
        if self.relegated >= self.teams {
            return Err(Error::InvalidParameter("cannot relegate the whole league".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let initial = normal(0.0, self.strength_sd)?;
        let newcomer = normal(self.newcomer_mean, self.strength_sd)?;
        let step = normal(0.0, self.drift_sd.max(0.0).max(f64::MIN_POSITIVE))?;
        let mut names: Vec<String> = (0..self.teams).map(|i| format!("Club {:02}", i + 1)).collect();
        let mut strengths: Vec<f64> = (0..self.teams).map(|_| initial.sample(&mut rng)).collect();
        let mut next_id = self.teams;
        let first_leg = round_robin_schedule(self.teams);
        let mut rows = Vec::new();
        let mut season_starts = Vec::new();
        let mut final_strengths = Vec::new();
        for season in 0..self.seasons {
            let start = self
                .first_season_start
                .checked_add_months(chrono::Months::new(12 * season as u32))
                .ok_or_else(|| Error::InvalidParameter("season start out of range".into()))?;
            season_starts.push(start);
            // Fresh shuffle each season so fixtures vary between years.
            let mut order: Vec<usize> = (0..self.teams).collect();
            order.shuffle(&mut rng);
            let mut points = vec![0i64; self.teams];
            for round in 0..self.rounds_per_season() {
                let leg = &first_leg[round % (self.teams - 1)];
                let date = start + Days::new(round as u64 * self.days_between_rounds);
                for &(a, b) in leg {
                    let (mut home, mut away) = (order[a], order[b]);
                    if round >= self.teams - 1 {
                        std::mem::swap(&mut home, &mut away);
                    }
                    let (hg, ag) = self.truth.sample(&mut rng, strengths[home], strengths[away], false)?;
                    match hg.cmp(&ag) {
                        std::cmp::Ordering::Greater => points[home] += 3,
                        std::cmp::Ordering::Less => points[away] += 3,
                        std::cmp::Ordering::Equal => {
                            points[home] += 1;
                            points[away] += 1;
                        }
                    }
                    rows.push(NamedMatch {
                        date,
                        home: names[home].clone(),
                        away: names[away].clone(),
                        home_goals: hg,
                        away_goals: ag,
                        neutral: false,
                        importance: ImportanceClass::DomesticLeague,
                    });
                }
                if self.drift_sd > 0.0 {
                    strengths.iter_mut().for_each(|r| *r += step.sample(&mut rng));
                }
            }
            final_strengths.push(names.iter().cloned().zip(strengths.iter().copied()).collect());
            let mut table: Vec<usize> = (0..self.teams).collect();
            table.sort_by_key(|&i| (points[i], std::cmp::Reverse(i)));
            for &slot in table.iter().take(self.relegated) {
                next_id += 1;
                names[slot] = format!("Club {next_id:02}");
                strengths[slot] = newcomer.sample(&mut rng);
            }
        }
        Ok(SimulatedLeague { dataset: Dataset::from_named(rows)?, season_starts, final_strengths })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn schedule_is_a_round_robin() {
        for n in [2, 4, 6, 20] {
            let rounds = round_robin_schedule(n);
            assert_eq!(rounds.len(), n - 1);
            let mut seen = HashSet::new();
            for r in &rounds {
                let mut teams: Vec<usize> = r.iter().flat_map(|&(a, b)| [a, b]).collect();
                teams.sort_unstable();
                assert_eq!(teams, (0..n).collect::<Vec<_>>());
                for &(a, b) in r {
                    assert!(seen.insert((a.min(b), a.max(b))));
                }
            }
            assert_eq!(seen.len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn league_shape() {
        let sim = LeagueSimulation { seasons: 3, ..LeagueSimulation::default() };
        let out = sim.generate().unwrap();
        assert_eq!(out.dataset.len(), 3 * 380);
        assert_eq!(out.season_starts.len(), 3);
        // 20 founding clubs plus 3 newcomers after each of the first two seasons
        // (the third season's replacements never play).
        assert_eq!(out.dataset.teams().len(), 26);
        let mut pairs = HashSet::new();
        for m in &out.dataset.matches()[..380] {
            assert!(pairs.insert((m.home, m.away)));
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        let sim = LeagueSimulation { seasons: 1, ..LeagueSimulation::default() };
        assert_eq!(sim.generate().unwrap().dataset, sim.generate().unwrap().dataset);
        let other = LeagueSimulation { seed: 2, ..sim.clone() };
        assert_ne!(sim.generate().unwrap().dataset, other.generate().unwrap().dataset);
    }

    #[test]
    fn pairing_means_follow_truth() {
        let sim = PairingSimulation::new(vec![0.0, 0.0], ScoringTruth::default(), 20_000, 9);
        let d = sim.generate().unwrap();
        let n = d.len() as f64;
        let home: f64 = d.matches().iter().map(|m| m.home_goals as f64).sum::<f64>() / n;
        let truth = ScoringTruth::default();
        let expected = (truth.intercept + truth.home_effect).exp() + truth.covariance;
        assert!((home - expected).abs() < 0.03, "{home} vs {expected}");
    }
}
