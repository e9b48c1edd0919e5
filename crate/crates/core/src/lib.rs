//! Strength-based soccer rating models.
//!
//! Ten model classes (Thurstone-Mosteller, Bradley-Terry, Bradley-Terry-Davidson, each
//! optionally goal-difference weighted, and four Poisson score models) fitted by
//! time-weighted maximum likelihood, evaluated by rolling Rank Probability Score
//! backtests, and turned into rankings.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar to `f64`; the `f32` variants carry an `F32` suffix.
//!
//! ```
//! use pitchrank::{fit_dataset, Dataset, FitOptions, ModelClass, ModelSpec, NamedMatch, WeightConfig};
//! use pitchrank::data::ImportanceClass;
//!
//! let day = |d| chrono::NaiveDate::from_ymd_opt(2018, 1, d).unwrap();
//! let game = |d, h: &str, a: &str, hg, ag| NamedMatch {
//!     date: day(d), home: h.into(), away: a.into(), home_goals: hg, away_goals: ag,
//!     neutral: false, importance: ImportanceClass::DomesticLeague,
//! };
//! let data = Dataset::from_named([
//!     game(1, "Leeds", "Derby", 2, 0), game(2, "Derby", "Hull", 1, 1),
//!     game(3, "Hull", "Leeds", 0, 1), game(4, "Derby", "Leeds", 2, 2),
//!     game(5, "Leeds", "Hull", 0, 0), game(6, "Hull", "Derby", 3, 1),
//! ]).unwrap();
//! let weights = WeightConfig::new(390.0, data.reference_date()).unwrap();
//! let spec = ModelSpec::new(ModelClass::IndependentPoisson, weights);
//! let fit = fit_dataset(&spec, &data, &FitOptions::default()).unwrap();
//! let p = fit.params.predict_by_name("Leeds", "Hull", false).unwrap();
//! assert!((p.p_home + p.p_draw + p.p_away - 1.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod backtest;
pub mod data;
pub mod error;
pub mod estimation;
pub mod model;
pub mod optim;
pub mod ordinal;
pub mod poisson;
pub mod ranking;
pub mod scalar;
pub mod special;
pub mod synthetic;
pub mod weighting;

pub use backtest::{grid_search, rps, run_backtest, BacktestConfig, EvaluationFilter, Forecaster};
pub use data::{parse_csv, write_csv, ColumnMap, Dataset, MatchRecord, NamedMatch, OutcomeLabel, ParseMode};
pub use error::{Error, Result};
pub use estimation::{fit, fit_dataset, gradient, weighted_loglik, FitOptions};
pub use model::ModelClass;
pub use scalar::Scalar;

pub type WeightConfig = weighting::WeightConfig<f64>;
pub type ModelSpec = model::ModelSpec<f64>;
pub type ParameterSet = model::ParameterSet<f64>;
pub type OutcomeDistribution = ordinal::OutcomeDistribution<f64>;
pub type ScoringRates = poisson::ScoringRates<f64>;
pub type TrainingSet = estimation::TrainingSet<f64>;
pub type FitResult = estimation::FitResult<f64>;
pub type BacktestReport = backtest::BacktestReport<f64>;
pub type RankingEntry = ranking::RankingEntry<f64>;
pub type RankingSeries = ranking::RankingSeries<f64>;

pub type WeightConfigF32 = weighting::WeightConfig<f32>;
pub type ModelSpecF32 = model::ModelSpec<f32>;
pub type ParameterSetF32 = model::ParameterSet<f32>;
pub type OutcomeDistributionF32 = ordinal::OutcomeDistribution<f32>;
pub type ScoringRatesF32 = poisson::ScoringRates<f32>;
pub type TrainingSetF32 = estimation::TrainingSet<f32>;
pub type FitResultF32 = estimation::FitResult<f32>;
pub type BacktestReportF32 = backtest::BacktestReport<f32>;
