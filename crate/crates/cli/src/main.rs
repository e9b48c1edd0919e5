//! `pitchrank` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pitchrank::ModelClass;

const MODEL_HELP: &str = "\
Model classes:
  thurstone-mosteller           bradley-terry
  bradley-terry-davidson        thurstone-mosteller+gd
  bradley-terry+gd              bradley-terry-davidson+gd
  independent-poisson           bivariate-poisson
  independent-poisson-def-att   bivariate-poisson-def-att

Exit codes: 0 success, 1 input parse error, 2 configuration error, 3 fit did not converge.";

#[derive(Debug, Parser)]
#[command(name = "pitchrank", version, about = "Soccer strength ratings, forecasts and backtests", after_help = MODEL_HELP)]
pub struct Cli {
    /// Print errors to stderr as JSON lines.
    #[arg(long, global = true)]
    pub json_errors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a results CSV and summarize it.
    #[command(after_help = MODEL_HELP)]
    Ingest(IngestArgs),
    /// Fit one model and write the parameters as JSON.
    #[command(after_help = MODEL_HELP)]
    Fit(FitArgs),
    /// Outcome probabilities for fixtures from a saved fit.
    #[command(after_help = MODEL_HELP)]
    Predict(PredictArgs),
    /// Rolling out-of-sample evaluation of model classes and half periods.
    #[command(after_help = MODEL_HELP)]
    Backtest(BacktestArgs),
    /// Half-period grid search for one model class.
    #[command(after_help = MODEL_HELP)]
    Grid(GridArgs),
    /// Ranking table from a saved fit.
    #[command(after_help = MODEL_HELP)]
    Rank(RankArgs),
    /// Ranking time series from repeated fits.
    #[command(after_help = MODEL_HELP)]
    Series(SeriesArgs),
    /// Data for plots.
    #[command(after_help = MODEL_HELP)]
    Plotdata(PlotdataArgs),
    /// Write a simulated league results CSV.
    #[command(after_help = MODEL_HELP)]
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Results CSV (date,home,away,home_goals,away_goals[,neutral][,importance]).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Skip malformed rows instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Rename a column, e.g. `--column home=home_team`. Repeatable.
    #[arg(long = "column", value_name = "FIELD=NAME")]
    pub columns: Vec<String>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Write the cleaned, date-sorted dataset here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    PremierLeague,
    NationalTeams,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(short, long, value_parser = parse_model)]
    pub model: ModelClass,
    /// Half period of the time decay, in days.
    #[arg(long, default_value_t = 390.0)]
    pub half_period: f64,
    /// Fit on matches up to and including this date (default: last match date).
    #[arg(long)]
    pub as_of: Option<NaiveDate>,
    /// Only use matches from the last this many days.
    #[arg(long)]
    pub window: Option<u32>,
    /// Weight matches by importance class.
    #[arg(long)]
    pub importance: bool,
    /// Scale of the latent performance distribution (Thurstone-Mosteller, Bradley-Terry).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Fit JSON written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, requires = "away", conflicts_with = "fixtures")]
    pub home: Option<String>,
    #[arg(long, requires = "home")]
    pub away: Option<String>,
    #[arg(long)]
    pub neutral: bool,
    /// CSV of fixtures with `home,away[,neutral]` columns.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Granularity {
    Round,
    Match,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Blocks {
    Rounds,
    Dates,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Experimental design defaults.
    #[arg(long, value_enum, default_value_t = Preset::PremierLeague)]
    pub preset: Preset,
    /// Evaluate this single half period instead of the preset grid.
    #[arg(long, conflicts_with = "grid")]
    pub half_period: Option<f64>,
    /// Half-period grid as `start:end:step` in days.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<HalfPeriodGrid>,
    /// Training window in days.
    #[arg(long)]
    pub window: Option<u32>,
    /// Rounds at the start of each season that are not scored.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// First date eligible for scoring.
    #[arg(long)]
    pub eval_start: Option<NaiveDate>,
    /// Scoring stops before this date.
    #[arg(long)]
    pub eval_end: Option<NaiveDate>,
    /// Do not score friendlies.
    #[arg(long)]
    pub exclude_friendlies: bool,
    /// Score every match, friendlies included.
    #[arg(long, conflicts_with = "exclude_friendlies")]
    pub score_all: bool,
    /// Drop matches that are not scored from training too.
    #[arg(long)]
    pub train_on_scored_only: bool,
    /// Refit once per block, or before every match date.
    #[arg(long, value_enum)]
    pub granularity: Option<Granularity>,
    /// Block by derived league rounds or by calendar date.
    #[arg(long, value_enum)]
    pub blocks: Option<Blocks>,
    /// Weight matches by importance class (on by default for national-teams).
    #[arg(long)]
    pub importance: bool,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Comma-separated model classes (default: all ten).
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    pub models: Vec<ModelClass>,
    /// Table CSV: model_class, optimal_half_period_days, mean_rps.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Per (model, half period) CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Per-match prediction log CSV.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Full report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(short, long, value_parser = parse_model)]
    pub model: ModelClass,
    /// Curve CSV: half_period_days, mean_rps, best.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMode {
    /// Single strengths for single-strength classes, round robin otherwise.
    Auto,
    Strength,
    DefAtt,
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, value_enum, default_value_t = DisplayArg::Raw)]
    pub display: DisplayArg,
    #[arg(long, value_enum, default_value_t = RankMode::Auto)]
    pub mode: RankMode,
    /// Play the round robin on neutral ground.
    #[arg(long)]
    pub neutral: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DisplayArg {
    Raw,
    Exponentiated,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(short, long, value_parser = parse_model)]
    pub model: ModelClass,
    #[arg(long, default_value_t = 390.0)]
    pub half_period: f64,
    #[arg(long)]
    pub start: NaiveDate,
    /// Last ranking date (default: the day after the last match).
    #[arg(long)]
    pub end: Option<NaiveDate>,
    /// Spacing between ranking dates: `7d`, `2w`, or a number of days.
    #[arg(long, default_value = "7d", value_parser = parse_every)]
    pub every: u64,
    #[arg(long, default_value_t = 730)]
    pub window: u32,
    #[arg(long)]
    pub importance: bool,
    #[arg(long, value_enum, default_value_t = DisplayArg::Raw)]
    pub display: DisplayArg,
    /// Report position jumps for this team.
    #[arg(long)]
    pub team: Option<String>,
    /// External ranking CSV (date,team,position) to compare the team against.
    #[arg(long, requires = "team")]
    pub external: Option<PathBuf>,
    /// Side-by-side comparison CSV for `--team`.
    #[arg(long, requires = "external")]
    pub compare_output: Option<PathBuf>,
    /// Long CSV: date, team, position, score.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    #[command(subcommand)]
    pub kind: PlotKind,
}

#[derive(Debug, Subcommand)]
pub enum PlotKind {
    /// Exponential decay next to the FIFA four-year step curve.
    #[command(after_help = MODEL_HELP)]
    Decay {
        #[arg(long, default_value_t = 500.0)]
        half_period: f64,
        #[arg(long, default_value_t = 1460)]
        max_days: u32,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 20)]
    pub teams: usize,
    #[arg(long, default_value_t = 10)]
    pub seasons: usize,
    #[arg(long, default_value_t = 3)]
    pub relegated: usize,
    /// Per-round random-walk step of every strength.
    #[arg(long, default_value_t = 0.02)]
    pub drift: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "2006-08-12")]
    pub start: NaiveDate,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelClass, String> {
    s.parse::<ModelClass>()
        .map_err(|_| format!("unknown model class `{s}`; valid classes: {}", ModelClass::names().join(", ")))
}

/// Half periods in days, parsed from `start:end:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPeriodGrid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<HalfPeriodGrid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad grid `{s}`, expected start:end:step")))
        .collect::<Result<_, _>>()?;
    let [start, end, step] = parts[..] else {
        return Err(format!("bad grid `{s}`, expected start:end:step"));
    };
    if !(start > 0.0 && end >= start && step > 0.0) {
        return Err(format!("bad grid `{s}`: need 0 < start <= end and step > 0"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok(HalfPeriodGrid((0..=n).map(|k| start + step * k as f64).collect()))
}

fn parse_every(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last() {
        Some('d') => (&s[..s.len() - 1], 1),
        Some('w') => (&s[..s.len() - 1], 7),
        _ => (s, 1),
    };
    match num.parse::<u64>() {
        Ok(n) if n > 0 => Ok(n * mult),
        _ => Err(format!("bad interval `{s}`; use e.g. 7d or 2w")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json_errors;
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if json {
                eprintln!(
                    "{}",
                    serde_json::json!({ "level": "error", "kind": e.kind(), "code": e.code, "message": e.message })
                );
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
