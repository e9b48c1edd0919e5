use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::Days;
use pitchrank::backtest::{
    grid_forecasters, grid_search, run_backtest, BacktestConfig, BlockScheme, EvaluationFilter, UpdateGranularity,
    DEFAULT_SEASON_GAP_DAYS,
};
use pitchrank::data::{parse_csv, write_csv, ColumnMap, Dataset, ParseMode};
use pitchrank::estimation::{fit, FitOptions, TrainingSet};
use pitchrank::ranking::{
    every, max_monthly_jump, rank_def_att, rank_overall, rank_round_robin, rank_single, ranking_series,
    write_ranking_csv, Display, ExternalRanking, SeriesConfig,
};
use pitchrank::synthetic::LeagueSimulation;
use pitchrank::weighting::decay_curves;
use pitchrank::{Error, FitResult, ModelClass, ModelSpec, RankingEntry, WeightConfig};

use crate::{
    BacktestArgs, Blocks, Cli, Command, DisplayArg, EvalArgs, FitArgs, Format, Granularity, GridArgs, IngestArgs,
    InputArgs, PlotKind, PredictArgs, Preset, RankArgs, RankMode, SeriesArgs, SimulateArgs,
};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            1 => "parse",
            2 => "config",
            3 => "convergence",
            _ => "internal",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Row { .. } | Error::MissingColumn(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::config(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Predict(a) => predict(a),
        Command::Backtest(a) => backtest(a),
        Command::Grid(a) => grid(a),
        Command::Rank(a) => rank(a),
        Command::Series(a) => series(a),
        Command::Plotdata(a) => match a.kind {
            PlotKind::Decay { half_period, max_days, step, output } => {
                decay(half_period, max_days, step, output.as_deref())
            }
        },
        Command::Simulate(a) => simulate(a),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn column_map(renames: &[String]) -> Result<ColumnMap> {
    let mut map = ColumnMap::default();
    for r in renames {
        let (field, name) =
            r.split_once('=').ok_or_else(|| CliError::config(format!("bad --column `{r}`, expected FIELD=NAME")))?;
        let slot = match field {
            "date" => &mut map.date,
            "home" => &mut map.home,
            "away" => &mut map.away,
            "home_goals" => &mut map.home_goals,
            "away_goals" => &mut map.away_goals,
            "neutral" => &mut map.neutral,
            "importance" => &mut map.importance,
            other => return Err(CliError::config(format!("unknown column field `{other}`"))),
        };
        *slot = name.to_string();
    }
    Ok(map)
}

fn load(args: &InputArgs) -> Result<Dataset> {
    let file =
        File::open(&args.input).map_err(|e| CliError::config(format!("cannot open {}: {e}", args.input.display())))?;
    let mode = if args.lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let outcome = parse_csv(file, &column_map(&args.columns)?, mode)?;
    for skipped in &outcome.skipped {
        eprintln!("skipped: {skipped}");
    }
    Ok(outcome.dataset)
}

fn ingest(a: IngestArgs) -> Result<u8> {
    let data = load(&a.input)?;
    let (h, d, aw) = data.outcome_counts();
    println!("matches: {}", data.len());
    println!("teams: {}", data.teams().len());
    if let (Some(first), Some(last)) = (data.first_date(), data.last_date()) {
        println!("dates: {first} to {last}");
    }
    println!("outcomes: {h} home wins, {d} draws, {aw} away wins");
    if let Some(out) = &a.output {
        write_csv(&data, sink(Some(out))?)?;
    }
    Ok(0)
}

fn cmd_fit(a: FitArgs) -> Result<u8> {
    let data = load(&a.input)?;
    let as_of = a.as_of.or(data.last_date()).ok_or(Error::EmptyTrainingSet)?;
    let weights = WeightConfig::new(a.half_period, as_of)?.with_importance(a.importance);
    let spec = ModelSpec::new(a.model, weights).with_scale(a.scale);
    let until = as_of + Days::new(1);
    let from = match a.window {
        Some(w) => until - Days::new(w as u64),
        None => data.first_date().unwrap_or(until),
    };
    let set = TrainingSet::from_matches(&data, data.between(from, until), &spec.weights)?;
    if set.components() > 1 {
        eprintln!("warning: comparison graph has {} components; strengths compare only within one", set.components());
    }
    let result = fit(&spec, &set, None, &FitOptions::default())?;
    let mut out = sink(a.output.as_deref())?;
    writeln!(out, "{}", result.to_json()?)?;
    out.flush()?;
    for d in &result.diagnostics {
        eprintln!("diagnostic: {}", serde_json::to_string(d).unwrap_or_default());
    }
    if result.converged {
        Ok(0)
    } else {
        eprintln!(
            "error: fit did not converge after {} iterations (result written with converged=false)",
            result.iterations
        );
        Ok(3)
    }
}

fn read_fit(path: &Path) -> Result<FitResult> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    Ok(FitResult::from_json(&text)?)
}

fn predict(a: PredictArgs) -> Result<u8> {
    let f = read_fit(&a.fit)?;
    let fixtures: Vec<(String, String, bool)> = match (&a.home, &a.away, &a.fixtures) {
        (Some(h), Some(aw), None) => vec![(h.clone(), aw.clone(), a.neutral)],
        (None, None, Some(path)) => read_fixtures(path, a.neutral)?,
        _ => return Err(CliError::config("give --home and --away, or --fixtures")),
    };
    let mut out = sink(a.output.as_deref())?;
    writeln!(out, "home,away,neutral,p_home,p_draw,p_away")?;
    for (h, aw, neutral) in fixtures {
        let p = f.params.predict_by_name(&h, &aw, neutral)?;
        writeln!(out, "{h},{aw},{neutral},{:.6},{:.6},{:.6}", p.p_home, p.p_draw, p.p_away)?;
    }
    out.flush()?;
    Ok(0)
}

fn read_fixtures(path: &Path, default_neutral: bool) -> Result<Vec<(String, String, bool)>> {
    let file = File::open(path).map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader.headers().map_err(Error::from)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (hi, ai) = match (col("home"), col("away")) {
        (Some(h), Some(a)) => (h, a),
        _ => return Err(Error::MissingColumn("home/away".into()).into()),
    };
    let ni = col("neutral");
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(Error::from)?;
        let neutral = match ni.and_then(|i| rec.get(i)).map(str::trim) {
            Some("1") | Some("true") => true,
            Some("0") | Some("false") => false,
            _ => default_neutral,
        };
        out.push((rec.get(hi).unwrap_or("").trim().to_string(), rec.get(ai).unwrap_or("").trim().to_string(), neutral));
    }
    Ok(out)
}

fn eval_config(e: &EvalArgs) -> Result<(BacktestConfig<f64>, bool)> {
    let mut cfg = match e.preset {
        Preset::PremierLeague => BacktestConfig::premier_league(),
        Preset::NationalTeams => BacktestConfig::national_teams(),
    };
    let importance = e.importance || e.preset == Preset::NationalTeams;
    if let Some(hp) = e.half_period {
        cfg.half_period_grid = vec![hp];
    }
    if let Some(g) = &e.grid {
        cfg.half_period_grid = g.0.clone();
    }
    if let Some(w) = e.window {
        cfg.training_window_days = w;
    }
    if let Some(b) = e.burn_in {
        cfg.burn_in_rounds = b;
    }
    cfg.evaluation_start = e.eval_start;
    cfg.evaluation_end = e.eval_end;
    if e.exclude_friendlies {
        cfg.evaluation_filter = EvaluationFilter::exclude_friendlies();
    }
    if e.score_all {
        cfg.evaluation_filter = EvaluationFilter::All;
    }
    cfg.train_on_filtered = !e.train_on_scored_only;
    if let Some(g) = e.granularity {
        cfg.update_granularity = match g {
            Granularity::Round => UpdateGranularity::Round,
            Granularity::Match => UpdateGranularity::Match,
        };
    }
    if let Some(b) = e.blocks {
        cfg.block_scheme = match b {
            Blocks::Rounds => BlockScheme::LeagueRounds { season_gap_days: DEFAULT_SEASON_GAP_DAYS },
            Blocks::Dates => BlockScheme::CalendarDate,
        };
    }
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    Ok((cfg, importance))
}

fn backtest(a: BacktestArgs) -> Result<u8> {
    let data = load(&a.input)?;
    let (cfg, importance) = eval_config(&a.eval)?;
    let classes = if a.models.is_empty() { ModelClass::ALL.to_vec() } else { a.models.clone() };
    let forecasters = grid_forecasters(&classes, &cfg, data.reference_date(), importance)?;
    let report = run_backtest(&forecasters, &data, &cfg)?;
    for s in report.summaries.iter().filter(|s| s.convergence_failures > 0) {
        eprintln!(
            "warning: {} at half period {:?}: {} blocks skipped after non-convergence",
            s.forecaster, s.half_period_days, s.convergence_failures
        );
    }
    let mut out = sink(a.output.as_deref())?;
    report.write_table_csv(&mut out)?;
    out.flush()?;
    if let Some(p) = &a.curve {
        report.write_curve_csv(sink(Some(p))?)?;
    }
    if let Some(p) = &a.predictions {
        report.write_predictions_csv(sink(Some(p))?)?;
    }
    if let Some(p) = &a.json {
        let mut w = sink(Some(p))?;
        writeln!(w, "{}", report.to_json()?)?;
        w.flush()?;
    }
    Ok(0)
}

fn grid(a: GridArgs) -> Result<u8> {
    let data = load(&a.input)?;
    let (cfg, importance) = eval_config(&a.eval)?;
    let result = grid_search(a.model, &data, &cfg, importance)?;
    let mut out = sink(a.output.as_deref())?;
    writeln!(out, "half_period_days,mean_rps,best")?;
    for (hp, rps) in &result.curve {
        writeln!(out, "{hp},{rps:.8},{}", *hp == result.best_half_period)?;
    }
    out.flush()?;
    eprintln!("best half period for {}: {} days (mean RPS {:.6})", a.model, result.best_half_period, result.best_rps);
    Ok(0)
}

fn display(d: DisplayArg) -> Display {
    match d {
        DisplayArg::Raw => Display::Raw,
        DisplayArg::Exponentiated => Display::Exponentiated,
    }
}

fn write_entries(out: &mut dyn Write, format: Format, lists: &[(&str, Vec<RankingEntry>)]) -> Result<()> {
    match format {
        Format::Json => {
            let value: serde_json::Map<String, serde_json::Value> =
                lists.iter().map(|(k, v)| (k.to_string(), serde_json::to_value(v).unwrap_or_default())).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&value).map_err(Error::from)?)?;
        }
        Format::Csv if lists.len() == 1 => write_ranking_csv(&lists[0].1, &mut *out)?,
        Format::Csv => {
            writeln!(out, "list,position,team,score,tied")?;
            for (name, entries) in lists {
                for e in entries {
                    writeln!(out, "{name},{},{},{:.6},{}", e.position, e.team, e.score, e.tied)?;
                }
            }
        }
    }
    Ok(())
}

fn rank(a: RankArgs) -> Result<u8> {
    let f = read_fit(&a.fit)?;
    let lists = match a.mode {
        RankMode::Auto if a.neutral && f.class.is_def_att() => vec![("overall", rank_round_robin(&f.params, true)?)],
        RankMode::Auto => vec![("overall", rank_overall(&f.params, display(a.display))?)],
        RankMode::Strength => vec![("strength", rank_single(&f.params, display(a.display))?)],
        RankMode::DefAtt => {
            let (att, def) = rank_def_att(&f.params)?;
            vec![("attack", att), ("defence", def)]
        }
        RankMode::RoundRobin => vec![("round-robin", rank_round_robin(&f.params, a.neutral)?)],
    };
    let mut out = sink(a.output.as_deref())?;
    write_entries(&mut *out, a.format, &lists)?;
    out.flush()?;
    Ok(0)
}

fn series(a: SeriesArgs) -> Result<u8> {
    let data = load(&a.input)?;
    let last = data.last_date().ok_or(Error::EmptyTrainingSet)?;
    let end = a.end.unwrap_or(last + Days::new(1));
    let dates = every(a.start, end, a.every);
    if dates.is_empty() {
        return Err(CliError::config("no ranking dates between --start and --end"));
    }
    let weights = WeightConfig::new(a.half_period, a.start)?.with_importance(a.importance);
    let spec = ModelSpec::new(a.model, weights);
    let cfg = SeriesConfig { training_window_days: a.window, display: display(a.display), ..SeriesConfig::default() };
    let result = ranking_series(&spec, &data, &dates, &cfg)?;
    for p in result.points.iter().filter(|p| p.entries.is_none()) {
        eprintln!("gap: {}: {}", p.date, p.error.as_deref().unwrap_or("fit failed"));
    }
    let mut out = sink(a.output.as_deref())?;
    result.write_long_csv(&mut out)?;
    out.flush()?;
    if let Some(team) = &a.team {
        eprintln!("max monthly position jump for {team}: {}", max_monthly_jump(&result.trace(team)));
        if let Some(path) = &a.external {
            let file =
                File::open(path).map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
            let ext = ExternalRanking::from_csv(file)?;
            eprintln!("max monthly position jump for {team} (external): {}", max_monthly_jump(ext.trace(team)));
            if let Some(cmp) = &a.compare_output {
                result.write_comparison_csv(team, &ext, sink(Some(cmp))?)?;
            }
        }
    }
    Ok(0)
}

fn decay(half_period: f64, max_days: u32, step: u32, output: Option<&Path>) -> Result<u8> {
    let rows = decay_curves(half_period, max_days, step)?;
    let mut out = sink(output)?;
    writeln!(out, "days,exponential,fifa")?;
    for (d, w, f) in rows {
        writeln!(out, "{d},{w:.6},{f}")?;
    }
    out.flush()?;
    Ok(0)
}

fn simulate(a: SimulateArgs) -> Result<u8> {
    let sim = LeagueSimulation {
        teams: a.teams,
        seasons: a.seasons,
        relegated: a.relegated,
        drift_sd: a.drift,
        seed: a.seed,
        first_season_start: a.start,
        ..LeagueSimulation::default()
    };
    let league = sim.generate()?;
    write_csv(&league.dataset, sink(a.output.as_deref())?)?;
    Ok(0)
}
