use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use chrono::NaiveDate;
use clap::Args;

use ribbonlab::catalog::ExperimentGroup;
use ribbonlab::config::Settings;
use ribbonlab::error::CoreError;
use ribbonlab::eval::EvalParams;
use ribbonlab::events::{EventStoreBuilder, GamesView, IngestReport};
use ribbonlab::report::{evaluate, render_text, EvaluationReport};
use ribbonlab::seeding::stable_hash64;
use ribbonlab::sim::simulate;
use ribbonlab::{assemble_ribbon, Catalog, EventStore};

use crate::manifest::RunManifest;

/// CLI failures split by exit code: validation problems (1) vs I/O (2).
#[derive(Debug)]
pub enum CliError {
    Validation(anyhow::Error),
    Io(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(e) | CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_io() {
            CliError::Io(anyhow::Error::new(e))
        } else {
            CliError::Validation(anyhow::Error::new(e))
        }
    }
}

type CliResult = Result<(), CliError>;

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(anyhow!("cannot open {}: {e}", path.display())))
}

fn validation(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Validation(e.into())
}

fn io_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Io(e.into())
}

fn load_settings(config: &Option<PathBuf>) -> Result<Settings, CliError> {
    match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(anyhow!("cannot read {}: {e}", path.display())))?;
            let parsed = ribbonlab::config::KvConfig::parse(&text)
                .and_then(|kv| kv.into_settings())
                .map_err(|e| validation(anyhow!("{}: {e}", path.display())))?;
            Ok(parsed)
        }
        None => Ok(Settings::default()),
    }
}

fn load_catalog(catalog_path: &Path, children_path: &Path) -> Result<Catalog, CliError> {
    let mut catalog = Catalog::new();
    catalog
        .load_apps_jsonl(open(catalog_path)?)
        .map_err(|e| validation(anyhow!("{}: {e}", catalog_path.display())))?;
    catalog
        .load_children_jsonl(open(children_path)?)
        .map_err(|e| validation(anyhow!("{}: {e}", children_path.display())))?;
    Ok(catalog)
}

fn ingest_games(builder: &mut EventStoreBuilder, path: &Path) -> Result<IngestReport, CliError> {
    let reader = open(path)?;
    let report = if path.extension().map(|e| e == "csv").unwrap_or(false) {
        builder.ingest_games_csv(reader)
    } else {
        builder.ingest_games_jsonl(reader)
    };
    report.map_err(|e| validation(anyhow!("{}: {e}", path.display())))
}

fn print_report(name: &str, path: &Path, report: &IngestReport) {
    println!(
        "{name} ({}): accepted {}, rejected {}",
        path.display(),
        report.accepted,
        report.rejected
    );
    for err in report.errors.iter().take(5) {
        println!("    {err}");
    }
    if report.errors.len() > 5 {
        println!("    ... and {} more", report.errors.len() - 5);
    }
}

// ---------------------------------------------------------------- ingest

#[derive(Args)]
pub struct IngestArgs {
    /// games.jsonl (or .csv) to validate.
    #[arg(long)]
    pub games: PathBuf,
    #[arg(long)]
    pub clicks: Option<PathBuf>,
    #[arg(long)]
    pub recs: Option<PathBuf>,
    /// Optional catalog/children files for referential checks.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub children: Option<PathBuf>,
}

pub fn cmd_ingest(args: &IngestArgs) -> CliResult {
    let mut builder = EventStoreBuilder::new();
    let games_report = ingest_games(&mut builder, &args.games)?;
    print_report("games", &args.games, &games_report);

    if let Some(path) = &args.clicks {
        let report = builder
            .ingest_clicks_jsonl(open(path)?)
            .map_err(|e| validation(anyhow!("{}: {e}", path.display())))?;
        print_report("clicks", path, &report);
    }
    if let Some(path) = &args.recs {
        let report = builder
            .ingest_recs_jsonl(open(path)?)
            .map_err(|e| validation(anyhow!("{}: {e}", path.display())))?;
        print_report("recs", path, &report);
    }

    let store = builder.freeze();
    if let (Some(catalog_path), Some(children_path)) = (&args.catalog, &args.children) {
        let catalog = load_catalog(catalog_path, children_path)?;
        let mut unknown_apps: BTreeSet<&str> = BTreeSet::new();
        let mut unknown_children: BTreeSet<&str> = BTreeSet::new();
        for g in store.games() {
            if catalog.app(&g.app_id).is_none() {
                unknown_apps.insert(&g.app_id);
            }
            if catalog.child(&g.child_id).is_none() {
                unknown_children.insert(&g.child_id);
            }
        }
        if unknown_apps.is_empty() && unknown_children.is_empty() {
            println!("referential check: all game ids resolve against the catalog");
        } else {
            println!(
                "referential check: {} unknown app ids, {} unknown child ids (evaluation treats them as never-eligible)",
                unknown_apps.len(),
                unknown_children.len()
            );
        }
    }
    println!(
        "store: {} games, {} clicks, {} recommendation records",
        store.games().len(),
        store.clicks().len(),
        store.recommendations().len()
    );
    Ok(())
}

// -------------------------------------------------------------- simulate

#[derive(Args)]
pub struct SimulateArgs {
    /// Key-value config file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult {
    let mut settings = load_settings(&args.config)?;
    if let Some(seed) = args.seed {
        settings.sim.seed = seed;
    }
    let output = simulate(&settings.sim)?;
    output.write_to_dir(&args.out).map_err(CliError::from)?;

    let mut manifest = RunManifest::new("simulate", settings.sim.seed, &args.out);
    manifest.config_path = args.config.clone();
    manifest.write(&args.out).map_err(io_err)?;
    println!(
        "simulated {} children x {} apps over {} days -> {} games, {} clicks, {} ribbons ({})",
        settings.sim.num_children,
        settings.sim.num_apps,
        settings.sim.day_count,
        output.games.len(),
        output.clicks.len(),
        output.recs.len(),
        args.out.display()
    );
    Ok(())
}

// ------------------------------------------------------------- recommend

#[derive(Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub children: PathBuf,
    #[arg(long)]
    pub games: PathBuf,
    /// Children to recommend for; all registered children when omitted.
    #[arg(long = "child")]
    pub child_ids: Vec<String>,
    /// Ribbon date (popularity ages apps against this).
    #[arg(long = "as-of")]
    pub as_of: NaiveDate,
    /// Force one arm's strategy instead of each child's assigned group.
    #[arg(long)]
    pub arm: Option<ExperimentGroup>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_recommend(args: &RecommendArgs) -> CliResult {
    let settings = load_settings(&args.config)?;
    let mut catalog = load_catalog(&args.catalog, &args.children)?;
    let mut builder = EventStoreBuilder::new();
    ingest_games(&mut builder, &args.games)?;
    let store = builder.freeze();

    let max_published = catalog.apps().map(|a| a.published_date).max();
    if let Some(latest) = max_published {
        if args.as_of < latest {
            return Err(validation(anyhow!(
                "--as-of {} precedes the newest published_date {latest}; popularity ages would be ill-defined",
                args.as_of
            )));
        }
    }

    let targets: Vec<String> = if args.child_ids.is_empty() {
        catalog.children().map(|c| c.child_id.clone()).collect()
    } else {
        for id in &args.child_ids {
            if catalog.child(id).is_none() {
                return Err(validation(anyhow!("unknown child id {id:?}")));
            }
        }
        args.child_ids.clone()
    };

    let mut rec_config = settings.recommender.clone();
    rec_config.seed = args.seed;
    let view = GamesView::qualify(&store, rec_config.input_policy());
    let generated_at = args
        .as_of
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc();

    std::fs::create_dir_all(&args.out).map_err(io_err)?;
    let mut lines = Vec::new();
    for child_id in &targets {
        let group = match args.arm {
            Some(arm) => arm,
            None => catalog
                .ensure_group(child_id, args.seed)
                .map_err(CoreError::Catalog)?,
        };
        let child = catalog.child(child_id).expect("validated above").clone();
        let ribbon = assemble_ribbon(
            &child,
            group.strategy(),
            &catalog,
            &store,
            &view,
            &rec_config,
            generated_at,
            stable_hash64(args.seed, child_id),
        );
        if ribbon.is_empty() {
            eprintln!("note: empty eligible set for child {child_id}; emitting an empty ribbon");
        }
        let mut line = serde_json::to_string(&ribbon.to_record()).expect("serializable");
        line.push('\n');
        lines.push(line);
    }
    std::fs::write(args.out.join("recs.jsonl"), lines.concat()).map_err(io_err)?;

    let mut manifest = RunManifest::new("recommend", args.seed, &args.out)
        .input("catalog", &args.catalog)
        .input("children", &args.children)
        .input("games", &args.games);
    manifest.config_path = args.config.clone();
    manifest.write(&args.out).map_err(io_err)?;
    println!(
        "wrote {} ribbons to {}",
        targets.len(),
        args.out.join("recs.jsonl").display()
    );
    Ok(())
}

// -------------------------------------------------------------- evaluate

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub children: PathBuf,
    #[arg(long)]
    pub games: PathBuf,
    #[arg(long)]
    pub clicks: PathBuf,
    #[arg(long)]
    pub recs: PathBuf,
    /// Window bounds (inclusive dates). Give all four or none; when omitted
    /// the log span is split in 30 + 15 day proportions.
    #[arg(long = "train-start")]
    pub train_start: Option<NaiveDate>,
    #[arg(long = "train-end")]
    pub train_end: Option<NaiveDate>,
    #[arg(long = "test-start")]
    pub test_start: Option<NaiveDate>,
    #[arg(long = "test-end")]
    pub test_end: Option<NaiveDate>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn load_store(args: &EvaluateArgs) -> Result<EventStore, CliError> {
    let mut builder = EventStoreBuilder::new();
    let games_report = ingest_games(&mut builder, &args.games)?;
    let clicks_report = builder
        .ingest_clicks_jsonl(open(&args.clicks)?)
        .map_err(|e| validation(anyhow!("{}: {e}", args.clicks.display())))?;
    let recs_report = builder
        .ingest_recs_jsonl(open(&args.recs)?)
        .map_err(|e| validation(anyhow!("{}: {e}", args.recs.display())))?;
    for (name, path, report) in [
        ("games", &args.games, &games_report),
        ("clicks", &args.clicks, &clicks_report),
        ("recs", &args.recs, &recs_report),
    ] {
        if report.rejected > 0 {
            print_report(name, path, report);
        }
    }
    Ok(builder.freeze())
}

fn windows(
    args: &EvaluateArgs,
    store: &EventStore,
) -> Result<(NaiveDate, NaiveDate, NaiveDate, NaiveDate), CliError> {
    let given = [
        args.train_start,
        args.train_end,
        args.test_start,
        args.test_end,
    ];
    let provided = given.iter().filter(|d| d.is_some()).count();
    match provided {
        4 => Ok((
            args.train_start.unwrap(),
            args.train_end.unwrap(),
            args.test_start.unwrap(),
            args.test_end.unwrap(),
        )),
        0 => {
            let mut days: Vec<NaiveDate> = store
                .recommendations()
                .iter()
                .map(|r| r.generated_at.date_naive())
                .chain(store.games().iter().map(|g| g.start_time.date_naive()))
                .collect();
            days.sort_unstable();
            let (Some(first), Some(last)) = (days.first().copied(), days.last().copied()) else {
                return Err(validation(anyhow!(
                    "cannot derive train/test windows from empty logs; pass --train-start/--train-end/--test-start/--test-end"
                )));
            };
            Ok(EvalParams::default_windows(first, last))
        }
        _ => Err(validation(anyhow!(
            "window flags are all-or-none: provide --train-start, --train-end, --test-start and --test-end together"
        ))),
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult {
    let settings = load_settings(&args.config)?;
    let catalog = load_catalog(&args.catalog, &args.children)?;
    let store = load_store(args)?;
    let (train_start, train_end, test_start, test_end) = windows(args, &store)?;

    let params = EvalParams {
        train_start,
        train_end,
        test_start,
        test_end,
        alpha: args.alpha,
        seed: args.seed,
        mc_iterations: settings.mc_iterations,
        attribution: settings.attribution,
        engagement_policy: settings.engagement_policy,
    };
    let report = evaluate(&catalog, &store, &params).map_err(CliError::from)?;

    std::fs::create_dir_all(&args.out).map_err(io_err)?;
    std::fs::write(args.out.join("report.json"), report.to_json()).map_err(io_err)?;

    let mut manifest = RunManifest::new("evaluate", args.seed, &args.out)
        .input("catalog", &args.catalog)
        .input("children", &args.children)
        .input("games", &args.games)
        .input("clicks", &args.clicks)
        .input("recs", &args.recs);
    manifest.config_path = args.config.clone();
    manifest.train_start = Some(train_start);
    manifest.train_end = Some(train_end);
    manifest.test_start = Some(test_start);
    manifest.test_end = Some(test_end);
    manifest.alpha = Some(args.alpha);
    manifest.write(&args.out).map_err(io_err)?;
    println!("wrote {}", args.out.join("report.json").display());
    Ok(())
}

// ---------------------------------------------------------------- report

#[derive(Args)]
pub struct ReportArgs {
    /// report.json produced by `evaluate`.
    #[arg(long)]
    pub report: PathBuf,
}

pub fn cmd_report(args: &ReportArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| CliError::Io(anyhow!("cannot read {}: {e}", args.report.display())))?;
    let report: EvaluationReport = serde_json::from_str(&text)
        .map_err(|e| validation(anyhow!("{}: {e}", args.report.display())))?;
    print!("{}", render_text(&report));
    Ok(())
}
