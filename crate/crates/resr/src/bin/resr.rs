//! Command-line front end: synthetic data generation, retrieval, equation
//! discovery, forecasting, export, and the benchmark suite. Exit codes:
//! 0 success, 1 usage error, 2 divergence.

use clap::{Args, Parser, Subcommand};
use resr::bank::{load_bank, load_default_bank, EquationBank};
use resr::dynamics::{add_noise, generate, SystemKind, SystemSpec};
use resr::ingest::{load_trajectories, select_top_k_by_variance, temporal_split};
use resr::pipeline::{
    discover, export_trajectory, run_benchmark, BenchConfig, DiscoveryResultFile, ExportFormat,
    ExportOptions, Forecast,
};
use resr::retrieval::{retrieve_top_k, RetrievalQuery};
use resr::search::{front_to_tsv, SearchConfig};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_DIVERGENCE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "resr",
    version,
    about = "Discover equations of motion from 2D trajectories and forecast them"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic trajectories from a physical system.
    GenData(GenDataArgs),
    /// Rank bank equations against a trajectory axis by N-DTW.
    Retrieve(RetrieveArgs),
    /// Discover x(t), y(t) equations for the most dynamic trajectories.
    Discover(DiscoverArgs),
    /// Forecast future samples from a discovery result.
    Forecast(ForecastArgs),
    /// Resample and rescale a forecast for downstream consumers.
    Export(ExportArgs),
    /// Run the benchmark suite (systems x seeds x alphas).
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenDataArgs {
    /// System spec file (TOML or JSON; a full SystemSpec).
    #[arg(long)]
    config: Option<PathBuf>,
    /// System kind (spring_mass, damped_spring_mass, projectile, two_body,
    /// single_pendulum, double_pendulum).
    #[arg(long)]
    system: Option<String>,
    /// Seeds to generate, one trajectory file per seed.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Gaussian pixel noise added to the emitted samples.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Seed-driven initial-state variation in [0, 1].
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RetrieveArgs {
    /// Input trajectory CSV (point_id,frame,x,y).
    #[arg(long)]
    input: PathBuf,
    /// Frames per second; defaults to the `fps` key of the input's JSON
    /// sidecar when present.
    #[arg(long)]
    fps: Option<f64>,
    /// Bank TSV path (defaults to the bundled bank).
    #[arg(long)]
    bank: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Axis to query: x, y, or both.
    #[arg(long, default_value = "both")]
    axis: String,
}

#[derive(Args)]
struct DiscoverArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long)]
    bank: Option<PathBuf>,
    /// Search config file (TOML or JSON; flags override its values).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    populations: Option<usize>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    max_complexity: Option<usize>,
    /// How many highest-variance trajectories to process.
    #[arg(long, default_value_t = 5)]
    top_traj: usize,
    /// Ground-truth sidecar JSON with analytic_x/analytic_y (defaults to
    /// `<input>.json` next to the input when present).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ForecastArgs {
    /// Discovery result JSON produced by `resr discover`.
    #[arg(long)]
    result: PathBuf,
    /// Forecast horizon in steps.
    #[arg(long)]
    steps: usize,
    /// Step size in seconds (default: the observed grid spacing).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value = "forecast.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    /// Forecast JSON produced by `resr forecast`.
    #[arg(long)]
    forecast: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    points_per_second: f64,
    /// Source resolution as WxH (the coordinate space of the forecast).
    #[arg(long, default_value = "640x480")]
    source_resolution: String,
    /// Target resolution as WxH.
    #[arg(long, default_value = "640x480")]
    target_resolution: String,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, default_value = "trajectory.json")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Bench config file (TOML or JSON; flags override its values).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the paper-scale profile as the baseline config.
    #[arg(long)]
    full: bool,
    #[arg(long, value_delimiter = ',')]
    systems: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    populations: Option<usize>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    bank: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap would exit 2 on its own; the contract here is 1
            let _ = err.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: cannot configure {workers} workers: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match cli.command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Retrieve(args) => cmd_retrieve(args),
        Command::Discover(args) => cmd_discover(args),
        Command::Forecast(args) => cmd_forecast(args),
        Command::Export(args) => cmd_export(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

type CmdResult = Result<ExitCode, String>;

fn read_config_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config `{}`: {e}", path.display()))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| format!("bad JSON config: {e}"))
    } else {
        toml::from_str(&text).map_err(|e| format!("bad TOML config: {e}"))
    }
}

fn load_bank_arg(path: &Option<PathBuf>) -> Result<EquationBank, String> {
    let load = match path {
        Some(p) => load_bank(p).map_err(|e| e.to_string())?,
        None => load_default_bank(),
    };
    for w in &load.warnings {
        log::warn!("bank: {w}");
    }
    Ok(load.bank)
}

/// JSON sidecar written next to generated trajectory CSVs; also consumed by
/// discover for fps defaults and ground-truth equations.
#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    system: String,
    fps: f64,
    seed: u64,
    noise_sigma: f64,
    spec: SystemSpec,
    effective_spec: SystemSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_y: Option<String>,
}

fn cmd_gen_data(args: GenDataArgs) -> CmdResult {
    let mut spec: SystemSpec = match &args.config {
        Some(path) => read_config_file(path)?,
        None => {
            let name = args
                .system
                .as_deref()
                .ok_or("either --config or --system is required")?;
            let kind = SystemKind::from_name(name)
                .ok_or_else(|| format!("unknown system `{name}`"))?;
            SystemSpec::with_defaults(kind)
        }
    };
    if let Some(name) = &args.system {
        let kind = SystemKind::from_name(name)
            .ok_or_else(|| format!("unknown system `{name}`"))?;
        if args.config.is_some() && kind != spec.kind {
            return Err("--system contradicts the config file".into());
        }
        spec.kind = kind;
    }
    if let Some(d) = args.duration {
        spec.duration = d;
    }
    if let Some(r) = args.sample_rate {
        spec.sample_rate = r;
    }
    if let Some(j) = args.jitter {
        spec.init_jitter = j;
    }

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("cannot create out dir: {e}"))?;
    for &seed in &args.seeds {
        let gt = generate(&spec, seed).map_err(|e| e.to_string())?;
        let observed = add_noise(&gt.trajectory, args.noise_sigma, seed ^ 0x6e6f_6973);
        let stem = format!("{}_seed{}", spec.kind.name(), seed);
        let csv_path = args.out_dir.join(format!("{stem}.csv"));
        let mut csv = String::from("point_id,frame,x,y\n");
        for (i, &(_, x, y)) in observed.samples.iter().enumerate() {
            csv.push_str(&format!("{},{},{},{}\n", observed.point_id, i, x, y));
        }
        std::fs::write(&csv_path, csv).map_err(|e| e.to_string())?;
        let sidecar = Sidecar {
            system: spec.kind.name().to_string(),
            fps: spec.sample_rate,
            seed,
            noise_sigma: args.noise_sigma,
            spec: spec.clone(),
            effective_spec: gt.effective_spec.clone(),
            analytic_x: gt.analytic_x.as_ref().map(|e| e.to_string()),
            analytic_y: gt.analytic_y.as_ref().map(|e| e.to_string()),
        };
        let json_path = args.out_dir.join(format!("{stem}.json"));
        std::fs::write(
            &json_path,
            serde_json::to_string_pretty(&sidecar).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        println!("wrote {} and {}", csv_path.display(), json_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn sidecar_for(input: &Path) -> Option<Sidecar> {
    let path = input.with_extension("json");
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn resolve_fps(input: &Path, flag: Option<f64>) -> Result<f64, String> {
    if let Some(fps) = flag {
        return Ok(fps);
    }
    sidecar_for(input)
        .map(|s| s.fps)
        .ok_or_else(|| "no --fps flag and no sidecar with an fps key".into())
}

fn cmd_retrieve(args: RetrieveArgs) -> CmdResult {
    let fps = resolve_fps(&args.input, args.fps)?;
    let bank = load_bank_arg(&args.bank)?;
    let set = load_trajectories(&args.input, fps).map_err(|e| e.to_string())?;
    if set.trajectories.is_empty() {
        return Err("input holds no trajectories".into());
    }
    let top = select_top_k_by_variance(&set, 1);
    let traj = &top.trajectories[0];
    let axes: Vec<(&str, Vec<(f64, f64)>)> = match args.axis.as_str() {
        "x" => vec![("x", traj.samples.iter().map(|&(t, x, _)| (t, x)).collect())],
        "y" => vec![("y", traj.samples.iter().map(|&(t, _, y)| (t, y)).collect())],
        "both" => vec![
            ("x", traj.samples.iter().map(|&(t, x, _)| (t, x)).collect()),
            ("y", traj.samples.iter().map(|&(t, _, y)| (t, y)).collect()),
        ],
        other => return Err(format!("--axis must be x, y, or both, got `{other}`")),
    };
    let multi = axes.len() > 1;
    if multi {
        println!("axis\tid\tdistance\texpression");
    } else {
        println!("id\tdistance\texpression");
    }
    for (name, series) in axes {
        let query = RetrievalQuery::new(series, args.k);
        let result = retrieve_top_k(&query, &bank).map_err(|e| e.to_string())?;
        for hit in &result.hits {
            let expr = bank
                .get(&hit.id)
                .map(|e| e.expr.to_string())
                .unwrap_or_default();
            if multi {
                println!("{name}\t{}\t{}\t{}", hit.id, hit.distance, expr);
            } else {
                println!("{}\t{}\t{}", hit.id, hit.distance, expr);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn apply_search_overrides(config: &mut SearchConfig, args: &DiscoverArgs) {
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.iterations {
        config.n_iterations = v;
    }
    if let Some(v) = args.populations {
        config.n_populations = v;
    }
    if let Some(v) = args.population_size {
        config.population_size = v;
    }
    if let Some(v) = args.top_k {
        config.top_k_retrieval = v;
    }
    if let Some(v) = args.max_complexity {
        config.max_complexity = v;
    }
}

fn cmd_discover(args: DiscoverArgs) -> CmdResult {
    let fps = resolve_fps(&args.input, args.fps)?;
    let bank = load_bank_arg(&args.bank)?;
    let mut config: SearchConfig = match &args.config {
        Some(path) => read_config_file(path)?,
        None => SearchConfig::default(),
    };
    apply_search_overrides(&mut config, &args);
    config.validate()?;

    let truth_exprs = match &args.truth {
        Some(path) => {
            let sidecar: Sidecar = read_config_file(path)?;
            parse_truth(&sidecar)?
        }
        None => match sidecar_for(&args.input) {
            Some(sidecar) => parse_truth(&sidecar)?,
            None => None,
        },
    };

    let set = load_trajectories(&args.input, fps).map_err(|e| e.to_string())?;
    if set.trajectories.is_empty() {
        return Err("input holds no trajectories".into());
    }
    let selected = select_top_k_by_variance(&set, args.top_traj);
    std::fs::create_dir_all(&args.out_dir).map_err(|e| e.to_string())?;

    let mut any_divergent = false;
    for traj in &selected.trajectories {
        let split = temporal_split(traj).map_err(|e| e.to_string())?;
        let truth = truth_exprs.as_ref().map(|(x, y)| (x, y));
        let result = discover(&split, &bank, &config, truth).map_err(|e| e.to_string())?;
        any_divergent |= result.divergent;
        let id = traj.point_id;
        let file = DiscoveryResultFile::from_result(&result);
        std::fs::write(
            args.out_dir.join(format!("discover_point{id}.json")),
            serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        std::fs::write(
            args.out_dir.join(format!("convergence_x_point{id}.csv")),
            result.log_x.to_csv_string(),
        )
        .map_err(|e| e.to_string())?;
        std::fs::write(
            args.out_dir.join(format!("convergence_y_point{id}.csv")),
            result.log_y.to_csv_string(),
        )
        .map_err(|e| e.to_string())?;
        std::fs::write(
            args.out_dir.join(format!("front_x_point{id}.tsv")),
            front_to_tsv(&result.front_x),
        )
        .map_err(|e| e.to_string())?;
        std::fs::write(
            args.out_dir.join(format!("front_y_point{id}.tsv")),
            front_to_tsv(&result.front_y),
        )
        .map_err(|e| e.to_string())?;
        println!(
            "point {id}: x(t) = {}  |  y(t) = {}  (test MSE {:.6}{})",
            result.f_x,
            result.f_y,
            result.test_mse,
            if result.divergent { ", divergent" } else { "" }
        );
    }
    if any_divergent {
        Ok(ExitCode::from(EXIT_DIVERGENCE))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn parse_truth(sidecar: &Sidecar) -> Result<Option<(resr::expr::Expr, resr::expr::Expr)>, String> {
    match (&sidecar.analytic_x, &sidecar.analytic_y) {
        (Some(x), Some(y)) => {
            let fx = resr::expr::parse(x).map_err(|e| format!("bad analytic_x: {e}"))?;
            let fy = resr::expr::parse(y).map_err(|e| format!("bad analytic_y: {e}"))?;
            Ok(Some((fx, fy)))
        }
        _ => Ok(None),
    }
}

fn cmd_forecast(args: ForecastArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.result).map_err(|e| e.to_string())?;
    let file: DiscoveryResultFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let (f_x, f_y) = file.parse_exprs().map_err(|e| e.to_string())?;
    let dt = args.dt.unwrap_or(file.dt);
    if !(dt > 0.0) || args.steps == 0 {
        return Err(format!("need steps >= 1 and dt > 0 (got {}, {dt})", args.steps));
    }
    // protected ops off: poles are reported, not silently flattened
    let mut samples = Vec::with_capacity(args.steps);
    for i in 1..=args.steps {
        let t = file.t_last + i as f64 * dt;
        let x = f_x.eval_at(t, false);
        let y = f_y.eval_at(t, false);
        if !x.is_finite() || !y.is_finite() {
            eprintln!("divergent forecast: non-finite value at t = {t}");
            return Ok(ExitCode::from(EXIT_DIVERGENCE));
        }
        samples.push((t, x, y));
    }
    let fc = Forecast {
        samples,
        horizon: args.steps,
        t_start: file.t_last,
        dt,
    };
    std::fs::write(
        &args.out,
        serde_json::to_string_pretty(&fc).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    println!(
        "wrote {} ({} steps from t = {})",
        args.out.display(),
        fc.horizon,
        fc.t_start
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_resolution(text: &str) -> Result<(u32, u32), String> {
    let (w, h) = text
        .split_once('x')
        .ok_or_else(|| format!("resolution `{text}` is not WxH"))?;
    let w = w.parse().map_err(|_| format!("bad width in `{text}`"))?;
    let h = h.parse().map_err(|_| format!("bad height in `{text}`"))?;
    Ok((w, h))
}

fn cmd_export(args: ExportArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.forecast).map_err(|e| e.to_string())?;
    let fc: Forecast = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let format = ExportFormat::from_name(&args.format)
        .ok_or_else(|| format!("format must be json or csv, got `{}`", args.format))?;
    let opts = ExportOptions {
        points_per_second: args.points_per_second,
        source_resolution: parse_resolution(&args.source_resolution)?,
        target_resolution: parse_resolution(&args.target_resolution)?,
    };
    export_trajectory(&fc, format, &opts, &args.out).map_err(|e| e.to_string())?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    if args.full && args.config.is_some() {
        return Err("--full and --config are mutually exclusive".into());
    }
    let mut config: BenchConfig = match &args.config {
        Some(path) => read_config_file(path)?,
        None if args.full => BenchConfig::full_scale(),
        None => BenchConfig::default(),
    };
    if let Some(systems) = &args.systems {
        config.systems = systems
            .iter()
            .map(|name| {
                SystemKind::from_name(name).ok_or_else(|| format!("unknown system `{name}`"))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(seeds) = &args.seeds {
        config.seeds = seeds.clone();
    }
    if let Some(alphas) = &args.alphas {
        config.alphas = alphas.clone();
    }
    if let Some(v) = args.iterations {
        config.search.n_iterations = v;
    }
    if let Some(v) = args.populations {
        config.search.n_populations = v;
    }
    if let Some(v) = args.population_size {
        config.search.population_size = v;
    }
    if let Some(v) = args.noise_sigma {
        config.noise_sigma = v;
    }
    config.search.validate()?;

    let bank = load_bank_arg(&args.bank)?;
    let report = run_benchmark(&config, &bank);
    std::fs::create_dir_all(&args.out_dir).map_err(|e| e.to_string())?;
    std::fs::write(args.out_dir.join("report.csv"), report.report_csv())
        .map_err(|e| e.to_string())?;
    std::fs::write(args.out_dir.join("summary.csv"), report.summary_csv())
        .map_err(|e| e.to_string())?;
    std::fs::write(args.out_dir.join("convergence.csv"), report.convergence_csv())
        .map_err(|e| e.to_string())?;
    println!("{}", report.summary_csv().trim_end());
    println!(
        "wrote report.csv, summary.csv, convergence.csv under {}",
        args.out_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}
