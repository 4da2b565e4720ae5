//! `surjmap`: datasets, labels, oracle sweeps, training and certificates.
//!
//! Exit codes: 0 success, 1 a check or certificate failed, 2 bad usage or input.

mod manifest;
mod triple;

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use surjmap_core::certify::{self, monte_carlo};
use surjmap_core::dataset::{self, distinct_planes, enumerate_triples, read_output, with_pool, write_output, EnumConfig, FilterMode};
use surjmap_core::finitefield::{minimal_degree, FieldDesc};
use surjmap_core::linsys::{make_plane, fixture_lambda_over, vanishing_cubics, Case, CubicSystem, Plane, PointConfig};
use surjmap_core::surjectivity::{
    describe_pencil, distinct_pencils, find_unruly_seven_points, forward_oracle, label_plane, sample_seven_points, test_pencil,
    PencilStatus,
};
use surjnet::{evaluate, load_model, mean_prediction, predict, save_model, train, write_history, TrainConfig};

use manifest::{emit, sha256_file, RunManifest};
use triple::parse_triple;

#[derive(Debug)]
enum CliError {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failed(e: impl fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser)]
#[command(name = "surjmap", version, about = "Surjectivity of cubic rational maps of the projective plane")]
struct Cli {
    /// Append the run manifest as one JSON line to this file (default: print it to stderr).
    #[arg(long, global = true, env = "SURJMAP_MANIFEST")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Enumerate filtered (v, u, t) triples and write labeled records.
    Dataset(DatasetArgs),
    /// Label one triple and show each pencil's verdict.
    Check(CheckArgs),
    /// Brute-force image check of one triple, or a label-vs-oracle sweep.
    Oracle(OracleArgs),
    /// Fit the regressor to a dataset file.
    Train(TrainArgs),
    /// Evaluate a trained model on triples.
    Predict(PredictArgs),
    /// Run the certificates for the explicit surjective maps.
    Verify(VerifyArgs),
    /// Summarize a dataset file.
    Stats(StatsArgs),
    /// Look for unruly pencils in nets of cubics through seven points.
    Seven(SevenArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dataset(_) => "dataset",
            Command::Check(_) => "check",
            Command::Oracle(_) => "oracle",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Verify(_) => "verify",
            Command::Stats(_) => "stats",
            Command::Seven(_) => "seven",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CaseArg {
    Five,
    Six,
    Custom,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FilterArg {
    Norm,
    Strict,
    None,
}

impl From<FilterArg> for FilterMode {
    fn from(f: FilterArg) -> FilterMode {
        match f {
            FilterArg::Norm => FilterMode::NormOnly,
            FilterArg::Strict => FilterMode::StrictOrthonormal,
            FilterArg::None => FilterMode::None,
        }
    }
}

#[derive(Args, Serialize)]
struct SystemArgs {
    /// Point configuration: the five- or six-point fixture, or `custom` with `--points`.
    #[arg(long, value_enum, default_value_t = CaseArg::Five)]
    case: CaseArg,
    /// Prime order of the base field.
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Point file for `--case custom`: one `a:b:c` per line, `#` comments.
    #[arg(long)]
    points: Option<PathBuf>,
}

impl SystemArgs {
    fn system(&self) -> Result<CubicSystem, CliError> {
        let field = FieldDesc::prime(self.p).map_err(|e| usage(format!("p must be prime: {e}")))?;
        let fixture = |case| fixture_lambda_over(case, &field).map_err(usage);
        match (self.case, &self.points) {
            (CaseArg::Five, None) => fixture(Case::FivePoint),
            (CaseArg::Six, None) => fixture(Case::SixPoint),
            (CaseArg::Custom, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let cfg = PointConfig::parse(&field, &text).map_err(usage)?;
                let sys = vanishing_cubics(&cfg);
                if sys.dim() < 3 {
                    return Err(usage(format!("only {} independent cubics pass through the points", sys.dim())));
                }
                Ok(sys)
            }
            (CaseArg::Custom, None) => Err(usage("--case custom needs --points")),
            (_, Some(_)) => Err(usage("--points is only used with --case custom")),
        }
    }
}

#[derive(Args, Serialize)]
struct DatasetArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, value_enum, default_value_t = FilterArg::Norm)]
    filter: FilterArg,
    /// Highest extension degree scanned for base points.
    #[arg(long, default_value_t = 9)]
    scan_bound: u32,
    #[arg(long, default_value = "output.txt")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, env = "SURJMAP_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args, Serialize)]
struct CheckArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Coordinate vectors "v;u;t", e.g. "1,0,0,0,0;0,0,0,1,0;1,1,0,0,1".
    #[arg(long)]
    triple: String,
    #[arg(long, default_value_t = 9)]
    scan_bound: u32,
}

#[derive(Args, Serialize)]
struct OracleArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    triple: Option<String>,
    /// Compare label and oracle on every distinct plane of the dataset.
    #[arg(long)]
    all: bool,
    /// Dataset file for `--all` (default: enumerate with `--filter`).
    #[arg(long, requires = "all")]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FilterArg::Norm)]
    filter: FilterArg,
    /// Highest extension degree of source points tried.
    #[arg(long, default_value_t = 9)]
    source_bound: u32,
    #[arg(long, default_value_t = 9)]
    scan_bound: u32,
    #[arg(long, env = "SURJMAP_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args, Serialize)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 150)]
    epochs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 256)]
    filters: usize,
    #[arg(long, default_value_t = 256)]
    hidden: usize,
    #[arg(long, default_value = "model.bin")]
    model_out: PathBuf,
    /// Per-epoch training loss as CSV.
    #[arg(long, default_value = "history.csv")]
    history: PathBuf,
}

#[derive(Args, Serialize)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// May be repeated.
    #[arg(long, required = true)]
    triple: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VerifyCase {
    Five,
    Six,
    All,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = VerifyCase::All)]
    case: VerifyCase,
    /// Random complex targets per map for the numeric check (0 skips it).
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest accepted projective residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args, Serialize)]
struct SevenArgs {
    /// Prime order of the base field. Below 11 every seven points with no
    /// three collinear lie on a conic, so none are in general position.
    #[arg(long, default_value_t = 11)]
    p: u64,
    /// Point file with seven `a:b:c` lines, instead of sampling.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled configurations.
    #[arg(long, default_value_t = 1)]
    samples: u64,
    #[arg(long, default_value_t = 1000)]
    attempts: usize,
    #[arg(long, default_value_t = 9)]
    scan_bound: u32,
}

/// Files touched by a run, for the manifest.
#[derive(Default)]
struct Touched {
    inputs: Vec<String>,
    outputs: Vec<String>,
    dataset: Option<PathBuf>,
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

fn load_records(path: &Path) -> Result<Vec<dataset::DatasetRecord>, CliError> {
    read_output(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn plane_for(sys: &CubicSystem, text: &str) -> Result<Plane, CliError> {
    let [v, u, t] = parse_triple(text, Some(sys.field().characteristic()), Some(sys.dim())).map_err(usage)?;
    make_plane(sys, &v, &u, &t)
        .map_err(usage)?
        .map_err(|r| usage(format!("triple does not define a plane: {r}")))
}

fn cmd_dataset(a: &DatasetArgs, touched: &mut Touched) -> Result<(), CliError> {
    let cfg = EnumConfig {
        system: a.system.system()?,
        filter: a.filter.into(),
        scan_bound: a.scan_bound,
        jobs: a.jobs,
    };
    let records = enumerate_triples(&cfg).map_err(failed)?;
    write_output(&records, &a.out).map_err(failed)?;
    touched.outputs.push(show(&a.out));
    touched.dataset = Some(a.out.clone());
    let s = dataset::stats(&records);
    println!("wrote {} records to {}", s.count, a.out.display());
    println!("label 1: {}, label 0: {}, positive rate {:.4}", s.positives, s.negatives, s.positive_rate);
    if s.count > 0 && s.positives == 0 {
        println!("all labels are 0");
    }
    Ok(())
}

fn cmd_check(a: &CheckArgs) -> Result<(), CliError> {
    let sys = a.system.system()?;
    let plane = plane_for(&sys, &a.triple)?;
    let label = label_plane(&plane, a.scan_bound).map_err(failed)?;
    println!("label: {}", label.value);
    for (dual, pa, pb) in distinct_pencils(sys.field()) {
        let verdict = test_pencil(&plane, pa, pb, a.scan_bound).map_err(failed)?;
        let pencil = plane.pencil(pa, pb);
        match (verdict.status, &verdict.witness) {
            (PencilStatus::NotUnruly, Some(w)) => {
                println!("pencil {dual}: not unruly, witness {w} (degree {})", minimal_degree(w))
            }
            (status, _) => println!("pencil {dual}: {status}: {}", describe_pencil(&pencil)),
        }
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs, touched: &mut Touched) -> Result<(), CliError> {
    let sys = a.system.system()?;
    if let Some(text) = &a.triple {
        let plane = plane_for(&sys, text)?;
        let label = label_plane(&plane, a.scan_bound).map_err(failed)?.value;
        let uncovered = forward_oracle(&plane, a.source_bound).map_err(failed)?;
        println!("label: {label}");
        println!("uncovered targets: {}", uncovered.len());
        for t in &uncovered {
            println!("  {t}");
        }
        if (label == 1) != uncovered.is_empty() {
            return Err(failed("label and oracle disagree"));
        }
        println!("label and oracle agree");
        return Ok(());
    }
    let records = match &a.data {
        Some(path) => {
            touched.inputs.push(show(path));
            touched.dataset = Some(path.clone());
            load_records(path)?
        }
        None => {
            let cfg = EnumConfig { system: sys.clone(), filter: a.filter.into(), scan_bound: a.scan_bound, jobs: a.jobs };
            enumerate_triples(&cfg).map_err(failed)?
        }
    };
    let planes = distinct_planes(&sys, &records).map_err(usage)?;
    let verdicts = with_pool(a.jobs, || {
        planes
            .par_iter()
            .map(|pl| Ok((label_plane(pl, a.scan_bound)?.value, forward_oracle(pl, a.source_bound)?.is_empty())))
            .collect::<Result<Vec<_>, surjmap_core::surjectivity::SurjError>>()
    })
    .map_err(failed)?
    .map_err(failed)?;
    let disagreements = verdicts.iter().filter(|(label, onto)| (*label == 1) != *onto).count();
    let surjective = verdicts.iter().filter(|(_, onto)| *onto).count();
    println!("{} planes, {surjective} surjective by the oracle", planes.len());
    println!("{disagreements} disagreements");
    if disagreements > 0 {
        return Err(failed("label and oracle disagree"));
    }
    Ok(())
}

fn cmd_train(a: &TrainArgs, touched: &mut Touched) -> Result<(), CliError> {
    let records = load_records(&a.data)?;
    touched.inputs.push(show(&a.data));
    touched.dataset = Some(a.data.clone());
    let cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size,
        test_fraction: a.test_fraction,
        seed: a.seed,
        filters: a.filters,
        hidden: a.hidden,
        ..TrainConfig::default()
    };
    let t = train(&records, &cfg).map_err(usage)?;
    let mse = evaluate(&t.model, &t.test).map_err(failed)?;
    let mean = mean_prediction(&t.model, &t.test).map_err(failed)?;
    save_model(&t.model, &a.model_out).map_err(failed)?;
    let hist = File::create(&a.history).map_err(failed)?;
    write_history(&t.history, BufWriter::new(hist)).map_err(failed)?;
    touched.outputs.push(show(&a.model_out));
    touched.outputs.push(show(&a.history));
    println!("train records: {}, test records: {}", t.train.len(), t.test.len());
    println!("final train mse: {}", t.history.last().copied().unwrap_or(f64::NAN));
    println!("test mse: {mse}");
    println!("mean prediction: {mean}");
    Ok(())
}

fn cmd_predict(a: &PredictArgs, touched: &mut Touched) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
    touched.inputs.push(show(&a.model));
    for text in &a.triple {
        let triple = parse_triple(text, None, Some(model.params.arch.width)).map_err(usage)?;
        let y = predict(&model, [&triple[0], &triple[1], &triple[2]]).map_err(usage)?;
        println!("{y}");
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let cases: &[Case] = match a.case {
        VerifyCase::Five => &[Case::FivePoint],
        VerifyCase::Six => &[Case::SixPoint],
        VerifyCase::All => &[Case::FivePoint, Case::SixPoint],
    };
    let mut ok = true;
    for &case in cases {
        let cert = certify::verify(case);
        print!("{}", cert.report());
        ok &= cert.passed();
        if a.trials > 0 {
            let start = Instant::now();
            let mc = monte_carlo(case, a.trials, a.radius, a.seed, a.tol);
            let pass = mc.successes == mc.trials;
            println!(
                "  [{}] numeric preimages: {}/{} targets, worst residual {:.3e}, {:.2?}",
                if pass { "PASS" } else { "FAIL" },
                mc.successes,
                mc.trials,
                mc.worst_residual,
                start.elapsed()
            );
            for (ta, tb) in &mc.failures {
                println!("    no preimage for [{ta}:1:{tb}]");
            }
            ok &= pass;
        }
    }
    if ok {
        println!("all certificates pass");
        Ok(())
    } else {
        Err(failed("certificate failure"))
    }
}

fn cmd_stats(a: &StatsArgs, touched: &mut Touched) -> Result<(), CliError> {
    let records = load_records(&a.data)?;
    touched.inputs.push(show(&a.data));
    touched.dataset = Some(a.data.clone());
    let s = dataset::stats(&records);
    println!("records: {}", s.count);
    println!("label 1: {}", s.positives);
    println!("label 0: {}", s.negatives);
    println!("positive rate: {:.4}", s.positive_rate);
    Ok(())
}

fn cmd_seven(a: &SevenArgs, touched: &mut Touched) -> Result<(), CliError> {
    let field = FieldDesc::prime(a.p).map_err(|e| usage(format!("p must be prime: {e}")))?;
    let configs = match &a.points {
        Some(path) => {
            touched.inputs.push(show(path));
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let cfg = PointConfig::parse(&field, &text).map_err(usage)?;
            if cfg.points().len() != 7 {
                return Err(usage(format!("expected 7 points, got {}", cfg.points().len())));
            }
            vec![cfg]
        }
        None => (0..a.samples)
            .map(|i| sample_seven_points(&field, a.seed.wrapping_add(i), a.attempts).map_err(failed))
            .collect::<Result<_, _>>()?,
    };
    let mut found = 0;
    for cfg in &configs {
        let pts: Vec<String> = cfg.points().iter().map(|p| p.to_string()).collect();
        println!("points: {}", pts.join(" "));
        match find_unruly_seven_points(cfg, a.scan_bound).map_err(failed)? {
            Some(pencil) => {
                found += 1;
                println!("  unruly pencil: {}", describe_pencil(&pencil));
            }
            None => println!("  no unruly pencil"),
        }
    }
    println!("{found} of {} configurations have an unruly pencil", configs.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let mut touched = Touched::default();
    match &cli.command {
        Command::Dataset(a) => cmd_dataset(a, &mut touched),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a, &mut touched),
        Command::Train(a) => cmd_train(a, &mut touched),
        Command::Predict(a) => cmd_predict(a, &mut touched),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a, &mut touched),
        Command::Seven(a) => cmd_seven(a, &mut touched),
    }?;
    let dataset_sha256 = match &touched.dataset {
        Some(p) => Some(sha256_file(p).map_err(failed)?),
        None => None,
    };
    let m = RunManifest {
        subcommand: cli.command.name(),
        config: &cli.command,
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_time_secs: start.elapsed().as_secs_f64(),
        inputs: touched.inputs,
        outputs: touched.outputs,
        dataset_sha256,
    };
    emit(&m, cli.manifest.as_ref()).map_err(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
