mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use graphids::derived::{read_derived, write_derived};
use graphids::graph::WeightPolicy;
use graphids::ingest::{parse_connections, ConnectionDataset, Timestamp};
use graphids::learner::SvmModel;
use graphids::modelsel::{evaluate, fit_records};
use graphids::pipeline::{generate, split_derived, BlockSchedule, DerivedRecord, Sigma};
use graphids::report::{render_comparison, render_evaluation, render_training, Cell, CellResult, Comparison};
use rayon::prelude::*;
use serde::Serialize;

use config::{file_digest, Settings};

const TOOL: &str = "graphids";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "graphids", version, about = "Graph-based intrusion detection on flow logs")]
struct Cli {
    /// Worker threads; all cores when unset.
    #[arg(long, global = true, env = "GRAPHIDS_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the derived dataset from a flow log, optionally split in time.
    Extract(ExtractArgs),
    /// Select features, tune and fit a model on a derived training file.
    Train(TrainArgs),
    /// Score a model on a derived test file.
    Evaluate(EvaluateArgs),
    /// Extract, train and evaluate for every (sigma, omega) combination.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// `key = value` file; its entries override flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// Flow log with a header row.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    src_col: Option<String>,
    #[arg(long)]
    dst_col: Option<String>,
    #[arg(long)]
    time_col: Option<String>,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    delimiter: Option<char>,
    /// Drop malformed rows instead of failing.
    #[arg(long)]
    skip_bad_records: bool,
    /// Records strictly before this time form the training side.
    #[arg(long)]
    boundary: Option<String>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, value_delimiter = ',')]
    c_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma_grid: Option<Vec<f64>>,
    /// Maximum number of selected features.
    #[arg(long)]
    ffs_cap: Option<usize>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Block size, or N for a single block.
    #[arg(long)]
    sigma: Option<Sigma>,
    /// Weight policy: u(nweighted), w(eighted) or m(ixed).
    #[arg(long)]
    omega: Option<WeightPolicy>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TrainArgs {
    /// Derived training file.
    #[arg(long)]
    train: PathBuf,
    #[command(flatten)]
    learn: LearnArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Derived test file.
    #[arg(long)]
    test: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<Sigma>>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<WeightPolicy>>,
    #[command(flatten)]
    learn: LearnArgs,
    #[command(flatten)]
    common: Common,
}

/// Bad invocation; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

impl InputArgs {
    fn apply(&self, s: &mut Settings) {
        let text = [
            (&self.src_col, &mut s.src_col),
            (&self.dst_col, &mut s.dst_col),
            (&self.time_col, &mut s.time_col),
            (&self.label_col, &mut s.label_col),
        ];
        for (flag, field) in text {
            if let Some(v) = flag {
                *field = v.clone();
            }
        }
        if let Some(d) = self.delimiter {
            s.delimiter = d;
        }
        s.skip_bad_records |= self.skip_bad_records;
        if self.boundary.is_some() {
            s.boundary = self.boundary.clone();
        }
    }
}

impl LearnArgs {
    fn apply(&self, s: &mut Settings) {
        if let Some(c) = &self.c_grid {
            s.c_grid = c.clone();
        }
        if let Some(g) = &self.gamma_grid {
            s.gamma_grid = g.clone();
        }
        if let Some(cap) = self.ffs_cap {
            s.ffs_cap = cap;
        }
    }
}

fn settings(common: &Common, flags: impl FnOnce(&mut Settings)) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    flags(&mut s);
    if let Some(path) = &common.config {
        s.apply_file(path).map_err(usage)?;
    }
    s.validate().map_err(usage)?;
    Ok(s)
}

fn boundary(s: &Settings) -> Result<Option<Timestamp>> {
    s.boundary
        .as_deref()
        .map(|b| Timestamp::parse(b).ok_or_else(|| usage(format!("unrecognized boundary time `{b}`"))))
        .transpose()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config_digest: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: &'a T,
}

struct Stamp {
    digest: String,
    seed: u64,
}

impl Stamp {
    fn json<T: Serialize>(&self, path: &Path, body: &T) -> Result<()> {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            config_digest: &self.digest,
            seed: self.seed,
            body,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    fn text(&self, path: &Path, body: &str) -> Result<()> {
        let text = format!("# {TOOL} {VERSION} | config {} | seed {}\n\n{body}", self.digest, self.seed);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn load_flows(path: &Path, s: &Settings) -> Result<(ConnectionDataset, usize)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let parsed = parse_connections(BufReader::new(file), &s.parse_options())
        .with_context(|| format!("reading {}", path.display()))?;
    if parsed.dataset.is_empty() {
        anyhow::bail!("{} contains no connection records", path.display());
    }
    Ok((parsed.dataset, parsed.skipped))
}

fn load_derived(path: &Path) -> Result<Vec<DerivedRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_derived(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn save_derived(path: &Path, records: &[DerivedRecord]) -> Result<String> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_derived(records, BufWriter::new(file))?;
    Ok(file_digest(path)?)
}

struct Extracted {
    files: BTreeMap<String, String>,
    train: Option<Vec<DerivedRecord>>,
    test: Option<Vec<DerivedRecord>>,
}

fn extract_into(
    d: &ConnectionDataset,
    sigma: Sigma,
    omega: WeightPolicy,
    split: Option<Timestamp>,
    seed: u64,
    dir: &Path,
) -> Result<Extracted> {
    let schedule = BlockSchedule::new(sigma.resolve(d.len()), d.len())?;
    let derived = generate(d, &schedule, omega)?;
    let mut files = BTreeMap::new();
    files.insert("derived.csv".to_string(), save_derived(&dir.join("derived.csv"), &derived)?);
    let (train, test) = match split {
        Some(b) => {
            let (train, test) = split_derived(d, &derived, b, seed)?;
            files.insert("train.csv".into(), save_derived(&dir.join("train.csv"), &train)?);
            files.insert("test.csv".into(), save_derived(&dir.join("test.csv"), &test)?);
            (Some(train), Some(test))
        }
        None => (None, None),
    };
    Ok(Extracted { files, train, test })
}

#[derive(Serialize)]
struct InputSummary {
    sha256: String,
    records: usize,
    malicious: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct ExtractManifest {
    command: &'static str,
    sigma: String,
    omega: WeightPolicy,
    boundary: Option<String>,
    input: InputSummary,
    outputs: BTreeMap<String, String>,
}

fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let s = settings(&a.common, |s| {
        a.input.apply(s);
        if let Some(sigma) = a.sigma {
            s.sigma = sigma;
        }
        if let Some(omega) = a.omega {
            s.omega = omega;
        }
    })?;
    let split = boundary(&s)?;
    let input_digest = file_digest(&a.input.input).with_context(|| format!("reading {}", a.input.input.display()))?;
    let stamp = Stamp {
        digest: s.digest("extract", std::slice::from_ref(&input_digest)),
        seed: s.seed,
    };
    let (d, skipped) = load_flows(&a.input.input, &s)?;
    let out = &a.common.out;
    fs::create_dir_all(out)?;
    let ex = extract_into(&d, s.sigma, s.omega, split, s.seed, out)?;
    let manifest = ExtractManifest {
        command: "extract",
        sigma: s.sigma.to_string(),
        omega: s.omega,
        boundary: split.map(|b| b.to_string()),
        input: InputSummary {
            sha256: input_digest,
            records: d.len(),
            malicious: d.malicious_count(),
            skipped,
        },
        outputs: ex.files,
    };
    stamp.json(&out.join("manifest.json"), &manifest)?;
    eprintln!("wrote {} derived records to {}", d.len(), out.display());
    Ok(())
}

fn train_and_save(
    records: &[DerivedRecord],
    s: &Settings,
    stamp: &Stamp,
    dir: &Path,
) -> Result<(SvmModel, graphids::modelsel::TrainingReport)> {
    let (mut model, report) = fit_records(records, &s.train_config())?;
    model.provenance.insert("tool".into(), format!("{TOOL} {VERSION}"));
    model.provenance.insert("config_digest".into(), stamp.digest.clone());
    model.provenance.insert("seed".into(), stamp.seed.to_string());
    model.save(&dir.join("model.json"))?;
    stamp.json(&dir.join("training.json"), &report)?;
    stamp.text(&dir.join("training.txt"), &render_training(&report))?;
    Ok((model, report))
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let s = settings(&a.common, |s| a.learn.apply(s))?;
    let input_digest = file_digest(&a.train).with_context(|| format!("reading {}", a.train.display()))?;
    let stamp = Stamp {
        digest: s.digest("train", &[input_digest]),
        seed: s.seed,
    };
    let records = load_derived(&a.train)?;
    fs::create_dir_all(&a.common.out)?;
    let (model, _) = train_and_save(&records, &s, &stamp, &a.common.out)?;
    eprintln!(
        "trained on {} records: features {}, {} support vectors",
        records.len(),
        model.feature_names.join(", "),
        model.n_support()
    );
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let s = settings(&a.common, |_| {})?;
    let digests = [&a.model, &a.test]
        .iter()
        .map(|p| file_digest(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let stamp = Stamp {
        digest: s.digest("evaluate", &digests),
        seed: s.seed,
    };
    let model = SvmModel::load(&a.model).with_context(|| format!("loading model {}", a.model.display()))?;
    let records = load_derived(&a.test)?;
    let report = evaluate(&model, &records)?;
    fs::create_dir_all(&a.common.out)?;
    stamp.json(&a.common.out.join("evaluation.json"), &report)?;
    let text = render_evaluation(&report);
    stamp.text(&a.common.out.join("evaluation.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn run_cell(d: &ConnectionDataset, sigma: Sigma, omega: WeightPolicy, split: Timestamp, s: &Settings, stamp: &Stamp, dir: &Path) -> Result<CellResult> {
    fs::create_dir_all(dir)?;
    let ex = extract_into(d, sigma, omega, Some(split), s.seed, dir)?;
    let (train, test) = (ex.train.unwrap_or_default(), ex.test.unwrap_or_default());
    let (model, training) = train_and_save(&train, s, stamp, dir)?;
    let evaluation = evaluate(&model, &test)?;
    stamp.json(&dir.join("evaluation.json"), &evaluation)?;
    stamp.text(&dir.join("evaluation.txt"), &render_evaluation(&evaluation))?;
    Ok(CellResult { training, evaluation })
}

fn cmd_pipeline(a: &PipelineArgs) -> Result<bool> {
    let s = settings(&a.common, |s| {
        a.input.apply(s);
        a.learn.apply(s);
        if let Some(v) = &a.sigmas {
            s.sigmas = v.clone();
        }
        if let Some(v) = &a.omegas {
            s.omegas = v.clone();
        }
    })?;
    let split = boundary(&s)?.ok_or_else(|| usage("pipeline needs --boundary"))?;
    let input_digest = file_digest(&a.input.input).with_context(|| format!("reading {}", a.input.input.display()))?;
    let stamp = Stamp {
        digest: s.digest("pipeline", &[input_digest]),
        seed: s.seed,
    };
    let (d, _) = load_flows(&a.input.input, &s)?;
    let out = &a.common.out;
    fs::create_dir_all(out)?;

    let jobs: Vec<(Sigma, WeightPolicy)> = s
        .omegas
        .iter()
        .flat_map(|&w| s.sigmas.iter().map(move |&sg| (sg, w)))
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(sigma, omega)| {
            let dir = out.join(format!("sigma-{sigma}_omega-{}", omega.short_name()));
            let outcome = run_cell(&d, sigma, omega, split, &s, &stamp, &dir);
            let (result, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(format!("{e:#}"))),
            };
            Cell {
                sigma: sigma.to_string(),
                omega: omega.short_name().to_string(),
                result,
                error,
            }
        })
        .collect();
    let cmp = Comparison { cells };
    stamp.json(&out.join("comparison.json"), &cmp)?;
    let text = render_comparison(&cmp);
    stamp.text(&out.join("comparison.txt"), &text)?;
    print!("{text}");
    let failures = cmp.cells.iter().filter(|c| c.error.is_some()).count();
    if failures > 0 {
        eprintln!("{failures} of {} cells failed", cmp.cells.len());
    }
    Ok(failures == 0)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(usage("worker count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Extract(a) => cmd_extract(a).map(|_| true),
        Command::Train(a) => cmd_train(a).map(|_| true),
        Command::Evaluate(a) => cmd_evaluate(a).map(|_| true),
        Command::Pipeline(a) => cmd_pipeline(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
