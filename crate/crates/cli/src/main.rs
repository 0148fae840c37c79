//! `clustval`: validate, compare and inspect clusterings of a dissimilarity
//! matrix or point cloud.

mod settings;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use clustval::calibration::{AggregationSpec, CalibrationMode};
use clustval::clusterers::Method;
use clustval::io;
use clustval::matrix::DEFAULT_TOLERANCE;
use clustval::report::{self, Candidate, CompareOptions, Report, SeedSource};
use clustval::{
    Clustering, DissimilarityMatrix, Generator, IndexId, Metric, PointDataset, SeedPlan,
    ValidationConfig,
};

use settings::{parse_k_range, FileConfig};

#[derive(Parser, Debug)]
#[command(
    name = "clustval",
    version,
    about = "Multidimensional internal cluster validation calibrated against random clusterings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalised index values for clusterings given as label files
    Validate(ValidateArgs),
    /// Calibrated index values and aggregated score A for several clusterings
    Compare(CompareArgs),
    /// Emit one random clustering as a label file
    Random(RandomArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Dissimilarity matrix CSV (n x n, optional header row/column)
    #[arg(long, value_name = "FILE", required_unless_present = "points", conflicts_with = "points")]
    dissim: Option<PathBuf>,
    /// Point coordinates CSV (one object per row)
    #[arg(long, value_name = "FILE")]
    points: Option<PathBuf>,
    /// Distance used for --points: euclidean or manhattan
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Asymmetry tolerated (and averaged away) in --dissim input
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct TuningArgs {
    /// Largest number of clusters of interest
    #[arg(long)]
    kmax: Option<usize>,
    /// Random clusterings per generator and per K
    #[arg(long = "B", value_name = "B")]
    b: Option<usize>,
    /// Portion of objects used by psep
    #[arg(long)]
    p_sep: Option<f64>,
    /// Dissimilarity quantile used as kernel bandwidth
    #[arg(long)]
    p_dens: Option<f64>,
    /// Neighbour order for cvdens
    #[arg(long)]
    k_cv: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// table (aligned text), json, or csv (long format, one line per index)
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to FILE instead of standard output
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Label file, one integer per line (repeatable)
    #[arg(long, value_name = "FILE", required = true)]
    labels: Vec<PathBuf>,
    /// Reference labels; adds an ARI column
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
    /// Comma-separated index ids (default: all)
    #[arg(long)]
    indexes: Option<String>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// TOML settings file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Label file, one integer per line (repeatable)
    #[arg(long, value_name = "FILE")]
    labels: Vec<PathBuf>,
    /// Clustering methods to sweep: kmeans,pam,single,average
    #[arg(long)]
    methods: Option<String>,
    /// Numbers of clusters for method sweeps, e.g. 2..10
    #[arg(long, value_name = "A..B")]
    k_range: Option<String>,
    /// Reference labels; adds an ARI column
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
    /// Comma-separated index ids (default: all)
    #[arg(long)]
    indexes: Option<String>,
    /// Aggregation weights id=w,... (default: 1 on every selected index)
    #[arg(long)]
    weights: Option<String>,
    /// Rescale weights to sum to one
    #[arg(long)]
    normalise_weights: bool,
    /// per-k, pooled, rank or none
    #[arg(long)]
    calibration: Option<String>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Master seed (default: drawn from system entropy and recorded)
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the random collection (provenance and profiles) as JSON
    #[arg(long, value_name = "FILE")]
    dump_collection: Option<PathBuf>,
    /// Evaluate the random collection on one thread
    #[arg(long)]
    sequential: bool,
    /// TOML settings file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct RandomArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of clusters
    #[arg(long, short)]
    k: usize,
    /// stupidcent or stupidnn
    #[arg(long)]
    generator: String,
    /// Seed for drawing the centers
    #[arg(long)]
    seed: Option<u64>,
    /// One-based center objects, overriding the random draw
    #[arg(long, value_delimiter = ',')]
    centers: Option<Vec<usize>>,
    /// Write labels to FILE instead of standard output
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

struct Data {
    d: DissimilarityMatrix,
    points: Option<PointDataset>,
}

fn load(input: &InputArgs) -> Result<Data> {
    if let Some(path) = &input.points {
        let points = io::read_points(path, input.metric)?;
        let d = DissimilarityMatrix::from_points(&points).map_err(|e| in_file(path, e))?;
        return Ok(Data {
            d,
            points: Some(points),
        });
    }
    let path = input.dissim.as_ref().expect("clap enforces one input");
    Ok(Data {
        d: io::read_dissimilarity(path, input.tolerance)?,
        points: None,
    })
}

fn in_file(path: &Path, e: clustval::Error) -> clustval::Error {
    clustval::Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn resolve_config(file: &FileConfig, t: &TuningArgs) -> Result<ValidationConfig> {
    let mut cfg = file.validation.unwrap_or_default();
    if let Some(v) = t.kmax {
        cfg.k_max = v;
    }
    if let Some(v) = t.b {
        cfg.b = v;
    }
    if let Some(v) = t.p_sep {
        cfg.p_sep = v;
    }
    if let Some(v) = t.p_dens {
        cfg.p_dens = v;
    }
    if let Some(v) = t.k_cv {
        cfg.k_cv = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_indexes(flag: Option<&str>, file: &FileConfig) -> Result<Vec<IndexId>> {
    match (flag, &file.indexes) {
        (Some(s), _) => Ok(IndexId::parse_list(s)?),
        (None, Some(ids)) if !ids.is_empty() => Ok(ids.clone()),
        _ => Ok(IndexId::ALL.to_vec()),
    }
}

fn label_candidates(paths: &[PathBuf], n: usize) -> Result<Vec<Candidate>> {
    paths
        .iter()
        .map(|p| Ok(Candidate::from_labels(p.display().to_string(), io::read_labels(p, n)?)))
        .collect()
}

fn read_truth(path: Option<&Path>, n: usize) -> Result<Option<Clustering>> {
    Ok(path.map(|p| io::read_labels(p, n)).transpose()?)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("{}: cannot create", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit(report: &Report, out: &OutputArgs) -> Result<()> {
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Table => w.write_all(table::report_table(report).as_bytes())?,
        Format::Json => writeln!(w, "{}", report.to_json())?,
        Format::Csv => report.write_long_csv(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let config = resolve_config(&file, &args.tuning)?;
    let indexes = resolve_indexes(args.indexes.as_deref(), &file)?;
    let data = load(&args.input)?;
    let n = data.d.n();
    let candidates = label_candidates(&args.labels, n)?;
    let truth = read_truth(args.truth.as_deref(), n)?;
    let report = report::validate(&data.d, &candidates, config, &indexes, truth.as_ref())?;
    emit(&report, &args.out)
}

fn compare(args: CompareArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let config = resolve_config(&file, &args.tuning)?;
    let indexes = resolve_indexes(args.indexes.as_deref(), &file)?;
    let weights = match (&args.weights, &file.weights) {
        (Some(s), _) => AggregationSpec::parse(s)?,
        (None, Some(w)) => w.clone(),
        (None, None) => AggregationSpec::uniform(&indexes)?,
    };
    let calibration = match &args.calibration {
        Some(s) => s.parse()?,
        None => file.calibration.unwrap_or(CalibrationMode::PerK),
    };
    let methods = match (&args.methods, &file.methods) {
        (Some(s), _) => Method::parse_list(s)?,
        (None, Some(m)) => m.clone(),
        (None, None) => Vec::new(),
    };
    let (seed, seed_source) = match (args.seed, file.seed) {
        (Some(s), _) => (s, SeedSource::Flag),
        (None, Some(s)) => (s, SeedSource::Config),
        (None, None) => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s} (entropy)");
            (s, SeedSource::Entropy)
        }
    };
    if args.labels.is_empty() && methods.is_empty() {
        return Err(clustval::Error::InvalidConfig(
            "nothing to compare: give --labels files and/or --methods".into(),
        )
        .into());
    }

    let data = load(&args.input)?;
    let n = data.d.n();
    let mut candidates = label_candidates(&args.labels, n)?;
    if !methods.is_empty() {
        let ks = match args.k_range.as_deref().or(file.k_range.as_deref()) {
            Some(s) => parse_k_range(s)?,
            None => 2..=config.k_max,
        };
        candidates.extend(report::sweep(&data.d, data.points.as_ref(), &methods, ks, seed)?);
    }
    let truth = read_truth(args.truth.as_deref(), n)?;
    let opts = CompareOptions {
        config,
        indexes,
        calibration,
        weights,
        normalise_weights: args.normalise_weights || file.normalise_weights.unwrap_or(false),
        seed,
        seed_source,
        parallel: !args.sequential,
    };
    let comparison = report::compare(&data.d, &candidates, truth.as_ref(), &opts)?;
    if let (Some(path), Some(coll)) = (&args.dump_collection, &comparison.collection) {
        let mut w = sink(Some(path))?;
        serde_json::to_writer(&mut w, coll)?;
        w.flush()?;
    }
    emit(&comparison.report, &args.out)
}

fn random(args: RandomArgs) -> Result<()> {
    let generator: Generator = args.generator.parse()?;
    let data = load(&args.input)?;
    let n = data.d.n();
    if args.k == 0 || args.k > n {
        return Err(clustval::Error::KOutOfRange { k: args.k, max: n }.into());
    }
    let centers = match &args.centers {
        Some(c) => {
            if c.len() != args.k {
                return Err(clustval::Error::InvalidConfig(format!(
                    "{} centers given for K = {}",
                    c.len(),
                    args.k
                ))
                .into());
            }
            if c.contains(&0) {
                return Err(clustval::Error::InvalidConfig("centers are one-based".into()).into());
            }
            c.iter().map(|&x| x - 1).collect()
        }
        None => {
            let seed = args.seed.unwrap_or_else(|| {
                let s = rand::random::<u64>();
                eprintln!("seed: {s} (entropy)");
                s
            });
            let mut rng = SeedPlan::new(seed).rng(generator, args.k, 0);
            clustval::random::draw_centers(n, args.k, &mut rng)?
        }
    };
    let clustering = generator.cluster(&data.d, &centers)?;
    let shown: Vec<String> = centers.iter().map(|c| (c + 1).to_string()).collect();
    eprintln!("{generator}: K = {}, centers {}", args.k, shown.join(","));
    let mut w = sink(args.output.as_deref())?;
    io::write_labels(&mut w, &clustering)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Compare(a) => compare(a),
        Command::Random(a) => random(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Problems with the inputs or settings exit with 2, like usage
            // errors; anything else (e.g. a failed write) with 1.
            if e.downcast_ref::<clustval::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
