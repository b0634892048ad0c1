use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tabclf::data::{generate_synthetic, SyntheticSpec};
use tabclf::evaluation::{aggregate_group_stats, ScoreMatrix};
use tabclf::harness::{emit_reports, run_matrix, write_group_stats, Experiment, ExperimentConfig};
use tabclf::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tabclf",
    version,
    about = "Classifier × variable-group experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment matrix described by a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a config and its data without fitting anything.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Per-group mean and SD of a score matrix CSV.
    Aggregate {
        matrix: PathBuf,
        /// Also write group_stats.csv into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate a synthetic table from a JSON spec.
    Synth {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    folds: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(k) = self.folds {
            cfg.folds = k;
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

fn load(path: &PathBuf, overrides: &Overrides) -> Result<Experiment, Error> {
    let mut cfg = ExperimentConfig::from_json_file(path).map_err(|e| match e {
        Error::Io { .. } => Error::Config(e.to_string()),
        other => other,
    })?;
    overrides.apply(&mut cfg);
    cfg.validate()
}

fn run(config: PathBuf, overrides: Overrides) -> Result<u8, Error> {
    let exp = load(&config, &overrides)?;
    let results = run_matrix(&exp)?;
    let written = emit_reports(&results, &exp.config.out_dir)?;
    let failed = results.failed_cells();
    let total = results.manifest.cells.len();
    println!(
        "{} cells in {:.2}s, {} failed",
        total, results.wall_time_secs, failed
    );
    for p in written {
        println!("wrote {}", p.display());
    }
    if failed > 0 {
        for c in results.manifest.cells.iter().filter(|c| c.failed()) {
            eprintln!(
                "cell {} / {}: {}",
                c.classifier,
                c.group,
                c.error.as_deref().unwrap_or_default()
            );
        }
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn validate(config: PathBuf, overrides: Overrides) -> Result<u8, Error> {
    let exp = load(&config, &overrides)?;
    let cfg = &exp.config;
    println!(
        "data: {} rows, {} features",
        exp.table.n_rows(),
        exp.table.feature_indices().len()
    );
    println!(
        "folds: {} (stratified: {}), seed {}",
        cfg.folds, cfg.stratified, cfg.seed
    );
    for g in &exp.groups {
        println!("group {g}: {}", g.description());
    }
    for v in &exp.variants {
        let p = cfg.pipeline(*v);
        let mut stages = vec!["encode".to_string()];
        if p.scale {
            stages.push("scale".into());
        }
        stages.push(format!("select:{}", p.selector.choice));
        if let Some(r) = p.resampler {
            stages.push(format!(
                "resample:{}",
                serde_json::to_value(r)?.as_str().unwrap_or_default()
            ));
        }
        stages.push(v.family().to_string());
        let search = if v.searched() {
            format!(
                " (grid search, {} points)",
                cfg.grids.lattice(v.family()).len()
            )
        } else {
            String::new()
        };
        println!("classifier {v}: {}{search}", stages.join(" -> "));
    }
    println!("valid");
    Ok(0)
}

fn aggregate(matrix: PathBuf, out_dir: Option<PathBuf>) -> Result<u8, Error> {
    let m = ScoreMatrix::read_csv_file(&matrix)?;
    let stats = aggregate_group_stats(&m)?;
    let mut buf = Vec::new();
    write_group_stats(&stats, &m.cols, &mut buf)?;
    std::io::stdout().write_all(&buf).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        source: e,
    })?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        let path = dir.join(tabclf::harness::GROUP_STATS_FILE);
        std::fs::write(&path, &buf).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(0)
}

fn synth(spec: PathBuf, output: PathBuf, seed: Option<u64>) -> Result<u8, Error> {
    let text = std::fs::read_to_string(&spec)
        .map_err(|e| Error::Config(format!("{}: {e}", spec.display())))?;
    let mut spec: SyntheticSpec =
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let table = generate_synthetic(&spec).map_err(|e| Error::Config(e.to_string()))?;
    table.write_csv_file(&output)?;
    let mut schema_path = output.clone().into_os_string();
    schema_path.push(".schema.json");
    let schema_path = PathBuf::from(schema_path);
    std::fs::write(
        &schema_path,
        table.schema_document().to_json_string() + "\n",
    )
    .map_err(|e| Error::Io {
        path: schema_path.clone(),
        source: e,
    })?;
    println!("wrote {} and {}", output.display(), schema_path.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, overrides } => run(config, overrides),
        Command::Validate { config, overrides } => validate(config, overrides),
        Command::Aggregate { matrix, out_dir } => aggregate(matrix, out_dir),
        Command::Synth { spec, output, seed } => synth(spec, output, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
