use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paramdet_core::pipeline::{Pipeline, PipelineConfig, PipelineError};

/// Parametric object detection pipeline on simulated LiDAR scans.
#[derive(Parser, Debug)]
#[command(name = "paramdet", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML pipeline config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed, overriding the config's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: config paths.out, else ./out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads [default: logical cores].
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate randomized scenes and the split manifest.
    GenScenes {
        /// Scene count (desk scale 50, full dataset 5000).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Raycast, reduce, cull and normalize every generated scene.
    Scan {
        /// Points kept per cloud after farthest point sampling.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Produce query predictions with the detector stub.
    PredictStub,
    /// Evaluate predictions and write the report.
    Eval,
    /// Accumulation study with per-stage timings.
    Bench {
        /// Comma-separated accumulated point counts, e.g. 50000,200000,400000.
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<usize>>,
    },
    /// Run generation, scanning, prediction and evaluation in sequence.
    RunAll {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let g = cli.global;
    let mut config = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = g.seed {
        config.seed = s;
    }
    match &cli.command {
        Command::Scan { budget: Some(b) } | Command::RunAll { budget: Some(b), .. } => config.lidar.budget = *b,
        _ => {}
    }
    if let Some(w) = g.workers {
        if w == 0 {
            return Err(PipelineError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().map_err(|e| PipelineError::Config(e.to_string()))?;
    }
    let out = g.out.or_else(|| config.paths.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let count = |c: &Option<usize>| c.unwrap_or(config.count);
    let pipeline = Pipeline::new(config.clone(), out)?;
    log::info!("config hash {}", pipeline.config_hash());

    match cli.command {
        Command::GenScenes { count: c } => {
            let m = pipeline.gen_scenes(count(&c))?;
            println!("{} scenes written to {}", m.count, pipeline.out.display());
        }
        Command::Scan { .. } => {
            let m = pipeline.scan()?;
            println!("{} scans written to {}", m.scans.len(), pipeline.out.display());
        }
        Command::PredictStub => {
            let m = pipeline.predict_stub()?;
            println!("{} prediction files written to {}", m.files.len(), pipeline.out.display());
        }
        Command::Eval => print!("{}", pipeline.eval()?.to_table()),
        Command::Bench { budget } => print!("{}", pipeline.bench(budget)?.to_table()),
        Command::RunAll { count: c, .. } => {
            let (report, manifest) = pipeline.run_all(count(&c))?;
            print!("{}", report.to_table());
            println!("{} artifacts hashed in {}", manifest.files.len(), pipeline.out.join(paramdet_core::pipeline::RUN_MANIFEST).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
