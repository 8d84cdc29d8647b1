use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ossf::cli::{self, format, EstimateMode, RunConfig, Suite};
use ossf::Error;

#[derive(Parser)]
#[command(name = "ossf", version, about = "Operator-self-similar Gaussian random fields")]
struct Cli {
    /// Worker threads; 1 is the reference mode.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print eigen structure, normalization and closed-form dimensions.
    Analyze {
        #[arg(short, long)]
        config: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a field and write it to a CSV or binary file.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        binary: bool,
    },
    /// Box-counting or variogram estimates from a field file, as CSV.
    Estimate {
        #[arg(long)]
        mode: EstimateMode,
        /// 1-based component for holder mode; all components by default.
        #[arg(long)]
        component: Option<usize>,
        file: PathBuf,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        quick: bool,
    },
}

fn report(e: &Error) -> ExitCode {
    let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Analyze { config, json } => {
            let cfg = RunConfig::from_path(&config)?;
            let r = cli::analyze_report(&cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                print!("{}", cli::analyze_text(&r)?);
            }
        }
        Command::Simulate { config, output, binary } => {
            let cfg = RunConfig::from_path(&config)?;
            let (path, sample) = cli::simulate(&cfg, output.as_deref(), binary)?;
            eprintln!("wrote {} nodes × {} components to {}", sample.grid.len(), sample.m, path.display());
        }
        Command::Estimate { mode, component, file } => {
            let sample = format::read_field_file(&file)?;
            print!("{}", cli::estimate(&sample, mode, component)?);
        }
        Command::Verify { suite, seed, quick } => {
            let (text, ok, _) = cli::verify(suite, seed, quick);
            print!("{text}");
            if !ok {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => report(&e),
    }
}
