mod commands;
mod error;
mod report;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use ergotile::generate::{self, Bounds};
use ergotile::rational::int;

use commands::{generated_input, run, Command, Options};
use error::CliError;
use report::{BatchReport, Report};
use input::SystemInput;

/// Exact analyses, tilings, marker constructions and measure checks for
/// small dynamical systems described in JSON.
#[derive(Debug, Parser)]
#[command(name = "ergotile", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// System description file (JSON).
    input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Marker, tiling or change-of-variables depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Exploration window for stream systems, simulation length for `oracle`.
    #[arg(long)]
    window: Option<usize>,
    /// Run on generated finite systems from this seed instead of a file.
    #[arg(long, conflicts_with_all = ["input", "batch"])]
    seed: Option<u64>,
    /// Number of generated systems.
    #[arg(long, default_value_t = 10, requires = "seed")]
    count: usize,
    /// Run on every `.json` file in this directory, in name order.
    #[arg(long, conflicts_with = "input")]
    batch: Option<PathBuf>,
}

#[allow(clippy::large_enum_variant)]
enum Output {
    Single(Report),
    Batch(BatchReport),
}

fn batch(entries: Vec<Report>) -> Output {
    let failed = entries.iter().filter(|r| !r.is_success()).count();
    Output::Batch(BatchReport { entries, failed })
}

fn input_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn generated(cli: &Cli, seed: u64, opts: Options) -> Output {
    let mut rng = generate::rng(seed);
    let entries = (0..cli.count)
        .map(|k| {
            let input = match cli.command {
                Command::Verify => {
                    let (sys, mu) = generate::permutation_system(&mut rng, Bounds { max_points: 10, max_term: 9 });
                    generated_input(&sys, Some(mu), Some(int(1)))
                }
                Command::Tile => generated_input(&generate::finite_system(&mut rng, Bounds::default()), None, Some(int(1))),
                _ => generated_input(&generate::finite_system(&mut rng, Bounds::default()), None, None),
            };
            run(cli.command, &input, &format!("seed {seed} #{k}"), opts)
        })
        .collect();
    batch(entries)
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let opts = Options {
        depth: cli.depth,
        window: cli.window,
    };
    if let Some(seed) = cli.seed {
        return Ok(generated(cli, seed, opts));
    }
    if let Some(dir) = &cli.batch {
        let entries = input_files(dir)?
            .iter()
            .map(|path| {
                let source = path.display().to_string();
                match SystemInput::load(path) {
                    Ok(input) => run(cli.command, &input, &source, opts),
                    Err(e) => failed_load(cli.command, &source, e),
                }
            })
            .collect();
        return Ok(batch(entries));
    }
    let path = cli.input.as_ref().ok_or_else(|| CliError::Invalid {
        location: "arguments".into(),
        message: "expected a system file, --batch or --seed".into(),
    })?;
    let input = SystemInput::load(path)?;
    Ok(Output::Single(run(cli.command, &input, &path.display().to_string(), opts)))
}

fn failed_load(command: Command, source: &str, e: CliError) -> Report {
    Report {
        command: command.name().into(),
        source: source.into(),
        kind: "unknown".into(),
        result: None,
        violations: Vec::new(),
        errors: vec![e.to_string()],
        truncated: false,
        floats: None,
        timing: report::Timing { elapsed_us: 0 },
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
                    path: "standard output".into(),
                    message: e.to_string(),
                }),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (text, ok) = match &output {
        Output::Single(r) => (serde_json::to_string_pretty(r), r.is_success()),
        Output::Batch(b) => (serde_json::to_string_pretty(b), b.failed == 0),
    };
    let text = text.expect("reports serialize");
    if let Err(e) = emit(&text, cli.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Output::Single(r) = &output {
        for e in &r.errors {
            eprintln!("error: {e}");
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
