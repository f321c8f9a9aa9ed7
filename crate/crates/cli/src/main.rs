use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use meanlab::harness::{self, parse_dims, Command, Format, RunConfig, EXIT_INPUT};
use meanlab::MeanKind;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Check,
    Reconstruct,
    Lemmas,
    Gallery,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

/// Norm-of-mean preservation checks, reconstructions and lemma suites.
#[derive(Debug, Parser)]
#[command(name = "meanlab", version)]
struct Args {
    command: Cmd,

    /// Instance JSON for `check` and `reconstruct`.
    #[arg(long, visible_alias = "instance")]
    instance_path: Option<PathBuf>,

    /// arithmetic, geometric, harmonic or power:<p>.
    #[arg(long, default_value = "arithmetic", value_parser = parse_mean)]
    mean: MeanKind,

    #[arg(long, default_value_t = 3)]
    max_multiset: usize,

    #[arg(long, env = "MEANLAB_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 300)]
    trials: usize,

    /// Matrix dimensions: `2..6`, `2..=6` or `2,3,5`.
    #[arg(long, default_value = "2..6", value_parser = parse_dim_list)]
    dims: Dims,

    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    format: Fmt,

    /// Run a single gallery example.
    #[arg(long, visible_alias = "id")]
    gallery_id: Option<String>,

    #[arg(long, default_value_t = 101)]
    grid_size: usize,
}

fn parse_mean(s: &str) -> Result<MeanKind, String> {
    s.parse::<MeanKind>().map_err(|e| e.to_string())
}

// Wrapped so clap treats the whole list as one value.
#[derive(Clone, Debug)]
struct Dims(Vec<usize>);

fn parse_dim_list(s: &str) -> Result<Dims, String> {
    parse_dims(s).map(Dims).map_err(|e| e.to_string())
}

impl From<Args> for RunConfig {
    fn from(a: Args) -> Self {
        let command = match a.command {
            Cmd::Check => Command::Check,
            Cmd::Reconstruct => Command::Reconstruct,
            Cmd::Lemmas => Command::Lemmas,
            Cmd::Gallery => Command::Gallery,
            Cmd::All => Command::All,
        };
        RunConfig {
            command,
            instance_path: a.instance_path,
            mean: a.mean,
            max_multiset: a.max_multiset,
            seed: a.seed,
            trials: a.trials,
            dims: a.dims.0,
            output: a.output,
            format: match a.format {
                Fmt::Json => Format::Json,
                Fmt::Text => Format::Text,
            },
            gallery_id: a.gallery_id,
            grid_size: a.grid_size,
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let config = RunConfig::from(args);
    let out = harness::run(&config);
    if let Some(err) = &out.error {
        eprintln!("meanlab: {err}");
    }
    if config.output.is_none() {
        print!("{}", out.rendered);
    } else if let Some(r) = &out.report {
        eprintln!(
            "{}: {} passed, {} failed, {} skipped",
            r.command, r.summary.pass, r.summary.fail, r.summary.skip
        );
    }
    ExitCode::from(out.exit_code as u8)
}
