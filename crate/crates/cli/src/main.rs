use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value as Json;

use seqlat_cli::{
    cmd_fca_check, cmd_gen, cmd_meet, cmd_mine, configure_threads, CommandOutcome, GenArgs,
    MeetArgs, MineArgs, Overrides,
};

/// Concept lattices and stability ranking over sequences of structured events.
#[derive(Parser)]
#[command(name = "seqlat", version)]
struct Cli {
    /// Worker threads for parallel meets (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Human-readable output instead of one JSON summary line.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the concept lattice of a dataset and write ranked concepts.
    Mine {
        #[command(flatten)]
        run: RunFlags,
        /// Check every closure and cover edge after mining.
        #[arg(long)]
        validate: bool,
    },
    /// Print the projected meet of two sequences (inline `<...>` or object ids).
    Meet {
        #[command(flatten)]
        run: RunFlags,
        a: String,
        b: String,
    },
    /// Cross-check the lattice engine against brute force on a binary context.
    FcaCheck { context: PathBuf },
    /// Generate a seeded synthetic dataset with taxonomies and a config.
    Gen {
        /// Synthetic spec (TOML).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        patients: Option<usize>,
    },
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    config: PathBuf,
    /// Projection shorthand such as GR2 or RPI3; replaces the config's projection.
    #[arg(long)]
    projection: Option<String>,
    #[arg(long)]
    min_len: Option<usize>,
    /// Comma-separated field names.
    #[arg(long, value_delimiter = ',')]
    select: Option<Vec<String>>,
    /// Comma-separated field names.
    #[arg(long, value_delimiter = ',')]
    require: Option<Vec<String>>,
    /// Run-length encode input sequences (`true`/`false`).
    #[arg(long)]
    rle: Option<bool>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    rank_by: Option<String>,
    #[arg(long)]
    max_concepts: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunFlags {
    fn split(self) -> (PathBuf, Overrides) {
        let o = Overrides {
            min_len: self.min_len,
            select: self.select,
            require: self.require,
            rle: self.rle,
            shorthand: self.projection,
            theta: self.theta,
            rank_by: self.rank_by,
            max_concepts: self.max_concepts,
            output: self.output,
        };
        (self.config, o)
    }
}

fn print_pretty(v: &Json, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Json::Object(m) => {
            for (k, v) in m {
                match v {
                    Json::Object(_) => {
                        println!("{pad}{k}:");
                        print_pretty(v, indent + 2);
                    }
                    Json::Array(items) if items.iter().any(|i| i.is_object()) => {
                        println!("{pad}{k}:");
                        for item in items {
                            println!("{pad}  -");
                            print_pretty(item, indent + 4);
                        }
                    }
                    _ => println!("{pad}{k}: {v}"),
                }
            }
        }
        other => println!("{pad}{other}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("seqlat: {e}");
        return ExitCode::from(1);
    }
    let outcome: CommandOutcome = match cli.command {
        Command::Mine { run, validate } => {
            let (config, overrides) = run.split();
            cmd_mine(&MineArgs {
                config,
                overrides,
                validate,
            })
        }
        Command::Meet { run, a, b } => {
            let (config, overrides) = run.split();
            cmd_meet(&MeetArgs {
                config,
                a,
                b,
                overrides,
            })
        }
        Command::FcaCheck { context } => cmd_fca_check(&context),
        Command::Gen {
            spec,
            out,
            seed,
            patients,
        } => cmd_gen(&GenArgs {
            spec,
            out_dir: out,
            seed,
            patients,
        }),
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    if cli.pretty {
        print_pretty(&outcome.summary, 0);
    } else {
        println!("{}", outcome.summary);
    }
    if outcome.exit_code != 0 {
        if let Some(msg) = outcome.summary.get("error").and_then(Json::as_str) {
            eprintln!("seqlat: {msg}");
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
