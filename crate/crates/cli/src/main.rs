//! `surgec`: compile circuits to lattice-surgery instruction streams, sweep
//! generators over board sizes, check streams and draw boards.

mod bench;
mod fail;
mod gen;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surgec::router::BindingPolicy;

#[derive(Parser)]
#[command(name = "surgec", version, about = "Lattice-surgery compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RouteFlags {
    /// How extern requests are bound to slots.
    #[arg(long, default_value = "heuristic")]
    pub policy: BindingPolicy,
    /// Pre-establish idle route segments as Bell pairs.
    #[arg(long)]
    pub disjoint: bool,
    /// Skip estimator-guided placement refinement.
    #[arg(long)]
    pub no_optimize: bool,
}

#[derive(Args, Clone, Debug)]
pub struct GenFlags {
    /// Generator family, e.g. `adder` or `cnot-network`.
    pub family: String,
    /// Generator parameter as key=value; repeatable.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Seed for randomized families.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit document for a device.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        device: PathBuf,
        #[command(flatten)]
        route: RouteFlags,
        /// Name for the packaged extern template; defaults to the circuit name.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a generator across a sweep of board sizes.
    Bench {
        #[command(flatten)]
        gen: GenFlags,
        /// Base device; its size is replaced by each sweep point.
        #[arg(long)]
        device: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        widths: Vec<u32>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        heights: Vec<u32>,
        #[command(flatten)]
        route: RouteFlags,
        #[arg(long, default_value = "bench")]
        out: PathBuf,
    },
    /// Check a stream against the board it was compiled for.
    Validate {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        layout: PathBuf,
    },
    /// Draw a board, and per-cycle lock frames when a stream is given.
    Render {
        #[arg(long, required_unless_present = "stream")]
        layout: Option<PathBuf>,
        #[arg(long)]
        stream: Option<PathBuf>,
        #[arg(long, default_value = "render")]
        out: PathBuf,
    },
    /// Emit a generated circuit document.
    Gen {
        #[command(flatten)]
        gen: GenFlags,
        /// Device used to compile lower factory levels.
        #[arg(long)]
        device: Option<PathBuf>,
        #[command(flatten)]
        route: RouteFlags,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SURGEC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { fail::PARSE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Compile {
            circuit,
            device,
            route,
            name,
            out,
        } => run::compile(&circuit, &device, &route, name.as_deref(), &out),
        Command::Bench {
            gen,
            device,
            widths,
            heights,
            route,
            out,
        } => bench::bench(&gen, device.as_deref(), &widths, &heights, &route, &out),
        Command::Validate { stream, layout } => run::validate(&stream, &layout),
        Command::Render {
            layout,
            stream,
            out,
        } => run::render(layout.as_deref(), stream.as_deref(), &out),
        Command::Gen {
            gen,
            device,
            route,
            out,
        } => gen::gen(&gen, device.as_deref(), &route, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
