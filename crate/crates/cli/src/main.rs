use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use xagtrace::passes::{FlowOrder, PassConfig};
use xagtrace_cli::*;

#[derive(Parser)]
#[command(name = "xagtrace", version, about = "Cut tracing for XOR-AND graph optimization")]
struct Cli {
    /// Log solver progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    McFirst,
    MdFirst,
}

impl From<Order> for FlowOrder {
    fn from(o: Order) -> FlowOrder {
        match o {
            Order::McFirst => FlowOrder::McFirst,
            Order::MdFirst => FlowOrder::MdFirst,
        }
    }
}

#[derive(clap::Args)]
struct PassFlags {
    #[arg(long, default_value_t = 6)]
    cut_size_balance: usize,
    #[arg(long, default_value_t = 12)]
    cuts_per_node: usize,
    #[arg(long, default_value_t = 4)]
    cut_size_rewrite: usize,
    /// Database file (overrides XAG_DB_PATH).
    #[arg(long)]
    db: Option<PathBuf>,
}

impl PassFlags {
    fn config(&self) -> PassConfig {
        PassConfig {
            k_rewrite: self.cut_size_rewrite,
            k_balance: self.cut_size_balance,
            priority_limit: self.cuts_per_node,
            ..PassConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the MC-optimal database of NPN class representatives.
    GenDb {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value = "mc_db.txt")]
        out: PathBuf,
    },
    /// Run a traced optimization flow.
    Opt {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::McFirst)]
        order: Order,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        passes: PassFlags,
    },
    /// Extract the lowest HE cost network from a trace.
    Extract {
        trace: PathBuf,
        #[arg(long, default_value_t = 2)]
        k_sweep: u32,
        /// Seconds per depth bound.
        #[arg(long, default_value_t = 600.0)]
        ilp_timeout: f64,
        /// Network contained in the trace, used as a starting solution.
        #[arg(long)]
        witness: Vec<PathBuf>,
        /// Source circuit to verify against.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Also write each swept program in LP format.
        #[arg(long)]
        export_lp: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare baseline flows with cut tracing.
    Bench {
        /// TOML manifest; without one the bundled circuits are used.
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        k_sweep: Option<u32>,
        #[arg(long)]
        ilp_timeout: Option<f64>,
        /// Seed for generated circuits.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Check two networks for functional equivalence.
    Verify {
        a: PathBuf,
        b: PathBuf,
    },
    /// Print size, depth, AND count and HE cost.
    Stats {
        input: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenDb { n, out } => {
            let db = cmd_gen_db(n, &out)?;
            println!("entries={} max_and_count={}", db.len(), db.max_and_count());
        }
        Command::Opt {
            input,
            order,
            out,
            passes,
        } => {
            let db = load_database(passes.db.as_deref())?;
            let r = cmd_opt(&input, order.into(), &out, db, &passes.config())?;
            eprintln!(
                "input {} | e-graph {} classes, {} nodes",
                stats_line(&r.before),
                r.classes,
                r.nodes
            );
            println!("{}", stats_line(&r.after));
        }
        Command::Extract {
            trace,
            k_sweep,
            ilp_timeout,
            witness,
            reference,
            export_lp,
            out,
        } => {
            let opts = ExtractOptions {
                k: k_sweep,
                timeout: Some(timeout_from_secs(ilp_timeout)?),
                witnesses: witness,
                reference,
                export_lp,
            };
            let r = cmd_extract(&trace, &opts, &out)?;
            for a in &r.attempts {
                eprintln!("md<={}: {}", a.bound, a.status.as_str());
            }
            println!("{}", stats_line(&r.best.network.compute_stats()));
        }
        Command::Bench {
            manifest,
            out,
            k_sweep,
            ilp_timeout,
            seed,
            db,
        } => {
            let mut m = match &manifest {
                Some(p) => RunManifest::load(p)?,
                None => RunManifest {
                    builtin: true,
                    ..RunManifest::default()
                },
            };
            if let Some(k) = k_sweep {
                m.k_sweep = k;
            }
            if let Some(t) = ilp_timeout {
                m.ilp_timeout = t;
            }
            if let Some(s) = seed {
                m.seed = s;
            }
            let out = out
                .or_else(|| m.out.as_ref().map(|o| m.base.join(o)))
                .unwrap_or_else(|| "out".into());
            let db = load_database(db.as_deref())?;
            let report = cmd_bench(&m, db, &out)?;
            print!("{}", report.to_text());
        }
        Command::Verify { a, b } => {
            if cmd_verify(&a, &b)? {
                println!("equivalent");
            } else {
                println!("not equivalent");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Stats { input } => println!("{}", cmd_stats(&input)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
