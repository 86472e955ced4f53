mod cache;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use specht_core::qlaurent::{is_prime, CoeffRing};
use specht_core::Partition;

use cache::Cache;
use commands::Ctx;

#[derive(Parser)]
#[command(name = "specht", about = "Gram matrices and elementary divisors of Specht modules of Hecke algebras")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cache directory (default: $SPECHT_CACHE_DIR, else ~/.cache/specht).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Time budget for each obstruction search, in seconds.
    #[arg(long, global = true, default_value_t = 10)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The Gram matrix G(lambda).
    Gram {
        #[arg(short, long, value_parser = parse_partition)]
        partition: Partition,
    },
    /// Elementary divisors of G(lambda) over Q, F<p> (or Fp:<p>), or Z at q = 1.
    Snf {
        #[arg(short, long, value_parser = parse_partition)]
        partition: Partition,
        #[arg(long, value_parser = parse_ring, default_value = "Q")]
        ring: CoeffRing,
    },
    /// Recompute the table of non-hook elementary divisors and compare.
    Table {
        #[arg(long, default_value_t = 9)]
        n_max: usize,
    },
    /// Mixed Gram matrix of the hook (n-k, 1^k) and its certificate.
    Hooks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Compare the divisors of lambda and its conjugate.
    Dual {
        #[arg(short, long, value_parser = parse_partition)]
        partition: Partition,
    },
    /// Both non-diagonalizability tests at a prime.
    Obstruct {
        #[arg(short, long, value_parser = parse_partition)]
        partition: Partition,
        #[arg(long, value_parser = parse_prime)]
        prime: u64,
    },
    /// Run the algebra identity suite.
    Verify {
        #[arg(long, default_value_t = 9)]
        n_max: usize,
    },
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_ring(s: &str) -> Result<CoeffRing, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not a prime"))
    }
}

fn cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("SPECHT_CACHE_DIR").map(PathBuf::from))
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("specht")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = if cli.no_cache { None } else { cache_dir(cli.cache_dir).map(Cache::new) };
    let ctx = Ctx { cache, budget: Duration::from_secs(cli.budget) };
    let result = match &cli.command {
        Command::Gram { partition } => commands::gram(&ctx, partition),
        Command::Snf { partition, ring } => commands::snf(&ctx, partition, *ring),
        Command::Table { n_max } => commands::table(&ctx, *n_max),
        Command::Hooks { n, k } => {
            if k >= n {
                eprintln!("error: hooks need 0 <= k < n, got n = {n}, k = {k}");
                return ExitCode::from(2);
            }
            commands::hooks(*n, *k)
        }
        Command::Dual { partition } => commands::dual(partition),
        Command::Obstruct { partition, prime } => commands::obstruct(&ctx, partition, *prime),
        Command::Verify { n_max } => commands::verify(*n_max),
    };
    match result {
        Ok(out) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("values serialize") + "\n"
            } else {
                out.text
            };
            // a closed pipe downstream is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
