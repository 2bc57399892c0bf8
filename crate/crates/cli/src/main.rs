use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod sink;

use sink::CliError;

#[derive(Parser, Debug)]
#[command(name = "quasinv", version, about = "Quasi-invariant polynomials of symmetric groups")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads (default: all cores). QUASINV_THREADS caps this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Continue from the records already present in the output file.
    #[arg(long, global = true)]
    pub resume: bool,

    /// Stop after writing the record for this m.
    #[arg(long, global = true, hide = true)]
    pub stop_after: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    Formal,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Brute-force Hilbert series of Q_m(n) over one coefficient domain.
    Hilbert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
        /// Characteristic: 0 or a prime.
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        /// q-deformed quasi-invariants over Q(q).
        #[arg(long, value_enum, conflicts_with = "q_order")]
        q: Option<QMode>,
        /// q-deformed quasi-invariants at a primitive root of unity of this order.
        #[arg(long)]
        q_order: Option<u64>,
        #[arg(long)]
        dmax: Option<u32>,
    },
    /// Generator chain for n = 3 and the prime comparison, one record per m.
    Sweep {
        #[arg(long)]
        m_max: u32,
        #[arg(long, default_value_t = 100)]
        prime_bound: u64,
    },
    /// Shift operator scalars, valuations and product relations.
    ShiftVerify {
        #[arg(long)]
        m_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "5,7,11,13")]
        primes: Vec<u64>,
    },
    /// q-deformed report for one (m, p).
    Qdeform {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        dmax: Option<u32>,
        /// Also compute dimensions over Q(q) by brute force.
        #[arg(long)]
        formal: bool,
    },
    /// Wedge polynomial c(q) and its cyclotomic factors, one record per m.
    QdeformSweep {
        #[arg(long)]
        m_max: u32,
    },
}

fn thread_count(requested: Option<usize>) -> Result<usize, CliError> {
    let mut n = match requested {
        Some(0) => return Err(CliError::Config("--threads must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    if let Ok(cap) = std::env::var("QUASINV_THREADS") {
        let cap: usize = cap
            .trim()
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| CliError::Config(format!("QUASINV_THREADS={cap:?} is not a positive integer")))?;
        n = n.min(cap);
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = thread_count(cli.global.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let g = &cli.global;
    pool.install(|| match cli.command {
        Command::Hilbert { n, m, characteristic, q, q_order, dmax } => {
            commands::hilbert(g, n, m, characteristic, q.is_some(), q_order, dmax)
        }
        Command::Sweep { m_max, prime_bound } => commands::sweep(g, m_max, prime_bound),
        Command::ShiftVerify { m_max, primes } => commands::shift_verify(g, m_max, &primes),
        Command::Qdeform { n, m, p, dmax, formal } => commands::qdeform(g, n, m, p, dmax, formal),
        Command::QdeformSweep { m_max } => commands::qdeform_sweep(g, m_max),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
