use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

/// Dimer statistics on the interface-weighted square lattice.
#[derive(Parser)]
#[command(name = "dimer", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Vertical weight `a` (both halves).
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Vertical weight `b` (left half alternation).
    #[arg(long, default_value_t = 4.0)]
    b: f64,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format for tabular results.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the weighting as critical or non-critical.
    Criticality {
        #[command(flatten)]
        weights: WeightArgs,
    },
    /// Sweep the transfer-root norms over the unit circle.
    Roots {
        #[command(flatten)]
        weights: WeightArgs,
        /// Number of theta samples.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate Green-function components or coefficients at one point.
    Green {
        #[command(flatten)]
        weights: WeightArgs,
        /// White sublattice index.
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        i: String,
        /// Black sublattice index.
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        j: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        n0: i64,
        /// Argument of omega on the unit circle.
        #[arg(long)]
        theta: f64,
        /// Also print the full coefficient set of the case.
        #[arg(long)]
        coefficients: bool,
    },
    /// Inverse Kasteleyn entry (or a sweep over a rectangle of offsets).
    Invk {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        i: String,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        j: String,
        #[arg(long, allow_hyphen_values = true)]
        n0: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        /// Quadrature absolute tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Sweep over the rectangle [n-dn, n+dn] x [m-dm, m+dm].
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 3)]
        dn: i64,
        #[arg(long, default_value_t = 3)]
        dm: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ratio probe of a decay-regime leading term against quadrature.
    Asymptote {
        #[command(flatten)]
        weights: WeightArgs,
        /// One of cor1..cor7.
        #[arg(long, value_parser = ["cor1", "cor2", "cor3", "cor4", "cor5", "cor6", "cor7"])]
        case: String,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        i: String,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        j: String,
        #[arg(long, allow_hyphen_values = true)]
        n0: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        m: i64,
        /// Proportionality factor for cor6/cor7.
        #[arg(long)]
        p: Option<i64>,
        /// Comma-separated schedule of asymptotic-variable values.
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<i64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Brute-force oracle utilities (counting checks, window entries).
    Oracle {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(subcommand)]
        what: OracleCommand,
    },
    /// Run the invariant suites.
    Validate {
        /// fast: identities and small oracles; full: adds window comparisons.
        #[arg(long, value_parser = ["fast", "full"], default_value = "fast")]
        level: String,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// |det K~| vs exhaustive weighted enumeration on a window.
    Count {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        n_min: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        n_max: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        m_min: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        m_max: i64,
    },
    /// One dense window-inverse entry.
    Window {
        /// Window radius in faces.
        #[arg(long, default_value_t = 8)]
        radius: i64,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        i: String,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        j: String,
        #[arg(long, allow_hyphen_values = true)]
        wn: i64,
        #[arg(long, allow_hyphen_values = true)]
        wm: i64,
        #[arg(long, allow_hyphen_values = true)]
        bn: i64,
        #[arg(long, allow_hyphen_values = true)]
        bm: i64,
    },
    /// One cylinder-inverse entry (margin-extrapolated).
    Cylinder {
        #[arg(long, default_value_t = 40)]
        margin: i64,
        #[arg(long, default_value_t = 256)]
        circumference: usize,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        i: String,
        #[arg(long, value_parser = ["up", "down"], default_value = "up")]
        j: String,
        #[arg(long, allow_hyphen_values = true)]
        wn: i64,
        #[arg(long, allow_hyphen_values = true)]
        wm: i64,
        #[arg(long, allow_hyphen_values = true)]
        bn: i64,
        #[arg(long, allow_hyphen_values = true)]
        bm: i64,
    },
}

fn main() {
    init_thread_pool();
    // exit codes: 0 success, 1 usage, 2 numerical failure, 3 validation failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}

/// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 validation failure.
pub(crate) struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }
    fn numerical(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("DIMER_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Criticality { weights } => commands::criticality(&weights),
        Command::Roots {
            weights,
            samples,
            output,
        } => commands::roots(&weights, samples, &output),
        Command::Green {
            weights,
            i,
            j,
            n,
            n0,
            theta,
            coefficients,
        } => commands::green(&weights, &i, &j, n, n0, theta, coefficients),
        Command::Invk {
            weights,
            i,
            j,
            n0,
            n,
            m,
            tol,
            sweep,
            dn,
            dm,
            output,
        } => commands::invk(&weights, &i, &j, n0, n, m, tol, sweep, dn, dm, &output),
        Command::Asymptote {
            weights,
            case,
            i,
            j,
            n0,
            n,
            m,
            p,
            schedule,
            tol,
            output,
        } => commands::asymptote(&weights, &case, &i, &j, n0, n, m, p, &schedule, tol, &output),
        Command::Oracle { weights, what } => commands::oracle(&weights, what),
        Command::Validate { level } => commands::validate(&level),
    }
}
