//! Front end for the `linforms` binary: flag parsing, configuration files
//! and artifact writing.

pub mod config;
mod dispatch;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_schedule, Command, Format, RunConfig};
pub use dispatch::{load_psi, run, Outcome, ReportFile};

/// Failure of one invocation, tied to an exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or incomplete configuration.
    Config(String),
    Io(String),
    Lib(linforms::Error),
}

impl CliError {
    /// 2 for configuration and precondition failures, 3 for budgets, 1 for
    /// a numerically violated theorem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Lib(e) if e.is_budget() => 3,
            CliError::Lib(linforms::Error::TheoremViolation(_)) => 1,
            CliError::Lib(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<linforms::Error> for CliError {
    fn from(e: linforms::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "linforms", version, about = "Small simultaneous linear forms: search, verdicts and experiments")]
pub struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "LINFORMS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Smallest |qX| up to height Q, or every ψ-witness when --psi is given.
    Search(Opts),
    /// Dirichlet witness for each t in --t.
    Dirichlet(Opts),
    /// Height bound above which a square X has no ψ-witnesses.
    Obstruction(Opts),
    /// Series classification and measure verdict.
    Series(Opts),
    /// Hausdorff dimension of the τ-approximable set.
    Dimension(Opts),
    /// Step function ω for a divergent criterion series.
    Omega(Opts),
    /// Monte Carlo measure experiments.
    Measure {
        #[command(subcommand)]
        which: MeasureCmd,
    },
    /// Box-counting dimension along the coupled schedule.
    Boxdim(Opts),
    /// Rank-deficient matrices built by the embedding η.
    Manifold {
        #[command(subcommand)]
        which: ManifoldCmd,
    },
    /// Tidy CSV and a gnuplot script from saved report files.
    PlotData(Opts),
    /// Runs a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum MeasureCmd {
    DeltaT(Opts),
    ET(Opts),
    Ubiquity(Opts),
    Dichotomy(Opts),
}

#[derive(Subcommand, Debug)]
pub enum ManifoldCmd {
    Eta(Opts),
    Certify(Opts),
    GammaDichotomy(Opts),
}

/// A parsed `--schedule` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(pub Vec<u64>);

fn parse_schedule_arg(s: &str) -> Result<Schedule, String> {
    parse_schedule(s).map(Schedule)
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Matrix entries, column-major, comma separated.
    #[arg(long = "X", value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// `pow:c,tau`, `powlog:c,tau,kappa` or `table:path`.
    #[arg(long)]
    pub psi: Option<String>,
    /// `pow:s` or `powlog:s,kappa`.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// t values, N values or grid levels: `2,4,8` or `4..10`.
    #[arg(long = "schedule", visible_aliases = ["t", "N", "levels"], value_parser = parse_schedule_arg)]
    pub schedule: Option<Schedule>,
    #[arg(long = "Q")]
    pub q: Option<u64>,
    /// Ratio between consecutive height scales.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Count only boxes meeting det X = 0 (2×2 box counting).
    #[arg(long)]
    pub rank_one: bool,
    /// Report files for plot-data.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<PathBuf>,
    /// Output file (or directory for plot-data).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Opts {
    pub fn into_config(self, command: Command) -> RunConfig {
        RunConfig {
            command,
            m: self.m,
            n: self.n,
            x: self.x,
            psi: self.psi,
            f: self.f,
            tau: self.tau,
            schedule: self.schedule.map(|s| s.0),
            q: self.q,
            k: self.k,
            samples: self.samples,
            seed: self.seed,
            horizon: self.horizon,
            rank_one: self.rank_one,
            inputs: self.inputs,
            output: self.out,
            format: self.format,
        }
    }
}

fn to_config(cmd: Cmd) -> Result<RunConfig, CliError> {
    Ok(match cmd {
        Cmd::Search(o) => o.into_config(Command::Search),
        Cmd::Dirichlet(o) => o.into_config(Command::Dirichlet),
        Cmd::Obstruction(o) => o.into_config(Command::Obstruction),
        Cmd::Series(o) => o.into_config(Command::Series),
        Cmd::Dimension(o) => o.into_config(Command::Dimension),
        Cmd::Omega(o) => o.into_config(Command::Omega),
        Cmd::Measure { which } => match which {
            MeasureCmd::DeltaT(o) => o.into_config(Command::DeltaT),
            MeasureCmd::ET(o) => o.into_config(Command::ET),
            MeasureCmd::Ubiquity(o) => o.into_config(Command::Ubiquity),
            MeasureCmd::Dichotomy(o) => o.into_config(Command::Dichotomy),
        },
        Cmd::Boxdim(o) => o.into_config(Command::Boxdim),
        Cmd::Manifold { which } => match which {
            ManifoldCmd::Eta(o) => o.into_config(Command::Eta),
            ManifoldCmd::Certify(o) => o.into_config(Command::Certify),
            ManifoldCmd::GammaDichotomy(o) => o.into_config(Command::GammaDichotomy),
        },
        Cmd::PlotData(o) => o.into_config(Command::PlotData),
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
            RunConfig::from_json(&text)?
        }
    })
}

/// Parses arguments, runs, prints, and returns the exit status.
pub fn main_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("configuration error: --threads must be positive");
            return 2;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: thread pool already initialised: {e}");
        }
    }
    let result = to_config(cli.cmd).and_then(|config| run(&config));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
