//! Argument parsing, output and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Outcome, Payload};

/// Exit status for a completed run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when a computed quantity violates its bound.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for usage and parameter errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gkpsim", version, about = "Hybrid qubit-oscillator compiler and truncated-GKP simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads for sweeps (default: all hardware threads).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeArg {
    Gaussian,
    Comb,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a codeword on a uniform grid.
    States(StatesArgs),
    /// Matrix elements of a basic map and their inequalities.
    Melem(MelemArgs),
    /// Computed and closed-form error bounds.
    Bound(BoundArgs),
    /// Gate counts and strengths of a compiled circuit.
    Count(CountArgs),
    /// Exhaustive check of the ideal logical layer.
    VerifyIdeal(VerifyArgs),
    /// Qudit Clifford factorizations.
    Clifford(CliffordArgs),
    /// Wavepacket engine against the grid oracle.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args, Debug, Clone)]
pub struct StatesArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = EnvelopeArg::Gaussian)]
    pub envelope: EnvelopeArg,
    /// Number of comb peaks (default from Delta and d).
    #[arg(long = "L")]
    pub comb_len: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 20_001)]
    pub points: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MelemGate {
    Cx,
    Lsb,
    Embed,
    CombShift,
    CombMomentum,
}

#[derive(Args, Debug, Clone)]
pub struct MelemArgs {
    #[arg(long, value_enum)]
    pub gate: MelemGate,
    /// Register sizes (comma separated).
    #[arg(long = "l", value_delimiter = ',')]
    pub ells: Vec<usize>,
    #[arg(long = "kappa", value_delimiter = ',')]
    pub kappas: Vec<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "L")]
    pub comb_len: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Momentum displacement for comb-momentum.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<i32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundTargetArg {
    Qcx,
    Lsb,
    Embed,
    Transfer,
    Twoqubit,
    Bipartite,
    Circuit,
    CombQcx,
    CombCircuit,
    CombBipartite,
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub target: BoundTargetArg,
    #[arg(long = "l", value_delimiter = ',')]
    pub ells: Vec<usize>,
    #[arg(long = "kappa", value_delimiter = ',')]
    pub kappas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of two-qubit gates.
    #[arg(long = "T")]
    pub gates: Option<usize>,
    #[arg(long = "L")]
    pub comb_len: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountCircuit {
    Qcx,
    Lsb,
    Embed,
    Transfer,
    Twoqubit,
    Bipartite,
}

#[derive(Args, Debug, Clone)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub circuit: CountCircuit,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random two-qubit unitaries per circuit family.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordName {
    X,
    Z,
    P,
    F,
    Cz,
    Zphase,
}

#[derive(Args, Debug, Clone)]
pub struct CliffordArgs {
    #[arg(long, value_enum)]
    pub name: CliffordName,
    #[arg(long)]
    pub l: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::PI / 7.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub kappa: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CrosscheckArgs {
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compare basic-map elements on this register size.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
}

fn dispatch(cmd: &Command, format: Format) -> gkp_core::Result<Outcome> {
    match cmd {
        Command::States(a) => commands::states(a, format),
        Command::Melem(a) => commands::melem(a, format),
        Command::Bound(a) => commands::bound(a, format),
        Command::Count(a) => commands::count(a, format),
        Command::VerifyIdeal(a) => commands::verify_ideal(a, format),
        Command::Clifford(a) => commands::clifford(a, format),
        Command::Crosscheck(a) => commands::crosscheck(a, format),
    }
}

fn render(p: &Payload) -> String {
    match p {
        Payload::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Payload::Csv(s) => s.clone(),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `--out` or `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start {} workers: {e}", cli.common.workers.unwrap_or(0));
            return EXIT_USAGE;
        }
    };
    let outcome = match pool.install(|| dispatch(&cli.command, cli.common.format)) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = render(&outcome.payload);
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    for f in &outcome.failures {
        let _ = writeln!(stderr, "check failed: {f}");
    }
    if outcome.failures.is_empty() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
