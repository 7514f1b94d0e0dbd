use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laststop::RawSpec;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "laststop",
    version,
    about = "Optimal thresholds for stopping on the last +1 or -1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the optimal thresholds and win probability.
    Solve {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = SolveMethod::Auto)]
        method: SolveMethod,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exact win probability of a threshold policy.
    Evaluate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value_t = EvalMethod::Auto)]
        method: EvalMethod,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo estimate of a threshold policy's win probability.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// CSV of w(k_plus, k_minus) over the lower triangle (constant p, p').
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Append the slice modes: `k_minus,argmax_j` and `k_plus,argmax_k`.
        #[arg(long)]
        modes: bool,
    },
    /// Continuous-arrival x-strategy approximation.
    Approx {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Read observations (+1, -1, 0) from stdin, one per line, and answer
    /// STOP or CONTINUE.
    Advise {
        #[command(flatten)]
        spec: SpecArgs,
        /// Override the solved plus-threshold.
        #[arg(long, requires = "s_prime")]
        s: Option<usize>,
        /// Override the solved minus-threshold.
        #[arg(long, requires = "s")]
        s_prime: Option<usize>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum, required_unless_present = "spec_file")]
    pub kind: Option<KindArg>,
    #[arg(long, required_unless_present = "spec_file")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_prime: Option<f64>,
    /// Comma-separated per-stage P(+1) = P(-1).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub p_seq: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub plus_seq: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub minus_seq: Option<Vec<f64>>,
    /// JSON problem description; excludes the inline flags.
    #[arg(
        long,
        conflicts_with_all = ["kind", "n", "p", "p_prime", "p_seq", "plus_seq", "minus_seq"]
    )]
    pub spec_file: Option<PathBuf>,
}

impl SpecArgs {
    pub fn to_raw(&self) -> Result<RawSpec, CliError> {
        if let Some(path) = &self.spec_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())));
        }
        Ok(RawSpec {
            kind: self
                .kind
                .map(KindArg::as_str)
                .unwrap_or_default()
                .to_string(),
            n: self.n.unwrap_or_default(),
            p: self.p,
            p_prime: self.p_prime,
            p_seq: self.p_seq.clone(),
            plus_seq: self.plus_seq.clone(),
            minus_seq: self.minus_seq.clone(),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    #[arg(long, requires = "s_prime", required_unless_present = "policy_file")]
    pub s: Option<usize>,
    #[arg(long, requires = "s")]
    pub s_prime: Option<usize>,
    /// JSON with `s` and `s_prime` fields, e.g. the output of `solve
    /// --format json`; `-` reads stdin.
    #[arg(long, conflicts_with_all = ["s", "s_prime"])]
    pub policy_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Weber,
    Biased,
    Timevarying,
    General,
}

impl KindArg {
    fn as_str(self) -> &'static str {
        match self {
            KindArg::Weber => "weber",
            KindArg::Biased => "biased",
            KindArg::Timevarying => "timevarying",
            KindArg::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    /// Fastest exact method for the spec's kind.
    Auto,
    Walk,
    Bisection,
    Dp,
    Odds,
    Weber,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    /// Enumerate when n <= 14, otherwise exact backward evaluation.
    Auto,
    Enumerate,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}
