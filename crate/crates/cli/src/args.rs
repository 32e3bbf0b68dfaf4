use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evdd::eqcheck::Algorithm;
use evdd::{Config, NormStrategy};

#[derive(Parser, Debug)]
#[command(name = "qdd", version, about = "Decision diagram quantum circuit simulator and equivalence checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a circuit from |0...0> and report the final state DD.
    Sim {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Decide whether two circuits implement the same unitary up to a factor.
    Eqcheck {
        u: PathBuf,
        v: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Alternating)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every circuit of a directory and print one CSV row per instance.
    Bench {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Sim)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Alternating)]
        algorithm: AlgorithmArg,
        /// Earlier bench CSV to compute speedups against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Worker threads [default: hardware threads]
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Component-wise tolerance δ for merging edge values.
    #[arg(long, default_value = "1e-14")]
    pub tolerance: f64,
    #[arg(long, default_value_t = NormStrategy::Max, value_parser = parse_strategy)]
    pub norm_strategy: NormStrategy,
    /// log2 of the node table capacity.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(2..32))]
    pub node_table_size: u32,
    /// log2 of the value table capacity.
    #[arg(long, default_value_t = 23, value_parser = clap::value_parser!(u32).range(2..32))]
    pub value_table_size: u32,
    /// log2 of the number of operation cache entries.
    #[arg(long, default_value_t = 22, value_parser = clap::value_parser!(u32).range(1..32))]
    pub op_cache_size: u32,
    /// Fork only while more than this many qubit levels remain below.
    #[arg(long, default_value_t = 6)]
    pub par_cutoff: usize,
    /// Seconds per instance before giving up.
    #[arg(long, value_parser = parse_seconds)]
    pub timeout: Option<Duration>,
    /// Seed of the sampling generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measurement samples drawn from the final state.
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Compact the node table between gates once it is half full.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub gc: Switch,
}

impl RunArgs {
    pub fn config(&self) -> Config {
        let base = Config::default();
        Config {
            tolerance: self.tolerance,
            norm_strategy: self.norm_strategy,
            node_table_log2: self.node_table_size,
            value_table_log2: self.value_table_size,
            op_cache_log2: self.op_cache_size,
            workers: self.workers.map_or(base.workers, |w| w as usize),
            par_cutoff: self.par_cutoff,
            op_cache: true,
            gc: self.gc == Switch::On,
        }
    }
}

/// `max` or `norm-max`, and so on.
fn parse_strategy(s: &str) -> Result<NormStrategy, String> {
    s.strip_prefix("norm-").unwrap_or(s).parse()
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number of seconds: `{s}`"))?;
    Duration::try_from_secs_f64(v).map_err(|e| e.to_string())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Switch {
    On,
    Off,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sim,
    Eqcheck,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmArg {
    Alternating,
    Pauli,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Alternating => Algorithm::Alternating,
            AlgorithmArg::Pauli => Algorithm::Pauli,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_args(extra: &[&str]) -> RunArgs {
        let argv = ["qdd", "sim", "x.qasm"].iter().chain(extra);
        match Cli::parse_from(argv).command {
            Command::Sim { run, .. } => run,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_match_library() {
        let cfg = run_args(&[]).config();
        let lib = Config::default();
        assert_eq!(cfg.tolerance, evdd::DEFAULT_TOLERANCE);
        assert_eq!(cfg.norm_strategy, lib.norm_strategy);
        assert_eq!(
            (cfg.node_table_log2, cfg.value_table_log2, cfg.op_cache_log2, cfg.par_cutoff, cfg.workers),
            (lib.node_table_log2, lib.value_table_log2, lib.op_cache_log2, lib.par_cutoff, lib.workers)
        );
        assert!(!cfg.gc);
    }

    #[test]
    fn strategy_names() {
        for (arg, want) in [("low", NormStrategy::Low), ("norm-min", NormStrategy::Min), ("L2", NormStrategy::L2)] {
            assert_eq!(run_args(&["--norm-strategy", arg]).norm_strategy, want, "{arg}");
        }
        assert!(Cli::try_parse_from(["qdd", "sim", "x", "--norm-strategy", "mid"]).is_err());
        assert!(Cli::try_parse_from(["qdd", "sim", "x", "--workers", "0"]).is_err());
    }

    #[test]
    fn timeout_seconds() {
        assert_eq!(run_args(&["--timeout", "1.5"]).timeout, Some(Duration::from_millis(1500)));
        assert!(Cli::try_parse_from(["qdd", "sim", "x", "--timeout", "-1"]).is_err());
    }
}
