use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use eigenrate::mclab::Side;
use eigenrate::sdpic::Stages;
use eigenrate::EntryDistribution;

use crate::config::{parse_counts, AlphaGrid, Command, ExperimentConfig, Format};
use crate::{DEFAULT_SEED, SEED_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "eigenrate",
    version,
    about = "Rate functions, Monte Carlo tails and SD-PIC experiments for sample covariance spectra"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

/// Comma-separated counts with `a..b` ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts(pub Vec<usize>);

impl FromStr for Counts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_counts(s).map(Counts)
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// Single threshold
    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha_grid")]
    pub alpha: Option<AlphaGrid>,
    /// Grid `start:stop:step`, stop included
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_grid: Option<AlphaGrid>,
}

impl AlphaArgs {
    fn into_grid(self) -> Option<AlphaGrid> {
        self.alpha.or(self.alpha_grid)
    }
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Rate function I_k(alpha) on a grid
    Rate {
        #[arg(long)]
        dist: EntryDistribution,
        /// Dimension(s); defaults to 2
        #[arg(long)]
        k: Option<Counts>,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Random restarts of the sphere search
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Crossing point alpha*_k of the all-equal and two-sparse strategies
    Phase {
        /// Dimension(s); the k -> infinity limit when omitted
        #[arg(long)]
        k: Option<Counts>,
        /// Also compute the sphere-optimized rate at the crossing with this
        /// many random restarts
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of P(lambda_min <= alpha) or P(lambda_max >= alpha)
    Mc {
        #[arg(long)]
        dist: EntryDistribution,
        #[arg(long)]
        k: Counts,
        #[arg(long)]
        n: Counts,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// `min` or `max`
        #[arg(long, default_value = "max")]
        side: Side,
        #[arg(long)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Probability of l zero eigenvalues for +-1 entries
    Zero {
        #[arg(long)]
        k: Counts,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long)]
        n: Counts,
        /// Monte Carlo trials where exact enumeration is out of reach
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Bit-error experiment for (weighted) SD-PIC
    Sdpic {
        #[arg(long)]
        k: Counts,
        #[arg(long)]
        n: Counts,
        /// Number of stages, or `inf`
        #[arg(long, default_value = "inf")]
        s: Stages,
        /// Weight M of weighted SD-PIC
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Emit the per-stage trace of one transmission instead
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Covering-number bounds for the unit sphere
    Covering {
        #[arg(long)]
        k: Counts,
        /// Grid resolution L
        #[arg(long)]
        grid: Option<usize>,
        /// Rogers radius parameter R (balls of radius 1/R)
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Pooled eigenvalue histogram against the Marchenko-Pastur support
    Hist {
        #[arg(long)]
        dist: EntryDistribution,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Join a `rate` CSV with an `mc` JSON-lines file
    Compare {
        rate_file: PathBuf,
        mc_file: PathBuf,
        /// Bracket half-width; defaults to the grid spacing of the rate file
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Re-run the configuration stored in a config file or output header
    Replay {
        config: PathBuf,
        /// Write here instead of the recorded output path
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn base(command: Command, common: Common, default_format: Format) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(command, common.seed, common.format.unwrap_or(default_format));
    c.output = common.output;
    c
}

impl Sub {
    /// The experiment configuration, for subcommands that have one.
    pub fn into_config(self) -> Option<ExperimentConfig> {
        let config = match self {
            Sub::Rate {
                dist,
                k,
                alpha,
                restarts,
                common,
            } => {
                let mut c = base(Command::Rate, common, Format::Csv);
                c.dist = Some(dist);
                c.k = k.map(|k| k.0).unwrap_or_default();
                c.alpha_grid = alpha.into_grid();
                c.restarts = restarts;
                c
            }
            Sub::Phase { k, restarts, common } => {
                let mut c = base(Command::Phase, common, Format::Csv);
                c.k = k.map(|k| k.0).unwrap_or_default();
                c.restarts = restarts;
                c
            }
            Sub::Mc {
                dist,
                k,
                n,
                alpha,
                side,
                trials,
                common,
            } => {
                let mut c = base(Command::Mc, common, Format::Jsonl);
                c.dist = Some(dist);
                c.k = k.0;
                c.n = n.0;
                c.alpha_grid = alpha.into_grid();
                c.side = Some(side);
                c.trials = Some(trials);
                c
            }
            Sub::Zero {
                k,
                l,
                n,
                trials,
                common,
            } => {
                let mut c = base(Command::Zero, common, Format::Jsonl);
                c.dist = Some(EntryDistribution::Rademacher);
                c.k = k.0;
                c.l = Some(l);
                c.n = n.0;
                c.trials = Some(trials);
                c
            }
            Sub::Sdpic {
                k,
                n,
                s,
                weight,
                trials,
                trace,
                common,
            } => {
                let mut c = base(
                    Command::Sdpic,
                    common,
                    if trace { Format::Csv } else { Format::Jsonl },
                );
                c.k = k.0;
                c.n = n.0;
                c.s = Some(s);
                c.weight = weight;
                c.trace = trace;
                if !trace {
                    c.trials = Some(trials);
                }
                c
            }
            Sub::Covering {
                k,
                grid,
                radius,
                common,
            } => {
                let mut c = base(Command::Covering, common, Format::Csv);
                c.k = k.0;
                c.grid = grid;
                c.radius = radius;
                c
            }
            Sub::Hist {
                dist,
                k,
                n,
                trials,
                bins,
                common,
            } => {
                let mut c = base(Command::Hist, common, Format::Csv);
                c.dist = Some(dist);
                c.k = vec![k];
                c.n = vec![n];
                c.trials = Some(trials);
                c.bins = Some(bins);
                c
            }
            Sub::Compare { .. } | Sub::Replay { .. } => return None,
        };
        Some(config)
    }
}
