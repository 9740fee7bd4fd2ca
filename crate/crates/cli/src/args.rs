use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpc_core::CodeParams;

#[derive(Debug, Parser)]
#[command(name = "qpc", version, about = "Parity-code Bell measurement and repeater chain calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// Code as `n,m`; repeat for several codes.
    #[arg(long = "code", global = true, value_name = "N,M")]
    pub codes: Vec<CodeParams>,

    /// Transmission values; repeat or separate with commas.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eta: Vec<String>,

    /// Total link length L.
    #[arg(long, global = true)]
    pub distance_km: Option<f64>,

    /// Repeater spacing L0; repeat or separate with commas for curves.
    #[arg(long, global = true, value_delimiter = ',')]
    pub spacing_km: Vec<f64>,

    /// Fibre attenuation length.
    #[arg(long, global = true)]
    pub atten_km: Option<f64>,

    /// Efficiency of each ancilla photon, applied twice per hop.
    #[arg(long, global = true)]
    pub eta_missing: Option<f64>,

    /// Probability that the encoded-state source delivers.
    #[arg(long, global = true)]
    pub eta_source: Option<f64>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trials per check.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON document supplying defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ApparatusArg {
    #[default]
    Linear,
    Perfect,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logical Bell measurement success probability for codes x transmissions.
    BmProb {
        #[arg(long)]
        paper_table_1: bool,
        #[arg(long, value_enum, default_value_t)]
        apparatus: ApparatusArg,
    },
    /// Success probability given exactly mu lost photons.
    PmuTable {
        #[arg(long)]
        paper_table_s1: bool,
    },
    /// Chain success per time step and cost for one configuration.
    Rate {
        #[arg(long, value_enum, default_value_t)]
        apparatus: ApparatusArg,
    },
    /// Chain success per time step against repeater spacing.
    Curve {
        #[arg(long)]
        paper_fig3: bool,
        #[arg(long, default_value_t = 0.5)]
        spacing_min_km: f64,
        #[arg(long, default_value_t = 10.0)]
        spacing_max_km: f64,
        #[arg(long, default_value_t = 0.05)]
        spacing_step_km: f64,
    },
    /// Search codes and spacing for the lowest cost.
    Optimize {
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 40)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        m_min: u32,
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        #[arg(long, default_value_t = 0.5)]
        spacing_min_km: f64,
        #[arg(long, default_value_t = 10.0)]
        spacing_max_km: f64,
        /// Ranked configurations to print.
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, value_enum, default_value_t)]
        apparatus: ApparatusArg,
        /// Also optimize with a perfect Bell measurement and report the cost ratio.
        #[arg(long)]
        compare_perfect: bool,
    },
    /// Hardware counts, multiplexed source success and tolerable source vacuum.
    Resources {
        /// Sources multiplexed per encoded state.
        #[arg(long, default_value_t = 10)]
        sources: u32,
        /// Target chain success per time step for the vacuum threshold.
        #[arg(long)]
        target_rate: Option<f64>,
    },
    /// Run the cross-check suite; exits 1 if any check fails.
    Verify {
        /// Largest n*m for the exhaustive checks.
        #[arg(long, default_value_t = 8)]
        max_photons: u32,
    },
}
