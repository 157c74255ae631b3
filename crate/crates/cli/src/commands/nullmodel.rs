//! `dinet nullmodel`: degree-preserving randomization baseline for one graph.

use std::fmt::Write as _;
use std::path::PathBuf;

use dinet_core::metrics::average_clustering;
use dinet_core::nullmodel::{null_clustering_baseline, NullModelConfig, SwapBudget};

use crate::errors::{AppError, AppResult};
use crate::io_util::{load_graph, write_text_or_stdout};

#[derive(clap::Args, Debug)]
pub struct NullmodelArgs {
    /// Graph-description file produced by `build`
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub replicates: u32,
    /// Accepted swaps per replicate = multiplier * |E|
    #[arg(long, default_value_t = 10)]
    pub multiplier: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Attempt budget per required round before giving up
    #[arg(long, default_value_t = 100)]
    pub max_attempts: u32,
    /// Count raw attempts instead of accepted swaps
    #[arg(long, default_value_t = false)]
    pub count_attempts: bool,
    /// Write here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &NullmodelArgs) -> AppResult<()> {
    let g = load_graph(&args.graph)?;
    let config = NullModelConfig {
        swap_rounds_multiplier: args.multiplier,
        replicate_count: args.replicates,
        master_seed: args.seed,
        max_attempts_per_round: args.max_attempts,
        budget: if args.count_attempts {
            SwapBudget::Attempts
        } else {
            SwapBudget::Acceptances
        },
    };
    let result = null_clustering_baseline(&g, &config).map_err(AppError::data)?;
    if result.saturated_replicates > 0 {
        eprintln!(
            "warning: {} of {} replicates saturated (attempt budget reached)",
            result.saturated_replicates, args.replicates
        );
    }

    let mut out = String::from("replicate,clustering\n");
    for (i, c) in result.replicate_clustering.iter().enumerate() {
        writeln!(out, "{i},{c}").expect("string write");
    }
    out.push('\n');
    out.push_str(
        "label,actual_clustering,null_mean,null_sd,replicates,multiplier,seed,budget,accepted,attempted,saturated\n",
    );
    let actual = average_clustering(g.graph()).map_err(AppError::data)?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{}",
        result.graph_label,
        actual,
        result.mean,
        result.sd,
        args.replicates,
        args.multiplier,
        args.seed,
        if args.count_attempts {
            "attempts"
        } else {
            "acceptances"
        },
        result.accepted_swaps,
        result.attempted_swaps,
        result.saturated_replicates
    )
    .expect("string write");
    write_text_or_stdout(args.out.as_deref(), &out)
}
