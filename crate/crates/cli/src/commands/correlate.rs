//! `dinet correlate`: centrality vs trait-score correlation matrix over a
//! directory of cumulative graphs.

use std::path::PathBuf;

use dinet_core::stats::{correlation_table, CorrelationOptions, PValuePolicy};

use crate::config::{parse_kinds, parse_missing};
use crate::errors::{AppError, AppResult};
use crate::io_util::{load_graph_dir, load_scores, write_text, write_text_or_stdout};
use crate::table::{render_csv, render_table};

#[derive(clap::Args, Debug)]
pub struct CorrelateArgs {
    /// Directory of .graph files (every file is one table row group)
    #[arg(long)]
    pub graphs: PathBuf,
    /// Delimited trait scores: student_id,F1,F2
    #[arg(long)]
    pub scores: PathBuf,
    /// Comma list of dc,cc,bc
    #[arg(long, default_value = "dc,cc,bc")]
    pub kinds: String,
    /// Centrality for students missing from a graph: zero or drop
    #[arg(long, default_value = "zero")]
    pub missing: String,
    /// p-value method: auto (exact <= 9, t beyond), t, or mc
    #[arg(long, default_value = "auto")]
    pub pvalue: String,
    /// Monte-Carlo permutation draws (pvalue = mc)
    #[arg(long, default_value_t = 100_000)]
    pub mc_draws: u32,
    /// Monte-Carlo seed (pvalue = mc)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the human table here instead of stdout
    #[arg(long)]
    pub out_table: Option<PathBuf>,
    /// Also write machine-readable rows here
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

pub fn parse_pvalue_policy(s: &str, mc_draws: u32, seed: u64) -> AppResult<PValuePolicy> {
    match s {
        "auto" => Ok(PValuePolicy::Auto),
        "t" => Ok(PValuePolicy::TApproximation),
        "mc" => Ok(PValuePolicy::MonteCarlo {
            draws: mc_draws,
            seed,
        }),
        other => Err(AppError::Usage(format!(
            "pvalue must be auto, t, or mc, got {other:?}"
        ))),
    }
}

pub fn run(args: &CorrelateArgs) -> AppResult<()> {
    let graphs = load_graph_dir(&args.graphs)?;
    let scores = load_scores(&args.scores)?;
    let kinds = parse_kinds(&args.kinds)?;
    let opts = CorrelationOptions {
        missing: parse_missing(&args.missing)?,
        pvalue: parse_pvalue_policy(&args.pvalue, args.mc_draws, args.seed)?,
    };
    let cells = correlation_table(&graphs, &scores, &kinds, opts).map_err(AppError::data)?;
    if let Some(csv) = &args.out_csv {
        write_text(csv, &render_csv(&cells))?;
    }
    write_text_or_stdout(args.out_table.as_deref(), &render_table(&cells, &kinds))
}
