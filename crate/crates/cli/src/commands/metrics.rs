//! `dinet metrics`: per-node centrality table and graph summary.

use std::fmt::Write as _;
use std::path::PathBuf;

use dinet_core::metrics::{
    average_clustering, centrality, local_clustering, topology_series, CentralityKind,
};

use crate::errors::{AppError, AppResult};
use crate::io_util::{load_graph, write_text_or_stdout};

#[derive(clap::Args, Debug)]
pub struct MetricsArgs {
    /// Graph-description file produced by `build`
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma list of dc,cc,bc,clustering
    #[arg(long, default_value = "dc,cc,bc,clustering")]
    pub measures: String,
    /// Write here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &MetricsArgs) -> AppResult<()> {
    let g = load_graph(&args.graph)?;
    let mut kinds = Vec::new();
    let mut want_clustering = false;
    for m in args.measures.split(',') {
        match CentralityKind::parse(m) {
            Some(kind) => kinds.push(kind),
            None if m.trim().eq_ignore_ascii_case("clustering") => want_clustering = true,
            None => {
                return Err(AppError::Usage(format!("unknown measure {m:?}")));
            }
        }
    }

    let mut out = String::from("node_id");
    for kind in &kinds {
        write!(out, ",{kind}").expect("string write");
    }
    if want_clustering {
        out.push_str(",clustering");
    }
    out.push('\n');

    if g.node_count() == 0 {
        eprintln!("warning: empty graph, no per-node rows");
    } else {
        let vectors: Vec<_> = kinds
            .iter()
            .map(|&k| centrality(&g, k).map_err(AppError::data))
            .collect::<AppResult<_>>()?;
        for node in g.graph().nodes() {
            write!(out, "{node}").expect("string write");
            for v in &vectors {
                write!(out, ",{}", v.get(node).expect("full domain")).expect("string write");
            }
            if want_clustering {
                let c = local_clustering(g.graph(), node).map_err(AppError::data)?;
                write!(out, ",{c}").expect("string write");
            }
            out.push('\n');
        }
    }

    let summary = topology_series(std::slice::from_ref(&g));
    let s = &summary[0];
    out.push('\n');
    out.push_str("label,nodes,edges,average_degree,average_clustering\n");
    writeln!(
        out,
        "{},{},{},{},{}",
        s.label,
        s.node_count,
        s.edge_count,
        s.average_degree,
        s.average_clustering
            .map(|c| c.to_string())
            .unwrap_or_default()
    )
    .expect("string write");
    // keep the summary honest even when clustering was not requested
    debug_assert_eq!(
        s.average_clustering,
        average_clustering(g.graph()).ok(),
        "summary clustering consistent"
    );

    write_text_or_stdout(args.out.as_deref(), &out)
}
