//! `dinet layout`: core-periphery figure data (node rings, edge list,
//! regularized scatter) for one graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dinet_core::graphio::label_file_stem;
use dinet_core::layout::{core_periphery_layout, scatter_series, ScatterSeries};
use dinet_core::metrics::{centrality, CentralityKind};
use dinet_core::stats::{rank_with_ties, regularized_rank_series, TraitScores};
use dinet_core::{CoOccurrenceGraph, StudentId};

use crate::errors::{AppError, AppResult};
use crate::io_util::{load_graph, load_scores, write_text};

#[derive(clap::Args, Debug)]
pub struct LayoutArgs {
    /// Graph-description file produced by `build`
    #[arg(long)]
    pub graph: PathBuf,
    /// Centrality driving radius and color: dc, cc, or bc
    #[arg(long, default_value = "dc")]
    pub centrality: String,
    /// Delimited trait scores: student_id,F1,F2
    #[arg(long)]
    pub scores: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

/// Emit layout and scatter files for one graph; returns the scatter
/// annotation when defined. Shared with the pipeline command.
pub fn emit_layout(
    g: &CoOccurrenceGraph,
    kind: CentralityKind,
    scores: &TraitScores,
    out_dir: &Path,
) -> AppResult<Option<(f64, f64)>> {
    let stem = label_file_stem(g.label);
    let vector = centrality(g, kind).map_err(AppError::data)?;

    // dF ranks over the graph nodes that have scores; unscored nodes size 0
    let scored: Vec<(&StudentId, f64)> = g
        .graph()
        .nodes()
        .iter()
        .filter_map(|id| scores.get(id).map(|r| (id, r.delta_f() as f64)))
        .collect();
    let ranks = rank_with_ties(&scored.iter().map(|(_, v)| *v).collect::<Vec<f64>>());
    let rank_map: BTreeMap<StudentId, f64> = scored
        .iter()
        .map(|(id, _)| (*id).clone())
        .zip(ranks)
        .collect();

    let layout = core_periphery_layout(g.graph(), &vector, &rank_map).map_err(AppError::data)?;
    let mut nodes = String::from("node_id,radius,angle,color_value,size_value\n");
    for n in &layout.nodes {
        writeln!(
            nodes,
            "{},{},{},{},{}",
            n.id, n.radius, n.angle, n.color_value, n.size_value
        )
        .expect("string write");
    }
    write_text(&out_dir.join(format!("{stem}_nodes.csv")), &nodes)?;

    let mut edges = String::from("u,v\n");
    for (u, v) in &layout.edges {
        writeln!(edges, "{u},{v}").expect("string write");
    }
    write_text(&out_dir.join(format!("{stem}_edges.csv")), &edges)?;

    // scatter over the scored intersection, when it is rankable
    let centrality_raw: BTreeMap<StudentId, f64> = scored
        .iter()
        .map(|(id, _)| ((*id).clone(), vector.get(id).expect("node in domain")))
        .collect();
    let df_raw: BTreeMap<StudentId, f64> = scored
        .iter()
        .map(|(id, v)| ((*id).clone(), *v))
        .collect();
    let scatter: Option<ScatterSeries> = match (
        regularized_rank_series(&centrality_raw),
        regularized_rank_series(&df_raw),
    ) {
        (Ok(rc), Ok(rd)) => Some(scatter_series(&rc, &rd).map_err(AppError::data)?),
        _ => None,
    };
    let mut text = String::from("student_id,x,y\n");
    let mut annotation = None;
    if let Some(s) = &scatter {
        for p in &s.points {
            writeln!(text, "{},{},{}", p.id, p.x, p.y).expect("string write");
        }
        annotation = s.annotation;
    } else {
        eprintln!("warning: {stem}: scatter skipped (fewer than two distinct scored nodes)");
    }
    write_text(&out_dir.join(format!("{stem}_scatter.csv")), &text)?;

    let mut ann = String::from("n,rho,p_value\n");
    let n_points = scatter.as_ref().map_or(0, |s| s.points.len());
    match annotation {
        Some((rho, p)) => writeln!(ann, "{n_points},{rho},{p}").expect("string write"),
        None => writeln!(ann, "{n_points},,").expect("string write"),
    }
    write_text(&out_dir.join(format!("{stem}_annotation.csv")), &ann)?;
    Ok(annotation)
}

pub fn run(args: &LayoutArgs) -> AppResult<()> {
    let g = load_graph(&args.graph)?;
    let kind = CentralityKind::parse(&args.centrality)
        .ok_or_else(|| AppError::Usage(format!("unknown centrality {:?}", args.centrality)))?;
    let scores = load_scores(&args.scores)?;
    match emit_layout(&g, kind, &scores, &args.out)? {
        Some((rho, p)) => println!("{}: scatter rho = {rho:.3}, p = {p:.4}", g.label),
        None => println!("{}: scatter correlation undefined", g.label),
    }
    Ok(())
}
