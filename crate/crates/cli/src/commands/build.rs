//! `dinet build`: construct weekly and cumulative co-occurrence graphs and
//! write the edge-list and graph-description files.

use std::path::PathBuf;

use dinet_core::cooccur::{build_cumulative_graph, build_week_graph_with_witnesses};
use dinet_core::graphio::{label_file_stem, write_edge_list, write_graph, write_witnesses};
use dinet_core::ingest::{parse_checkins, partition_weeks};
use dinet_core::CoOccurrenceGraph;

use crate::errors::{AppError, AppResult};
use crate::io_util::write_text;
use crate::CalendarArgs;

#[derive(clap::Args, Debug)]
pub struct BuildArgs {
    /// Input file (single-file) or directory (per-student)
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout: per-student or single-file
    #[arg(long)]
    pub format: String,
    #[command(flatten)]
    pub calendar: CalendarArgs,
    /// Co-occurrence time threshold in seconds
    #[arg(long, default_value_t = 1200)]
    pub threshold: u64,
    /// Week labels to build: `all` or `FROM-TO`
    #[arg(long, default_value = "all")]
    pub weeks: String,
    /// Also build cumulative graphs anchored at this label, one per week
    /// through the final label
    #[arg(long)]
    pub cumulative_from: Option<u32>,
    /// Output directory for .graph / .edges files
    #[arg(long)]
    pub out: PathBuf,
    /// Write the per-edge witness audit of the weekly graphs here
    #[arg(long)]
    pub witnesses: Option<PathBuf>,
}

fn parse_week_selection(s: &str, max: u32) -> AppResult<(u32, u32)> {
    if s == "all" {
        return Ok((1, max));
    }
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| AppError::Usage(format!("--weeks takes `all` or `FROM-TO`, got {s:?}")))?;
    let from: u32 = a
        .trim()
        .parse()
        .map_err(|_| AppError::Usage(format!("bad week {a:?}")))?;
    let to: u32 = b
        .trim()
        .parse()
        .map_err(|_| AppError::Usage(format!("bad week {b:?}")))?;
    if from == 0 || from > to || to > max {
        return Err(AppError::Usage(format!(
            "week range {from}-{to} outside 1..={max}"
        )));
    }
    Ok((from, to))
}

fn write_graph_files(out: &std::path::Path, g: &CoOccurrenceGraph) -> AppResult<()> {
    let stem = label_file_stem(g.label);
    let mut buf = Vec::new();
    write_graph(g, &mut buf).map_err(|e| AppError::Internal(e.to_string()))?;
    write_text(
        &out.join(format!("{stem}.graph")),
        &String::from_utf8(buf).expect("utf8 graph"),
    )?;
    let mut buf = Vec::new();
    write_edge_list(g.graph(), &mut buf).map_err(|e| AppError::Internal(e.to_string()))?;
    write_text(
        &out.join(format!("{stem}.edges")),
        &String::from_utf8(buf).expect("utf8 edges"),
    )
}

pub fn run(args: &BuildArgs) -> AppResult<()> {
    let cal = args.calendar.build()?;
    let format = crate::config::parse_format(&args.format)?;
    let parsed = parse_checkins(&args.input, format, &cal).map_err(AppError::data)?;
    if !parsed.rejects.is_empty() {
        eprintln!("warning: {} input lines rejected", parsed.rejects.len());
    }
    let partition = partition_weeks(&parsed.log, &cal);
    let (from, to) = parse_week_selection(&args.weeks, cal.label_count())?;

    let mut all_witnesses = Vec::new();
    for slice in &partition.slices {
        if slice.label < from || slice.label > to {
            continue;
        }
        let (g, mut witnesses) =
            build_week_graph_with_witnesses(&slice.log, slice.label, args.threshold, &cal);
        write_graph_files(&args.out, &g)?;
        println!(
            "week {:>2}: {} nodes, {} edges",
            slice.label,
            g.node_count(),
            g.edge_count()
        );
        all_witnesses.append(&mut witnesses);
    }
    if let Some(path) = &args.witnesses {
        let mut buf = Vec::new();
        write_witnesses(&all_witnesses, &mut buf).map_err(|e| AppError::Internal(e.to_string()))?;
        write_text(path, &String::from_utf8(buf).expect("utf8 witnesses"))?;
    }

    if let Some(anchor) = args.cumulative_from {
        let max = cal.label_count();
        if anchor == 0 || anchor > max {
            return Err(AppError::Usage(format!(
                "--cumulative-from {anchor} outside 1..={max}"
            )));
        }
        for week in anchor..=max {
            let g = build_cumulative_graph(&parsed.log, anchor, week, args.threshold, &cal)
                .map_err(AppError::data)?;
            write_graph_files(&args.out, &g)?;
            println!(
                "cumulative {anchor}..{week}: {} nodes, {} edges",
                g.node_count(),
                g.edge_count()
            );
        }
    }
    Ok(())
}
