//! `dinet run`: the full pipeline from one config file, producing a
//! reproducible report bundle. Stages consume only files produced by earlier
//! stages (the normalized event log and the graph files), so each stage can
//! also be rerun individually with the standalone subcommands.

use std::fmt::Write as _;
use std::path::PathBuf;

use dinet_core::cooccur::build_cumulative_graph;
use dinet_core::graphio::{label_file_stem, write_edge_list, write_graph};
use dinet_core::ingest::{parse_checkins, partition_weeks, write_canonical_events};
use dinet_core::metrics::topology_series;
use dinet_core::nullmodel::{
    null_clustering_baseline, replicate_seed, NullModelConfig, SwapBudget,
};
use dinet_core::stats::{correlation_table, CorrelationOptions, PValuePolicy};
use dinet_core::CoOccurrenceGraph;

use crate::config::{parse_format, parse_week_list, PipelineConfig};
use crate::errors::{AppError, AppResult};
use crate::io_util::{load_scores, write_text};
use crate::table::{render_csv, render_table};

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    /// Pipeline config file (key = value); flags below override its keys
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub study_start: Option<String>,
    #[arg(long)]
    pub week_count: Option<u32>,
    #[arg(long)]
    pub exclude_weeks: Option<String>,
    #[arg(long)]
    pub tz_offset: Option<i32>,
    #[arg(long)]
    pub threshold: Option<u64>,
    #[arg(long)]
    pub anchor_week: Option<u32>,
    #[arg(long)]
    pub replicates: Option<u32>,
    #[arg(long)]
    pub multiplier: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn resolve_config(args: &RunArgs) -> AppResult<PipelineConfig> {
    let (mut cfg, mut missing) = PipelineConfig::from_file(&args.config)?;
    if let Some(v) = &args.input {
        cfg.input = v.clone();
        missing.retain(|k| k != "input");
    }
    if let Some(v) = &args.format {
        cfg.format = parse_format(v)?;
    }
    if let Some(v) = &args.study_start {
        cfg.study_start = dinet_core::CivilDate::parse(v).map_err(AppError::data)?;
    }
    if let Some(v) = args.week_count {
        cfg.week_count = v;
    }
    if let Some(v) = &args.exclude_weeks {
        cfg.exclude_weeks = parse_week_list(v)?;
    }
    if let Some(v) = args.tz_offset {
        cfg.tz_offset = v;
    }
    if let Some(v) = args.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = args.anchor_week {
        cfg.anchor_week = v;
    }
    if let Some(v) = args.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = args.multiplier {
        cfg.multiplier = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.scores {
        cfg.scores = Some(v.clone());
    }
    if let Some(v) = &args.out {
        cfg.out = v.clone();
        missing.retain(|k| k != "out");
    }
    if !missing.is_empty() {
        return Err(AppError::Usage(format!(
            "config {} lacks required keys {missing:?} (set them in the file or as flags)",
            args.config.display()
        )));
    }
    let label_count = cfg.week_count - cfg.exclude_weeks.len() as u32;
    if cfg.anchor_week == 0 || cfg.anchor_week > label_count {
        return Err(AppError::Data(format!(
            "anchor_week {} outside the labeled weeks 1..={label_count}",
            cfg.anchor_week
        )));
    }
    Ok(cfg)
}

pub fn run(args: &RunArgs) -> AppResult<()> {
    let cfg = resolve_config(args)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| AppError::Internal(format!("mkdir {}: {e}", cfg.out.display())))?;
    // manifest first: the rerun recipe survives any later failure
    write_text(&cfg.out.join("manifest.txt"), &cfg.manifest())?;
    let result = execute(&cfg);
    match result {
        Ok(()) => {
            let failed = cfg.out.join("FAILED");
            if failed.exists() {
                let _ = std::fs::remove_file(failed);
            }
            Ok(())
        }
        Err((stage, err)) => {
            let _ = std::fs::write(cfg.out.join("FAILED"), format!("stage {stage}: {err}\n"));
            Err(err)
        }
    }
}

type StageResult = Result<(), (&'static str, AppError)>;

fn execute(cfg: &PipelineConfig) -> StageResult {
    let fail = |stage: &'static str| move |err: AppError| (stage, err);

    // ingest
    let cal = cfg.calendar().map_err(fail("ingest"))?;
    let parsed =
        parse_checkins(&cfg.input, cfg.format, &cal).map_err(|e| (
            "ingest",
            AppError::data(e),
        ))?;
    if !parsed.rejects.is_empty() {
        eprintln!("warning: ingest rejected {} lines", parsed.rejects.len());
    }
    if parsed.log.is_empty() {
        eprintln!("warning: event log is empty; the report will be empty too");
    }
    let partition = partition_weeks(&parsed.log, &cal);
    let mut events = Vec::new();
    write_canonical_events(&parsed.log, &mut events)
        .map_err(|e| ("ingest", AppError::internal(e)))?;
    write_text(
        &cfg.out.join("events.csv"),
        &String::from_utf8(events).expect("utf8 events"),
    )
    .map_err(fail("ingest"))?;
    write_text(
        &cfg.out.join("ingest_manifest.csv"),
        &super::ingest::manifest_text(&parsed, &partition),
    )
    .map_err(fail("ingest"))?;
    println!(
        "ingest: {} records, {} students, {} rejected",
        parsed.log.len(),
        parsed.log.student_count(),
        parsed.rejects.len()
    );

    // weekly graphs + fig 1A data
    let graphs_dir = cfg.out.join("graphs");
    let mut weekly: Vec<CoOccurrenceGraph> = Vec::new();
    for slice in &partition.slices {
        let g = dinet_core::cooccur::build_week_graph(&slice.log, slice.label, cfg.threshold, &cal);
        write_graph_pair(&graphs_dir, &g).map_err(fail("build"))?;
        weekly.push(g);
    }
    let mut fig1a = String::from("week,nodes,edges,average_degree,average_clustering\n");
    for s in topology_series(&weekly) {
        let week = match s.label {
            dinet_core::GraphLabel::Week(w) => w,
            other => unreachable!("weekly series got {other}"),
        };
        writeln!(
            fig1a,
            "{week},{},{},{},{}",
            s.node_count,
            s.edge_count,
            s.average_degree,
            s.average_clustering
                .map(|c| c.to_string())
                .unwrap_or_default()
        )
        .expect("string write");
    }
    write_text(&cfg.out.join("fig1a.csv"), &fig1a).map_err(fail("build"))?;
    println!("build: {} weekly graphs", weekly.len());

    // null-model baseline + fig 1B data
    let mut fig1b = String::from("week,actual_clustering,null_mean,null_sd,saturated,skipped\n");
    for g in &weekly {
        let week = match g.label {
            dinet_core::GraphLabel::Week(w) => w,
            other => unreachable!("weekly series got {other}"),
        };
        let actual = dinet_core::metrics::average_clustering(g.graph())
            .map(|c| c.to_string())
            .unwrap_or_default();
        if g.edge_count() < 2 {
            eprintln!("warning: week {week}: fewer than 2 edges, null model skipped");
            writeln!(fig1b, "{week},{actual},,,,1").expect("string write");
            continue;
        }
        let null_cfg = NullModelConfig {
            swap_rounds_multiplier: cfg.multiplier,
            replicate_count: cfg.replicates,
            master_seed: replicate_seed(cfg.seed, 1_000_000 + week),
            max_attempts_per_round: cfg.max_attempts,
            budget: if cfg.count_attempts {
                SwapBudget::Attempts
            } else {
                SwapBudget::Acceptances
            },
        };
        let base = null_clustering_baseline(g, &null_cfg)
            .map_err(|e| ("nullmodel", AppError::data(e)))?;
        writeln!(
            fig1b,
            "{week},{actual},{},{},{},0",
            base.mean, base.sd, base.saturated_replicates
        )
        .expect("string write");
    }
    write_text(&cfg.out.join("fig1b.csv"), &fig1b).map_err(fail("nullmodel"))?;
    println!("nullmodel: {} replicates per week", cfg.replicates);

    // cumulative graphs from the anchor week
    let final_label = cal.label_count();
    let mut cumulative: Vec<CoOccurrenceGraph> = Vec::new();
    for week in cfg.anchor_week..=final_label {
        let g = build_cumulative_graph(&parsed.log, cfg.anchor_week, week, cfg.threshold, &cal)
            .map_err(|e| ("build", AppError::data(e)))?;
        write_graph_pair(&graphs_dir, &g).map_err(fail("build"))?;
        cumulative.push(g);
    }
    println!(
        "build: {} cumulative graphs anchored at week {}",
        cumulative.len(),
        cfg.anchor_week
    );

    // correlation table
    let scores = match &cfg.scores {
        Some(path) => Some(load_scores(path).map_err(fail("correlate"))?),
        None => None,
    };
    if let (Some(scores), false) = (&scores, cumulative.is_empty()) {
        let opts = CorrelationOptions {
            missing: cfg.missing,
            pvalue: PValuePolicy::Auto,
        };
        let cells = correlation_table(&cumulative, scores, &cfg.kinds, opts)
            .map_err(|e| ("correlate", AppError::data(e)))?;
        write_text(&cfg.out.join("table1.csv"), &render_csv(&cells)).map_err(fail("correlate"))?;
        write_text(
            &cfg.out.join("table1.txt"),
            &render_table(&cells, &cfg.kinds),
        )
        .map_err(fail("correlate"))?;
        println!("correlate: {} cells", cells.len());
    } else {
        eprintln!("warning: correlation table skipped (no scores or no cumulative graphs)");
    }

    // fig 2 data: layout + scatter at anchor, midpoint, final
    if let (Some(scores), false) = (&scores, cumulative.is_empty()) {
        let fig2 = cfg.out.join("fig2");
        let kind = cfg.kinds.first().copied().unwrap_or(
            dinet_core::CentralityKind::Degree,
        );
        let final_week = cfg.anchor_week + cumulative.len() as u32 - 1;
        let mid = cfg.anchor_week + (final_week - cfg.anchor_week) / 2;
        let mut picks = vec![cfg.anchor_week, mid, final_week];
        picks.dedup();
        for week in picks {
            let g = &cumulative[(week - cfg.anchor_week) as usize];
            if g.node_count() == 0 {
                eprintln!("warning: fig2 week {week} skipped (empty graph)");
                continue;
            }
            super::layout::emit_layout(g, kind, scores, &fig2).map_err(fail("layout"))?;
        }
        println!("layout: fig2 data at weeks {:?}", [cfg.anchor_week, mid, final_week]);
    }

    println!("report bundle written to {}", cfg.out.display());
    Ok(())
}

fn write_graph_pair(dir: &std::path::Path, g: &CoOccurrenceGraph) -> AppResult<()> {
    let stem = label_file_stem(g.label);
    let mut buf = Vec::new();
    write_graph(g, &mut buf).map_err(AppError::internal)?;
    write_text(
        &dir.join(format!("{stem}.graph")),
        &String::from_utf8(buf).expect("utf8 graph"),
    )?;
    let mut buf = Vec::new();
    write_edge_list(g.graph(), &mut buf).map_err(AppError::internal)?;
    write_text(
        &dir.join(format!("{stem}.edges")),
        &String::from_utf8(buf).expect("utf8 edges"),
    )
}
