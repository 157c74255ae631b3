//! `dinet ingest`: parse check-in logs and report the per-student / per-week
//! record manifest.

use std::path::PathBuf;

use dinet_core::ingest::{parse_checkins, partition_weeks, write_canonical_events, ParsedLog, Partition};
use dinet_core::{IngestFormat, StudyCalendar};

use crate::errors::{AppError, AppResult};
use crate::io_util::{write_text, write_text_or_stdout};
use crate::CalendarArgs;

#[derive(clap::Args, Debug)]
pub struct IngestArgs {
    /// Input file (single-file) or directory (per-student)
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout: per-student or single-file
    #[arg(long)]
    pub format: String,
    #[command(flatten)]
    pub calendar: CalendarArgs,
    /// Write the normalized single-file event log here
    #[arg(long)]
    pub events_out: Option<PathBuf>,
    /// Write the manifest here instead of stdout
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}

const MAX_REJECT_WARNINGS: usize = 20;

/// Manifest rows: summary counts, per-student counts, per-week counts.
pub fn manifest_text(parsed: &ParsedLog, partition: &Partition) -> String {
    let mut out = String::from("kind,id,count\n");
    let mut push = |kind: &str, id: &str, count: usize| {
        out.push_str(&format!("{kind},{id},{count}\n"));
    };
    push("summary", "input_lines", parsed.input_lines);
    push("summary", "accepted", parsed.log.len());
    push("summary", "rejected", parsed.rejects.len());
    push("summary", "duplicates_dropped", parsed.duplicates_dropped);
    push("summary", "excluded_week_records", partition.excluded_records);
    push("summary", "students", parsed.log.student_count());
    for student in parsed.log.students() {
        push("student", student.as_str(), parsed.log.event_count_of(student));
    }
    for slice in &partition.slices {
        push("week", &slice.label.to_string(), slice.log.len());
    }
    out
}

pub fn run(args: &IngestArgs) -> AppResult<()> {
    let cal: StudyCalendar = args.calendar.build()?;
    let format: IngestFormat = crate::config::parse_format(&args.format)?;
    let parsed = parse_checkins(&args.input, format, &cal).map_err(AppError::data)?;
    for reject in parsed.rejects.iter().take(MAX_REJECT_WARNINGS) {
        eprintln!(
            "warning: rejected {}:{}: {}",
            reject.source, reject.line, reject.reason
        );
    }
    if parsed.rejects.len() > MAX_REJECT_WARNINGS {
        eprintln!(
            "warning: {} further rejected lines not shown",
            parsed.rejects.len() - MAX_REJECT_WARNINGS
        );
    }
    if parsed.duplicates_dropped > 0 {
        eprintln!(
            "warning: {} exact duplicate records dropped",
            parsed.duplicates_dropped
        );
    }
    let partition = partition_weeks(&parsed.log, &cal);
    if let Some(events_out) = &args.events_out {
        let mut buf = Vec::new();
        write_canonical_events(&parsed.log, &mut buf)
            .map_err(|e| AppError::Internal(e.to_string()))?;
        write_text(events_out, &String::from_utf8(buf).expect("utf8 events"))?;
    }
    write_text_or_stdout(
        args.manifest_out.as_deref(),
        &manifest_text(&parsed, &partition),
    )
}
