//! Check-in log ingestion: parsing, validation, and weekly partitioning.
//!
//! A check-in is `(student, timestamp, location)`. The study calendar maps
//! timestamps to local day indices and 1-based raw week indices; excluded
//! weeks (holidays) are dropped at partition time and the remaining weeks are
//! renumbered densely, e.g. with 21 raw weeks and week 11 excluded the output
//! labels are 1..=20 and label 11 holds raw-week-12 events.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::ids::{LocationId, StudentId};

pub const SECONDS_PER_DAY: i64 = 86_400;
pub const DAYS_PER_WEEK: i64 = 7;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: missing header line")]
    MissingHeader { path: String },
    #[error("{path}: header has no '{column}' column")]
    MissingColumn { path: String, column: &'static str },
    #[error("{0} is not a directory (per-student format expects one file per student)")]
    NotADirectory(String),
    #[error("invalid calendar: {0}")]
    Calendar(String),
}

/// A calendar date, used for the study start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CivilDate {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

impl CivilDate {
    pub fn new(year: i32, month: u32, day: u32) -> Result<Self, IngestError> {
        if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
            return Err(IngestError::Calendar(format!(
                "invalid date {year:04}-{month:02}-{day:02}"
            )));
        }
        Ok(CivilDate { year, month, day })
    }

    /// Parse `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Result<Self, IngestError> {
        let mut it = s.split('-');
        let (y, m, d) = (it.next(), it.next(), it.next());
        match (y, m, d, it.next()) {
            (Some(y), Some(m), Some(d), None) => {
                let year = y
                    .parse()
                    .map_err(|_| IngestError::Calendar(format!("bad date {s:?}")))?;
                let month = m
                    .parse()
                    .map_err(|_| IngestError::Calendar(format!("bad date {s:?}")))?;
                let day = d
                    .parse()
                    .map_err(|_| IngestError::Calendar(format!("bad date {s:?}")))?;
                CivilDate::new(year, month, day)
            }
            _ => Err(IngestError::Calendar(format!(
                "bad date {s:?}, expected YYYY-MM-DD"
            ))),
        }
    }

    /// Days since 1970-01-01 (proleptic Gregorian).
    pub fn days_since_epoch(&self) -> i64 {
        let y = if self.month <= 2 {
            self.year as i64 - 1
        } else {
            self.year as i64
        };
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let mp = if self.month > 2 {
            self.month - 3
        } else {
            self.month + 9
        } as i64;
        let doy = (153 * mp + 2) / 5 + self.day as i64 - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }
}

impl fmt::Display for CivilDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// Study calendar: start date, number of raw 7-day weeks, excluded raw week
/// indices, and a fixed UTC offset for local day boundaries.
///
/// Week windows are half-open `[start, start + 7d)`. Raw week indices are
/// 1-based. Timestamps are interpreted as seconds since the Unix epoch;
/// `timezone_offset` is added before computing day boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudyCalendar {
    study_start: CivilDate,
    start_day: i64,
    week_count: u32,
    excluded: BTreeSet<u32>,
    timezone_offset: i32,
}

impl StudyCalendar {
    pub fn new(
        study_start: CivilDate,
        week_count: u32,
        excluded_week_indices: impl IntoIterator<Item = u32>,
        timezone_offset: i32,
    ) -> Result<Self, IngestError> {
        if week_count == 0 {
            return Err(IngestError::Calendar("week_count must be >= 1".into()));
        }
        let excluded: BTreeSet<u32> = excluded_week_indices.into_iter().collect();
        if let Some(&bad) = excluded.iter().find(|&&w| w == 0 || w > week_count) {
            return Err(IngestError::Calendar(format!(
                "excluded week {bad} outside 1..={week_count}"
            )));
        }
        Ok(StudyCalendar {
            study_start,
            start_day: study_start.days_since_epoch(),
            week_count,
            excluded,
            timezone_offset,
        })
    }

    pub fn study_start(&self) -> CivilDate {
        self.study_start
    }

    pub fn week_count(&self) -> u32 {
        self.week_count
    }

    pub fn excluded_weeks(&self) -> impl Iterator<Item = u32> + '_ {
        self.excluded.iter().copied()
    }

    pub fn timezone_offset(&self) -> i32 {
        self.timezone_offset
    }

    /// Local calendar day index of a timestamp, day 0 starting at local
    /// midnight of the study start date.
    pub fn day_of(&self, timestamp: i64) -> i64 {
        (timestamp + self.timezone_offset as i64).div_euclid(SECONDS_PER_DAY) - self.start_day
    }

    /// 1-based raw week index, or None if the timestamp falls outside
    /// `[study_start, study_start + week_count * 7d)` local time.
    pub fn raw_week_of(&self, timestamp: i64) -> Option<u32> {
        let day = self.day_of(timestamp);
        if day < 0 || day >= self.week_count as i64 * DAYS_PER_WEEK {
            return None;
        }
        Some((day / DAYS_PER_WEEK) as u32 + 1)
    }

    pub fn in_range(&self, timestamp: i64) -> bool {
        self.raw_week_of(timestamp).is_some()
    }

    pub fn is_excluded(&self, raw_week: u32) -> bool {
        self.excluded.contains(&raw_week)
    }

    /// Dense 1-based label of a non-excluded raw week.
    pub fn label_of_raw(&self, raw_week: u32) -> Option<u32> {
        if raw_week == 0 || raw_week > self.week_count || self.is_excluded(raw_week) {
            return None;
        }
        let skipped = self.excluded.iter().filter(|&&w| w < raw_week).count() as u32;
        Some(raw_week - skipped)
    }

    /// Raw week index carrying a given dense label.
    pub fn raw_of_label(&self, label: u32) -> Option<u32> {
        (1..=self.week_count).find(|&raw| self.label_of_raw(raw) == Some(label))
    }

    /// Number of labeled (non-excluded) weeks.
    pub fn label_count(&self) -> u32 {
        self.week_count - self.excluded.len() as u32
    }
}

/// One dining check-in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckInRecord {
    pub timestamp: i64,
    pub student: StudentId,
    pub location: LocationId,
}

/// Immutable, indexed collection of accepted check-ins.
///
/// Records are sorted by `(timestamp, student, location)`; exact duplicate
/// triples are dropped at construction (repeat check-ins with distinct
/// timestamps are kept). Safe to share read-only across threads.
#[derive(Debug, Clone)]
pub struct EventLog {
    records: Vec<CheckInRecord>,
    per_student: BTreeMap<StudentId, Vec<usize>>,
    per_location_day: BTreeMap<(LocationId, i64), Vec<usize>>,
}

impl EventLog {
    /// Build the log. Returns the number of exact-duplicate records dropped.
    pub fn new(mut records: Vec<CheckInRecord>, cal: &StudyCalendar) -> (Self, usize) {
        records.sort();
        let before = records.len();
        records.dedup();
        let duplicates = before - records.len();

        let mut per_student: BTreeMap<StudentId, Vec<usize>> = BTreeMap::new();
        let mut per_location_day: BTreeMap<(LocationId, i64), Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            per_student.entry(r.student.clone()).or_default().push(i);
            per_location_day
                .entry((r.location.clone(), cal.day_of(r.timestamp)))
                .or_default()
                .push(i);
        }
        (
            EventLog {
                records,
                per_student,
                per_location_day,
            },
            duplicates,
        )
    }

    pub fn empty(cal: &StudyCalendar) -> Self {
        EventLog::new(Vec::new(), cal).0
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[CheckInRecord] {
        &self.records
    }

    pub fn students(&self) -> impl Iterator<Item = &StudentId> {
        self.per_student.keys()
    }

    pub fn student_count(&self) -> usize {
        self.per_student.len()
    }

    /// Records of one student, in timestamp order.
    pub fn events_of(&self, student: &StudentId) -> impl Iterator<Item = &CheckInRecord> {
        self.per_student
            .get(student)
            .into_iter()
            .flatten()
            .map(|&i| &self.records[i])
    }

    pub fn event_count_of(&self, student: &StudentId) -> usize {
        self.per_student.get(student).map_or(0, Vec::len)
    }

    /// Same-(location, local day) buckets, each in timestamp order.
    pub fn buckets(&self) -> impl Iterator<Item = (&(LocationId, i64), &[usize])> {
        self.per_location_day.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn record(&self, idx: usize) -> &CheckInRecord {
        &self.records[idx]
    }
}

/// Why a line was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    FieldCount { expected: usize, got: usize },
    BadTimestamp(String),
    OutOfRange(i64),
    EmptyField(&'static str),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::FieldCount { expected, got } => {
                write!(f, "expected {expected} fields, got {got}")
            }
            RejectReason::BadTimestamp(s) => write!(f, "bad timestamp {s:?}"),
            RejectReason::OutOfRange(ts) => write!(f, "timestamp {ts} outside study range"),
            RejectReason::EmptyField(name) => write!(f, "empty {name}"),
        }
    }
}

/// One rejected input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedLine {
    pub source: String,
    pub line: usize,
    pub reason: RejectReason,
}

/// Result of a parse run: the accepted log plus an audit trail that satisfies
/// `accepted + rejected + duplicates_dropped == input_lines`.
#[derive(Debug)]
pub struct ParsedLog {
    pub log: EventLog,
    pub rejects: Vec<RejectedLine>,
    pub duplicates_dropped: usize,
    pub input_lines: usize,
}

/// On-disk layout of the check-in data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestFormat {
    /// Directory with one delimited file per student; the file stem is the
    /// student id and each file has a `timestamp,location` header.
    PerStudent,
    /// Single delimited file with a `student_id,timestamp,location` header.
    SingleFile,
}

impl fmt::Display for IngestFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestFormat::PerStudent => f.write_str("per-student"),
            IngestFormat::SingleFile => f.write_str("single-file"),
        }
    }
}

struct Columns {
    delimiter: char,
    timestamp: usize,
    location: usize,
    student: Option<usize>,
    width: usize,
}

fn detect_columns(
    header: &str,
    need_student: bool,
    source: &str,
) -> Result<Columns, IngestError> {
    let delimiter = if header.contains('\t') { '\t' } else { ',' };
    let names: Vec<String> = header
        .split(delimiter)
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let find = |cands: &[&str]| {
        names
            .iter()
            .position(|n| cands.contains(&n.as_str()))
    };
    let timestamp = find(&["timestamp", "time", "ts"]).ok_or(IngestError::MissingColumn {
        path: source.to_string(),
        column: "timestamp",
    })?;
    let location =
        find(&["location", "location_id", "loc"]).ok_or(IngestError::MissingColumn {
            path: source.to_string(),
            column: "location",
        })?;
    let student = find(&["student", "student_id"]);
    if need_student && student.is_none() {
        return Err(IngestError::MissingColumn {
            path: source.to_string(),
            column: "student_id",
        });
    }
    Ok(Columns {
        delimiter,
        timestamp,
        location,
        student,
        width: names.len(),
    })
}

fn parse_timestamp(field: &str) -> Option<i64> {
    let t = field.trim();
    if let Ok(v) = t.parse::<i64>() {
        return Some(v);
    }
    // Sub-second input is truncated toward negative infinity.
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v.floor() as i64),
        _ => None,
    }
}

struct LineAccumulator {
    records: Vec<CheckInRecord>,
    rejects: Vec<RejectedLine>,
    input_lines: usize,
}

impl LineAccumulator {
    fn new() -> Self {
        LineAccumulator {
            records: Vec::new(),
            rejects: Vec::new(),
            input_lines: 0,
        }
    }

    fn consume<R: BufRead>(
        &mut self,
        reader: R,
        source: &str,
        fixed_student: Option<&StudentId>,
        cal: &StudyCalendar,
    ) -> Result<(), IngestError> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, Ok(l))) if l.trim().is_empty() => continue,
                Some((_, Ok(l))) => break l,
                Some((_, Err(source_err))) => {
                    return Err(IngestError::Io {
                        path: source.to_string(),
                        source: source_err,
                    })
                }
                None => {
                    // Empty file: zero records, zero rejects.
                    return Ok(());
                }
            }
        };
        let cols = detect_columns(&header, fixed_student.is_none(), source)?;

        for (idx, line) in lines {
            let line = line.map_err(|e| IngestError::Io {
                path: source.to_string(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            self.input_lines += 1;
            let lineno = idx + 1; // 1-based, including the header line
            let fields: Vec<&str> = line.split(cols.delimiter).collect();
            let reject = |reason: RejectReason, rejects: &mut Vec<RejectedLine>| {
                rejects.push(RejectedLine {
                    source: source.to_string(),
                    line: lineno,
                    reason,
                });
            };
            if fields.len() != cols.width {
                reject(
                    RejectReason::FieldCount {
                        expected: cols.width,
                        got: fields.len(),
                    },
                    &mut self.rejects,
                );
                continue;
            }
            let ts = match parse_timestamp(fields[cols.timestamp]) {
                Some(ts) => ts,
                None => {
                    reject(
                        RejectReason::BadTimestamp(fields[cols.timestamp].trim().to_string()),
                        &mut self.rejects,
                    );
                    continue;
                }
            };
            if !cal.in_range(ts) {
                reject(RejectReason::OutOfRange(ts), &mut self.rejects);
                continue;
            }
            let location = fields[cols.location].trim();
            if location.is_empty() {
                reject(RejectReason::EmptyField("location"), &mut self.rejects);
                continue;
            }
            let student = match fixed_student {
                Some(s) => s.clone(),
                None => {
                    let raw = fields[cols.student.expect("checked")].trim();
                    if raw.is_empty() {
                        reject(RejectReason::EmptyField("student_id"), &mut self.rejects);
                        continue;
                    }
                    StudentId::from(raw)
                }
            };
            self.records.push(CheckInRecord {
                timestamp: ts,
                student,
                location: LocationId::from(location),
            });
        }
        Ok(())
    }
}

/// Parse check-in data from disk in the declared format.
pub fn parse_checkins(
    path: &Path,
    format: IngestFormat,
    cal: &StudyCalendar,
) -> Result<ParsedLog, IngestError> {
    let mut acc = LineAccumulator::new();
    match format {
        IngestFormat::SingleFile => {
            let file = File::open(path).map_err(|e| IngestError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            acc.consume(BufReader::new(file), &path.display().to_string(), None, cal)?;
        }
        IngestFormat::PerStudent => {
            if !path.is_dir() {
                return Err(IngestError::NotADirectory(path.display().to_string()));
            }
            let mut entries: Vec<std::path::PathBuf> = std::fs::read_dir(path)
                .map_err(|e| IngestError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.is_file())
                .filter(|p| {
                    !p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with('.'))
                })
                .collect();
            entries.sort();
            for entry in entries {
                let stem = entry
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                if stem.is_empty() {
                    continue;
                }
                let student = StudentId::from(stem);
                let file = File::open(&entry).map_err(|e| IngestError::Io {
                    path: entry.display().to_string(),
                    source: e,
                })?;
                acc.consume(
                    BufReader::new(file),
                    &entry.display().to_string(),
                    Some(&student),
                    cal,
                )?;
            }
        }
    }
    let (log, duplicates_dropped) = EventLog::new(acc.records, cal);
    Ok(ParsedLog {
        log,
        rejects: acc.rejects,
        duplicates_dropped,
        input_lines: acc.input_lines,
    })
}

/// Parse a single in-memory source; `student` fixes the student id (per-student
/// layout), otherwise a student column is required.
pub fn parse_checkins_reader<R: BufRead>(
    reader: R,
    source: &str,
    student: Option<&StudentId>,
    cal: &StudyCalendar,
) -> Result<ParsedLog, IngestError> {
    let mut acc = LineAccumulator::new();
    acc.consume(reader, source, student, cal)?;
    let (log, duplicates_dropped) = EventLog::new(acc.records, cal);
    Ok(ParsedLog {
        log,
        rejects: acc.rejects,
        duplicates_dropped,
        input_lines: acc.input_lines,
    })
}

/// Write the canonical single-file form (itself valid `single-file` input).
pub fn write_canonical_events<W: Write>(log: &EventLog, mut w: W) -> std::io::Result<()> {
    writeln!(w, "student_id,timestamp,location_id")?;
    for r in log.records() {
        writeln!(w, "{},{},{}", r.student, r.timestamp, r.location)?;
    }
    Ok(())
}

/// One labeled week of events.
#[derive(Debug)]
pub struct WeekSlice {
    pub label: u32,
    pub raw_week: u32,
    pub log: EventLog,
}

/// Outcome of `partition_weeks`.
#[derive(Debug)]
pub struct Partition {
    /// One slice per non-excluded week label, in label order; weeks with no
    /// events yield empty slices.
    pub slices: Vec<WeekSlice>,
    /// Events falling in excluded raw weeks, dropped.
    pub excluded_records: usize,
    /// Events outside the calendar range (only possible when the log was not
    /// built by `parse_checkins` against the same calendar), dropped.
    pub out_of_range_records: usize,
}

/// Split a log into dense-labeled weekly slices, dropping excluded weeks.
pub fn partition_weeks(log: &EventLog, cal: &StudyCalendar) -> Partition {
    let mut by_label: BTreeMap<u32, Vec<CheckInRecord>> = BTreeMap::new();
    for label in 1..=cal.label_count() {
        by_label.insert(label, Vec::new());
    }
    let mut excluded = 0usize;
    let mut out_of_range = 0usize;
    for r in log.records() {
        match cal.raw_week_of(r.timestamp) {
            None => out_of_range += 1,
            Some(raw) => match cal.label_of_raw(raw) {
                None => excluded += 1,
                Some(label) => by_label.get_mut(&label).expect("label in range").push(r.clone()),
            },
        }
    }
    let slices = by_label
        .into_iter()
        .map(|(label, records)| WeekSlice {
            label,
            raw_week: cal.raw_of_label(label).expect("label maps to a raw week"),
            log: EventLog::new(records, cal).0,
        })
        .collect();
    Partition {
        slices,
        excluded_records: excluded,
        out_of_range_records: out_of_range,
    }
}
