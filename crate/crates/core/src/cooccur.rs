//! Co-occurrence predicate and graph construction.
//!
//! Two students co-occur when they check in at the same location on the same
//! local day with timestamps at most `threshold` seconds apart (closed
//! inequality). A window's graph has an edge per co-occurring pair and keeps
//! only students with at least one edge.
//!
//! Detection runs per `(location, day)` bucket with a two-pointer sweep over
//! timestamp-sorted records, so it is near-linear per bucket; behavior is
//! identical to the all-pairs scan and is checked against that oracle in the
//! test suite.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::Graph;
use crate::ids::{LocationId, StudentId};
use crate::ingest::{CheckInRecord, EventLog, StudyCalendar};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CooccurError {
    #[error("co-occurrence of a student with itself is undefined ({0})")]
    SelfCoOccurrence(String),
    #[error("invalid week range {from}..={to} (labels run 1..={max})")]
    InvalidRange { from: u32, to: u32, max: u32 },
    #[error("empty student set")]
    EmptyStudentSet,
    #[error("week span must be >= 1")]
    ZeroWeekSpan,
}

/// Which window a graph covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GraphLabel {
    /// One dense week label.
    Week(u32),
    /// Accumulated labels `from..=to`.
    Cumulative { from: u32, to: u32 },
}

impl std::fmt::Display for GraphLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphLabel::Week(w) => write!(f, "week:{w}"),
            GraphLabel::Cumulative { from, to } => write!(f, "cumulative:{from}-{to}"),
        }
    }
}

/// Earliest record pair backing an edge; audit output only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoOccurrenceWitness {
    pub u: StudentId,
    pub v: StudentId,
    pub location: LocationId,
    pub day: i64,
    /// Timestamp of `u`'s record.
    pub t_u: i64,
    /// Timestamp of `v`'s record.
    pub t_v: i64,
}

impl CoOccurrenceWitness {
    pub fn delta_t(&self) -> i64 {
        (self.t_u - self.t_v).abs()
    }
}

/// Undirected simple co-occurrence graph for one window.
#[derive(Debug, Clone)]
pub struct CoOccurrenceGraph {
    pub label: GraphLabel,
    /// Time threshold (seconds) used at build time.
    pub threshold: u64,
    graph: Graph,
}

impl CoOccurrenceGraph {
    pub fn new(label: GraphLabel, threshold: u64, graph: Graph) -> Self {
        CoOccurrenceGraph {
            label,
            threshold,
            graph,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

type PairKey = (StudentId, StudentId);

fn pair_key(a: &StudentId, b: &StudentId) -> PairKey {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Witness ordering: earlier first timestamp, then earlier second timestamp,
/// then location, then day. The minimum is "the earliest qualifying pair".
fn witness_key(w: &CoOccurrenceWitness) -> (i64, i64, LocationId, i64) {
    let (lo, hi) = if w.t_u <= w.t_v {
        (w.t_u, w.t_v)
    } else {
        (w.t_v, w.t_u)
    };
    (lo, hi, w.location.clone(), w.day)
}

fn offer_witness(map: &mut BTreeMap<PairKey, CoOccurrenceWitness>, key: PairKey, cand: CoOccurrenceWitness) {
    match map.get_mut(&key) {
        None => {
            map.insert(key, cand);
        }
        Some(existing) => {
            if witness_key(&cand) < witness_key(existing) {
                *existing = cand;
            }
        }
    }
}

/// Sweep all `(location, day)` buckets of `log` and collect one earliest
/// witness per co-occurring pair.
fn collect_pairs(log: &EventLog, threshold: u64) -> BTreeMap<PairKey, CoOccurrenceWitness> {
    let mut pairs: BTreeMap<PairKey, CoOccurrenceWitness> = BTreeMap::new();
    for ((location, day), indices) in log.buckets() {
        sweep_bucket(
            &mut pairs,
            location,
            *day,
            indices.iter().map(|&i| log.record(i)),
            threshold,
        );
    }
    pairs
}

fn sweep_bucket<'a, I>(
    pairs: &mut BTreeMap<PairKey, CoOccurrenceWitness>,
    location: &LocationId,
    day: i64,
    records: I,
    threshold: u64,
) where
    I: Iterator<Item = &'a CheckInRecord>,
{
    let records: Vec<&CheckInRecord> = records.collect();
    debug_assert!(records.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    let mut left = 0usize;
    for right in 0..records.len() {
        let t_right = records[right].timestamp;
        let cutoff = t_right.saturating_sub(threshold.min(i64::MAX as u64) as i64);
        while records[left].timestamp < cutoff {
            left += 1;
        }
        for i in left..right {
            let (a, b) = (records[i], records[right]);
            if a.student == b.student {
                continue;
            }
            let key = pair_key(&a.student, &b.student);
            let (t_u, t_v) = if a.student <= b.student {
                (a.timestamp, b.timestamp)
            } else {
                (b.timestamp, a.timestamp)
            };
            offer_witness(
                pairs,
                key.clone(),
                CoOccurrenceWitness {
                    u: key.0,
                    v: key.1,
                    location: location.clone(),
                    day,
                    t_u,
                    t_v,
                },
            );
        }
    }
}

/// Decide whether two students' event lists co-occur; `Some(witness)` means
/// yes, with the earliest qualifying pair. Both lists must be timestamp
/// sorted and belong to distinct students.
pub fn cooccurs(
    u_events: &[CheckInRecord],
    v_events: &[CheckInRecord],
    threshold: u64,
    cal: &StudyCalendar,
) -> Result<Option<CoOccurrenceWitness>, CooccurError> {
    if let (Some(a), Some(b)) = (u_events.first(), v_events.first()) {
        if a.student == b.student {
            return Err(CooccurError::SelfCoOccurrence(a.student.to_string()));
        }
    }
    let mut buckets: BTreeMap<(LocationId, i64), Vec<&CheckInRecord>> = BTreeMap::new();
    for r in u_events.iter().chain(v_events) {
        buckets
            .entry((r.location.clone(), cal.day_of(r.timestamp)))
            .or_default()
            .push(r);
    }
    let mut pairs = BTreeMap::new();
    for ((location, day), mut records) in buckets {
        records.sort_by_key(|r| r.timestamp);
        sweep_bucket(&mut pairs, &location, day, records.into_iter(), threshold);
    }
    Ok(pairs.into_values().next())
}

/// Build the co-occurrence graph of one weekly slice.
pub fn build_week_graph(
    slice: &EventLog,
    week_label: u32,
    threshold: u64,
    _cal: &StudyCalendar,
) -> CoOccurrenceGraph {
    let pairs = collect_pairs(slice, threshold);
    CoOccurrenceGraph::new(
        GraphLabel::Week(week_label),
        threshold,
        Graph::from_edges(pairs.into_keys()),
    )
}

/// Weekly graph plus the per-edge witness audit list.
pub fn build_week_graph_with_witnesses(
    slice: &EventLog,
    week_label: u32,
    threshold: u64,
    _cal: &StudyCalendar,
) -> (CoOccurrenceGraph, Vec<CoOccurrenceWitness>) {
    let pairs = collect_pairs(slice, threshold);
    let witnesses: Vec<CoOccurrenceWitness> = pairs.values().cloned().collect();
    let g = CoOccurrenceGraph::new(
        GraphLabel::Week(week_label),
        threshold,
        Graph::from_edges(pairs.into_keys()),
    );
    (g, witnesses)
}

/// Build the cumulative graph over dense week labels `from..=to`; equals the
/// weekly builder applied to the concatenation of those slices.
pub fn build_cumulative_graph(
    log: &EventLog,
    from: u32,
    to: u32,
    threshold: u64,
    cal: &StudyCalendar,
) -> Result<CoOccurrenceGraph, CooccurError> {
    let max = cal.label_count();
    if from == 0 || to == 0 || from > to || to > max {
        return Err(CooccurError::InvalidRange { from, to, max });
    }
    let records: Vec<CheckInRecord> = log
        .records()
        .iter()
        .filter(|r| {
            cal.raw_week_of(r.timestamp)
                .and_then(|raw| cal.label_of_raw(raw))
                .is_some_and(|label| label >= from && label <= to)
        })
        .cloned()
        .collect();
    let (slice, _) = EventLog::new(records, cal);
    let pairs = collect_pairs(&slice, threshold);
    Ok(CoOccurrenceGraph::new(
        GraphLabel::Cumulative { from, to },
        threshold,
        Graph::from_edges(pairs.into_keys()),
    ))
}

/// Average dining events per student per week over the given students.
pub fn mean_dining_count(
    log: &EventLog,
    students: &BTreeSet<StudentId>,
    weeks: u32,
) -> Result<f64, CooccurError> {
    if students.is_empty() {
        return Err(CooccurError::EmptyStudentSet);
    }
    if weeks == 0 {
        return Err(CooccurError::ZeroWeekSpan);
    }
    let total: usize = students.iter().map(|s| log.event_count_of(s)).sum();
    Ok(total as f64 / (students.len() as f64 * weeks as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CivilDate, SECONDS_PER_DAY};

    fn cal() -> StudyCalendar {
        StudyCalendar::new(CivilDate::new(2013, 1, 6).unwrap(), 21, [], 0).unwrap()
    }

    fn t0() -> i64 {
        CivilDate::new(2013, 1, 6).unwrap().days_since_epoch() * SECONDS_PER_DAY
    }

    fn rec(student: &str, ts: i64, loc: &str) -> CheckInRecord {
        CheckInRecord {
            timestamp: ts,
            student: StudentId::from(student),
            location: LocationId::from(loc),
        }
    }

    fn log_of(records: Vec<CheckInRecord>) -> EventLog {
        EventLog::new(records, &cal()).0
    }

    #[test]
    fn boundary_delta_equal_t_is_edge() {
        let c = cal();
        let u = vec![rec("u", t0() + 1000, "A")];
        let v = vec![rec("v", t0() + 1000 + 1200, "A")];
        let w = cooccurs(&u, &v, 1200, &c).unwrap();
        assert!(w.is_some());
        assert_eq!(w.unwrap().delta_t(), 1200);
        // one second past the threshold: no edge
        let v2 = vec![rec("v", t0() + 1000 + 1201, "A")];
        assert!(cooccurs(&u, &v2, 1200, &c).unwrap().is_none());
    }

    #[test]
    fn location_mismatch_is_not_cooccurrence() {
        let c = cal();
        let u = vec![rec("u", t0() + 500, "A")];
        let v = vec![rec("v", t0() + 500, "B")];
        assert!(cooccurs(&u, &v, 1200, &c).unwrap().is_none());
    }

    #[test]
    fn day_boundary_splits_pair() {
        // 23:55 and 00:05 next day, same location, well within T
        let c = cal();
        let u = vec![rec("u", t0() + SECONDS_PER_DAY - 300, "A")];
        let v = vec![rec("v", t0() + SECONDS_PER_DAY + 300, "A")];
        assert!(cooccurs(&u, &v, 1200, &c).unwrap().is_none());
    }

    #[test]
    fn self_cooccurrence_is_error() {
        let c = cal();
        let u = vec![rec("u", t0() + 10, "A")];
        assert_eq!(
            cooccurs(&u, &u, 1200, &c),
            Err(CooccurError::SelfCoOccurrence("u".into()))
        );
    }

    #[test]
    fn symmetry() {
        let c = cal();
        let u = vec![rec("u", t0() + 100, "A"), rec("u", t0() + 9000, "B")];
        let v = vec![rec("v", t0() + 700, "A")];
        let a = cooccurs(&u, &v, 1200, &c).unwrap();
        let b = cooccurs(&v, &u, 1200, &c).unwrap();
        assert_eq!(a.is_some(), b.is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn earliest_witness_returned() {
        let c = cal();
        let u = vec![rec("u", t0() + 100, "A"), rec("u", t0() + 5000, "A")];
        let v = vec![rec("v", t0() + 600, "A"), rec("v", t0() + 5200, "A")];
        let w = cooccurs(&u, &v, 1200, &c).unwrap().unwrap();
        assert_eq!((w.t_u, w.t_v), (t0() + 100, t0() + 600));
    }

    #[test]
    fn triangle_from_three_students_within_t() {
        let c = cal();
        let g = build_week_graph(
            &log_of(vec![
                rec("a", t0() + 100, "A"),
                rec("b", t0() + 200, "A"),
                rec("c", t0() + 300, "A"),
            ]),
            1,
            1200,
            &c,
        );
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn isolated_student_omitted() {
        let c = cal();
        let g = build_week_graph(
            &log_of(vec![
                rec("u", t0() + 100, "A"),
                rec("v", t0() + 200, "A"),
                rec("w", t0() + 100, "B"), // dines alone elsewhere
            ]),
            1,
            1200,
            &c,
        );
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.graph().index_of(&StudentId::from("w")).is_none());
    }

    #[test]
    fn empty_slice_yields_empty_graph() {
        let c = cal();
        let g = build_week_graph(&log_of(vec![]), 1, 1200, &c);
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn cumulative_single_week_equals_week_graph() {
        let c = cal();
        let log = log_of(vec![
            rec("a", t0() + 100, "A"),
            rec("b", t0() + 200, "A"),
            rec("c", t0() + 7 * SECONDS_PER_DAY + 100, "B"),
            rec("d", t0() + 7 * SECONDS_PER_DAY + 150, "B"),
        ]);
        let week2 = {
            let p = crate::ingest::partition_weeks(&log, &c);
            build_week_graph(&p.slices[1].log, 2, 1200, &c)
        };
        let cum = build_cumulative_graph(&log, 2, 2, 1200, &c).unwrap();
        assert_eq!(cum.graph().edge_ids(), week2.graph().edge_ids());
    }

    #[test]
    fn cumulative_monotone_in_range() {
        let c = cal();
        let log = log_of(vec![
            rec("a", t0() + 100, "A"),
            rec("b", t0() + 200, "A"),
            rec("c", t0() + 14 * SECONDS_PER_DAY + 100, "B"),
            rec("d", t0() + 14 * SECONDS_PER_DAY + 150, "B"),
        ]);
        let g13 = build_cumulative_graph(&log, 1, 3, 1200, &c).unwrap();
        let g11 = build_cumulative_graph(&log, 1, 1, 1200, &c).unwrap();
        for (u, v) in g11.graph().edge_ids() {
            let iu = g13.graph().index_of(u).unwrap();
            let iv = g13.graph().index_of(v).unwrap();
            assert!(g13.graph().contains_edge(iu, iv));
        }
        assert_eq!(g13.edge_count(), 2);
    }

    #[test]
    fn cumulative_invalid_range_rejected() {
        let c = cal();
        let log = log_of(vec![]);
        assert!(matches!(
            build_cumulative_graph(&log, 3, 2, 1200, &c),
            Err(CooccurError::InvalidRange { .. })
        ));
        assert!(matches!(
            build_cumulative_graph(&log, 1, 99, 1200, &c),
            Err(CooccurError::InvalidRange { .. })
        ));
    }

    #[test]
    fn mean_dining_count_basics() {
        let c = cal();
        let mut records = Vec::new();
        for i in 0..7 {
            records.push(rec("u", t0() + i * 3600, "A"));
        }
        let log = EventLog::new(records, &c).0;
        let one: BTreeSet<StudentId> = [StudentId::from("u")].into();
        assert_eq!(mean_dining_count(&log, &one, 1).unwrap(), 7.0);

        let mut records = Vec::new();
        for i in 0..10 {
            records.push(rec("u", t0() + i * 3600, "A"));
        }
        for i in 0..4 {
            records.push(rec("v", t0() + i * 3600, "B"));
        }
        let log = EventLog::new(records, &c).0;
        let two: BTreeSet<StudentId> = [StudentId::from("u"), StudentId::from("v")].into();
        assert_eq!(mean_dining_count(&log, &two, 1).unwrap(), 7.0);

        assert_eq!(
            mean_dining_count(&log, &BTreeSet::new(), 1),
            Err(CooccurError::EmptyStudentSet)
        );
    }
}
