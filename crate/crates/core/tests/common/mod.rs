//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles here deliberately avoid the library's computation paths:
//! co-occurrence by scanning every record pair, distances by Floyd-Warshall,
//! betweenness by exhaustive simple-path enumeration, clustering by triple
//! enumeration, Spearman by counting ranks and raw Pearson sums.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

use dinet_core::graph::Graph;
use dinet_core::ids::{LocationId, StudentId};
use dinet_core::ingest::{CheckInRecord, CivilDate, EventLog, StudyCalendar, SECONDS_PER_DAY};

pub fn test_calendar(weeks: u32) -> StudyCalendar {
    StudyCalendar::new(CivilDate::new(2013, 1, 6).unwrap(), weeks, [], 0).unwrap()
}

pub fn study_epoch() -> i64 {
    CivilDate::new(2013, 1, 6).unwrap().days_since_epoch() * SECONDS_PER_DAY
}

pub fn sid(i: u32) -> StudentId {
    StudentId::from(format!("s{i:03}"))
}

/// Random event log: `n_records` check-ins over `n_students` students,
/// `n_locations` locations and `span_days` days.
pub fn random_log<R: Rng>(
    rng: &mut R,
    n_students: u32,
    n_locations: u32,
    n_records: usize,
    span_days: i64,
    cal: &StudyCalendar,
) -> EventLog {
    let t0 = study_epoch();
    let records: Vec<CheckInRecord> = (0..n_records)
        .map(|_| CheckInRecord {
            timestamp: t0 + rng.random_range(0..span_days * SECONDS_PER_DAY),
            student: sid(rng.random_range(0..n_students)),
            location: LocationId::from(format!("loc{:02}", rng.random_range(0..n_locations))),
        })
        .collect();
    EventLog::new(records, cal).0
}

/// All-pairs, all-record-pairs co-occurrence oracle.
pub fn brute_force_edges(
    log: &EventLog,
    threshold: u64,
    cal: &StudyCalendar,
) -> BTreeSet<(StudentId, StudentId)> {
    let rs = log.records();
    let mut edges = BTreeSet::new();
    for i in 0..rs.len() {
        for j in (i + 1)..rs.len() {
            let (a, b) = (&rs[i], &rs[j]);
            if a.student == b.student
                || a.location != b.location
                || cal.day_of(a.timestamp) != cal.day_of(b.timestamp)
                || (a.timestamp - b.timestamp).abs() > threshold as i64
            {
                continue;
            }
            let key = if a.student <= b.student {
                (a.student.clone(), b.student.clone())
            } else {
                (b.student.clone(), a.student.clone())
            };
            edges.insert(key);
        }
    }
    edges
}

pub fn edge_set(g: &Graph) -> BTreeSet<(StudentId, StudentId)> {
    g.edge_ids()
        .into_iter()
        .map(|(u, v)| (u.clone(), v.clone()))
        .collect()
}

/// Erdos-Renyi-style random graph; node ids n000.. for present endpoints.
pub fn random_graph<R: Rng>(rng: &mut R, n: u32, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                edges.push((
                    StudentId::from(format!("n{i:03}")),
                    StudentId::from(format!("n{j:03}")),
                ));
            }
        }
    }
    Graph::from_edges(edges)
}

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut adj = vec![vec![false; n]; n];
    for e in 0..g.edge_count() {
        let (u, v) = g.edge_at(e);
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

/// Per-node clustering by enumerating every node triple.
pub fn oracle_local_clustering(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let adj = adjacency_matrix(g);
    let mut tri = vec![0u64; n];
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if adj[a][b] && adj[b][c] && adj[a][c] {
                    tri[a] += 1;
                    tri[b] += 1;
                    tri[c] += 1;
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let k = adj[v].iter().filter(|&&x| x).count();
            if k < 2 {
                0.0
            } else {
                2.0 * tri[v] as f64 / (k * (k - 1)) as f64
            }
        })
        .collect()
}

/// Average clustering by enumerating every node triple.
pub fn oracle_average_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    assert!(n > 0);
    let adj = adjacency_matrix(g);
    let mut tri = vec![0u64; n];
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if adj[a][b] && adj[b][c] && adj[a][c] {
                    tri[a] += 1;
                    tri[b] += 1;
                    tri[c] += 1;
                }
            }
        }
    }
    let mut sum = 0.0;
    for v in 0..n {
        let k = adj[v].iter().filter(|&&x| x).count();
        if k >= 2 {
            sum += 2.0 * tri[v] as f64 / (k * (k - 1)) as f64;
        }
    }
    sum / n as f64
}

/// Component-scaled closeness via Floyd-Warshall distances.
pub fn oracle_closeness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in 0..g.edge_count() {
        let (u, v) = g.edge_at(e);
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let mut reachable = 0u64;
            let mut total = 0u64;
            for (u, &duv) in d[v].iter().enumerate() {
                if u != v && duv < INF {
                    reachable += 1;
                    total += duv;
                }
            }
            if reachable == 0 || n < 2 {
                0.0
            } else {
                let r = reachable as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect()
}

fn all_simple_paths(
    g: &Graph,
    current: usize,
    target: usize,
    visited: &mut Vec<bool>,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current == target {
        out.push(path.clone());
        return;
    }
    for w in g.neighbors(current) {
        if !visited[w] {
            visited[w] = true;
            path.push(w);
            all_simple_paths(g, w, target, visited, path, out);
            path.pop();
            visited[w] = false;
        }
    }
}

/// Betweenness by exhaustive enumeration of all simple paths per pair,
/// keeping only the shortest ones. Exponential; n <= 8 territory.
pub fn oracle_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut score = vec![0.0f64; n];
    if n < 3 {
        return score;
    }
    for s in 0..n {
        for t in (s + 1)..n {
            let mut paths = Vec::new();
            let mut visited = vec![false; n];
            visited[s] = true;
            all_simple_paths(g, s, t, &mut visited, &mut vec![s], &mut paths);
            if paths.is_empty() {
                continue;
            }
            let min_len = paths.iter().map(Vec::len).min().unwrap();
            let shortest: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == min_len).collect();
            let sigma = shortest.len() as f64;
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / sigma;
                }
            }
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64 / 2.0;
    for x in score.iter_mut() {
        *x /= norm;
    }
    score
}

/// Spearman by counting ranks directly and raw Pearson sums.
pub fn oracle_spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank_by_count = |vals: &[f64]| -> Vec<f64> {
        vals.iter()
            .map(|&v| {
                let less = vals.iter().filter(|&&w| w < v).count() as f64;
                let equal = vals.iter().filter(|&&w| w == v).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let rx = rank_by_count(x);
    let ry = rank_by_count(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Kendall's tau-b between two series (ties corrected).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                ties_x += 1;
            }
            if dy == 0.0 {
                ties_y += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as f64;
    let denom = ((n0 - ties_x as f64) * (n0 - ties_y as f64)).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (concordant - discordant) as f64 / denom
}
