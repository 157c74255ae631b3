//! Trait scores, rank statistics, and correlation tables.
//!
//! Spearman's rho is the Pearson correlation of tie-averaged ranks (the
//! general form, valid under ties). Two-sided p-values come from exact
//! enumeration of all rank permutations for small samples, from the
//! t-approximation `t = rho * sqrt((n-2)/(1-rho^2))` with `n-2` degrees of
//! freedom otherwise, or from seeded Monte-Carlo permutation on request.

use std::collections::BTreeMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::cooccur::{CoOccurrenceGraph, GraphLabel};
use crate::ids::StudentId;
use crate::metrics::{centrality, CentralityKind, CentralityVector};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: x has {x}, y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("correlation undefined on a constant series")]
    ConstantSeries,
    #[error("exact permutation p-value limited to n <= {max}, got {n}")]
    ExactTooLarge { n: usize, max: usize },
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("student {student}: {field} = {value} outside the 8..=56 scale")]
    ScoreOutOfBounds {
        student: String,
        field: &'static str,
        value: i64,
    },
    #[error("no students with trait scores")]
    EmptyRoster,
}

/// Two administrations of the trait scale for one student; scores run 8..=56.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraitRecord {
    pub f1: i64,
    pub f2: i64,
}

impl TraitRecord {
    pub fn delta_f(&self) -> i64 {
        self.f2 - self.f1
    }
}

/// Which trait value a correlation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraitField {
    F1,
    F2,
    DeltaF,
}

impl TraitField {
    pub const ALL: [TraitField; 3] = [TraitField::F1, TraitField::F2, TraitField::DeltaF];

    pub fn value(self, rec: &TraitRecord) -> i64 {
        match self {
            TraitField::F1 => rec.f1,
            TraitField::F2 => rec.f2,
            TraitField::DeltaF => rec.delta_f(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TraitField::F1 => "F1",
            TraitField::F2 => "F2",
            TraitField::DeltaF => "dF",
        }
    }
}

pub const SCALE_MIN: i64 = 8;
pub const SCALE_MAX: i64 = 56;

/// Per-student trait scores.
#[derive(Debug, Clone, Default)]
pub struct TraitScores {
    scores: BTreeMap<StudentId, TraitRecord>,
}

impl TraitScores {
    pub fn new() -> Self {
        TraitScores::default()
    }

    pub fn insert(&mut self, student: StudentId, f1: i64, f2: i64) -> Result<(), StatsError> {
        for (field, value) in [("F1", f1), ("F2", f2)] {
            if !(SCALE_MIN..=SCALE_MAX).contains(&value) {
                return Err(StatsError::ScoreOutOfBounds {
                    student: student.to_string(),
                    field,
                    value,
                });
            }
        }
        self.scores.insert(student, TraitRecord { f1, f2 });
        Ok(())
    }

    pub fn get(&self, student: &StudentId) -> Option<&TraitRecord> {
        self.scores.get(student)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn students(&self) -> impl Iterator<Item = &StudentId> {
        self.scores.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StudentId, &TraitRecord)> {
        self.scores.iter()
    }

    /// Read `student_id,F1,F2` delimited text (tab or comma, detected from
    /// the header). Out-of-scale values and malformed lines are fatal.
    pub fn read_delimited<R: BufRead>(reader: R, source_name: &str) -> Result<Self, StatsError> {
        let mut out = TraitScores::new();
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, Ok(l))) if l.trim().is_empty() => continue,
                Some((i, Ok(l))) => break (i, l),
                Some((i, Err(e))) => {
                    return Err(StatsError::Parse {
                        source_name: source_name.to_string(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
                None => return Ok(out),
            }
        };
        let delim = if header.1.contains('\t') { '\t' } else { ',' };
        let names: Vec<String> = header
            .1
            .split(delim)
            .map(|c| c.trim().to_ascii_lowercase())
            .collect();
        let col = |cands: &[&str]| names.iter().position(|n| cands.contains(&n.as_str()));
        let (si, f1i, f2i) = match (
            col(&["student_id", "student", "id"]),
            col(&["f1"]),
            col(&["f2"]),
        ) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(StatsError::Parse {
                    source_name: source_name.to_string(),
                    line: header.0 + 1,
                    message: "header must name student_id, F1, F2 columns".to_string(),
                })
            }
        };
        for (i, line) in lines {
            let line = line.map_err(|e| StatsError::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| StatsError::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split(delim).collect();
            if fields.len() != names.len() {
                return Err(parse_err(format!(
                    "expected {} fields, got {}",
                    names.len(),
                    fields.len()
                )));
            }
            let student = fields[si].trim();
            if student.is_empty() {
                return Err(parse_err("empty student_id".to_string()));
            }
            let f1: i64 = fields[f1i]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad F1 {:?}", fields[f1i].trim())))?;
            let f2: i64 = fields[f2i]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad F2 {:?}", fields[f2i].trim())))?;
            out.insert(StudentId::from(student), f1, f2)?;
        }
        Ok(out)
    }

    pub fn write_delimited<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "student_id,F1,F2")?;
        for (s, r) in self.iter() {
            writeln!(w, "{s},{},{}", r.f1, r.f2)?;
        }
        Ok(())
    }
}

/// Average (fractional) ranks; ties share the mean of their positions, so the
/// ranks always sum to n(n+1)/2.
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // 1-based positions i+1 ..= j+1 share their average
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation coefficient.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewSamples {
            n: x.len(),
            min: 3,
        });
    }
    let rx = rank_with_ties(x);
    let ry = rank_with_ties(y);
    pearson(&rx, &ry).ok_or(StatsError::ConstantSeries)
}

/// How to compute the two-sided p-value for an observed rho.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValueMethod {
    /// Enumerate all n! rank permutations (n <= 9).
    ExactPermutation,
    /// Student-t approximation with n-2 degrees of freedom.
    TApproximation,
    /// Seeded permutation sampling; `draws` should be >= 1e5.
    MonteCarlo { draws: u32, seed: u64 },
}

const EXACT_MAX_N: usize = 9;

/// Tolerance when comparing permutation rho values against the observed one.
const RHO_EPS: f64 = 1e-12;

fn rho_of_identity_vs(perm: &[f64]) -> f64 {
    // x-ranks are 1..n; the permutation supplies the y-ranks
    let n = perm.len();
    let base: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    pearson(&base, perm).expect("nondegenerate for n >= 2")
}

fn exact_permutation_p(rho_abs: f64, n: usize) -> f64 {
    // Heap's algorithm over the y-ranks.
    let mut perm: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let mut counters = vec![0usize; n];
    let mut total = 1u64;
    let mut hits = 0u64;
    if rho_of_identity_vs(&perm).abs() >= rho_abs - RHO_EPS {
        hits += 1;
    }
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            total += 1;
            if rho_of_identity_vs(&perm).abs() >= rho_abs - RHO_EPS {
                hits += 1;
            }
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

fn monte_carlo_p(rho_abs: f64, n: usize, draws: u32, seed: u64) -> f64 {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut perm: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let mut hits = 0u64;
    for _ in 0..draws {
        perm.shuffle(&mut rng);
        if rho_of_identity_vs(&perm).abs() >= rho_abs - RHO_EPS {
            hits += 1;
        }
    }
    // add-one estimator: the observed value counts as one draw
    (hits + 1) as f64 / (draws as u64 + 1) as f64
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let xm = x - 1.0;
        let t = xm + 7.5;
        let mut a = COEF[0];
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (xm + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (xm + 0.5) * t.ln() - t + a.ln()
    }
}

fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 3e-14;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let fm = m as f64;
        let m2 = 2.0 * fm;
        let aa = fm * (b - fm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + fm) * (qab + fm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
fn betai(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * beta_cont_frac(a, b, x) / a
    } else {
        1.0 - bt * beta_cont_frac(b, a, 1.0 - x) / b
    }
}

fn t_two_sided_p(t: f64, df: f64) -> f64 {
    betai(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-sided p-value for an observed Spearman rho at sample size `n`.
pub fn spearman_pvalue(rho: f64, n: usize, method: PValueMethod) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooFewSamples { n, min: 3 });
    }
    let rho_abs = rho.abs().clamp(0.0, 1.0);
    match method {
        PValueMethod::ExactPermutation => {
            if n > EXACT_MAX_N {
                return Err(StatsError::ExactTooLarge { n, max: EXACT_MAX_N });
            }
            Ok(exact_permutation_p(rho_abs, n))
        }
        PValueMethod::TApproximation => {
            if rho_abs >= 1.0 {
                return Ok(0.0);
            }
            let df = (n - 2) as f64;
            let t = rho_abs * (df / (1.0 - rho_abs * rho_abs)).sqrt();
            Ok(t_two_sided_p(t, df))
        }
        PValueMethod::MonteCarlo { draws, seed } => Ok(monte_carlo_p(rho_abs, n, draws, seed)),
    }
}

/// Default method: exact enumeration up to n = 9, t-approximation beyond.
pub fn default_pvalue(rho: f64, n: usize) -> Result<f64, StatsError> {
    if n <= EXACT_MAX_N {
        spearman_pvalue(rho, n, PValueMethod::ExactPermutation)
    } else {
        spearman_pvalue(rho, n, PValueMethod::TApproximation)
    }
}

/// Star tier of a p-value: `*` P < 0.1, `**` P < 0.05, `***` P < 0.01.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Z-score a slice with the population standard deviation.
pub fn zscore(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewSamples {
            n: values.len(),
            min: 2,
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(StatsError::ConstantSeries);
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Per-student Z-scored ranks.
#[derive(Debug, Clone)]
pub struct RegularizedSeries {
    values: BTreeMap<StudentId, f64>,
}

impl RegularizedSeries {
    /// What the regularized values are relative to.
    pub const BASIS: &'static str = "rank";

    pub fn values(&self) -> &BTreeMap<StudentId, f64> {
        &self.values
    }

    pub fn get(&self, student: &StudentId) -> Option<f64> {
        self.values.get(student).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Z-score a per-student rank series (Eq.-2 regularization applied to ranks).
pub fn zscore_regularize(
    ranks: &BTreeMap<StudentId, f64>,
) -> Result<RegularizedSeries, StatsError> {
    let keys: Vec<&StudentId> = ranks.keys().collect();
    let vals: Vec<f64> = ranks.values().copied().collect();
    let z = zscore(&vals)?;
    Ok(RegularizedSeries {
        values: keys.into_iter().cloned().zip(z).collect(),
    })
}

/// Rank a raw per-student series (ties averaged) and Z-score the ranks.
pub fn regularized_rank_series(
    raw: &BTreeMap<StudentId, f64>,
) -> Result<RegularizedSeries, StatsError> {
    let keys: Vec<&StudentId> = raw.keys().collect();
    let vals: Vec<f64> = raw.values().copied().collect();
    let ranks = rank_with_ties(&vals);
    zscore_regularize(&keys.into_iter().cloned().zip(ranks).collect())
}

/// Centrality of students missing from a cumulative graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingCentrality {
    /// Treat as 0 and keep the student in the sample (default; keeps n at
    /// the full roster size).
    Zero,
    /// Drop the student from that week's sample.
    Drop,
}

/// p-value policy for table cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValuePolicy {
    /// Exact enumeration up to n = 9, t-approximation beyond (default).
    Auto,
    TApproximation,
    MonteCarlo { draws: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct CorrelationOptions {
    pub missing: MissingCentrality,
    pub pvalue: PValuePolicy,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            missing: MissingCentrality::Zero,
            pvalue: PValuePolicy::Auto,
        }
    }
}

/// One defined correlation: rho, its p-value and star tier.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub kind: CentralityKind,
    pub week: u32,
    pub field: TraitField,
    pub n: usize,
    pub rho: f64,
    pub p_value: f64,
    pub stars: &'static str,
}

/// Why a cell has no correlation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndefinedReason {
    ConstantSeries,
    TooFewSamples,
}

/// One cell of the correlation table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableCell {
    Defined(CorrelationResult),
    Undefined {
        kind: CentralityKind,
        week: u32,
        field: TraitField,
        n: usize,
        reason: UndefinedReason,
    },
}

impl TableCell {
    pub fn kind(&self) -> CentralityKind {
        match self {
            TableCell::Defined(r) => r.kind,
            TableCell::Undefined { kind, .. } => *kind,
        }
    }

    pub fn week(&self) -> u32 {
        match self {
            TableCell::Defined(r) => r.week,
            TableCell::Undefined { week, .. } => *week,
        }
    }

    pub fn field(&self) -> TraitField {
        match self {
            TableCell::Defined(r) => r.field,
            TableCell::Undefined { field, .. } => *field,
        }
    }

    pub fn result(&self) -> Option<&CorrelationResult> {
        match self {
            TableCell::Defined(r) => Some(r),
            TableCell::Undefined { .. } => None,
        }
    }
}

fn week_of_label(label: GraphLabel) -> u32 {
    match label {
        GraphLabel::Week(w) => w,
        GraphLabel::Cumulative { to, .. } => to,
    }
}

fn cell_pvalue(rho: f64, n: usize, policy: PValuePolicy) -> Result<f64, StatsError> {
    match policy {
        PValuePolicy::Auto => default_pvalue(rho, n),
        PValuePolicy::TApproximation => spearman_pvalue(rho, n, PValueMethod::TApproximation),
        PValuePolicy::MonteCarlo { draws, seed } => {
            spearman_pvalue(rho, n, PValueMethod::MonteCarlo { draws, seed })
        }
    }
}

/// Correlate precomputed centrality vectors against every trait field.
pub fn correlation_table_from_vectors(
    vectors: &[CentralityVector],
    scores: &TraitScores,
    opts: CorrelationOptions,
) -> Result<Vec<TableCell>, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::EmptyRoster);
    }
    let mut cells = Vec::with_capacity(vectors.len() * TraitField::ALL.len());
    for vector in vectors {
        let week = week_of_label(vector.graph_label);
        for field in TraitField::ALL {
            let mut xs = Vec::with_capacity(scores.len());
            let mut ys = Vec::with_capacity(scores.len());
            for (student, rec) in scores.iter() {
                match (vector.get(student), opts.missing) {
                    (Some(c), _) => {
                        xs.push(c);
                        ys.push(field.value(rec) as f64);
                    }
                    (None, MissingCentrality::Zero) => {
                        xs.push(0.0);
                        ys.push(field.value(rec) as f64);
                    }
                    (None, MissingCentrality::Drop) => {}
                }
            }
            let n = xs.len();
            let cell = match spearman_rho(&xs, &ys) {
                Ok(rho) => {
                    let p = cell_pvalue(rho, n, opts.pvalue)?;
                    TableCell::Defined(CorrelationResult {
                        kind: vector.kind,
                        week,
                        field,
                        n,
                        rho,
                        p_value: p,
                        stars: significance_stars(p),
                    })
                }
                Err(StatsError::ConstantSeries) => TableCell::Undefined {
                    kind: vector.kind,
                    week,
                    field,
                    n,
                    reason: UndefinedReason::ConstantSeries,
                },
                Err(StatsError::TooFewSamples { .. }) => TableCell::Undefined {
                    kind: vector.kind,
                    week,
                    field,
                    n,
                    reason: UndefinedReason::TooFewSamples,
                },
                Err(e) => return Err(e),
            };
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Correlation matrix of cumulative graphs x centrality kinds x trait fields.
pub fn correlation_table(
    graphs: &[CoOccurrenceGraph],
    scores: &TraitScores,
    kinds: &[CentralityKind],
    opts: CorrelationOptions,
) -> Result<Vec<TableCell>, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::EmptyRoster);
    }
    let mut vectors = Vec::with_capacity(graphs.len() * kinds.len());
    for &kind in kinds {
        for g in graphs {
            if g.node_count() == 0 {
                // no centrality is defined; an all-missing vector lets the
                // missing-centrality policy decide what the sample looks like
                vectors.push(CentralityVector {
                    kind,
                    graph_label: g.label,
                    scores: BTreeMap::new(),
                });
            } else {
                vectors.push(centrality(g, kind).expect("non-empty graph"));
            }
        }
    }
    correlation_table_from_vectors(&vectors, scores, opts)
}
