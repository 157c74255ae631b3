//! Synthetic cohort generator with planted social structure.
//!
//! Students get disjoint per-day time bands for their solo check-ins, spaced
//! wider than the co-occurrence threshold, so with zero partner propensity
//! the recovered graphs are exactly empty. Planted co-dining places the
//! partner's check-in at the same location within `threshold / 2` seconds of
//! the initiator's, which guarantees every planted pair is recovered (recall
//! 1); spurious extra edges between partner events are possible and allowed.
//! Everything is a pure function of the spec, including its seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::ids::{LocationId, StudentId};
use crate::ingest::{CheckInRecord, CivilDate, EventLog, StudyCalendar, SECONDS_PER_DAY};
use crate::stats::TraitScores;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("infeasible cohort spec: {0}")]
    Infeasible(String),
}

/// Parameters of a synthetic cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSpec {
    pub student_count: u32,
    pub location_count: u32,
    pub weeks: u32,
    /// Fraction of students in the planted core, rounded to at least one.
    pub core_fraction: f64,
    /// Per-(event, pair) probability of planting a partner when both
    /// students are core members.
    pub p_core: f64,
    /// Same for every other pair; must not exceed `p_core`.
    pub p_peri: f64,
    pub meals_per_student_per_week: f64,
    /// Trait model: dF = trait_slope * planted-partner-count + noise.
    pub trait_slope: f64,
    pub trait_noise_sd: f64,
    /// Co-occurrence threshold the cohort is built for; partner events land
    /// within half of it.
    pub threshold: u64,
    pub seed: u64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            student_count: 24,
            location_count: 8,
            weeks: 10,
            core_fraction: 0.35,
            p_core: 0.05,
            p_peri: 0.005,
            meals_per_student_per_week: 14.0,
            trait_slope: 0.5,
            trait_noise_sd: 2.0,
            threshold: 1200,
            seed: 0,
        }
    }
}

impl CohortSpec {
    fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: String| Err(SynthError::Infeasible(m));
        if self.student_count == 0 {
            return fail("student_count must be >= 1".into());
        }
        if self.location_count == 0 {
            return fail("location_count must be >= 1".into());
        }
        if self.weeks == 0 {
            return fail("weeks must be >= 1".into());
        }
        let fraction_ok = self.core_fraction > 0.0 && self.core_fraction < 1.0;
        if !fraction_ok {
            return fail(format!("core_fraction {} not in (0,1)", self.core_fraction));
        }
        for (name, p) in [("p_core", self.p_core), ("p_peri", self.p_peri)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} {p} not in [0,1]"));
            }
        }
        if self.p_peri > self.p_core {
            return fail(format!(
                "p_peri {} exceeds p_core {}",
                self.p_peri, self.p_core
            ));
        }
        let meals_ok = self.meals_per_student_per_week >= 0.0;
        if !meals_ok {
            return fail("meals_per_student_per_week must be >= 0".into());
        }
        let sd_ok = self.trait_noise_sd >= 0.0;
        if !self.trait_slope.is_finite() || !sd_ok {
            return fail("trait model parameters must be finite, sd >= 0".into());
        }
        if self.threshold == 0 {
            return fail("threshold must be >= 1".into());
        }
        let band = SECONDS_PER_DAY / self.student_count as i64;
        if band < self.threshold as i64 + 4 {
            return fail(format!(
                "{} students leave {band}s time bands, need > threshold + 3 = {}",
                self.student_count,
                self.threshold + 3
            ));
        }
        Ok(())
    }

    pub fn core_size(&self) -> u32 {
        ((self.student_count as f64 * self.core_fraction).round() as u32)
            .clamp(1, self.student_count.saturating_sub(1).max(1))
    }
}

/// Generated cohort plus its ground truth.
#[derive(Debug)]
pub struct SyntheticCohort {
    pub spec: CohortSpec,
    pub calendar: StudyCalendar,
    pub log: EventLog,
    pub scores: TraitScores,
    /// Planted pair -> labels of the weeks it was planted in.
    pub planted_pairs: BTreeMap<(StudentId, StudentId), BTreeSet<u32>>,
    /// Distinct planted partners per student.
    pub partner_counts: BTreeMap<StudentId, u32>,
    pub core: BTreeSet<StudentId>,
}

impl SyntheticCohort {
    pub fn is_planted(&self, u: &StudentId, v: &StudentId) -> bool {
        let key = if u <= v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        };
        self.planted_pairs.contains_key(&key)
    }
}

fn student_id(i: u32) -> StudentId {
    StudentId::from(format!("s{i:03}"))
}

fn location_id(i: u32) -> LocationId {
    LocationId::from(format!("loc{i:03}"))
}

/// Default calendar synthetic cohorts are generated against: UTC day
/// boundaries, no excluded weeks.
pub fn synthetic_calendar(weeks: u32) -> StudyCalendar {
    StudyCalendar::new(CivilDate::new(2013, 1, 6).expect("valid date"), weeks, [], 0)
        .expect("valid calendar")
}

fn normal_sample<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; the second variate is discarded for simplicity.
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate events, trait scores, and ground truth for one cohort spec.
pub fn generate_cohort(spec: &CohortSpec) -> Result<SyntheticCohort, SynthError> {
    spec.validate()?;
    let calendar = synthetic_calendar(spec.weeks);
    let start_day = calendar.study_start().days_since_epoch();
    let n = spec.student_count;
    let core_size = spec.core_size();
    let core: BTreeSet<StudentId> = (0..core_size).map(student_id).collect();
    let is_core: Vec<bool> = (0..n).map(|i| i < core_size).collect();

    let mut rng = Pcg64::seed_from_u64(spec.seed);
    let attend_p = (spec.meals_per_student_per_week / 21.0).clamp(0.0, 1.0);
    let band = SECONDS_PER_DAY / n as i64;
    let half_t = (spec.threshold / 2) as i64;
    let margin = half_t + 1;

    let mut records: Vec<CheckInRecord> = Vec::new();
    let mut planted: BTreeMap<(StudentId, StudentId), BTreeSet<u32>> = BTreeMap::new();
    let total_days = spec.weeks as i64 * 7;

    for day in 0..total_days {
        let day_base = (start_day + day) * SECONDS_PER_DAY;
        let week_label = (day / 7) as u32 + 1;
        for u in 0..n {
            // solo events live in the student's own band, margins keep
            // neighbors further than the threshold apart
            let band_start = u as i64 * band + margin;
            let band_end = (u as i64 + 1) * band - margin;
            for _slot in 0..3 {
                if !rng.random_bool(attend_p) {
                    continue;
                }
                let t_local = rng.random_range(band_start..band_end);
                let location = location_id(rng.random_range(0..spec.location_count));
                let t_u = day_base + t_local;
                records.push(CheckInRecord {
                    timestamp: t_u,
                    student: student_id(u),
                    location: location.clone(),
                });
                for v in 0..n {
                    if v == u {
                        continue;
                    }
                    let p = if is_core[u as usize] && is_core[v as usize] {
                        spec.p_core
                    } else {
                        spec.p_peri
                    };
                    if p <= 0.0 || !rng.random_bool(p) {
                        continue;
                    }
                    let jitter = rng.random_range(-half_t..=half_t);
                    let t_v = (t_local + jitter).clamp(0, SECONDS_PER_DAY - 1) + day_base;
                    records.push(CheckInRecord {
                        timestamp: t_v,
                        student: student_id(v),
                        location: location.clone(),
                    });
                    let key = if u < v {
                        (student_id(u), student_id(v))
                    } else {
                        (student_id(v), student_id(u))
                    };
                    planted.entry(key).or_default().insert(week_label);
                }
            }
        }
    }

    let mut partner_counts: BTreeMap<StudentId, u32> = (0..n).map(|i| (student_id(i), 0)).collect();
    for (u, v) in planted.keys() {
        *partner_counts.get_mut(u).expect("generated id") += 1;
        *partner_counts.get_mut(v).expect("generated id") += 1;
    }

    let mut scores = TraitScores::new();
    for i in 0..n {
        let id = student_id(i);
        let count = partner_counts[&id] as f64;
        // dF follows the planted model; the F1 baseline gets the same noise
        // scale so first-test scores vary too (constant when sd = 0)
        let (noise, baseline_noise) = if spec.trait_noise_sd > 0.0 {
            (
                spec.trait_noise_sd * normal_sample(&mut rng),
                spec.trait_noise_sd * normal_sample(&mut rng),
            )
        } else {
            (0.0, 0.0)
        };
        let delta = (spec.trait_slope * count + noise).round().clamp(-48.0, 48.0) as i64;
        let mut f1 = (32.0 + baseline_noise).round().clamp(8.0, 56.0) as i64;
        if f1 + delta > 56 {
            f1 = 56 - delta;
        }
        if f1 + delta < 8 {
            f1 = 8 - delta;
        }
        scores
            .insert(id, f1, f1 + delta)
            .expect("clamped into scale");
    }

    let (log, _dupes) = EventLog::new(records, &calendar);
    Ok(SyntheticCohort {
        spec: spec.clone(),
        calendar,
        log,
        scores,
        planted_pairs: planted,
        partner_counts,
        core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccur::build_week_graph;
    use crate::ingest::{partition_weeks, write_canonical_events};

    #[test]
    fn zero_propensity_means_every_weekly_graph_is_empty() {
        let spec = CohortSpec {
            student_count: 12,
            weeks: 3,
            p_core: 0.0,
            p_peri: 0.0,
            seed: 5,
            ..Default::default()
        };
        let cohort = generate_cohort(&spec).unwrap();
        assert!(!cohort.log.is_empty(), "students still dine alone");
        let parts = partition_weeks(&cohort.log, &cohort.calendar);
        for slice in &parts.slices {
            let g = build_week_graph(&slice.log, slice.label, spec.threshold, &cohort.calendar);
            assert_eq!(g.edge_count(), 0, "week {}", slice.label);
        }
        assert!(cohort.planted_pairs.is_empty());
    }

    #[test]
    fn certain_core_propensity_forms_weekly_clique() {
        let spec = CohortSpec {
            student_count: 10,
            location_count: 4,
            weeks: 2,
            core_fraction: 0.3, // core of 3
            p_core: 1.0,
            p_peri: 0.0,
            meals_per_student_per_week: 14.0,
            seed: 9,
            ..Default::default()
        };
        let cohort = generate_cohort(&spec).unwrap();
        assert_eq!(cohort.core.len(), 3);
        let parts = partition_weeks(&cohort.log, &cohort.calendar);
        for slice in &parts.slices {
            let g = build_week_graph(&slice.log, slice.label, spec.threshold, &cohort.calendar);
            let core: Vec<&StudentId> = cohort.core.iter().collect();
            for i in 0..core.len() {
                for j in (i + 1)..core.len() {
                    let a = g.graph().index_of(core[i]).expect("core node present");
                    let b = g.graph().index_of(core[j]).expect("core node present");
                    assert!(g.graph().contains_edge(a, b), "week {}", slice.label);
                }
            }
        }
    }

    #[test]
    fn generation_is_reproducible_byte_for_byte() {
        let spec = CohortSpec {
            seed: 1234,
            ..Default::default()
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_canonical_events(&generate_cohort(&spec).unwrap().log, &mut a).unwrap();
        write_canonical_events(&generate_cohort(&spec).unwrap().log, &mut b).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn planted_pairs_are_recovered_in_their_week() {
        let spec = CohortSpec {
            student_count: 16,
            weeks: 4,
            p_core: 0.08,
            p_peri: 0.01,
            seed: 77,
            ..Default::default()
        };
        let cohort = generate_cohort(&spec).unwrap();
        assert!(!cohort.planted_pairs.is_empty(), "want a non-trivial fixture");
        let parts = partition_weeks(&cohort.log, &cohort.calendar);
        for ((u, v), weeks) in &cohort.planted_pairs {
            for w in weeks {
                let slice = &parts.slices[*w as usize - 1];
                let g =
                    build_week_graph(&slice.log, slice.label, spec.threshold, &cohort.calendar);
                let (a, b) = (
                    g.graph().index_of(u).unwrap_or_else(|| panic!("{u} missing in week {w}")),
                    g.graph().index_of(v).unwrap_or_else(|| panic!("{v} missing in week {w}")),
                );
                assert!(g.graph().contains_edge(a, b), "({u},{v}) week {w}");
            }
        }
    }

    #[test]
    fn zero_noise_trait_scores_follow_partner_counts() {
        let spec = CohortSpec {
            student_count: 16,
            weeks: 4,
            p_core: 0.1,
            p_peri: 0.01,
            trait_slope: 1.0,
            trait_noise_sd: 0.0,
            seed: 3,
            ..Default::default()
        };
        let cohort = generate_cohort(&spec).unwrap();
        for (id, count) in &cohort.partner_counts {
            let rec = cohort.scores.get(id).expect("every student scored");
            assert_eq!(rec.delta_f(), *count as i64);
            assert!((8..=56).contains(&rec.f1));
            assert!((8..=56).contains(&rec.f2));
        }
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        let zero_loc = CohortSpec {
            location_count: 0,
            ..Default::default()
        };
        assert!(generate_cohort(&zero_loc).is_err());
        let crowded = CohortSpec {
            student_count: 500, // 172-second bands cannot separate T=1200
            ..Default::default()
        };
        assert!(generate_cohort(&crowded).is_err());
        let inverted = CohortSpec {
            p_core: 0.1,
            p_peri: 0.5,
            ..Default::default()
        };
        assert!(generate_cohort(&inverted).is_err());
    }
}
