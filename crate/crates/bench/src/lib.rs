//! Deterministic fixtures for the benchmarks: a cohort at roughly the scale
//! of one semester of campus dining data (about 30 students, 20 weeks, ~9k
//! check-ins), and the graphs derived from it.

use dinet_core::cooccur::{build_cumulative_graph, build_week_graph};
use dinet_core::ingest::partition_weeks;
use dinet_core::synthgen::{generate_cohort, CohortSpec};
use dinet_core::{CoOccurrenceGraph, SyntheticCohort};

pub fn bench_spec() -> CohortSpec {
    CohortSpec {
        student_count: 31,
        location_count: 7,
        weeks: 20,
        core_fraction: 0.3,
        p_core: 0.03,
        p_peri: 0.004,
        meals_per_student_per_week: 14.0,
        trait_slope: 0.5,
        trait_noise_sd: 3.0,
        threshold: 1200,
        seed: 7,
    }
}

pub fn bench_cohort() -> SyntheticCohort {
    generate_cohort(&bench_spec()).expect("bench spec is feasible")
}

/// One representative weekly graph from the cohort.
pub fn weekly_graph(cohort: &SyntheticCohort) -> CoOccurrenceGraph {
    let parts = partition_weeks(&cohort.log, &cohort.calendar);
    let slice = &parts.slices[9];
    build_week_graph(&slice.log, slice.label, cohort.spec.threshold, &cohort.calendar)
}

/// The densest graph of the run: cumulative over every week.
pub fn cumulative_graph(cohort: &SyntheticCohort) -> CoOccurrenceGraph {
    build_cumulative_graph(
        &cohort.log,
        1,
        cohort.spec.weeks,
        cohort.spec.threshold,
        &cohort.calendar,
    )
    .expect("valid range")
}
