//! Core library for reconstructing co-occurrence networks from timestamped
//! check-in logs and analyzing them: weekly and cumulative graph
//! construction, clustering and centrality metrics, degree-preserving null
//! models, rank correlation against per-student trait scores, core-periphery
//! figure data, and a seeded synthetic cohort generator for end-to-end
//! validation.

pub mod cooccur;
pub mod graph;
pub mod graphio;
pub mod ids;
pub mod ingest;
pub mod layout;
pub mod metrics;
pub mod nullmodel;
pub mod stats;
pub mod synthgen;

pub use cooccur::{CoOccurrenceGraph, CoOccurrenceWitness, GraphLabel};
pub use graph::Graph;
pub use ids::{LocationId, StudentId};
pub use ingest::{CheckInRecord, CivilDate, EventLog, IngestFormat, StudyCalendar};
pub use metrics::{CentralityKind, CentralityVector, TopologySummary};
pub use nullmodel::{NullEnsembleResult, NullModelConfig};
pub use stats::{CorrelationResult, RegularizedSeries, TraitField, TraitScores};
pub use synthgen::{CohortSpec, SyntheticCohort};
