pub mod build;
pub mod correlate;
pub mod ingest;
pub mod layout;
pub mod metrics;
pub mod nullmodel;
pub mod run;
pub mod synth;
