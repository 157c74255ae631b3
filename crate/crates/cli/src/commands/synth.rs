//! `dinet synth`: generate a synthetic cohort in the per-student ingest
//! layout, plus the ground-truth sidecar files.

use std::fmt::Write as _;
use std::path::PathBuf;

use dinet_core::synthgen::generate_cohort;

use crate::config::cohort_spec_from_file;
use crate::errors::{AppError, AppResult};
use crate::io_util::write_text;

#[derive(clap::Args, Debug)]
pub struct SynthArgs {
    /// Cohort spec file (key = value; all keys optional)
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Override the spec's seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs) -> AppResult<()> {
    let mut spec = match &args.spec {
        Some(path) => cohort_spec_from_file(path)?,
        None => dinet_core::CohortSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let cohort = generate_cohort(&spec).map_err(AppError::data)?;

    // per-student event files, the same layout `ingest --format per-student` reads
    for student in cohort.log.students() {
        let mut text = String::from("timestamp,location\n");
        for r in cohort.log.events_of(student) {
            writeln!(text, "{},{}", r.timestamp, r.location).expect("string write");
        }
        write_text(&args.out.join("events").join(format!("{student}.csv")), &text)?;
    }

    let mut scores_buf = Vec::new();
    cohort
        .scores
        .write_delimited(&mut scores_buf)
        .map_err(|e| AppError::Internal(e.to_string()))?;
    write_text(
        &args.out.join("scores.csv"),
        &String::from_utf8(scores_buf).expect("utf8 scores"),
    )?;

    let mut truth = String::from("student_id,planted_partners,is_core,F1,F2,dF\n");
    for (student, count) in &cohort.partner_counts {
        let rec = cohort.scores.get(student).expect("every student scored");
        writeln!(
            truth,
            "{student},{count},{},{},{},{}",
            cohort.core.contains(student),
            rec.f1,
            rec.f2,
            rec.delta_f()
        )
        .expect("string write");
    }
    write_text(&args.out.join("ground_truth.csv"), &truth)?;

    let mut pairs = String::from("u,v,weeks\n");
    for ((u, v), weeks) in &cohort.planted_pairs {
        let weeks: Vec<String> = weeks.iter().map(u32::to_string).collect();
        writeln!(pairs, "{u},{v},{}", weeks.join(";")).expect("string write");
    }
    write_text(&args.out.join("planted_pairs.csv"), &pairs)?;

    let manifest = format!(
        "students = {}\nlocations = {}\nweeks = {}\ncore_fraction = {}\np_core = {}\n\
         p_peri = {}\nmeals_per_week = {}\ntrait_slope = {}\ntrait_noise_sd = {}\n\
         threshold = {}\nseed = {}\n# calendar: study_start = {}, week_count = {}, tz_offset = 0\n",
        spec.student_count,
        spec.location_count,
        spec.weeks,
        spec.core_fraction,
        spec.p_core,
        spec.p_peri,
        spec.meals_per_student_per_week,
        spec.trait_slope,
        spec.trait_noise_sd,
        spec.threshold,
        spec.seed,
        cohort.calendar.study_start(),
        cohort.calendar.week_count(),
    );
    write_text(&args.out.join("synth_manifest.txt"), &manifest)?;

    println!(
        "generated {} events for {} students over {} weeks into {}",
        cohort.log.len(),
        cohort.log.student_count(),
        spec.weeks,
        args.out.display()
    );
    Ok(())
}
