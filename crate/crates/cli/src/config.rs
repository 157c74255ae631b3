//! Declarative `key = value` configuration files for the pipeline and the
//! synthetic cohort generator. `#` starts a comment; unknown keys are
//! rejected so typos surface immediately. Every CLI flag maps to a key and
//! flags win over file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dinet_core::ingest::{CivilDate, StudyCalendar};
use dinet_core::stats::MissingCentrality;
use dinet_core::synthgen::CohortSpec;
use dinet_core::IngestFormat;

use crate::errors::{AppError, AppResult};

/// Raw key/value pairs from one config file.
pub struct KeyValues {
    source: String,
    values: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str, source: &str) -> AppResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(AppError::Data(format!(
                    "{source}:{}: expected `key = value`, got {raw:?}",
                    i + 1
                )));
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(KeyValues {
            source: source.to_string(),
            values,
        })
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Data(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> AppResult<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                AppError::Data(format!("{}: bad value for {key}: {v:?}", self.source))
            }),
        }
    }

    pub fn finish(self) -> AppResult<()> {
        if let Some(key) = self.values.keys().next() {
            return Err(AppError::Data(format!(
                "{}: unknown key {key:?}",
                self.source
            )));
        }
        Ok(())
    }
}

pub fn parse_format(s: &str) -> AppResult<IngestFormat> {
    match s {
        "per-student" => Ok(IngestFormat::PerStudent),
        "single-file" => Ok(IngestFormat::SingleFile),
        other => Err(AppError::Usage(format!(
            "format must be per-student or single-file, got {other:?}"
        ))),
    }
}

pub fn parse_missing(s: &str) -> AppResult<MissingCentrality> {
    match s {
        "zero" => Ok(MissingCentrality::Zero),
        "drop" => Ok(MissingCentrality::Drop),
        other => Err(AppError::Usage(format!(
            "missing-centrality policy must be zero or drop, got {other:?}"
        ))),
    }
}

pub fn parse_week_list(s: &str) -> AppResult<Vec<u32>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|w| {
            w.trim()
                .parse()
                .map_err(|_| AppError::Usage(format!("bad week index {w:?}")))
        })
        .collect()
}

/// Fully resolved pipeline configuration (defaults + file + flag overrides).
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: IngestFormat,
    pub study_start: CivilDate,
    pub week_count: u32,
    pub exclude_weeks: Vec<u32>,
    pub tz_offset: i32,
    pub threshold: u64,
    pub anchor_week: u32,
    pub replicates: u32,
    pub multiplier: u32,
    pub max_attempts: u32,
    pub count_attempts: bool,
    pub seed: u64,
    pub scores: Option<PathBuf>,
    pub kinds: Vec<dinet_core::CentralityKind>,
    pub missing: MissingCentrality,
    pub out: PathBuf,
}

impl PipelineConfig {
    pub fn calendar(&self) -> AppResult<StudyCalendar> {
        StudyCalendar::new(
            self.study_start,
            self.week_count,
            self.exclude_weeks.iter().copied(),
            self.tz_offset,
        )
        .map_err(AppError::data)
    }

    /// Key = value lines that reproduce this exact run.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("input", self.input.display().to_string());
        push("format", self.format.to_string());
        push("study_start", self.study_start.to_string());
        push("week_count", self.week_count.to_string());
        push(
            "exclude_weeks",
            self.exclude_weeks
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        push("tz_offset", self.tz_offset.to_string());
        push("threshold", self.threshold.to_string());
        push("anchor_week", self.anchor_week.to_string());
        push("replicates", self.replicates.to_string());
        push("multiplier", self.multiplier.to_string());
        push("max_attempts", self.max_attempts.to_string());
        push("count_attempts", self.count_attempts.to_string());
        push("seed", self.seed.to_string());
        if let Some(s) = &self.scores {
            push("scores", s.display().to_string());
        }
        push(
            "kinds",
            self.kinds
                .iter()
                .map(|k| k.short_name().to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push(
            "missing",
            match self.missing {
                MissingCentrality::Zero => "zero".to_string(),
                MissingCentrality::Drop => "drop".to_string(),
            },
        );
        push("out", self.out.display().to_string());
        out
    }

    /// Read a pipeline config file; `input` and `out` are required there
    /// unless overridden by flags later.
    pub fn from_file(path: &Path) -> AppResult<(Self, Vec<String>)> {
        let mut kv = KeyValues::load(path)?;
        let mut missing_keys = Vec::new();
        let input = match kv.take("input") {
            Some(v) => PathBuf::from(v),
            None => {
                missing_keys.push("input".to_string());
                PathBuf::new()
            }
        };
        let out = match kv.take("out") {
            Some(v) => PathBuf::from(v),
            None => {
                missing_keys.push("out".to_string());
                PathBuf::new()
            }
        };
        let format = match kv.take("format") {
            Some(v) => parse_format(&v)?,
            None => IngestFormat::SingleFile,
        };
        let study_start = match kv.take("study_start") {
            Some(v) => CivilDate::parse(&v).map_err(AppError::data)?,
            None => default_study_start(),
        };
        let exclude_weeks = match kv.take("exclude_weeks") {
            Some(v) => parse_week_list(&v)?,
            None => Vec::new(),
        };
        let kinds = match kv.take("kinds") {
            Some(v) => parse_kinds(&v)?,
            None => dinet_core::CentralityKind::ALL.to_vec(),
        };
        let missing = match kv.take("missing") {
            Some(v) => parse_missing(&v)?,
            None => MissingCentrality::Zero,
        };
        let config = PipelineConfig {
            input,
            format,
            study_start,
            week_count: kv.take_parsed("week_count")?.unwrap_or(21),
            exclude_weeks,
            tz_offset: kv.take_parsed("tz_offset")?.unwrap_or(-18_000),
            threshold: kv.take_parsed("threshold")?.unwrap_or(1200),
            anchor_week: kv.take_parsed("anchor_week")?.unwrap_or(11),
            replicates: kv.take_parsed("replicates")?.unwrap_or(100),
            multiplier: kv.take_parsed("multiplier")?.unwrap_or(10),
            max_attempts: kv.take_parsed("max_attempts")?.unwrap_or(100),
            count_attempts: kv.take_parsed("count_attempts")?.unwrap_or(false),
            seed: kv.take_parsed("seed")?.unwrap_or(0),
            scores: kv.take("scores").map(PathBuf::from),
            kinds,
            missing,
            out,
        };
        kv.finish()?;
        Ok((config, missing_keys))
    }
}

pub fn default_study_start() -> CivilDate {
    CivilDate::new(2013, 1, 6).expect("valid default date")
}

pub fn parse_kinds(s: &str) -> AppResult<Vec<dinet_core::CentralityKind>> {
    s.split(',')
        .map(|k| {
            dinet_core::CentralityKind::parse(k)
                .ok_or_else(|| AppError::Usage(format!("unknown centrality kind {k:?}")))
        })
        .collect()
}

/// Read a cohort spec file for `synth`.
pub fn cohort_spec_from_file(path: &Path) -> AppResult<CohortSpec> {
    let mut kv = KeyValues::load(path)?;
    let defaults = CohortSpec::default();
    let spec = CohortSpec {
        student_count: kv.take_parsed("students")?.unwrap_or(defaults.student_count),
        location_count: kv
            .take_parsed("locations")?
            .unwrap_or(defaults.location_count),
        weeks: kv.take_parsed("weeks")?.unwrap_or(defaults.weeks),
        core_fraction: kv
            .take_parsed("core_fraction")?
            .unwrap_or(defaults.core_fraction),
        p_core: kv.take_parsed("p_core")?.unwrap_or(defaults.p_core),
        p_peri: kv.take_parsed("p_peri")?.unwrap_or(defaults.p_peri),
        meals_per_student_per_week: kv
            .take_parsed("meals_per_week")?
            .unwrap_or(defaults.meals_per_student_per_week),
        trait_slope: kv.take_parsed("trait_slope")?.unwrap_or(defaults.trait_slope),
        trait_noise_sd: kv
            .take_parsed("trait_noise_sd")?
            .unwrap_or(defaults.trait_noise_sd),
        threshold: kv.take_parsed("threshold")?.unwrap_or(defaults.threshold),
        seed: kv.take_parsed("seed")?.unwrap_or(defaults.seed),
    };
    kv.finish()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_reject_unknown_and_malformed() {
        let kv = KeyValues::parse("a = 1\n# comment\nb = x\n", "t").unwrap();
        let mut kv = kv;
        assert_eq!(kv.take("a").as_deref(), Some("1"));
        assert!(kv.finish().is_err()); // b unused

        assert!(KeyValues::parse("just words\n", "t").is_err());
    }

    #[test]
    fn pipeline_config_defaults_and_manifest_round_trip() {
        let dir = std::env::temp_dir().join("dinet_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("cfg.txt");
        std::fs::write(&p, "input = events.csv\nout = outdir\nseed = 9\nexclude_weeks = 11\n")
            .unwrap();
        let (cfg, missing) = PipelineConfig::from_file(&p).unwrap();
        assert!(missing.is_empty());
        assert_eq!(cfg.week_count, 21);
        assert_eq!(cfg.threshold, 1200);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.exclude_weeks, vec![11]);
        // the manifest parses back to an identical config
        let p2 = dir.join("manifest.txt");
        std::fs::write(&p2, cfg.manifest()).unwrap();
        let (cfg2, _) = PipelineConfig::from_file(&p2).unwrap();
        assert_eq!(cfg2.manifest(), cfg.manifest());
    }
}
