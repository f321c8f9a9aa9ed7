//! Batch runs: instance checks, reconstructions, the lemma suites and the
//! gallery, reported as JSON or text with a process exit code.

pub mod report;
pub mod suite;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::cones::gallery::{build, verify, GalleryId, GalleryOptions, DEFAULT_GRID};
use crate::cones::{check_homeomorphism_case, check_mean_preservation, reconstruct, InstanceJson, PreserverMap};
use crate::error::{Error, Result};
use crate::means::MeanKind;

pub use report::{Record, Status, SuiteReport, Summary};
pub use suite::lemma_suite;

pub const SEED_ENV: &str = "MEANLAB_SEED";
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Reconstruct,
    Lemmas,
    Gallery,
    All,
}

impl Command {
    fn as_str(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Reconstruct => "reconstruct",
            Command::Lemmas => "lemmas",
            Command::Gallery => "gallery",
            Command::All => "all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Command::Check, Command::Reconstruct, Command::Lemmas, Command::Gallery, Command::All]
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid("command", format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::invalid("format", format!("expected json or text, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub instance_path: Option<PathBuf>,
    pub mean: MeanKind,
    pub max_multiset: usize,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub gallery_id: Option<String>,
    pub grid_size: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            instance_path: None,
            mean: MeanKind::Arithmetic,
            max_multiset: 3,
            seed: 0,
            trials: 300,
            dims: (2..=6).collect(),
            output: None,
            format: Format::Json,
            gallery_id: None,
            grid_size: DEFAULT_GRID,
        }
    }

    /// Replaces the seed with `MEANLAB_SEED` when that variable is set.
    pub fn with_seed_from_env(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(SEED_ENV, format!("not a 64-bit integer: `{v}`")))?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.max_multiset == 0 {
            return Err(Error::invalid("max_multiset", "must be at least 1"));
        }
        if self.dims.is_empty() {
            return Err(Error::invalid("dims", "must list at least one dimension"));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d == 0 || d > 64) {
            return Err(Error::invalid("dims", format!("dimension {d} outside 1..=64")));
        }
        if self.grid_size < 3 {
            return Err(Error::invalid("grid_size", "must be at least 3"));
        }
        if matches!(self.command, Command::Check | Command::Reconstruct) && self.instance_path.is_none() {
            return Err(Error::invalid("instance_path", format!("required by `{}`", self.command)));
        }
        Ok(())
    }
}

/// Parses `2..6`, `2..=6`, `3` or `2,4,5`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::invalid("dims", format!("cannot parse `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(num).collect()
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Option<SuiteReport>,
    pub exit_code: i32,
    /// Set when the input was rejected before any check ran.
    pub error: Option<String>,
    /// The report in the requested format.
    pub rendered: String,
}

pub fn load_instance(path: &Path) -> Result<PreserverMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    InstanceJson::parse(&text)?.to_map()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn check_records(t: &PreserverMap, mean: MeanKind, max_multiset: usize) -> Vec<Record> {
    let name = format!("preservation {mean} n<={max_multiset}");
    let record = match check_mean_preservation(t, mean, max_multiset) {
        Ok(r) => {
            let detail = format!(
                "{} multisets, {} violations, max violation {:e}{}",
                r.multisets_checked,
                r.violation_count,
                r.max_violation,
                if r.truncated { ", truncated" } else { "" }
            );
            let reconstruction = reconstruct(t).ok().map(|rec| rec.to_json(t));
            Record::new(name, Status::from_bool(r.preserved()), detail).metric(
                "report",
                json!({
                    "schema": 1,
                    "kind": r.kind,
                    "max_multiset": r.max_multiset,
                    "multisets_checked": r.multisets_checked,
                    "violation_count": r.violation_count,
                    "max_violation": r.max_violation,
                    "truncated": r.truncated,
                    "violations": r.violations,
                    "reconstruction": reconstruction,
                }),
            )
        }
        Err(e) => Record::new(name, Status::Fail, e.to_string()),
    };
    vec![record]
}

fn reconstruct_records(t: &PreserverMap) -> Vec<Record> {
    match reconstruct(t) {
        Ok(r) => {
            let json = r.to_json(t);
            let detail = format!(
                "Y0 has {} of {} points, residual {:e}, tau surjective {}",
                r.y0.len(),
                t.target().len(),
                r.residual,
                r.surjective_tau
            );
            let ok = r.residual <= 1e-12 && r.surjective_tau;
            let mut out = vec![Record::new("reconstruction", Status::from_bool(ok), detail)
                .metric("reconstruction", &json)
                .metric("injective_t", r.injective_t)
                .metric("psupp_disjoint", r.psupp_disjoint)];
            out.push(match check_homeomorphism_case(t, 16) {
                Ok(h) => Record::new(
                    "homeomorphism_case",
                    Status::from_bool(h.consistent()),
                    format!(
                        "image family rich: {}, Y0 = Y: {}, bijective: {}",
                        h.image_rich(),
                        h.y0_is_all,
                        h.bijective
                    ),
                )
                .metric("unpeaked_subsets", h.image_richness.unpeaked_count),
                Err(e) => Record::new("homeomorphism_case", Status::Fail, e.to_string()),
            });
            out
        }
        Err(e) => vec![Record::new("reconstruction", Status::Fail, e.to_string())],
    }
}

fn gallery_records(ids: &[GalleryId], grid_size: usize) -> Result<Vec<Record>> {
    let opts = GalleryOptions {
        grid_size,
        ..Default::default()
    };
    let mut out = Vec::new();
    for &id in ids {
        let inst = build(id, &opts)?;
        for c in verify(&inst) {
            out.push(Record::new(c.name, Status::from_bool(c.passed), c.detail));
        }
    }
    Ok(out)
}

fn execute(config: &RunConfig) -> Result<SuiteReport> {
    config.validate()?;
    let instance = match &config.instance_path {
        Some(p) => Some(load_instance(p)?),
        None => None,
    };
    let gallery_ids = match &config.gallery_id {
        Some(id) => vec![id.parse::<GalleryId>()?],
        None => GalleryId::ALL.to_vec(),
    };
    let echo = serde_json::to_value(config).expect("config serializes");
    let mut report = SuiteReport::new(config.command.as_str(), echo);
    let run_check = matches!(config.command, Command::Check | Command::All);
    let run_reconstruct = matches!(config.command, Command::Reconstruct | Command::All);
    if let Some(t) = &instance {
        if run_check {
            check_records(t, config.mean, config.max_multiset).into_iter().for_each(|r| report.push(r));
        }
        if run_reconstruct {
            reconstruct_records(t).into_iter().for_each(|r| report.push(r));
        }
    }
    if matches!(config.command, Command::Lemmas | Command::All) {
        report.extend(lemma_suite(config.seed, config.trials, &config.dims));
    }
    if matches!(config.command, Command::Gallery | Command::All) {
        for r in gallery_records(&gallery_ids, config.grid_size)? {
            report.push(r);
        }
    }
    Ok(report)
}

pub fn render(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

/// Runs one configuration. Exit code 0 when every non-skipped check passes,
/// 1 on a failed check and 2 on rejected input or an unwritable output.
pub fn run(config: &RunConfig) -> RunOutcome {
    let start = Instant::now();
    let mut report = match execute(config) {
        Ok(r) => r,
        Err(e) => {
            return RunOutcome {
                report: None,
                exit_code: EXIT_INPUT,
                rendered: String::new(),
                error: Some(e.to_string()),
            }
        }
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let rendered = render(&report, config.format);
    if let Some(path) = &config.output {
        if let Err(e) = write_atomic(path, &rendered) {
            return RunOutcome {
                report: Some(report),
                exit_code: EXIT_INPUT,
                rendered,
                error: Some(e.to_string()),
            };
        }
    }
    RunOutcome {
        exit_code: if report.all_passed() { EXIT_PASS } else { EXIT_FAIL },
        report: Some(report),
        rendered,
        error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parse() {
        assert_eq!(parse_dims("2..6").unwrap(), vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_dims("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_dims("1").unwrap(), vec![1]);
        assert_eq!(parse_dims("2,4").unwrap(), vec![2, 4]);
        assert!(parse_dims("4..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Command::Lemmas);
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        let c = RunConfig::new(Command::Check);
        match c.validate() {
            Err(Error::InvalidInput { field, .. }) => assert_eq!(field, "instance_path"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gallery_run_passes() {
        let mut c = RunConfig::new(Command::Gallery);
        c.gallery_id = Some("2notn".into());
        let out = run(&c);
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.rendered);
        c.gallery_id = Some("missing".into());
        let out = run(&c);
        assert_eq!(out.exit_code, EXIT_INPUT);
        assert!(out.error.unwrap().contains("missing"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
