use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub metrics: IndexMap<String, Value>,
}

impl Record {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status,
            detail: detail.into(),
            metrics: IndexMap::new(),
        }
    }

    pub fn metric(mut self, key: &str, value: impl Serialize) -> Self {
        self.metrics
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub records: Vec<Record>,
    pub summary: Summary,
    /// Excluded from [`SuiteReport::fingerprint`].
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            command: command.into(),
            config,
            records: Vec::new(),
            summary: Summary::default(),
            wall_time_ms: 0.0,
        }
    }

    pub fn push(&mut self, record: Record) {
        match record.status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Skip => self.summary.skip += 1,
        }
        self.records.push(record);
    }

    pub fn extend(&mut self, other: SuiteReport) {
        for r in other.records {
            self.push(r);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// SHA-256 of the report with `wall_time_ms` removed.
    pub fn fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("wall_time_ms");
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "{} {}: {}", r.status.tag(), r.name, r.detail);
        }
        let _ = writeln!(
            out,
            "{}: {} passed, {} failed, {} skipped in {:.0} ms",
            self.command, self.summary.pass, self.summary.fail, self.summary.skip, self.wall_time_ms
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_records() {
        let mut r = SuiteReport::new("x", Value::Null);
        r.push(Record::new("a", Status::Pass, ""));
        r.push(Record::new("b", Status::Skip, ""));
        assert!(r.all_passed());
        r.push(Record::new("c", Status::Fail, "").metric("n", 3));
        assert_eq!(r.summary, Summary { pass: 1, fail: 1, skip: 1 });
        assert!(!r.all_passed());
        assert_eq!(r.record("c").unwrap().metrics["n"], 3);
    }

    #[test]
    fn fingerprint_ignores_wall_time() {
        let mut a = SuiteReport::new("x", Value::Null);
        a.push(Record::new("a", Status::Pass, "ok"));
        let mut b = a.clone();
        b.wall_time_ms = 123.0;
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.push(Record::new("b", Status::Pass, "ok"));
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert!(a.to_text().contains("PASS a: ok"));
    }
}
