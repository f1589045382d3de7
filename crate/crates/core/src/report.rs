//! Deterministic JSON reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::coarse::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Equal,
    Differ,
    Error,
}

impl Verdict {
    pub fn pass_fail(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn equal_differ(equal: bool) -> Self {
        if equal {
            Verdict::Equal
        } else {
            Verdict::Differ
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Equal => "EQUAL",
            Verdict::Differ => "DIFFER",
            Verdict::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub group: String,
    pub radius: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, group: impl ToString, radius: usize, verdict: Verdict) -> Self {
        Self {
            check: check.into(),
            group: group.to_string(),
            radius,
            verdict,
            witness: None,
            trace: None,
            notes: Vec::new(),
            details: None,
        }
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witness = Some(to_value(w));
        self
    }

    pub fn trace(mut self, t: Trace) -> Self {
        self.trace = Some(t);
        self
    }

    pub fn details(mut self, d: impl Serialize) -> Self {
        self.details = Some(to_value(d));
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    /// Record for a module error, carrying its stable code.
    pub fn error(check: impl Into<String>, group: impl ToString, radius: usize, err: &crate::Error) -> Self {
        Self::new(check, group, radius, Verdict::Error)
            .details(BTreeMap::from([("code", err.code().to_string()), ("message", err.to_string())]))
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            tool: "coarsekit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            config: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.into(), to_value(value));
    }

    /// 2 on any error, 1 on any FAIL or DIFFER, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        let has = |v: &[Verdict]| self.checks.iter().any(|c| v.contains(&c.verdict));
        if has(&[Verdict::Error]) {
            2
        } else if has(&[Verdict::Fail, Verdict::Differ]) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Lossy one-line-per-check rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<28} {:<26} {:>6}  {:<7} witness", "check", "group", "radius", "verdict");
        for c in &self.checks {
            let witness = match &c.witness {
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None => String::new(),
            };
            let _ = writeln!(out, "{:<28} {:<26} {:>6}  {:<7} {}", c.check, c.group, c.radius, c.verdict.as_str(), witness);
            if let Some(t) = &c.trace {
                let _ = writeln!(out, "{:<28} trace {t}", "");
            }
            for n in &c.notes {
                let _ = writeln!(out, "{:<28} note: {n}", "");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
