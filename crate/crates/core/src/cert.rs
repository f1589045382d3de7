//! Verdict records shared by the map and action checks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::coarse::{CoarseStructureSpec, Membership, ParamFamily};

/// The outcome of one family evaluated against one structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub family: String,
    pub structure: String,
    pub outcome: Membership,
}

impl Finding {
    pub fn new(fam: &ParamFamily, spec: &CoarseStructureSpec, outcome: Membership) -> Self {
        Self { family: fam.tag().to_string(), structure: spec.to_string(), outcome }
    }

    pub fn is_bounded(&self) -> bool {
        self.outcome.is_bounded()
    }
}

/// A PASS/FAIL record whose claims can be re-checked from its own data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub radius: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<Finding>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Certificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(check: impl Into<String>, radius: usize) -> Self {
        Self {
            check: check.into(),
            radius,
            pass: true,
            findings: Vec::new(),
            data: BTreeMap::new(),
            parts: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a finding; an unbounded outcome fails the certificate.
    pub fn expect_bounded(&mut self, finding: Finding) {
        self.pass &= finding.is_bounded();
        self.findings.push(finding);
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("certificate data serializes");
        self.data.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.data.get(key)
    }

    /// Adds a sub-certificate; the parent fails with it.
    pub fn add_part(&mut self, part: Certificate) {
        self.pass &= part.pass;
        self.parts.push(part);
    }

    pub fn part(&self, check: &str) -> Option<&Certificate> {
        self.parts.iter().find(|p| p.check == check)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.pass = false;
        self.notes.push(why.into());
    }

    /// First unbounded finding, searching parts depth-first.
    pub fn first_failure(&self) -> Option<&Finding> {
        self.findings
            .iter()
            .find(|f| !f.is_bounded())
            .or_else(|| self.parts.iter().find_map(Certificate::first_failure))
    }

    /// Finding for a family tag, searching parts depth-first.
    pub fn finding(&self, family: &str) -> Option<&Finding> {
        self.findings
            .iter()
            .find(|f| f.family == family)
            .or_else(|| self.parts.iter().find_map(|p| p.finding(family)))
    }
}
