//! Runs the exact checks and assembles a serialisable report.

mod checks;
pub mod table;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{Model, ModelError, Params};

pub use checks::CORE_CHECKS;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// One piece of evidence. `holds` is `None` for informational entries,
/// which never affect the status.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub holds: Option<bool>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    /// The statement this check targets.
    pub anchor: String,
    pub witnesses: Vec<Witness>,
    pub elapsed_ms: u64,
}

impl CheckRecord {
    pub fn witness(&self, label: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.label == label)
    }

    pub fn failed_witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.holds == Some(false))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub q: String,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub profile: String,
    pub params: ReportParams,
    pub filtration: u32,
    pub checks: Vec<CheckRecord>,
    pub verdict: Status,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn all_verified(&self) -> bool {
        self.verdict == Status::Verified
    }

    /// Text summary, one line per check. Timings are left out so the output
    /// is stable across runs.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "profile {} (q = {}, c = {}, filtration {})\n",
            self.profile, self.params.q, self.params.c, self.filtration
        );
        for c in &self.checks {
            out.push_str(&format!("{:<13} {}\n", c.status.name(), c.check));
            for w in c.failed_witnesses() {
                out.push_str(&format!("    failed: {} = {}\n", w.label, w.value));
            }
        }
        out.push_str(&format!("verdict: {}\n", self.verdict.name()));
        out
    }
}

/// Degree bounds for a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    /// Filtration degree for membership tests.
    pub filtration: u32,
    /// Largest degree for the module dimension comparison.
    pub module_degree: u32,
    /// Largest degree for the algebra dimension series.
    pub algebra_degree: u32,
}

impl Profile {
    pub fn default_profile() -> Self {
        Profile {
            name: "default".into(),
            filtration: 4,
            module_degree: 5,
            algebra_degree: 6,
        }
    }

    pub fn quick() -> Self {
        Profile {
            name: "quick".into(),
            filtration: 2,
            module_degree: 3,
            algebra_degree: 4,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default_profile()),
            "quick" => Some(Self::quick()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub profile: Profile,
    pub params: Params,
    /// `None` runs everything.
    pub checks: Option<Vec<String>>,
}

impl Config {
    pub fn new(profile: Profile) -> Self {
        Config {
            profile,
            params: Params::symbolic(),
            checks: None,
        }
    }
}

/// Accumulates witnesses for one check.
#[derive(Default)]
pub(crate) struct Outcome {
    witnesses: Vec<Witness>,
    inconclusive: bool,
}

impl Outcome {
    pub(crate) fn assert(&mut self, label: impl Into<String>, holds: bool, value: impl Into<Value>) -> bool {
        self.witnesses.push(Witness {
            label: label.into(),
            holds: Some(holds),
            value: value.into(),
        });
        holds
    }

    pub(crate) fn info(&mut self, label: impl Into<String>, value: impl Into<Value>) {
        self.witnesses.push(Witness {
            label: label.into(),
            holds: None,
            value: value.into(),
        });
    }

    /// Records an error that stopped the check before it could decide.
    pub(crate) fn abort(&mut self, label: impl Into<String>, err: impl std::fmt::Display) {
        self.inconclusive = true;
        self.info(label, err.to_string());
    }

    pub(crate) fn status(&self) -> Status {
        if self.witnesses.iter().any(|w| w.holds == Some(false)) {
            Status::Refuted
        } else if self.inconclusive {
            Status::Inconclusive
        } else {
            Status::Verified
        }
    }
}

pub(crate) struct Context<'a> {
    pub model: &'a Model,
    pub profile: &'a Profile,
}

pub struct CheckSpec {
    pub name: &'static str,
    pub anchor: &'static str,
    pub(crate) run: fn(&Context, &mut Outcome),
}

/// Every check in run order.
pub fn check_names() -> Vec<&'static str> {
    checks::ALL.iter().map(|c| c.name).collect()
}

pub(crate) fn run_spec(spec: &CheckSpec, ctx: &Context) -> CheckRecord {
    let start = Instant::now();
    let mut out = Outcome::default();
    (spec.run)(ctx, &mut out);
    CheckRecord {
        check: spec.name.to_string(),
        status: out.status(),
        anchor: spec.anchor.to_string(),
        witnesses: out.witnesses,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown check '{0}'; available: {1}")]
    UnknownCheck(String, String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Runs a single named check against an existing model.
pub fn run_check(model: &Model, profile: &Profile, name: &str) -> Result<CheckRecord, VerifyError> {
    let spec = checks::ALL
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| VerifyError::UnknownCheck(name.to_string(), check_names().join(", ")))?;
    Ok(run_spec(spec, &Context { model, profile }))
}

/// Runs the selected checks (all by default) and assembles the report.
pub fn run_all(config: &Config) -> Result<Report, VerifyError> {
    let model = Model::new(config.params.clone())?;
    let selected: Vec<&CheckSpec> = match &config.checks {
        None => checks::ALL.iter().collect(),
        Some(names) => {
            let mut v = Vec::new();
            for n in names {
                let spec = checks::ALL
                    .iter()
                    .find(|c| c.name == n)
                    .ok_or_else(|| VerifyError::UnknownCheck(n.clone(), check_names().join(", ")))?;
                v.push(spec);
            }
            v
        }
    };
    let ctx = Context {
        model: &model,
        profile: &config.profile,
    };
    let checks: Vec<CheckRecord> = selected.iter().map(|s| run_spec(s, &ctx)).collect();
    let verdict = if checks.iter().any(|c| c.status == Status::Refuted) {
        Status::Refuted
    } else if checks.iter().any(|c| c.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Verified
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        profile: config.profile.name.clone(),
        params: ReportParams {
            q: config.params.q.to_string(),
            c: config.params.c.to_string(),
        },
        filtration: config.profile.filtration,
        checks,
        verdict,
    })
}
