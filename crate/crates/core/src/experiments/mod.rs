//! Scripted studies. Each returns its records in a deterministic order, the
//! checks it asserts, and a JSON summary of aggregates and flags.

pub mod closed_form;
pub mod config;
pub mod convergence;
pub mod dyson_compare;
pub mod escape;
pub mod invariants;
pub mod output;
pub mod regularity;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::record::ExperimentRecord;

pub use closed_form::run_closed_form;
pub use config::SuiteConfig;
pub use convergence::run_convergence;
pub use dyson_compare::run_dyson_compare;
pub use escape::{derivative_energy, derivative_jump, run_domain_escape};
pub use invariants::run_invariants;
pub use regularity::run_regularity_sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Invariants,
    Converge,
    DysonCompare,
    RegularitySweep,
    DomainEscape,
    ClosedForm,
}

impl StudyKind {
    pub const ALL: [StudyKind; 6] = [
        StudyKind::Invariants,
        StudyKind::Converge,
        StudyKind::DysonCompare,
        StudyKind::RegularitySweep,
        StudyKind::DomainEscape,
        StudyKind::ClosedForm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            StudyKind::Invariants => "invariants",
            StudyKind::Converge => "converge",
            StudyKind::DysonCompare => "dyson-compare",
            StudyKind::RegularitySweep => "regularity-sweep",
            StudyKind::DomainEscape => "domain-escape",
            StudyKind::ClosedForm => "closed-form",
        }
    }
}

/// An asserted property of a study; failing checks make the CLI exit 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Index of the offending record, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub kind: StudyKind,
    pub records: Vec<ExperimentRecord>,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
}

impl StudyOutcome {
    fn new(kind: StudyKind) -> Self {
        Self {
            kind,
            records: Vec::new(),
            checks: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, record: ExperimentRecord) -> usize {
        self.records.push(record);
        self.records.len() - 1
    }

    fn record(
        &mut self,
        level: i64,
        mesh: f64,
        metric: &str,
        value: f64,
        provenance: &str,
    ) -> Result<usize> {
        let rec = ExperimentRecord::new(self.kind.id(), level, mesh, metric, value, provenance)?;
        Ok(self.push(rec))
    }

    fn check(&mut self, name: &str, passed: bool, detail: String, record: Option<usize>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
            record,
        });
    }

    /// One check per metric: passes when every recorded value is ≤ `limit`,
    /// pointing at the worst record otherwise.
    fn check_max(&mut self, name: &str, metric: &str, limit: f64) {
        let worst = self
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.metric == metric)
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value));
        match worst {
            Some((idx, rec)) => {
                let value = rec.value;
                self.summary.insert(format!("worst-{metric}"), json_f64(value));
                self.check(
                    name,
                    value <= limit,
                    format!("worst {metric} = {value:e} (limit {limit:e})"),
                    (value > limit).then_some(idx),
                );
            }
            None => self.check(name, false, format!("no {metric} records"), None),
        }
    }

    fn flag(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.into(), value.into());
    }
}

pub(crate) fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn run_study(kind: StudyKind, cfg: &SuiteConfig) -> Result<StudyOutcome> {
    match kind {
        StudyKind::Invariants => run_invariants(cfg),
        StudyKind::Converge => run_convergence(cfg),
        StudyKind::DysonCompare => run_dyson_compare(cfg),
        StudyKind::RegularitySweep => run_regularity_sweep(cfg),
        StudyKind::DomainEscape => run_domain_escape(cfg),
        StudyKind::ClosedForm => run_closed_form(cfg),
    }
}

/// Worker pool sized by `EVOPAGATOR_THREADS` (machine parallelism when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("EVOPAGATOR_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("EVOPAGATOR_THREADS must be a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Strictly decreasing sequence.
pub(crate) fn decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
