use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub study: String,
    pub level: i64,
    pub mesh: f64,
    pub metric: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub auxiliary: BTreeMap<String, f64>,
    pub provenance: String,
}

impl ExperimentRecord {
    pub fn new(
        study: impl Into<String>,
        level: i64,
        mesh: f64,
        metric: impl Into<String>,
        value: f64,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let rec = Self {
            study: study.into(),
            level,
            mesh,
            metric: metric.into(),
            value,
            auxiliary: BTreeMap::new(),
            provenance: provenance.into(),
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn with_aux(mut self, key: impl Into<String>, value: f64) -> Self {
        self.auxiliary.insert(key.into(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.study.is_empty() {
            return Err(Error::InvalidArgument("record has an empty study id".into()));
        }
        if !self.value.is_finite() || !self.mesh.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite metric in record {}/{}",
                self.study, self.metric
            )));
        }
        if let Some((k, _)) = self.auxiliary.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite auxiliary metric {k}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_id_and_nan() {
        assert!(ExperimentRecord::new("", 0, 0.1, "m", 1.0, "p").is_err());
        assert!(ExperimentRecord::new("s", 0, 0.1, "m", f64::NAN, "p").is_err());
        let r = ExperimentRecord::new("s", 0, 0.1, "m", 1.0, "p").unwrap();
        assert!(r.with_aux("x", f64::INFINITY).validate().is_err());
    }
}
