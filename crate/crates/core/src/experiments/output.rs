//! CSV and JSON emission. Floats use the shortest representation that
//! round-trips, so files are byte-stable across runs and platforms.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use super::{StudyOutcome, SuiteConfig};
use crate::error::{Error, Result};
use crate::record::ExperimentRecord;

pub const CSV_HEADER: [&str; 6] = ["study", "level", "mesh", "metric", "value", "provenance"];

/// Shortest round-trip decimal, with an exponent only for very large or small magnitudes.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_path(dir: &Path, outcome: &StudyOutcome) -> PathBuf {
    dir.join(format!("{}.csv", outcome.kind.id()))
}

/// Auxiliary values become extra rows named `metric.key`.
pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        let level = r.level.to_string();
        let mesh = format_f64(r.mesh);
        w.write_record([&r.study, &level, &mesh, &r.metric, &format_f64(r.value), &r.provenance])
            .map_err(io)?;
        for (k, v) in &r.auxiliary {
            let metric = format!("{}.{k}", r.metric);
            w.write_record([&r.study, &level, &mesh, &metric, &format_f64(*v), &r.provenance])
                .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// 1-based line of record `index` in its CSV, counting the header and any
/// auxiliary rows before it.
pub fn csv_line(records: &[ExperimentRecord], index: usize) -> usize {
    2 + records[..index].iter().map(|r| 1 + r.auxiliary.len()).sum::<usize>()
}

pub fn summary_json(cfg: &SuiteConfig, outcomes: &[StudyOutcome], timestamp: bool) -> Value {
    let mut studies = Map::new();
    for o in outcomes {
        studies.insert(
            o.kind.id().into(),
            json!({
                "passed": o.passed(),
                "records": o.records.len(),
                "csv": format!("{}.csv", o.kind.id()),
                "checks": o.checks,
                "summary": Value::Object(o.summary.clone()),
            }),
        );
    }
    let mut root = Map::new();
    root.insert("seed".into(), cfg.seed.into());
    root.insert("passed".into(), outcomes.iter().all(|o| o.passed()).into());
    root.insert("studies".into(), Value::Object(studies));
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        root.insert("timestamp".into(), secs.into());
    }
    Value::Object(root)
}

/// Writes one CSV per study plus `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &SuiteConfig, outcomes: &[StudyOutcome], timestamp: bool) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for o in outcomes {
        write_csv(&csv_path(dir, o), &o.records)?;
    }
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary_json(cfg, outcomes, timestamp))
        .map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.1, 1.0, 1e-20, 123456.789, 2.5e-8, f64::MIN_POSITIVE, -0.0, 1e300] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn csv_has_fixed_header_and_aux_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let recs = vec![
            ExperimentRecord::new("s", 1, 0.5, "m", 2.0, "p,q").unwrap().with_aux("k", 3.0),
            ExperimentRecord::new("s", 2, 0.25, "m", 1.0, "p").unwrap(),
        ];
        write_csv(&path, &recs).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "study,level,mesh,metric,value,provenance");
        assert_eq!(lines[1], "s,1,0.5,m,2.0,\"p,q\"");
        assert_eq!(lines[2], "s,1,0.5,m.k,3.0,\"p,q\"");
        assert_eq!(csv_line(&recs, 1), 4);
    }
}
