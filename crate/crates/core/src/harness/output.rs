//! On-disk layout of a sweep: records.csv, summary.csv, fit.json, spec.json.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ExperimentSpec, SlopeFit, SummaryRow, SweepResult, TrialRecord};
use crate::error::{Error, Result};

const RECORDS_HEADER: [&str; 6] = ["m", "trial", "seed", "error", "objective", "wall_time_ms"];
const SUMMARY_HEADER: [&str; 6] = ["m", "mu", "trials", "median", "q1", "q3"];

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header).map_err(|e| Error::parse(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::parse(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_csv<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let found = r.headers().map_err(|e| Error::parse(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(path, format!("expected header {}", header.join(","))));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::parse(path, e)))
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

/// Writes the sweep into `dir` (created if missing). Records are sorted by
/// `(m, trial)` first, so the files depend only on the spec.
pub fn emit(spec: &ExperimentSpec, result: &SweepResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut records = result.records.clone();
    records.sort_by_key(|r| (r.m, r.trial));
    write_csv(&dir.join("records.csv"), &RECORDS_HEADER, &records)?;
    write_csv(&dir.join("summary.csv"), &SUMMARY_HEADER, &result.summary)?;
    write_json(&dir.join("fit.json"), &result.fit)?;
    write_json(&dir.join("spec.json"), spec)
}

/// Reads back a directory written by [`emit`].
pub fn parse(dir: &Path) -> Result<SweepResult> {
    let records: Vec<TrialRecord> = read_csv(&dir.join("records.csv"), &RECORDS_HEADER)?;
    let summary: Vec<SummaryRow> = read_csv(&dir.join("summary.csv"), &SUMMARY_HEADER)?;
    let fit: SlopeFit = read_json(&dir.join("fit.json"))?;
    Ok(SweepResult { records, summary, fit })
}

/// Loads an experiment spec from a JSON file.
pub fn read_spec(path: &Path) -> Result<ExperimentSpec> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::super::{run_sweep, tests::small_spec, Regressor};
    use super::*;
    use crate::par::Execution;

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let result = SweepResult::from_records(Vec::new(), &[], Regressor::M, 0);
        emit(&small_spec(), &result, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("records.csv")).unwrap();
        assert_eq!(text, "m,trial,seed,error,objective,wall_time_ms\n");
        assert_eq!(parse(dir.path()).unwrap(), result);
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = small_spec();
        let result = run_sweep(&spec, Execution::Sequential).unwrap();
        emit(&spec, &result, dir.path()).unwrap();
        assert_eq!(parse(dir.path()).unwrap(), result);
        assert_eq!(read_spec(&dir.path().join("spec.json")).unwrap(), spec);
    }

    #[test]
    fn missing_directory_reports_path() {
        let err = parse(Path::new("/nonexistent/sweep")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/sweep/records.csv"));
    }
}
