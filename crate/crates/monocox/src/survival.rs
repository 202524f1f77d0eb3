//! Right-censored survival data: validated `(time, status, covariates)`
//! records, a deterministic sorted view, and CSV ingestion.

use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurvivalError {
    #[error("sample has no records")]
    Empty,
    #[error("negative time, row {row}")]
    NegativeTime { row: usize },
    #[error("non-finite value, row {row}, column {column}")]
    NonFinite { row: usize, column: String },
    #[error("status must be 0 or 1, row {row}")]
    BadStatus { row: usize },
    #[error("row {row} has {found} covariates, expected {expected}")]
    RaggedCovariates { row: usize, found: usize, expected: usize },
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("non-numeric cell, row {row}, column {column}")]
    NonNumeric { row: usize, column: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Column mapping for CSV ingestion. The defaults follow the on-disk schema
/// `time,status,z1..zp` with a mandatory header row.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub time_column: String,
    pub status_column: String,
    /// Explicit covariate columns; when empty, every column named
    /// `z1, z2, ...` is picked up in numeric order.
    pub covariate_columns: Vec<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            time_column: "time".to_string(),
            status_column: "status".to_string(),
            covariate_columns: Vec::new(),
        }
    }
}

/// Validated i.i.d. triplets `(T_i, Delta_i, Z_i)` with a cached sorted view.
///
/// Immutable after construction; all accessors are cheap and the type is
/// `Send + Sync`, so samples can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSample {
    times: Vec<f64>,
    status: Vec<bool>,
    covariates: Vec<f64>, // row-major, n * p
    p: usize,
    sorted: Vec<usize>,
    tie_count: usize,
}

impl SurvivalSample {
    /// Build a sample from parallel arrays; `covariates` is row-major with
    /// `p` entries per record.
    pub fn new(
        times: Vec<f64>,
        status: Vec<bool>,
        covariates: Vec<f64>,
        p: usize,
    ) -> Result<Self, SurvivalError> {
        let n = times.len();
        if n == 0 {
            // An empty sample is permitted (degenerate operations handle it),
            // but the covariate array must agree.
            if !covariates.is_empty() || !status.is_empty() {
                return Err(SurvivalError::RaggedCovariates { row: 1, found: covariates.len(), expected: 0 });
            }
            return Ok(Self { times, status, covariates, p, sorted: Vec::new(), tie_count: 0 });
        }
        if status.len() != n {
            return Err(SurvivalError::RaggedCovariates { row: status.len().min(n) + 1, found: status.len(), expected: n });
        }
        if covariates.len() != n * p {
            return Err(SurvivalError::RaggedCovariates {
                row: covariates.len() / p.max(1) + 1,
                found: covariates.len() % p.max(1),
                expected: p,
            });
        }
        for (i, &t) in times.iter().enumerate() {
            if t.is_nan() || t.is_infinite() {
                return Err(SurvivalError::NonFinite { row: i + 1, column: "time".into() });
            }
            if t < 0.0 {
                return Err(SurvivalError::NegativeTime { row: i + 1 });
            }
        }
        for (k, &z) in covariates.iter().enumerate() {
            if !z.is_finite() {
                return Err(SurvivalError::NonFinite {
                    row: k / p + 1,
                    column: format!("z{}", k % p + 1),
                });
            }
        }
        let sorted = sort_view_of(&times, &status);
        let tie_count = count_ties(&times, &sorted);
        Ok(Self { times, status, covariates, p, sorted, tie_count })
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn is_event(&self, i: usize) -> bool {
        self.status[i]
    }

    pub fn covariates_of(&self, i: usize) -> &[f64] {
        &self.covariates[i * self.p..(i + 1) * self.p]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn event_count(&self) -> usize {
        self.status.iter().filter(|&&d| d).count()
    }

    /// Number of records sharing a time with an earlier record
    /// (`n - #distinct times`).
    pub fn tie_count(&self) -> usize {
        self.tie_count
    }

    /// Index permutation ordering records by time, uncensored before
    /// censored at equal times, original index as the final tiebreak.
    pub fn sort_view(&self) -> &[usize] {
        &self.sorted
    }

    /// Times in sorted-view order.
    pub fn sorted_times(&self) -> Vec<f64> {
        self.sorted.iter().map(|&i| self.times[i]).collect()
    }

    /// Event indicators in sorted-view order.
    pub fn sorted_status(&self) -> Vec<bool> {
        self.sorted.iter().map(|&i| self.status[i]).collect()
    }

    /// Largest follow-up time `T_(n)`.
    pub fn max_time(&self) -> Option<f64> {
        self.sorted.last().map(|&i| self.times[i])
    }

    pub fn load_csv<P: AsRef<Path>>(path: P, schema: &CsvSchema) -> Result<Self, SurvivalError> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let find = |name: &str| -> Result<usize, SurvivalError> {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SurvivalError::MissingColumn(name.to_string()))
        };
        let time_idx = find(&schema.time_column)?;
        let status_idx = find(&schema.status_column)?;
        let cov_idx: Vec<(String, usize)> = if schema.covariate_columns.is_empty() {
            let mut found: Vec<(usize, String, usize)> = Vec::new();
            for (i, h) in headers.iter().enumerate() {
                if let Some(rest) = h.strip_prefix('z') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k >= 1 {
                            found.push((k, h.to_string(), i));
                        }
                    }
                }
            }
            found.sort_by_key(|&(k, _, _)| k);
            found.into_iter().map(|(_, name, i)| (name, i)).collect()
        } else {
            let mut v = Vec::with_capacity(schema.covariate_columns.len());
            for name in &schema.covariate_columns {
                v.push((name.clone(), find(name)?));
            }
            v
        };
        let p = cov_idx.len();

        let mut times = Vec::new();
        let mut status = Vec::new();
        let mut covariates = Vec::new();
        for (row_idx, record) in reader.records().enumerate() {
            let row = row_idx + 1;
            let record = record?;
            let parse = |column: &str, idx: usize| -> Result<f64, SurvivalError> {
                record
                    .get(idx)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| SurvivalError::NonNumeric { row, column: column.to_string() })
            };
            let t = parse(&schema.time_column, time_idx)?;
            if !t.is_finite() {
                return Err(SurvivalError::NonFinite { row, column: schema.time_column.clone() });
            }
            if t < 0.0 {
                return Err(SurvivalError::NegativeTime { row });
            }
            let d = parse(&schema.status_column, status_idx)?;
            let d = if d == 0.0 {
                false
            } else if d == 1.0 {
                true
            } else {
                return Err(SurvivalError::BadStatus { row });
            };
            for (name, idx) in &cov_idx {
                let z = parse(name, *idx)?;
                if !z.is_finite() {
                    return Err(SurvivalError::NonFinite { row, column: name.clone() });
                }
                covariates.push(z);
            }
            times.push(t);
            status.push(d);
        }
        Self::new(times, status, covariates, p)
    }

    /// Write the sample back out in the canonical `time,status,z1..zp`
    /// layout. Numeric fields use the shortest round-trip representation,
    /// so `load_csv(write_csv(s)) == s` exactly.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<(), SurvivalError> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header = vec!["time".to_string(), "status".to_string()];
        for k in 1..=self.p {
            header.push(format!("z{k}"));
        }
        writer.write_record(&header)?;
        for i in 0..self.n() {
            let mut row = vec![self.times[i].to_string(), if self.status[i] { "1" } else { "0" }.to_string()];
            for z in self.covariates_of(i) {
                row.push(z.to_string());
            }
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl fmt::Display for SurvivalSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SurvivalSample(n={}, p={}, events={}, ties={})",
            self.n(),
            self.p(),
            self.event_count(),
            self.tie_count()
        )
    }
}

fn sort_view_of(times: &[f64], status: &[bool]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..times.len()).collect();
    idx.sort_by(|&a, &b| {
        times[a]
            .partial_cmp(&times[b])
            .expect("times are finite")
            // Uncensored (status = true) first at equal times.
            .then_with(|| status[b].cmp(&status[a]))
            .then_with(|| a.cmp(&b))
    });
    idx
}

fn count_ties(times: &[f64], sorted: &[usize]) -> usize {
    sorted
        .windows(2)
        .filter(|w| times[w[0]] == times[w[1]])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn sample(times: &[f64], status: &[u8], z: &[f64]) -> SurvivalSample {
        SurvivalSample::new(
            times.to_vec(),
            status.iter().map(|&d| d == 1).collect(),
            z.to_vec(),
            if times.is_empty() { 1 } else { z.len() / times.len() },
        )
        .unwrap()
    }

    #[test]
    fn sort_view_orders_by_time() {
        let s = sample(&[3.0, 1.0, 2.0], &[1, 1, 1], &[0.0, 0.0, 0.0]);
        assert_eq!(s.sort_view(), &[1, 2, 0]);
    }

    #[test]
    fn sort_view_ties_put_events_first() {
        let s = sample(&[1.0, 1.0], &[0, 1], &[0.0, 0.0]);
        assert_eq!(s.sort_view(), &[1, 0]);
        assert_eq!(s.tie_count(), 1);
    }

    #[test]
    fn empty_sample_has_empty_view() {
        let s = SurvivalSample::new(vec![], vec![], vec![], 0).unwrap();
        assert!(s.sort_view().is_empty());
        assert_eq!(s.n(), 0);
    }

    #[test]
    fn rejects_negative_time_and_bad_values() {
        assert!(matches!(
            SurvivalSample::new(vec![1.0, -1.0], vec![true, true], vec![0.0, 0.0], 1),
            Err(SurvivalError::NegativeTime { row: 2 })
        ));
        assert!(matches!(
            SurvivalSample::new(vec![f64::NAN], vec![true], vec![0.0], 1),
            Err(SurvivalError::NonFinite { .. })
        ));
        assert!(matches!(
            SurvivalSample::new(vec![1.0], vec![true], vec![f64::INFINITY], 1),
            Err(SurvivalError::NonFinite { .. })
        ));
    }

    #[test]
    fn csv_happy_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "time,status,z1").unwrap();
        writeln!(f, "1,1,0.1").unwrap();
        writeln!(f, "2,0,0.2").unwrap();
        writeln!(f, "3,1,0.3").unwrap();
        drop(f);
        let s = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.p(), 1);
        assert_eq!(s.tie_count(), 0);
        assert_eq!(s.time(1), 2.0);
        assert!(!s.is_event(1));
        assert_eq!(s.covariates_of(2), &[0.3]);
    }

    #[test]
    fn csv_negative_time_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "time,status\n1,1\n-1,0\n").unwrap();
        let err = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap_err();
        assert_eq!(err.to_string(), "negative time, row 2");
    }

    #[test]
    fn csv_duplicate_time_counts_tie() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "time,status,z1\n1.0,1,0\n2.0,0,0\n3.0,1,0\n1.0,0,0\n").unwrap();
        let s = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(s.tie_count(), 1);
    }

    #[test]
    fn csv_errors_name_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "time,status,z1\n1,1,abc\n").unwrap();
        let err = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap_err();
        assert!(matches!(err, SurvivalError::NonNumeric { row: 1, .. }));

        std::fs::write(&path, "time,status,z1\n1,2,0\n").unwrap();
        let err = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap_err();
        assert!(matches!(err, SurvivalError::BadStatus { row: 1 }));

        std::fs::write(&path, "t,status,z1\n1,1,0\n").unwrap();
        let err = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap_err();
        assert!(matches!(err, SurvivalError::MissingColumn(c) if c == "time"));
    }

    #[test]
    fn csv_covariates_follow_numeric_order_not_file_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "time,z2,status,z1\n1,20,1,10\n2,40,0,30\n").unwrap();
        let s = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(s.p(), 2);
        assert_eq!(s.covariates_of(0), &[10.0, 20.0]);
        assert_eq!(s.covariates_of(1), &[30.0, 40.0]);
    }

    #[test]
    fn csv_custom_schema_resolves_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "followup,dead,age,dose\n1.5,1,63,0.2\n2.5,0,71,0.4\n").unwrap();
        let schema = CsvSchema {
            time_column: "followup".into(),
            status_column: "dead".into(),
            covariate_columns: vec!["age".into(), "dose".into()],
        };
        let s = SurvivalSample::load_csv(&path, &schema).unwrap();
        assert_eq!(s.p(), 2);
        assert_eq!(s.time(1), 2.5);
        assert_eq!(s.covariates_of(0), &[63.0, 0.2]);
        let missing = CsvSchema { covariate_columns: vec!["weight".into()], ..schema };
        assert!(matches!(
            SurvivalSample::load_csv(&path, &missing),
            Err(SurvivalError::MissingColumn(c)) if c == "weight"
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let s = sample(
            &[0.123456789012345, 2.0, std::f64::consts::PI],
            &[1, 0, 1],
            &[0.1, -1.5e-13, 7.25],
        );
        s.write_csv(&path).unwrap();
        let t = SurvivalSample::load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(s, t);
    }
}
