//! In-memory table of Sobol jobs.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use llm_roi_core::sensitivity::SobolIndices;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ErrorBody;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    pub fn is_finished(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: String,
    pub state: JobState,
    /// Fraction of model evaluations completed.
    pub progress: f64,
    pub submitted_at: DateTime<Utc>,
    pub finished_at: Option<DateTime<Utc>>,
    /// Normalized spec the job runs.
    pub spec: Value,
    pub result: Option<SobolIndices>,
    pub error: Option<ErrorBody>,
}

struct Entry {
    record: JobRecord,
    finished: Option<Instant>,
}

/// Jobs keyed by id. Finished jobs are dropped once older than the
/// retention period; pruning happens on every insert.
pub struct JobTable {
    retention: Duration,
    jobs: Mutex<HashMap<String, Entry>>,
}

impl JobTable {
    pub fn new(retention: Duration) -> Self {
        Self {
            retention,
            jobs: Mutex::new(HashMap::new()),
        }
    }

    /// Register a queued job for `spec` and return its record.
    pub fn submit(&self, spec: Value) -> JobRecord {
        let record = JobRecord {
            id: uuid::Uuid::new_v4().to_string(),
            state: JobState::Queued,
            progress: 0.0,
            submitted_at: Utc::now(),
            finished_at: None,
            spec,
            result: None,
            error: None,
        };
        let mut jobs = self.jobs.lock().expect("job table lock");
        let now = Instant::now();
        jobs.retain(|_, e| e.finished.is_none_or(|t| now.duration_since(t) < self.retention));
        jobs.insert(
            record.id.clone(),
            Entry {
                record: record.clone(),
                finished: None,
            },
        );
        record
    }

    pub fn get(&self, id: &str) -> Option<JobRecord> {
        let jobs = self.jobs.lock().expect("job table lock");
        let e = jobs.get(id)?;
        if e.finished.is_some_and(|t| t.elapsed() >= self.retention) {
            return None;
        }
        Some(e.record.clone())
    }

    pub fn len(&self) -> usize {
        self.jobs.lock().expect("job table lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn update(&self, id: &str, f: impl FnOnce(&mut Entry)) {
        if let Some(e) = self.jobs.lock().expect("job table lock").get_mut(id) {
            f(e);
        }
    }

    pub fn start(&self, id: &str) {
        self.update(id, |e| {
            if e.record.state == JobState::Queued {
                e.record.state = JobState::Running;
            }
        });
    }

    /// Raise the progress of a running job; lower values are ignored.
    pub fn set_progress(&self, id: &str, fraction: f64) {
        self.update(id, |e| {
            if e.record.state == JobState::Running && fraction > e.record.progress {
                e.record.progress = fraction.min(1.0);
            }
        });
    }

    pub fn finish(&self, id: &str, outcome: Result<SobolIndices, ErrorBody>) -> Option<JobRecord> {
        let mut out = None;
        self.update(id, |e| {
            match outcome {
                Ok(indices) => {
                    e.record.state = JobState::Done;
                    e.record.progress = 1.0;
                    e.record.result = Some(indices);
                }
                Err(body) => {
                    e.record.state = JobState::Failed;
                    e.record.error = Some(body);
                }
            }
            e.record.finished_at = Some(Utc::now());
            e.finished = Some(Instant::now());
            out = Some(e.record.clone());
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn lifecycle_and_monotone_progress() {
        let table = JobTable::new(Duration::from_secs(60));
        let r = table.submit(json!({}));
        assert_eq!(r.state, JobState::Queued);
        table.set_progress(&r.id, 0.5);
        assert_eq!(table.get(&r.id).unwrap().progress, 0.0);
        table.start(&r.id);
        table.set_progress(&r.id, 0.5);
        table.set_progress(&r.id, 0.25);
        assert_eq!(table.get(&r.id).unwrap().progress, 0.5);
        let failed = table
            .finish(
                &r.id,
                Err(ErrorBody {
                    code: "degenerate_model".into(),
                    message: "flat".into(),
                    field: None,
                }),
            )
            .unwrap();
        assert_eq!(failed.state, JobState::Failed);
        assert!(failed.finished_at.is_some());
        table.start(&r.id);
        assert_eq!(table.get(&r.id).unwrap().state, JobState::Failed);
    }

    #[test]
    fn finished_jobs_expire() {
        let table = JobTable::new(Duration::ZERO);
        let r = table.submit(json!({}));
        assert!(table.get(&r.id).is_some());
        table.finish(
            &r.id,
            Err(ErrorBody {
                code: "x".into(),
                message: "x".into(),
                field: None,
            }),
        );
        assert!(table.get(&r.id).is_none());
        table.submit(json!({}));
        assert_eq!(table.len(), 1);
    }
}
