//! Recognition job bookkeeping: upload → queued → running → awaiting review
//! → finalized (or failed). The store only enforces the state machine; the
//! service decides what runs when.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobState {
    Queued,
    Running,
    AwaitingReview,
    Finalized,
    Failed,
}

impl JobState {
    pub fn as_str(self) -> &'static str {
        match self {
            JobState::Queued => "queued",
            JobState::Running => "running",
            JobState::AwaitingReview => "awaiting-review",
            JobState::Finalized => "finalized",
            JobState::Failed => "failed",
        }
    }

    /// The only edges the machine has.
    pub fn can_move_to(self, next: JobState) -> bool {
        use JobState::*;
        matches!(
            (self, next),
            (Queued, Running) | (Running, AwaitingReview) | (Running, Failed) | (AwaitingReview, Finalized)
        )
    }
}

impl fmt::Display for JobState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Ogr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    pub kind: JobKind,
    pub state: JobState,
    /// Artifact name → location (file path or URL path).
    pub artifacts: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Set while a reviewer holds the job.
    #[serde(default)]
    pub review_open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JobError {
    #[error("no job {0:?}")]
    NotFound(String),
    #[error("job {job} is {from}; cannot move to {to}")]
    WrongState { job: String, from: JobState, to: JobState },
    #[error("job {0} already has a review in progress")]
    ReviewBusy(String),
    #[error("job {0} has no review in progress")]
    NoReview(String),
}

#[derive(Debug, Default)]
pub struct JobStore {
    jobs: BTreeMap<String, JobRecord>,
    counter: u64,
}

impl JobStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn submit(&mut self, kind: JobKind) -> String {
        self.counter += 1;
        let job_id = format!("job-{:06}", self.counter);
        self.jobs.insert(
            job_id.clone(),
            JobRecord {
                job_id: job_id.clone(),
                kind,
                state: JobState::Queued,
                artifacts: BTreeMap::new(),
                error: None,
                review_open: false,
            },
        );
        job_id
    }

    pub fn get(&self, job_id: &str) -> Result<&JobRecord, JobError> {
        self.jobs.get(job_id).ok_or_else(|| JobError::NotFound(job_id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    fn record(&mut self, job_id: &str) -> Result<&mut JobRecord, JobError> {
        self.jobs.get_mut(job_id).ok_or_else(|| JobError::NotFound(job_id.to_string()))
    }

    fn advance(&mut self, job_id: &str, to: JobState) -> Result<&mut JobRecord, JobError> {
        let rec = self.record(job_id)?;
        if !rec.state.can_move_to(to) {
            return Err(JobError::WrongState {
                job: job_id.to_string(),
                from: rec.state,
                to,
            });
        }
        rec.state = to;
        Ok(rec)
    }

    pub fn start(&mut self, job_id: &str) -> Result<(), JobError> {
        self.advance(job_id, JobState::Running).map(|_| ())
    }

    pub fn complete(&mut self, job_id: &str) -> Result<(), JobError> {
        self.advance(job_id, JobState::AwaitingReview).map(|_| ())
    }

    pub fn fail(&mut self, job_id: &str, error: impl Into<String>) -> Result<(), JobError> {
        self.advance(job_id, JobState::Failed)?.error = Some(error.into());
        Ok(())
    }

    pub fn add_artifact(&mut self, job_id: &str, name: impl Into<String>, location: impl Into<String>) -> Result<(), JobError> {
        self.record(job_id)?.artifacts.insert(name.into(), location.into());
        Ok(())
    }

    /// Claims the job for one reviewer.
    pub fn begin_review(&mut self, job_id: &str) -> Result<(), JobError> {
        let rec = self.record(job_id)?;
        if rec.state != JobState::AwaitingReview {
            return Err(JobError::WrongState {
                job: job_id.to_string(),
                from: rec.state,
                to: JobState::Finalized,
            });
        }
        if rec.review_open {
            return Err(JobError::ReviewBusy(job_id.to_string()));
        }
        rec.review_open = true;
        Ok(())
    }

    /// Gives the job back without finalizing (the edits were rejected).
    pub fn abandon_review(&mut self, job_id: &str) -> Result<(), JobError> {
        let rec = self.record(job_id)?;
        if !rec.review_open {
            return Err(JobError::NoReview(job_id.to_string()));
        }
        rec.review_open = false;
        Ok(())
    }

    pub fn finalize(&mut self, job_id: &str) -> Result<(), JobError> {
        if !self.get(job_id)?.review_open {
            return Err(JobError::NoReview(job_id.to_string()));
        }
        let rec = self.advance(job_id, JobState::Finalized)?;
        rec.review_open = false;
        Ok(())
    }
}
