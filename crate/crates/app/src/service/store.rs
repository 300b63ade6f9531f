//! Sessions derived from an append-only event log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use anyhow::Context;
use dosefind::designs::{crm::power_curve, crm_fit_theta};
use dosefind::rational::to_f64;
use dosefind::rng::{derive_seed, rng_from_seed};
use dosefind::{decide, fhat, monotonize, recommend_mtd, DesignKind, DesignSpec, Level, Scenario, TrialState};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::error::ApiError;

const TAG_SESSION: u64 = 0x5345_5353; // "SESS"
const TAG_COHORT: u64 = 0x434f_484f; // "COHO"

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub at: String,
    pub dose: Level,
    pub outcomes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub created: String,
    pub spec: DesignSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// Seed for simulated cohorts.
    pub seed: u64,
    pub state: TrialState,
    pub audit: Vec<AuditEntry>,
    pub status: Status,
    pub next_dose: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommended_mtd: Option<Level>,
}

/// One line of the log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        id: String,
        at: String,
        spec: DesignSpec,
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scenario: Option<Scenario>,
        seed: u64,
    },
    Outcomes {
        id: String,
        at: String,
        dose: Level,
        outcomes: Vec<u8>,
    },
    Closed {
        id: String,
        at: String,
    },
}

impl Event {
    fn id(&self) -> &str {
        match self {
            Event::Created { id, .. } | Event::Outcomes { id, .. } | Event::Closed { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub design: DesignSpec,
    #[serde(default)]
    pub m: Option<usize>,
    /// True curve for simulated cohorts; its target is the design's.
    #[serde(default)]
    pub scenario: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateResponse {
    pub id: String,
    pub next_dose: Level,
    pub status: Status,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeRequest {
    pub dose: usize,
    pub outcomes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub level: Level,
    pub n: u64,
    pub tox: u64,
    pub raw: Option<f64>,
    pub monotonized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub theta: f64,
    pub curve: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeResponse {
    pub next_dose: Level,
    pub estimates: Vec<LevelEstimate>,
    pub decision_reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResponse {
    pub dose: Level,
    pub outcomes: Vec<u8>,
    #[serde(flatten)]
    pub result: OutcomeResponse,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloseResponse {
    pub recommended_mtd: Level,
}

type Shared = Arc<Mutex<SessionRecord>>;

pub struct SessionStore {
    sessions: RwLock<HashMap<String, Shared>>,
    log: Option<Mutex<File>>,
    path: Option<PathBuf>,
    seed: u64,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::internal(e.to_string())
}

impl SessionStore {
    /// Store without persistence.
    pub fn in_memory(seed: u64) -> Self {
        SessionStore { sessions: RwLock::default(), log: None, path: None, seed }
    }

    /// Open (or create) the log at `path` and rebuild every session from it.
    pub fn open(path: &Path, seed: u64) -> anyhow::Result<Self> {
        let store = SessionStore { sessions: RwLock::default(), log: None, path: Some(path.to_owned()), seed };
        if path.exists() {
            let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.with_context(|| format!("cannot read {}", path.display()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let event: Event = serde_json::from_str(&line)
                    .with_context(|| format!("{}:{}: malformed event", path.display(), i + 1))?;
                store
                    .replay(event)
                    .map_err(|e| anyhow::anyhow!("{}:{}: {}", path.display(), i + 1, e.message))?;
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("cannot open {} for appending", path.display()))?;
        Ok(SessionStore { log: Some(Mutex::new(file)), ..store })
    }

    pub fn log_path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn append(&self, event: &Event) -> Result<(), ApiError> {
        let Some(log) = &self.log else { return Ok(()) };
        let mut line = serde_json::to_string(event).map_err(internal)?;
        line.push('\n');
        let mut file = log.lock().map_err(internal)?;
        file.write_all(line.as_bytes()).map_err(internal)?;
        file.sync_data().map_err(internal)
    }

    fn replay(&self, event: Event) -> Result<(), ApiError> {
        if let Event::Created { .. } = event {
            let record = apply_created(event)?;
            self.sessions.write().map_err(internal)?.insert(record.id.clone(), Arc::new(Mutex::new(record)));
            return Ok(());
        }
        let shared = self.lookup(event.id())?;
        let mut record = shared.lock().map_err(internal)?;
        apply(&mut record, event)
    }

    fn lookup(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .map_err(internal)?
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session {id}")))
    }

    pub fn lookup_exists(&self, id: &str) -> Result<(), ApiError> {
        self.lookup(id).map(|_| ())
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().map(|s| s.keys().cloned().collect()).unwrap_or_default();
        ids.sort();
        ids
    }

    pub fn create(&self, req: CreateRequest) -> Result<CreateResponse, ApiError> {
        let spec = req.design;
        let skeleton_len = match spec.kind() {
            DesignKind::Crm { skeleton, .. } => Some(skeleton.len()),
            _ => None,
        };
        let m = req
            .m
            .or(req.scenario.as_ref().map(Vec::len))
            .or(skeleton_len)
            .ok_or_else(|| ApiError::bad_request("give m, a scenario or a CRM skeleton"))?;
        if req.scenario.as_ref().is_some_and(|f| f.len() != m) {
            return Err(ApiError::bad_request("scenario length differs from m"));
        }
        spec.check_levels(m).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let scenario = req
            .scenario
            .map(|f| Scenario::new(f, spec.target_f64()))
            .transpose()
            .map_err(|e| ApiError::bad_request(e.to_string()))?;

        let mut sessions = self.sessions.write().map_err(internal)?;
        let id = (sessions.len() as u64..)
            .map(|k| format!("s{:016x}", derive_seed(self.seed, &[TAG_SESSION, k])))
            .find(|id| !sessions.contains_key(id))
            .expect("unbounded");
        let seed = req.seed.unwrap_or_else(|| derive_seed(self.seed, &[TAG_COHORT, sessions.len() as u64]));
        let event = Event::Created { id: id.clone(), at: now(), spec, m, scenario, seed };
        let record = apply_created(event.clone())?;
        self.append(&event)?;
        let response = CreateResponse { id: id.clone(), next_dose: record.next_dose, status: record.status };
        sessions.insert(id, Arc::new(Mutex::new(record)));
        Ok(response)
    }

    pub fn get(&self, id: &str) -> Result<SessionRecord, ApiError> {
        let shared = self.lookup(id)?;
        let record = shared.lock().map_err(internal)?;
        Ok(record.clone())
    }

    pub fn submit(&self, id: &str, req: OutcomeRequest) -> Result<OutcomeResponse, ApiError> {
        let shared = self.lookup(id)?;
        let mut record = shared.lock().map_err(internal)?;
        self.submit_locked(&mut record, req)
    }

    fn submit_locked(&self, record: &mut SessionRecord, req: OutcomeRequest) -> Result<OutcomeResponse, ApiError> {
        check_open(record)?;
        if req.dose != record.next_dose.get() {
            return Err(ApiError::dose_mismatch(req.dose, record.next_dose));
        }
        check_outcomes(record, &req.outcomes)?;
        let event = Event::Outcomes { id: record.id.clone(), at: now(), dose: record.next_dose, outcomes: req.outcomes };
        let mut next = record.clone();
        apply(&mut next, event.clone())?;
        self.append(&event)?;
        *record = next;
        outcome_response(record)
    }

    /// Draw the next cohort from the session's scenario and submit it.
    pub fn simulate(&self, id: &str) -> Result<SimulateResponse, ApiError> {
        let shared = self.lookup(id)?;
        let mut record = shared.lock().map_err(internal)?;
        check_open(&record)?;
        let Some(sc) = record.scenario.clone() else {
            return Err(ApiError::bad_request("session has no scenario to simulate from"));
        };
        let dose = record.next_dose;
        let mut rng = rng_from_seed(derive_seed(record.seed, &[record.audit.len() as u64]));
        let outcomes: Vec<u8> =
            (0..record.spec.cohort()).map(|_| u8::from(rng.random::<f64>() < sc.rate(dose))).collect();
        let result = self.submit_locked(&mut record, OutcomeRequest { dose: dose.get(), outcomes: outcomes.clone() })?;
        Ok(SimulateResponse { dose, outcomes, result })
    }

    pub fn close(&self, id: &str) -> Result<CloseResponse, ApiError> {
        let shared = self.lookup(id)?;
        let mut record = shared.lock().map_err(internal)?;
        check_open(&record)?;
        let event = Event::Closed { id: id.to_owned(), at: now() };
        let mut next = record.clone();
        apply(&mut next, event.clone())?;
        self.append(&event)?;
        *record = next;
        Ok(CloseResponse { recommended_mtd: record.recommended_mtd.expect("set on close") })
    }
}

fn check_open(record: &SessionRecord) -> Result<(), ApiError> {
    match record.status {
        Status::Active => Ok(()),
        Status::Closed => Err(ApiError::conflict(format!("session {} is closed", record.id))),
    }
}

fn check_outcomes(record: &SessionRecord, outcomes: &[u8]) -> Result<(), ApiError> {
    let k = record.spec.cohort();
    if outcomes.len() != k {
        return Err(ApiError::bad_request(format!("expected {k} outcomes, got {}", outcomes.len())));
    }
    if let Some(i) = outcomes.iter().position(|&y| y > 1) {
        return Err(ApiError::bad_request(format!("outcomes[{i}] must be 0 or 1")));
    }
    Ok(())
}

fn bad(e: dosefind::Error) -> ApiError {
    ApiError::bad_request(e.to_string())
}

fn apply_created(event: Event) -> Result<SessionRecord, ApiError> {
    let Event::Created { id, at, spec, m, scenario, seed } = event else {
        return Err(ApiError::internal("expected a creation event"));
    };
    let state = TrialState::new(m, spec.start()).map_err(bad)?;
    let next_dose = decide(&state, &spec).map_err(bad)?.next;
    Ok(SessionRecord {
        id,
        created: at,
        spec,
        scenario,
        seed,
        state,
        audit: Vec::new(),
        status: Status::Active,
        next_dose,
        recommended_mtd: None,
    })
}

/// Every state change goes through here, live or on replay.
fn apply(record: &mut SessionRecord, event: Event) -> Result<(), ApiError> {
    match event {
        Event::Created { .. } => Err(ApiError::conflict(format!("session {} already exists", record.id))),
        Event::Outcomes { at, dose, outcomes, .. } => {
            check_open(record)?;
            if dose != record.next_dose {
                return Err(ApiError::dose_mismatch(dose.get(), record.next_dose));
            }
            check_outcomes(record, &outcomes)?;
            let toxic: Vec<bool> = outcomes.iter().map(|&y| y == 1).collect();
            record.state.record_cohort(dose, &toxic).map_err(bad)?;
            record.next_dose = decide(&record.state, &record.spec).map_err(bad)?.next;
            record.audit.push(AuditEntry { at, dose, outcomes });
            Ok(())
        }
        Event::Closed { .. } => {
            check_open(record)?;
            record.recommended_mtd = Some(recommend_mtd(&record.state, &record.spec).map_err(bad)?);
            record.status = Status::Closed;
            Ok(())
        }
    }
}

pub fn estimates(state: &TrialState) -> Vec<LevelEstimate> {
    let raw = fhat(state);
    let iso = monotonize(&raw).ok();
    (0..state.m())
        .map(|i| {
            let u = Level::from_index(i);
            LevelEstimate {
                level: u,
                n: state.n_at(u),
                tox: state.tox_at(u),
                raw: raw.at(u).map(to_f64),
                monotonized: iso.as_ref().and_then(|e| e.at(u)).map(to_f64),
            }
        })
        .collect()
}

fn outcome_response(record: &SessionRecord) -> Result<OutcomeResponse, ApiError> {
    let decision = decide(&record.state, &record.spec).map_err(bad)?;
    let model = match record.spec.kind() {
        DesignKind::Crm { skeleton, .. } if !record.state.is_empty() => {
            let theta = crm_fit_theta(&record.state, &record.spec).map_err(bad)?;
            Some(ModelFit { theta, curve: power_curve(skeleton, theta) })
        }
        _ => None,
    };
    Ok(OutcomeResponse {
        next_dose: decision.next,
        estimates: estimates(&record.state),
        decision_reason: decision.reason.to_string(),
        model,
    })
}
