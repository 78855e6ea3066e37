//! Journaled record store: tool records, their revision histories and user
//! accounts.
//!
//! Every mutation is appended to a JSON-lines journal before it becomes
//! visible in memory. A failed append leaves both the journal and the
//! in-memory state (including the identifier counter) untouched.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use toolreg_core::registry::{
    initial_revision, mint_rid, record_revision, revise_record, type_violations, validate_record, RecordEdit, Revision,
    RevisionError, RidError, Timestamp, ValidationReport, Vocabularies,
};
use toolreg_core::{ResourceId, ToolRecord};

use crate::auth::{Role, UserAccount};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: corrupt journal entry: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("record failed validation")]
    Invalid(ValidationReport),
    #[error("new records must not carry an accession (got {0})")]
    AccessionPreset(ResourceId),
    #[error("no record {0}")]
    NotFound(ResourceId),
    #[error(transparent)]
    Revision(#[from] RevisionError),
    #[error(transparent)]
    Rid(#[from] RidError),
    #[error("email {0:?} is already registered")]
    DuplicateEmail(String),
}

#[allow(clippy::large_enum_variant)]
#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Entry {
    Record { record: ToolRecord, revision: Revision },
    User { account: UserAccount },
}

#[derive(Default)]
struct State {
    last_rid: u64,
    records: BTreeMap<ResourceId, ToolRecord>,
    history: BTreeMap<ResourceId, Vec<Revision>>,
    users: Vec<UserAccount>,
}

impl State {
    fn apply(&mut self, entry: Entry) {
        match entry {
            Entry::Record { record, revision } => {
                let rid = revision.accession;
                self.last_rid = self.last_rid.max(rid.number());
                self.history.entry(rid).or_default().push(revision);
                self.records.insert(rid, record);
            }
            Entry::User { account } => match self.users.iter_mut().find(|u| u.user_id == account.user_id) {
                Some(slot) => *slot = account,
                None => self.users.push(account),
            },
        }
    }
}

pub struct RecordStore {
    journal: Option<PathBuf>,
    vocab: Vocabularies,
    state: Mutex<State>,
}

impl RecordStore {
    /// Opens (or starts) the journal at `path`, replaying existing entries.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let mut state = State::default();
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for (i, line) in text.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry: Entry = serde_json::from_str(line).map_err(|e| StoreError::Corrupt {
                        path: path.to_path_buf(),
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                    state.apply(entry);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(source) => {
                return Err(StoreError::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
        }
        Ok(RecordStore {
            journal: Some(path.to_path_buf()),
            vocab: Vocabularies::builtin(),
            state: Mutex::new(state),
        })
    }

    pub fn in_memory() -> Self {
        RecordStore {
            journal: None,
            vocab: Vocabularies::builtin(),
            state: Mutex::new(State::default()),
        }
    }

    pub fn with_vocabularies(mut self, vocab: Vocabularies) -> Self {
        self.vocab = vocab;
        self
    }

    pub fn vocabularies(&self) -> &Vocabularies {
        &self.vocab
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn append(&self, entries: &[Entry]) -> Result<(), StoreError> {
        let Some(path) = &self.journal else {
            return Ok(());
        };
        let mut buf = String::new();
        for e in entries {
            buf.push_str(&serde_json::to_string(e).expect("journal entries serialize"));
            buf.push('\n');
        }
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        f.write_all(buf.as_bytes()).map_err(io)?;
        f.flush().map_err(io)
    }

    /// Checks a submission. Active records must pass full validation except
    /// for the accession they are about to receive; parked records only need
    /// well-formed values.
    pub fn check_submission(&self, record: &ToolRecord) -> Result<(), StoreError> {
        if let Some(rid) = record.accession {
            return Err(StoreError::AccessionPreset(rid));
        }
        let report = if record.is_parked() {
            ValidationReport {
                violations: type_violations(record),
            }
        } else {
            validate_record(record, &self.vocab).without_accession()
        };
        if report.is_valid() {
            Ok(())
        } else {
            Err(StoreError::Invalid(report))
        }
    }

    /// Mints an accession for `record` and stores it as revision 1.
    pub fn create(&self, record: ToolRecord, editor: &str, at: Timestamp) -> Result<ToolRecord, StoreError> {
        Ok(self.create_many(vec![record], editor, at)?.remove(0))
    }

    /// Stores several submissions under one journal write. Either all are
    /// stored or none.
    pub fn create_many(
        &self,
        records: Vec<ToolRecord>,
        editor: &str,
        at: Timestamp,
    ) -> Result<Vec<ToolRecord>, StoreError> {
        for r in &records {
            self.check_submission(r)?;
        }
        let mut state = self.lock();
        let mut counter = state.last_rid;
        let mut entries = Vec::with_capacity(records.len());
        for mut record in records {
            let (rid, next) = mint_rid(counter)?;
            counter = next;
            record.accession = Some(rid);
            record.revision = 1;
            let revision = initial_revision(&record, editor, at)?;
            entries.push(Entry::Record { record, revision });
        }
        self.append(&entries)?;
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            if let Entry::Record { record, .. } = &e {
                out.push(record.clone());
            }
            state.apply(e);
        }
        Ok(out)
    }

    /// Applies an edit under optimistic concurrency.
    pub fn revise(
        &self,
        rid: ResourceId,
        edit: &RecordEdit,
        editor: &str,
        base_revision: u64,
        at: Timestamp,
    ) -> Result<ToolRecord, StoreError> {
        let mut state = self.lock();
        let current = state.records.get(&rid).ok_or(StoreError::NotFound(rid))?;
        let (record, revision) = revise_record(current, edit, editor, base_revision, at, &self.vocab)?;
        let entry = Entry::Record {
            record: record.clone(),
            revision,
        };
        self.append(std::slice::from_ref(&entry))?;
        state.apply(entry);
        Ok(record)
    }

    /// Replaces a stored record with the result of merging new evidence into
    /// it. Returns `None` when nothing changed.
    pub fn replace_merged(
        &self,
        rid: ResourceId,
        merged: ToolRecord,
        editor: &str,
        at: Timestamp,
    ) -> Result<Option<ToolRecord>, StoreError> {
        let mut state = self.lock();
        let current = state.records.get(&rid).ok_or(StoreError::NotFound(rid))?;
        let mut next = merged;
        next.accession = Some(rid);
        next.revision = current.revision;
        if &next == current {
            return Ok(None);
        }
        next.revision = current.revision + 1;
        let revision = record_revision(current, &next, editor, at)?;
        let entry = Entry::Record {
            record: next.clone(),
            revision,
        };
        self.append(std::slice::from_ref(&entry))?;
        state.apply(entry);
        Ok(Some(next))
    }

    pub fn get(&self, rid: ResourceId) -> Option<ToolRecord> {
        self.lock().records.get(&rid).cloned()
    }

    /// All records in accession order.
    pub fn list(&self) -> Vec<ToolRecord> {
        self.lock().records.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.lock().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, rid: ResourceId) -> bool {
        self.lock().records.contains_key(&rid)
    }

    pub fn last_minted(&self) -> u64 {
        self.lock().last_rid
    }

    pub fn revisions(&self, rid: ResourceId) -> Option<Vec<Revision>> {
        self.lock().history.get(&rid).cloned()
    }

    /// Registers an account; emails compare case-insensitively.
    pub fn add_user(
        &self,
        email: &str,
        salt: String,
        credential_hash: String,
        role: Role,
        at: Timestamp,
    ) -> Result<UserAccount, StoreError> {
        let mut state = self.lock();
        if state.users.iter().any(|u| u.email.eq_ignore_ascii_case(email)) {
            return Err(StoreError::DuplicateEmail(email.to_string()));
        }
        let account = UserAccount {
            user_id: format!("u{}", state.users.len() + 1),
            email: email.to_string(),
            salt,
            credential_hash,
            created_at: at.0,
            role,
        };
        let entry = Entry::User {
            account: account.clone(),
        };
        self.append(std::slice::from_ref(&entry))?;
        state.apply(entry);
        Ok(account)
    }

    pub fn user_by_email(&self, email: &str) -> Option<UserAccount> {
        self.lock()
            .users
            .iter()
            .find(|u| u.email.eq_ignore_ascii_case(email))
            .cloned()
    }

    pub fn user(&self, user_id: &str) -> Option<UserAccount> {
        self.lock().users.iter().find(|u| u.user_id == user_id).cloned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toolreg_core::registry::{replay, Person, RecordStatus, Release};

    pub(crate) fn valid() -> ToolRecord {
        ToolRecord {
            name: "Bowtie".into(),
            description: "Short read aligner.".into(),
            links: vec!["https://example.org/bowtie".into()],
            tool_type: Some("command-line tool".into()),
            functions: vec!["operation_3198".into()],
            authors: vec![Person::named("B. Langmead")],
            domains: vec!["genomics".into()],
            releases: vec![Release {
                version: "1.0".into(),
                date: None,
            }],
            platforms: vec!["Linux".into()],
            ..Default::default()
        }
    }

    #[test]
    fn create_mints_sequential_ids_and_persists() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        let store = RecordStore::open(&path).unwrap();
        let a = store.create(valid(), "u1", Timestamp(1)).unwrap();
        let b = store.create(valid(), "u1", Timestamp(2)).unwrap();
        assert_eq!(a.accession.unwrap().to_string(), "AZ1");
        assert_eq!(b.accession.unwrap().to_string(), "AZ2");
        assert_eq!(a.revision, 1);

        let reopened = RecordStore::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
        assert_eq!(reopened.last_minted(), 2);
        assert_eq!(reopened.get(a.accession.unwrap()), Some(a));
    }

    #[test]
    fn invalid_and_preset_submissions_are_rejected() {
        let store = RecordStore::in_memory();
        let mut bad = valid();
        bad.links.clear();
        match store.create(bad, "u", Timestamp(0)) {
            Err(StoreError::Invalid(r)) => assert!(r.fields().contains("links")),
            other => panic!("{other:?}"),
        }
        let mut preset = valid();
        preset.accession = ResourceId::new(9);
        assert!(matches!(
            store.create(preset, "u", Timestamp(0)),
            Err(StoreError::AccessionPreset(_))
        ));
        assert_eq!(store.last_minted(), 0);

        let mut parked = valid();
        parked.links.clear();
        parked.status = RecordStatus::NeedsCuration;
        assert!(store.create(parked, "u", Timestamp(0)).is_ok());
    }

    #[test]
    fn failed_write_does_not_advance_counter() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("sub");
        std::fs::create_dir(&sub).unwrap();
        let store = RecordStore::open(&sub.join("store.jsonl")).unwrap();
        store.create(valid(), "u", Timestamp(0)).unwrap();
        std::fs::remove_dir_all(&sub).unwrap();
        std::fs::write(&sub, b"not a directory").unwrap();
        assert!(matches!(
            store.create(valid(), "u", Timestamp(0)),
            Err(StoreError::Io { .. })
        ));
        assert_eq!(store.last_minted(), 1);
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn revisions_replay_to_current() {
        let store = RecordStore::in_memory();
        let rec = store.create(valid(), "u1", Timestamp(1)).unwrap();
        let rid = rec.accession.unwrap();
        let mut edit = RecordEdit::new();
        edit.insert("description".into(), serde_json::json!("Fast aligner."));
        let r2 = store.revise(rid, &edit, "u2", 1, Timestamp(2)).unwrap();
        assert_eq!(r2.revision, 2);
        assert!(matches!(
            store.revise(rid, &edit, "u2", 1, Timestamp(3)),
            Err(StoreError::Revision(RevisionError::Conflict { base: 1, current: 2 }))
        ));
        let hist = store.revisions(rid).unwrap();
        assert_eq!(hist.len(), 2);
        assert_eq!(replay(&hist).unwrap(), r2);
    }

    #[test]
    fn merged_replacement_skips_no_ops() {
        let store = RecordStore::in_memory();
        let rec = store.create(valid(), "u1", Timestamp(1)).unwrap();
        let rid = rec.accession.unwrap();
        assert_eq!(
            store.replace_merged(rid, rec.clone(), "ingest", Timestamp(2)).unwrap(),
            None
        );
        let mut more = rec.clone();
        more.languages.push("C++".into());
        let next = store
            .replace_merged(rid, more, "ingest", Timestamp(2))
            .unwrap()
            .unwrap();
        assert_eq!(next.revision, 2);
        assert_eq!(replay(&store.revisions(rid).unwrap()).unwrap(), next);
    }

    #[test]
    fn users_are_unique_by_email() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let store = RecordStore::open(&path).unwrap();
        let u = store
            .add_user("a@b.org", "s".into(), "h".into(), Role::User, Timestamp(0))
            .unwrap();
        assert!(matches!(
            store.add_user("A@B.org", "s".into(), "h".into(), Role::User, Timestamp(0)),
            Err(StoreError::DuplicateEmail(_))
        ));
        let reopened = RecordStore::open(&path).unwrap();
        assert_eq!(reopened.user_by_email("a@b.org"), Some(u.clone()));
        assert_eq!(reopened.user(&u.user_id), Some(u));
    }
}
