use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::record::{RecordStatus, Timestamp, ToolRecord};
use super::validate::{validate_record, ValidationReport, Vocabularies};
use super::ResourceId;

/// New values keyed by serialized field name.
pub type RecordEdit = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldChange {
    pub field: String,
    pub old: Value,
    pub new: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Revision {
    pub accession: ResourceId,
    pub number: u64,
    pub editor: String,
    pub timestamp: Timestamp,
    pub diff: Vec<FieldChange>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RevisionError {
    #[error("stale edit: based on revision {base}, current is {current}")]
    Conflict { base: u64, current: u64 },
    #[error("record has no accession")]
    MissingAccession,
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("field {0:?} cannot be edited")]
    ImmutableField(String),
    #[error("bad value for {field:?}: {message}")]
    Malformed { field: String, message: String },
    #[error("edit produces an invalid record")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("no revisions to replay")]
    Empty,
    #[error("revision sequence has a gap at position {0}")]
    Gap(usize),
    #[error("revision {0} does not decode: {1}")]
    Decode(u64, String),
}

const NOT_EDITABLE: [&str; 4] = ["accession", "revision", "provenance", "status"];

fn as_object(record: &ToolRecord) -> Map<String, Value> {
    match serde_json::to_value(record) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("tool records serialize to objects"),
    }
}

/// Per-field changes between two versions, excluding the revision counter.
/// Fields are reported in canonical (table) order.
pub fn diff_records(old: &ToolRecord, new: &ToolRecord) -> Vec<FieldChange> {
    let old_map = as_object(old);
    let new_map = as_object(new);
    field_order()
        .into_iter()
        .filter(|f| f != "revision")
        .filter_map(|f| {
            let o = old_map.get(&f).cloned().unwrap_or(Value::Null);
            let n = new_map.get(&f).cloned().unwrap_or(Value::Null);
            (o != n).then_some(FieldChange {
                field: f,
                old: o,
                new: n,
            })
        })
        .collect()
}

/// Serialized field names in declaration order.
fn field_order() -> Vec<String> {
    let json = ToolRecord::default().canonical_json();
    let mut names = Vec::new();
    let mut de = serde_json::Deserializer::from_str(&json);
    let _ = serde::Deserializer::deserialize_map(&mut de, KeyCollector(&mut names));
    names
}

struct KeyCollector<'a>(&'a mut Vec<String>);

impl<'de> serde::de::Visitor<'de> for KeyCollector<'_> {
    type Value = ();

    fn expecting(&self, f: &mut core::fmt::Formatter) -> core::fmt::Result {
        f.write_str("a map")
    }

    fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> Result<(), A::Error> {
        while let Some(k) = map.next_key::<String>()? {
            map.next_value::<serde::de::IgnoredAny>()?;
            self.0.push(k);
        }
        Ok(())
    }
}

/// Revision 1: every populated field, diffed against an empty record.
pub fn initial_revision(record: &ToolRecord, editor: &str, at: Timestamp) -> Result<Revision, RevisionError> {
    let accession = record.accession.ok_or(RevisionError::MissingAccession)?;
    Ok(Revision {
        accession,
        number: 1,
        editor: editor.to_string(),
        timestamp: at,
        diff: diff_records(&ToolRecord::default(), record),
    })
}

/// Revision entry for an already-computed successor of `old`; the new
/// record's revision must be `old.revision + 1`.
pub fn record_revision(
    old: &ToolRecord,
    new: &ToolRecord,
    editor: &str,
    at: Timestamp,
) -> Result<Revision, RevisionError> {
    let accession = new.accession.ok_or(RevisionError::MissingAccession)?;
    debug_assert_eq!(new.revision, old.revision + 1);
    Ok(Revision {
        accession,
        number: new.revision,
        editor: editor.to_string(),
        timestamp: at,
        diff: diff_records(old, new),
    })
}

/// Applies a field edit under optimistic concurrency. The result must pass
/// full validation; a record parked for curation becomes active once it does.
pub fn revise_record(
    record: &ToolRecord,
    edit: &RecordEdit,
    editor: &str,
    base_revision: u64,
    at: Timestamp,
    vocab: &Vocabularies,
) -> Result<(ToolRecord, Revision), RevisionError> {
    if base_revision != record.revision {
        return Err(RevisionError::Conflict {
            base: base_revision,
            current: record.revision,
        });
    }
    let mut map = as_object(record);
    for (field, value) in edit {
        if NOT_EDITABLE.contains(&field.as_str()) {
            return Err(RevisionError::ImmutableField(field.clone()));
        }
        if !map.contains_key(field) {
            return Err(RevisionError::UnknownField(field.clone()));
        }
        map.insert(field.clone(), value.clone());
    }
    let mut next: ToolRecord = serde_json::from_value(Value::Object(map)).map_err(|e| RevisionError::Malformed {
        field: edit.keys().cloned().collect::<Vec<_>>().join(","),
        message: e.to_string(),
    })?;
    let report = validate_record(&next, vocab);
    if !report.is_valid() {
        return Err(RevisionError::Invalid(report));
    }
    next.status = RecordStatus::Active;
    next.revision = record.revision + 1;
    let rev = record_revision(record, &next, editor, at)?;
    Ok((next, rev))
}

/// Rebuilds the current record by applying every diff, starting from an
/// empty record.
pub fn replay(revisions: &[Revision]) -> Result<ToolRecord, ReplayError> {
    if revisions.is_empty() {
        return Err(ReplayError::Empty);
    }
    let mut map = as_object(&ToolRecord::default());
    for (i, rev) in revisions.iter().enumerate() {
        if rev.number != i as u64 + 1 {
            return Err(ReplayError::Gap(i));
        }
        for change in &rev.diff {
            map.insert(change.field.clone(), change.new.clone());
        }
    }
    let last = revisions.len() as u64;
    let mut record: ToolRecord =
        serde_json::from_value(Value::Object(map)).map_err(|e| ReplayError::Decode(last, e.to_string()))?;
    record.revision = last;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{Person, Release};
    use alloc::vec;
    use serde_json::json;

    fn base() -> ToolRecord {
        ToolRecord {
            name: "Bowtie".into(),
            accession: ResourceId::new(3),
            description: "Short read aligner.".into(),
            links: vec!["https://bowtie-bio.sourceforge.net".into()],
            tool_type: Some("command-line tool".into()),
            functions: vec!["operation_3198".into()],
            authors: vec![Person::named("Ben Langmead")],
            domains: vec!["genomics".into()],
            releases: vec![Release {
                version: "1.0".into(),
                date: None,
            }],
            platforms: vec!["Linux".into()],
            revision: 1,
            ..Default::default()
        }
    }

    #[test]
    fn filling_license_creates_single_field_revision() {
        let r = base();
        let edit: RecordEdit = [("license".to_string(), json!("Artistic-2.0"))].into();
        let (next, rev) = revise_record(&r, &edit, "u1", 1, Timestamp(9), &Vocabularies::builtin()).unwrap();
        assert_eq!(next.revision, 2);
        assert_eq!(rev.number, 2);
        assert_eq!(rev.diff.len(), 1);
        assert_eq!(rev.diff[0].field, "license");
        assert_eq!(rev.diff[0].old, Value::Null);
    }

    #[test]
    fn stale_base_is_conflict() {
        let mut r = base();
        r.revision = 2;
        let edit: RecordEdit = [("license".to_string(), json!("MIT"))].into();
        assert_eq!(
            revise_record(&r, &edit, "u1", 1, Timestamp(0), &Vocabularies::builtin()).unwrap_err(),
            RevisionError::Conflict { base: 1, current: 2 }
        );
    }

    #[test]
    fn removing_name_is_rejected() {
        let r = base();
        let edit: RecordEdit = [("name".to_string(), json!(""))].into();
        match revise_record(&r, &edit, "u1", 1, Timestamp(0), &Vocabularies::builtin()) {
            Err(RevisionError::Invalid(report)) => {
                assert_eq!(report.fields().into_iter().collect::<Vec<_>>(), ["name"])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bookkeeping_and_unknown_fields_rejected() {
        let r = base();
        for (field, err) in [
            ("accession", RevisionError::ImmutableField("accession".into())),
            ("colour", RevisionError::UnknownField("colour".into())),
        ] {
            let edit: RecordEdit = [(field.to_string(), json!("x"))].into();
            assert_eq!(
                revise_record(&r, &edit, "u", 1, Timestamp(0), &Vocabularies::builtin()).unwrap_err(),
                err
            );
        }
        let edit: RecordEdit = [("links".to_string(), json!(42))].into();
        assert!(matches!(
            revise_record(&r, &edit, "u", 1, Timestamp(0), &Vocabularies::builtin()),
            Err(RevisionError::Malformed { .. })
        ));
    }

    #[test]
    fn replay_reproduces_canonical_bytes() {
        let r = base();
        let mut revs = vec![initial_revision(&r, "ingest", Timestamp(1)).unwrap()];
        let mut cur = r;
        for (i, (f, v)) in [
            ("license", json!("MIT")),
            ("languages", json!(["C++", "Python"])),
            ("doi", json!("10.1186/gb-2009-10-3-r25")),
        ]
        .into_iter()
        .enumerate()
        {
            let edit: RecordEdit = [(f.to_string(), v)].into();
            let (next, rev) = revise_record(
                &cur,
                &edit,
                "u",
                cur.revision,
                Timestamp(2 + i as i64),
                &Vocabularies::builtin(),
            )
            .unwrap();
            revs.push(rev);
            cur = next;
        }
        let rebuilt = replay(&revs).unwrap();
        assert_eq!(rebuilt.canonical_json(), cur.canonical_json());
        assert_eq!(replay(&revs[1..]), Err(ReplayError::Gap(0)));
    }
}
