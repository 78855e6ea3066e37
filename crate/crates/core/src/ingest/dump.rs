//! Parsing of third-party tool index dumps through per-format field
//! mappings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::registry::{
    check_required, type_violations, Person, RecordStatus, Release, Source, SourceProvenance, Timestamp, ToolRecord,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpKind {
    /// Header row, then tab-separated rows; list cells split on `|`.
    Tsv,
    /// One JSON object per line; list fields take arrays or strings.
    Jsonl,
}

/// A registered aggregator format: source column or key → record field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpFormat {
    pub id: String,
    pub kind: DumpKind,
    pub mapping: BTreeMap<String, String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Text,
    List,
    People,
    Releases,
}

fn slot(field: &str) -> Option<Slot> {
    Some(match field {
        "name" | "description" | "doi" | "logo_url" | "tool_type" | "primary_publication" | "submitter" | "license" => {
            Slot::Text
        }
        "image_urls" | "links" | "functions" | "source_repos" | "languages" | "institutions" | "other_publications"
        | "funding_sources" | "award_numbers" | "domains" | "platforms" | "input_formats" | "output_formats" => {
            Slot::List
        }
        "authors" | "pis" => Slot::People,
        "releases" => Slot::Releases,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DumpError {
    #[error("unknown dump format {0:?}")]
    UnknownFormat(String),
    #[error("format {format:?} maps {column:?} to unsupported field {field:?}")]
    BadMapping {
        format: String,
        column: String,
        field: String,
    },
    #[error("dump has no header row")]
    MissingHeader,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the dump.
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DumpReport {
    pub records: Vec<ToolRecord>,
    pub errors: Vec<RowError>,
}

fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

impl DumpFormat {
    /// Formats known by id.
    pub fn registered() -> Vec<DumpFormat> {
        alloc::vec![
            DumpFormat {
                id: "generic-tsv".into(),
                kind: DumpKind::Tsv,
                mapping: map(&[
                    ("name", "name"),
                    ("description", "description"),
                    ("homepage", "links"),
                    ("repository", "source_repos"),
                    ("language", "languages"),
                    ("type", "tool_type"),
                    ("platform", "platforms"),
                    ("domain", "domains"),
                    ("function", "functions"),
                    ("license", "license"),
                    ("doi", "doi"),
                    ("authors", "authors"),
                    ("version", "releases"),
                ]),
            },
            DumpFormat {
                id: "registry-jsonl".into(),
                kind: DumpKind::Jsonl,
                mapping: map(&[
                    ("name", "name"),
                    ("description", "description"),
                    ("homepage", "links"),
                    ("links", "links"),
                    ("code", "source_repos"),
                    ("languages", "languages"),
                    ("toolType", "tool_type"),
                    ("topics", "domains"),
                    ("operations", "functions"),
                    ("os", "platforms"),
                    ("license", "license"),
                    ("publication", "primary_publication"),
                    ("credits", "authors"),
                    ("versions", "releases"),
                ]),
            },
        ]
    }

    pub fn by_id(id: &str) -> Result<DumpFormat, DumpError> {
        Self::registered()
            .into_iter()
            .find(|f| f.id == id)
            .ok_or_else(|| DumpError::UnknownFormat(id.to_string()))
    }

    pub fn check(&self) -> Result<(), DumpError> {
        for (column, field) in &self.mapping {
            if slot(field).is_none() {
                return Err(DumpError::BadMapping {
                    format: self.id.clone(),
                    column: column.clone(),
                    field: field.clone(),
                });
            }
        }
        Ok(())
    }
}

fn set_field(record: &mut ToolRecord, field: &str, values: Vec<String>) {
    let values: Vec<String> = values
        .into_iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return;
    }
    let first = || values[0].clone();
    let push_all = |list: &mut Vec<String>| {
        for v in &values {
            if !list.contains(v) {
                list.push(v.clone());
            }
        }
    };
    match field {
        "name" => record.name = first(),
        "description" => record.description = first(),
        "doi" => record.doi = Some(first()),
        "logo_url" => record.logo_url = Some(first()),
        "tool_type" => record.tool_type = Some(first()),
        "primary_publication" => record.primary_publication = Some(first()),
        "submitter" => record.submitter = Some(first()),
        "license" => record.license = Some(first()),
        "image_urls" => push_all(&mut record.image_urls),
        "links" => push_all(&mut record.links),
        "functions" => push_all(&mut record.functions),
        "source_repos" => push_all(&mut record.source_repos),
        "languages" => push_all(&mut record.languages),
        "institutions" => push_all(&mut record.institutions),
        "other_publications" => push_all(&mut record.other_publications),
        "funding_sources" => push_all(&mut record.funding_sources),
        "award_numbers" => push_all(&mut record.award_numbers),
        "domains" => push_all(&mut record.domains),
        "platforms" => push_all(&mut record.platforms),
        "input_formats" => push_all(&mut record.input_formats),
        "output_formats" => push_all(&mut record.output_formats),
        "authors" => record.authors.extend(values.iter().map(Person::named)),
        "pis" => record.pis.extend(values.iter().map(Person::named)),
        "releases" => record.releases.extend(values.iter().map(|v| Release {
            version: v.clone(),
            date: None,
        })),
        _ => {}
    }
}

fn json_strings(v: &Value) -> Result<Vec<String>, String> {
    match v {
        Value::Null => Ok(Vec::new()),
        Value::String(s) => Ok(alloc::vec![s.clone()]),
        Value::Number(n) => Ok(alloc::vec![n.to_string()]),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                Value::Object(o) => o
                    .get("name")
                    .or_else(|| o.get("version"))
                    .or_else(|| o.get("uri"))
                    .and_then(Value::as_str)
                    .map(String::from)
                    .ok_or_else(|| "array entry object lacks name/version/uri".to_string()),
                _ => Err("unsupported array entry".to_string()),
            })
            .collect(),
        _ => Err("expected string or array".to_string()),
    }
}

fn finish(
    mut record: ToolRecord,
    format: &DumpFormat,
    line: usize,
    retrieved_at: Timestamp,
) -> Result<ToolRecord, String> {
    if record.name.trim().is_empty() {
        return Err("missing name".into());
    }
    let bad = type_violations(&record);
    if !bad.is_empty() {
        let details: Vec<String> = bad.iter().map(|v| format!("{}: {}", v.field, v.detail)).collect();
        return Err(details.join("; "));
    }
    record.provenance.push(SourceProvenance {
        source: Source::Aggregator,
        origin_ref: format!("{}:{line}", format.id),
        retrieved_at,
    });
    if check_required(&record).iter().any(|v| v.field != "accession") {
        record.status = RecordStatus::NeedsCuration;
    }
    Ok(record)
}

/// One record per dump row, with `aggregator` provenance. Bad rows are
/// reported and skipped.
pub fn parse_index_dump(text: &str, format: &DumpFormat, retrieved_at: Timestamp) -> Result<DumpReport, DumpError> {
    format.check()?;
    let mut report = DumpReport::default();
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut row_result = |line: usize, r: Result<ToolRecord, String>| match r {
        Ok(rec) => report.records.push(rec),
        Err(message) => report.errors.push(RowError { line, message }),
    };
    match format.kind {
        DumpKind::Tsv => {
            let (_, header) = rows.next().ok_or(DumpError::MissingHeader)?;
            let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
            for (line, row) in rows {
                let cells: Vec<&str> = row.split('\t').collect();
                if cells.len() != columns.len() {
                    row_result(
                        line,
                        Err(format!("expected {} columns, found {}", columns.len(), cells.len())),
                    );
                    continue;
                }
                let mut rec = ToolRecord::default();
                for (col, cell) in columns.iter().zip(cells) {
                    let Some(field) = format.mapping.get(*col) else {
                        continue;
                    };
                    let values = match slot(field) {
                        Some(Slot::Text) => alloc::vec![cell.to_string()],
                        _ => cell.split('|').map(String::from).collect(),
                    };
                    set_field(&mut rec, field, values);
                }
                row_result(line, finish(rec, format, line, retrieved_at));
            }
        }
        DumpKind::Jsonl => {
            for (line, row) in rows {
                let obj = match serde_json::from_str::<Value>(row) {
                    Ok(Value::Object(o)) => o,
                    Ok(_) => {
                        row_result(line, Err("row is not a JSON object".into()));
                        continue;
                    }
                    Err(e) => {
                        row_result(line, Err(format!("invalid JSON: {e}")));
                        continue;
                    }
                };
                let mut rec = ToolRecord::default();
                let mut err = None;
                for (key, value) in &obj {
                    let Some(field) = format.mapping.get(key) else { continue };
                    match json_strings(value) {
                        Ok(values) if slot(field) == Some(Slot::Text) && values.len() > 1 => {
                            err = Some(format!("{key}: expected a single value"));
                        }
                        Ok(values) => set_field(&mut rec, field, values),
                        Err(e) => err = Some(format!("{key}: {e}")),
                    }
                }
                row_result(line, err.map_or_else(|| finish(rec, format, line, retrieved_at), Err));
            }
        }
    }
    Ok(report)
}
