//! Acknowledgement sections, NIH-style award numbers, institute lookup and
//! funder-name matching.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data;

fn is_ack_heading(line: &str) -> bool {
    let l = line.trim().trim_start_matches('#').trim().trim_end_matches(':').trim();
    let l = l.to_lowercase();
    matches!(
        l.as_str(),
        "acknowledgment" | "acknowledgments" | "acknowledgement" | "acknowledgements" | "funding"
    )
}

/// A short title-like line standing alone between blank lines.
fn looks_like_heading(lines: &[&str], i: usize) -> bool {
    let l = lines[i].trim();
    if l.is_empty() {
        return false;
    }
    if l.starts_with('#') {
        return true;
    }
    let blank = |j: Option<usize>| j.and_then(|j| lines.get(j)).is_none_or(|s| s.trim().is_empty());
    l.len() <= 60
        && l.split_whitespace().count() <= 6
        && l.starts_with(char::is_uppercase)
        && !l.ends_with(['.', ',', ';'])
        && blank(i.checked_sub(1))
        && blank(Some(i + 1))
}

/// Text of every acknowledgement or funding section, in document order,
/// joined by a blank line.
pub fn extract_acknowledgements(full_text: &str) -> Option<String> {
    let lines: Vec<&str> = full_text.lines().collect();
    let mut sections: Vec<String> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if !is_ack_heading(lines[i]) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < lines.len() && !is_ack_heading(lines[j]) && !looks_like_heading(&lines, j) {
            j += 1;
        }
        let body: Vec<&str> = lines[i + 1..j].iter().map(|l| l.trim()).collect();
        let body = body.join("\n");
        let body = body.trim();
        if !body.is_empty() {
            sections.push(body.to_string());
        }
        i = j;
    }
    (!sections.is_empty()).then(|| sections.join("\n\n"))
}

/// A parsed award number such as `U54GM114833`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GrantRef {
    /// The matched text as written.
    pub raw: String,
    pub activity_code: String,
    pub ic_code: String,
    pub serial: String,
}

impl GrantRef {
    /// `activity_code + ic_code + serial`.
    pub fn compact(&self) -> String {
        let mut s = self.activity_code.clone();
        s.push_str(&self.ic_code);
        s.push_str(&self.serial);
        s
    }
}

fn grant_at(b: &[u8], start: usize) -> Option<(usize, usize, usize, usize)> {
    // Returns (activity start, ic start, serial start, end).
    let mut p = start;
    if b.get(p).is_some_and(u8::is_ascii_digit) && b.get(p + 1).is_some_and(u8::is_ascii_uppercase) {
        p += 1;
    }
    let act = p;
    if !b.get(p).is_some_and(u8::is_ascii_uppercase) {
        return None;
    }
    let alnum = |c: &u8| c.is_ascii_uppercase() || c.is_ascii_digit();
    if !(b.get(p + 1).is_some_and(alnum) && b.get(p + 2).is_some_and(alnum)) {
        return None;
    }
    p += 3;
    if matches!(b.get(p), Some(b' ') | Some(b'-')) {
        p += 1;
    }
    let ic = p;
    if !(b.get(p).is_some_and(u8::is_ascii_uppercase) && b.get(p + 1).is_some_and(u8::is_ascii_uppercase)) {
        return None;
    }
    p += 2;
    let serial = p;
    if !(0..6).all(|k| b.get(p + k).is_some_and(u8::is_ascii_digit)) {
        return None;
    }
    p += 6;
    if b.get(p).is_some_and(u8::is_ascii_alphanumeric) {
        return None;
    }
    Some((act, ic, serial, p))
}

/// NIH-format award numbers: optional application-type digit, activity
/// code (letter and two alphanumerics), optional space or hyphen, two-letter
/// institute code, six-digit serial. Deduplicated by compact form.
pub fn extract_grants(text: &str) -> Vec<GrantRef> {
    let b = text.as_bytes();
    let mut out: Vec<GrantRef> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut i = 0;
    while i < b.len() {
        let at_boundary = i == 0 || !b[i - 1].is_ascii_alphanumeric();
        if at_boundary {
            if let Some((act, ic, serial, end)) = grant_at(b, i) {
                let g = GrantRef {
                    raw: text[i..end].to_string(),
                    activity_code: text[act..act + 3].to_string(),
                    ic_code: text[ic..ic + 2].to_string(),
                    serial: text[serial..end].to_string(),
                };
                if seen.insert(g.compact()) {
                    out.push(g);
                }
                i = end;
                continue;
            }
        }
        i += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Institute {
    pub acronym: String,
    pub name: String,
    pub ic_code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown institute code {0:?}")]
pub struct UnknownIc(pub String);

/// NIH institutes and centers keyed by two-letter code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IcTable {
    by_code: BTreeMap<String, Institute>,
    order: Vec<String>,
}

fn data_rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

impl IcTable {
    /// `acronym<TAB>name<TAB>ic_code` rows.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut t = IcTable::default();
        for (line, row) in data_rows(text) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [acronym, name, code] = cols[..] else {
                return Err(TableError::Malformed {
                    line,
                    message: "expected 3 tab-separated columns".into(),
                });
            };
            if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
                return Err(TableError::Malformed {
                    line,
                    message: alloc::format!("bad institute code {code:?}"),
                });
            }
            if t.by_code.contains_key(code) {
                return Err(TableError::Duplicate { line, key: code.into() });
            }
            t.order.push(code.into());
            t.by_code.insert(
                code.into(),
                Institute {
                    acronym: acronym.into(),
                    name: name.into(),
                    ic_code: code.into(),
                },
            );
        }
        Ok(t)
    }

    /// The shipped table of NIH institutes.
    pub fn builtin() -> Self {
        Self::parse(data::IC_TABLE).expect("shipped table parses")
    }

    pub fn get(&self, code: &str) -> Option<&Institute> {
        self.by_code.get(code)
    }

    /// Institutes in file order.
    pub fn institutes(&self) -> impl Iterator<Item = &Institute> {
        self.order.iter().map(|c| &self.by_code[c])
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn map_grant_to_ic<'t>(grant: &GrantRef, table: &'t IcTable) -> Result<&'t Institute, UnknownIc> {
    table
        .get(&grant.ic_code)
        .ok_or_else(|| UnknownIc(grant.ic_code.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunderEntry {
    pub funder_id: String,
    pub canonical_name: String,
    pub aliases: Vec<String>,
}

/// Lowercase, punctuation removed, whitespace collapsed.
pub fn normalize_funder_name(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .filter_map(|c| {
            if c.is_alphanumeric() {
                Some(c.to_lowercase().next().unwrap_or(c))
            } else if c.is_whitespace() || matches!(c, '&' | '-' | '/') {
                Some(' ')
            } else {
                None
            }
        })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Minimum token Jaccard similarity for a fuzzy funder match.
pub const FUNDER_JACCARD: f64 = 0.8;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FunderRegistry {
    entries: Vec<FunderEntry>,
    exact: BTreeMap<String, usize>,
}

impl FunderRegistry {
    /// `funder_id<TAB>canonical_name<TAB>alias1|alias2…` rows.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        for (line, row) in data_rows(text) {
            let mut cols = row.split('\t').map(str::trim);
            let (Some(id), Some(name)) = (cols.next(), cols.next()) else {
                return Err(TableError::Malformed {
                    line,
                    message: "expected funder id and name".into(),
                });
            };
            if id.is_empty() || name.is_empty() {
                return Err(TableError::Malformed {
                    line,
                    message: "empty funder id or name".into(),
                });
            }
            let aliases = cols
                .next()
                .unwrap_or("")
                .split('|')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(String::from)
                .collect();
            entries.push((
                line,
                FunderEntry {
                    funder_id: id.into(),
                    canonical_name: name.into(),
                    aliases,
                },
            ));
        }
        let mut reg = FunderRegistry::default();
        let mut canon = BTreeSet::new();
        for (line, e) in entries {
            let key = normalize_funder_name(&e.canonical_name);
            if !canon.insert(key.clone()) {
                return Err(TableError::Duplicate { line, key });
            }
            let idx = reg.entries.len();
            reg.exact.insert(key, idx);
            reg.entries.push(e);
        }
        // Aliases never shadow a canonical name.
        for (idx, e) in reg.entries.iter().enumerate() {
            for a in &e.aliases {
                reg.exact.entry(normalize_funder_name(a)).or_insert(idx);
            }
        }
        Ok(reg)
    }

    pub fn builtin() -> Self {
        Self::parse(data::FUNDERS).expect("shipped funders parse")
    }

    pub fn entries(&self) -> &[FunderEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn jaccard(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Exact match on normalized canonical name or alias, else the entry with
/// the best token Jaccard similarity at or above [`FUNDER_JACCARD`].
pub fn match_funder_name<'r>(name: &str, registry: &'r FunderRegistry) -> Option<&'r FunderEntry> {
    let key = normalize_funder_name(name);
    if key.is_empty() {
        return None;
    }
    if let Some(&i) = registry.exact.get(&key) {
        return Some(&registry.entries[i]);
    }
    let tokens: BTreeSet<&str> = key.split(' ').collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, e) in registry.entries.iter().enumerate() {
        for n in core::iter::once(&e.canonical_name).chain(&e.aliases) {
            let norm = normalize_funder_name(n);
            let other: BTreeSet<&str> = norm.split(' ').collect();
            let j = jaccard(&tokens, &other);
            if j >= FUNDER_JACCARD && best.is_none_or(|(bj, _)| j > bj) {
                best = Some((j, i));
            }
        }
    }
    best.map(|(_, i)| &registry.entries[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    const ACK: &str = "This work was supported in part by NIH Awards U54GM114833 to WW and PP, as well as R35HL135772 to PP; and the UCLA Laubisch endowment, to PP.";

    fn g(a: &str, ic: &str, s: &str) -> (String, String, String) {
        (a.into(), ic.into(), s.into())
    }

    fn parts(v: &[GrantRef]) -> Vec<(String, String, String)> {
        v.iter()
            .map(|g| (g.activity_code.clone(), g.ic_code.clone(), g.serial.clone()))
            .collect()
    }

    #[test]
    fn acknowledgement_section() {
        let text = alloc::format!(
            "Author contributions\n\nWe wrote it.\n\nAcknowledgements\n\n{ACK}\n\nReferences\n\n- Blei, D.M. (2003).\n"
        );
        let ack = extract_acknowledgements(&text).unwrap();
        assert!(ack.starts_with("This work was supported in part by NIH Awards"));
        assert!(!ack.contains("Blei"));
        assert_eq!(extract_acknowledgements("Introduction\n\nText only."), None);
    }

    #[test]
    fn two_sections_in_order() {
        let text = "Intro\n\nBody text.\n\nFunding\n\nSupported by R01 HL123456.\n\nMethods\n\nMore.\n\nACKNOWLEDGMENTS:\nWe thank the lab.\nAnd the core.\n";
        assert_eq!(
            extract_acknowledgements(text).unwrap(),
            "Supported by R01 HL123456.\n\nWe thank the lab.\nAnd the core."
        );
    }

    #[test]
    fn grants_from_the_acknowledgements() {
        let grants = extract_grants(ACK);
        assert_eq!(parts(&grants), [g("U54", "GM", "114833"), g("R35", "HL", "135772")]);
        let table = IcTable::builtin();
        let acr: Vec<&str> = grants
            .iter()
            .map(|g| map_grant_to_ic(g, &table).unwrap().acronym.as_str())
            .collect();
        assert_eq!(acr, ["NIGMS", "NHLBI"]);
    }

    #[test]
    fn grant_variants() {
        assert_eq!(parts(&extract_grants("R01 HL123456")), [g("R01", "HL", "123456")]);
        assert_eq!(parts(&extract_grants("1R01-CA000001-01")), [g("R01", "CA", "000001")]);
        assert_eq!(extract_grants("1R01-CA000001-01")[0].raw, "1R01-CA000001");
        assert!(extract_grants("grant 12345").is_empty());
        assert!(extract_grants("XR01HL1234567").is_empty());
        assert_eq!(extract_grants("U54GM114833 and U54 GM114833").len(), 1);
    }

    #[test]
    fn grant_scan_agrees_with_regex() {
        let re = regex::Regex::new(
            r"(?:^|[^A-Za-z0-9])([0-9]?)([A-Z][A-Z0-9]{2})[ -]?([A-Z]{2})([0-9]{6})(?:$|[^A-Za-z0-9])",
        )
        .unwrap();
        let fixtures = [
            "K99LM012345",
            "P41 GM103311",
            "T32-HG000044",
            "5R01MH099999",
            "R21EB0123456",
            "award R35HL135772.",
            "(U01CA200000)",
            "r01hl123456",
            "ZZZ",
            "R01 H L123456",
            "R01HL12345",
        ];
        for f in fixtures {
            let want: Vec<(String, String, String)> = re
                .captures_iter(f)
                .map(|c| (c[2].to_string(), c[3].to_string(), c[4].to_string()))
                .collect();
            assert_eq!(parts(&extract_grants(f)), want, "{f}");
            for gr in extract_grants(f) {
                let norm: String = f.chars().filter(|c| *c != ' ' && *c != '-').collect();
                assert!(norm.contains(&gr.compact()));
            }
        }
    }

    #[test]
    fn institute_lookup() {
        let t = IcTable::builtin();
        assert_eq!(t.len(), 28);
        assert_eq!(
            t.get("GM").unwrap().name,
            "National Institute of General Medical Sciences"
        );
        assert_eq!(t.get("HL").unwrap().acronym, "NHLBI");
        let zz = GrantRef {
            raw: "R01ZZ000001".into(),
            activity_code: "R01".into(),
            ic_code: "ZZ".into(),
            serial: "000001".into(),
        };
        assert_eq!(map_grant_to_ic(&zz, &t), Err(UnknownIc("ZZ".into())));
    }

    #[test]
    fn funder_matching() {
        let r = FunderRegistry::builtin();
        let id = |n: &str| match_funder_name(n, &r).map(|e| e.funder_id.as_str());
        assert_eq!(id("National Institutes of Health"), Some("100000002"));
        assert_eq!(id("national institutes of health."), Some("100000002"));
        assert_eq!(id("Natl. Institutes of Health"), Some("100000002"));
        assert_eq!(
            id("National Institute of General Medical Sciences USA"),
            Some("100000057")
        );
        assert_eq!(id("Ministry of Silly Walks"), None);
        assert_eq!(id(""), None);
        assert!(FunderRegistry::parse("1\tA B\n2\ta, b\n").is_err());
    }
}
