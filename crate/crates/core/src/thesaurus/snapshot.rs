//! Text snapshot of a thesaurus.
//!
//! ```text
//! thesaurus v1
//! version_hash <sha256 of everything after the header>
//! phrases <n>
//! [phrases]       dim, canonical phrase, count
//! [sets]          canonical phrase, members joined by '|'
//! [edges]         hyponym, hypernym (canonical phrases)
//! [surfaces]      surface form, corpus count
//! [corpus-pairs]  corpus synonym evidence
//! [ontology-pairs]
//! [surface-edges]
//! ```
//! Fields are tab-separated. Only the raw sections are read back; the
//! derived ones are recomputed and checked through the hash.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt::Write;

use super::{hex_digest, Thesaurus};

const MAGIC: &str = "thesaurus v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("snapshot hash {stored} does not match contents {actual}")]
    HashMismatch { stored: String, actual: String },
}

pub(super) fn body(t: &Thesaurus) -> String {
    let mut s = String::new();
    s.push_str("[phrases]\n");
    for (i, p) in t.phrases.iter().enumerate() {
        let _ = writeln!(s, "{i}\t{p}\t{}", t.counts[i]);
    }
    s.push_str("[sets]\n");
    for m in &t.members {
        let _ = writeln!(s, "{}\t{}", m[0], m.join("|"));
    }
    s.push_str("[edges]\n");
    for &(a, b) in &t.hyper_edges {
        let _ = writeln!(s, "{}\t{}", t.phrases[a as usize], t.phrases[b as usize]);
    }
    s.push_str("[surfaces]\n");
    for (k, c) in &t.surfaces {
        let _ = writeln!(s, "{k}\t{c}");
    }
    for (title, pairs) in [
        ("[corpus-pairs]", &t.corpus_pairs),
        ("[ontology-pairs]", &t.ontology_pairs),
        ("[surface-edges]", &t.surface_edges),
    ] {
        s.push_str(title);
        s.push('\n');
        for (a, b) in pairs {
            let _ = writeln!(s, "{a}\t{b}");
        }
    }
    s
}

impl Thesaurus {
    pub fn to_snapshot(&self) -> String {
        format!(
            "{MAGIC}\nversion_hash {}\nphrases {}\n{}",
            self.version_hash,
            self.len(),
            body(self)
        )
    }

    pub fn from_snapshot(text: &str) -> Result<Thesaurus, SnapshotError> {
        let bad = |line: usize, message: &str| SnapshotError::Malformed {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(bad(1, "missing thesaurus header")),
        }
        let stored = match lines.next() {
            Some((_, l)) if l.starts_with("version_hash ") => l["version_hash ".len()..].to_string(),
            _ => return Err(bad(2, "missing version_hash")),
        };
        let count: usize = match lines.next() {
            Some((_, l)) if l.starts_with("phrases ") => {
                l["phrases ".len()..].parse().map_err(|_| bad(3, "bad phrase count"))?
            }
            _ => return Err(bad(3, "missing phrase count")),
        };

        let mut surfaces = BTreeMap::new();
        let mut pairs: [BTreeSet<(String, String)>; 3] = Default::default();
        let mut section = "";
        for (n, line) in lines {
            if line.starts_with('[') {
                section = line;
                continue;
            }
            let (a, b) = line
                .split_once('\t')
                .ok_or_else(|| bad(n, "expected tab-separated fields"))?;
            match section {
                "[surfaces]" => {
                    let c: u64 = b.parse().map_err(|_| bad(n, "bad surface count"))?;
                    surfaces.insert(a.to_string(), c);
                }
                "[corpus-pairs]" => {
                    pairs[0].insert((a.to_string(), b.to_string()));
                }
                "[ontology-pairs]" => {
                    pairs[1].insert((a.to_string(), b.to_string()));
                }
                "[surface-edges]" => {
                    pairs[2].insert((a.to_string(), b.to_string()));
                }
                "[phrases]" | "[sets]" | "[edges]" => {}
                _ => return Err(bad(n, "line outside a known section")),
            }
        }
        let [corpus, ontology, edges] = pairs;
        let t = Thesaurus::derive(surfaces, corpus, ontology, edges);
        if t.len() != count {
            return Err(bad(3, "phrase count does not match contents"));
        }
        let actual = hex_digest(body(&t).as_bytes());
        if actual != stored {
            return Err(SnapshotError::HashMismatch { stored, actual });
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Thesaurus {
        Thesaurus::builder()
            .phrase("sequence alignment", 7)
            .phrase("read mapping", 3)
            .phrase("alignment of sequences", 1)
            .synonyms("sequence alignment", "alignment of sequences")
            .corpus_synonyms("read mapping", "read alignment")
            .hypernym("read mapping", "sequence alignment")
            .build()
    }

    #[test]
    fn round_trip_preserves_hash_and_order() {
        let t = sample();
        let text = t.to_snapshot();
        let back = Thesaurus::from_snapshot(&text).unwrap();
        assert_eq!(back.version_hash(), t.version_hash());
        assert_eq!(back, t);
        assert_eq!(back.to_snapshot(), text);
    }

    #[test]
    fn tampering_detected() {
        let text = sample().to_snapshot().replace("read mapping\t3", "read mapping\t4");
        assert!(matches!(
            Thesaurus::from_snapshot(&text),
            Err(SnapshotError::HashMismatch { .. })
        ));
        assert!(Thesaurus::from_snapshot("nonsense").is_err());
    }

    #[test]
    fn empty_thesaurus_round_trips() {
        let t = Thesaurus::empty();
        assert_eq!(Thesaurus::from_snapshot(&t.to_snapshot()).unwrap(), t);
    }
}
