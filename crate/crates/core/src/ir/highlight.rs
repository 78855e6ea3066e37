use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::thesaurus::OntologyGraph;

/// A highlighted ontology mention; `start..end` are byte offsets into the
/// description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub term_id: String,
    pub url: String,
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Byte length of the prefix of `text` that equals `surface` ignoring case,
/// where `surface` is already lowercase.
fn caseless_prefix(text: &str, surface: &str) -> Option<usize> {
    let mut want = surface.chars();
    let mut pending: Option<char> = None;
    for (i, c) in text.char_indices() {
        for lc in c.to_lowercase() {
            let expected = pending.take().or_else(|| want.next());
            match expected {
                Some(e) if e == lc => {}
                _ => return None,
            }
        }
        if want.as_str().is_empty() && pending.is_none() {
            return Some(i + c.len_utf8());
        }
    }
    None
}

/// Leftmost-longest, case-insensitive ontology term matcher.
#[derive(Clone, Debug)]
pub struct Highlighter {
    /// First word of a surface → (surface, term id), longest surface first.
    by_first_word: BTreeMap<String, Vec<(String, String)>>,
    url_template: String,
}

impl Highlighter {
    /// `url_template` has `{id}` replaced by the term id.
    pub fn new(ontology: &OntologyGraph, url_template: &str) -> Self {
        let mut by_first_word: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        for term in ontology.terms() {
            for name in term.names() {
                let surface = name.trim().to_lowercase();
                if !surface.starts_with(is_word) {
                    continue;
                }
                let first: String = surface.chars().take_while(|&c| is_word(c)).collect();
                let list = by_first_word.entry(first).or_default();
                if !list.iter().any(|(s, _)| *s == surface) {
                    list.push((surface, term.id.clone()));
                }
            }
        }
        for list in by_first_word.values_mut() {
            list.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
        }
        Highlighter {
            by_first_word,
            url_template: url_template.into(),
        }
    }

    pub fn highlight(&self, description: &str) -> Vec<Span> {
        let mut spans = Vec::new();
        let mut pos = 0;
        let mut prev_word = false;
        while pos < description.len() {
            let c = description[pos..].chars().next().expect("in bounds");
            if is_word(c) && !prev_word {
                if let Some(span) = self.match_at(description, pos) {
                    pos = span.end;
                    prev_word = true;
                    spans.push(span);
                    continue;
                }
            }
            prev_word = is_word(c);
            pos += c.len_utf8();
        }
        spans
    }

    fn match_at(&self, text: &str, pos: usize) -> Option<Span> {
        let rest = &text[pos..];
        let word: String = rest
            .chars()
            .take_while(|&c| is_word(c))
            .flat_map(char::to_lowercase)
            .collect();
        let mut best: Option<(usize, &str)> = None;
        for (surface, id) in self.by_first_word.get(&word)? {
            let Some(len) = caseless_prefix(rest, surface) else {
                continue;
            };
            if rest[len..].starts_with(is_word) {
                continue;
            }
            if best.is_none_or(|(l, _)| len > l) {
                best = Some((len, id));
            }
        }
        best.map(|(len, id)| Span {
            start: pos,
            end: pos + len,
            term_id: id.into(),
            url: self.url_template.replace("{id}", id),
        })
    }
}

pub fn highlight_terms(description: &str, ontology: &OntologyGraph, url_template: &str) -> Vec<Span> {
    Highlighter::new(ontology, url_template).highlight(description)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thesaurus::load_ontology;

    fn ont() -> OntologyGraph {
        load_ontology(
            "D1\tProteomics\t\t\n\
             D2\tProteome analysis\tproteome profiling\t\n\
             D3\tProteome\t\t\n\
             D4\tMass spectrometry\tMS\t\n\
             D5\tGene expression\texpression profiling\t\n\
             D6\tGene\t\t\n",
        )
        .unwrap()
    }

    const URL: &str = "https://terms.example.org/{id}";

    #[test]
    fn two_terms_longest_match() {
        let s = highlight_terms("Tools for proteomics and proteome analysis.", &ont(), URL);
        let got: Vec<(&str, &str)> = s.iter().map(|s| (s.term_id.as_str(), s.url.as_str())).collect();
        assert_eq!(
            got,
            [
                ("D1", "https://terms.example.org/D1"),
                ("D2", "https://terms.example.org/D2")
            ]
        );
        assert_eq!(s[1].start, 25);
        assert_eq!(s[1].end, 42);
    }

    #[test]
    fn boundaries() {
        assert!(highlight_terms("nothing here", &ont(), URL).is_empty());
        assert_eq!(highlight_terms("Gene expression rocks", &ont(), URL)[0].start, 0);
        // "Genes" is not the word "Gene"; "MSc" is not "MS".
        assert!(highlight_terms("Genes and MSc students", &ont(), URL).is_empty());
    }

    #[test]
    fn agrees_with_regex_scan() {
        let ont = ont();
        let mut surfaces: Vec<(String, String)> = Vec::new();
        for t in ont.terms() {
            for n in t.names() {
                surfaces.push((n.to_lowercase(), t.id.clone()));
            }
        }
        surfaces.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
        let alternation: Vec<String> = surfaces.iter().map(|(s, _)| regex::escape(s)).collect();
        let re = regex::Regex::new(&std::format!(r"(?i)\b(?:{})\b", alternation.join("|"))).unwrap();
        let texts = [
            "Proteomics and proteome analysis via mass spectrometry (MS).",
            "gene expression profiling; expression profiling of a gene",
            "MS-based proteome profiling, GENE EXPRESSION, proteomes",
            "",
            "proteome",
        ];
        let h = Highlighter::new(&ont, URL);
        for text in texts {
            let want: Vec<(usize, usize, String)> = re
                .find_iter(text)
                .map(|m| {
                    let lower = m.as_str().to_lowercase();
                    let id = surfaces.iter().find(|(s, _)| *s == lower).unwrap().1.clone();
                    (m.start(), m.end(), id)
                })
                .collect();
            let got: Vec<(usize, usize, String)> = h
                .highlight(text)
                .into_iter()
                .map(|s| (s.start, s.end, s.term_id))
                .collect();
            assert_eq!(got, want, "{text}");
        }
    }
}
