//! Tokenization shared by phrase extraction, vectorization and highlighting.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::data;

/// A lowercased word with its byte span in the source text.
///
/// `segment` increases at every phrase-breaking punctuation mark, so n-grams
/// never straddle a sentence or clause boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub segment: u32,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_'
}

fn is_segment_break(c: char) -> bool {
    matches!(
        c,
        '.' | ',' | ';' | ':' | '!' | '?' | '(' | ')' | '[' | ']' | '{' | '}' | '"' | '\n'
    )
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut segment = 0u32;
    let mut pending_break = false;
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if !is_word_char(c) {
            if is_segment_break(c) {
                pending_break = true;
            }
            chars.next();
            continue;
        }
        let start = i;
        let mut end = i;
        while let Some(&(j, d)) = chars.peek() {
            if !is_word_char(d) {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        let raw = &text[start..end];
        let trimmed_front = raw.trim_start_matches(['-', '_']);
        let s = start + (raw.len() - trimmed_front.len());
        let word = trimmed_front.trim_end_matches(['-', '_']);
        if word.is_empty() {
            continue;
        }
        if pending_break && !tokens.is_empty() {
            segment += 1;
        }
        pending_break = false;
        tokens.push(Token {
            text: word.to_lowercase(),
            start: s,
            end: s + word.len(),
            segment,
        });
    }
    tokens
}

/// Lowercased token texts only.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.text).collect()
}

/// Canonical surface form of a phrase: lowercased tokens joined by one space.
pub fn normalize_phrase(text: &str) -> String {
    let mut out = String::new();
    for (i, w) in words(text).iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    pub fn english() -> Self {
        Self::from_list(data::STOPWORDS)
    }

    /// One word per line; `#` comments and blank lines ignored.
    pub fn from_list(text: &str) -> Self {
        Stopwords(data::list_lines(text).map(|w| w.to_lowercase()).collect())
    }

    pub fn empty() -> Self {
        Stopwords(BTreeSet::new())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::english()
    }
}

impl FromIterator<&'static str> for Stopwords {
    fn from_iter<I: IntoIterator<Item = &'static str>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.to_string()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_offsets_and_segments() {
        let text = "RNA-seq reads, aligned. Then -counted-";
        let toks = tokenize(text);
        let words: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(words, ["rna-seq", "reads", "aligned", "then", "counted"]);
        assert_eq!(&text[toks[0].start..toks[0].end], "RNA-seq");
        assert_eq!(&text[toks[4].start..toks[4].end], "counted");
        let segs: Vec<u32> = toks.iter().map(|t| t.segment).collect();
        assert_eq!(segs, [0, 0, 1, 2, 2]);
    }

    #[test]
    fn normalize_collapses_case_and_punctuation() {
        assert_eq!(normalize_phrase("  Gene   Expression "), "gene expression");
        assert_eq!(normalize_phrase(""), "");
    }

    #[test]
    fn shipped_stopwords() {
        let sw = Stopwords::english();
        assert!(sw.contains("the"));
        assert!(!sw.contains("gene"));
        assert!(sw.len() > 140);
    }
}
