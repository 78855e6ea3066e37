use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::{tokenize, Stopwords, Token};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhraseConfig {
    pub min_count: u64,
    /// Longest n-gram, in tokens.
    pub max_len: usize,
    /// Context window on each side of a phrase occurrence, in tokens.
    pub window: usize,
}

impl Default for PhraseConfig {
    fn default() -> Self {
        PhraseConfig {
            min_count: 5,
            max_len: 3,
            window: 4,
        }
    }
}

/// A retained phrase with its positive PMI context profile, sorted by
/// context word.
#[derive(Clone, Debug, PartialEq)]
pub struct PhraseStats {
    pub phrase: String,
    pub count: u64,
    pub context: Vec<(String, f64)>,
}

fn join(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&t.text);
    }
    s
}

/// Calls `f(start, end)` for every n-gram span inside one segment that
/// neither starts nor ends with a stopword.
fn for_each_gram(tokens: &[Token], max_len: usize, stop: &Stopwords, mut f: impl FnMut(usize, usize)) {
    for i in 0..tokens.len() {
        if stop.contains(&tokens[i].text) {
            continue;
        }
        for n in 1..=max_len {
            let end = i + n;
            if end > tokens.len() || tokens[end - 1].segment != tokens[i].segment {
                break;
            }
            if !stop.contains(&tokens[end - 1].text) {
                f(i, end);
            }
        }
    }
}

/// High-occurrence phrases of a corpus with PPMI-weighted context vectors.
pub fn extract_phrases<'a, I>(corpus: I, config: &PhraseConfig, stopwords: &Stopwords) -> Vec<PhraseStats>
where
    I: IntoIterator<Item = &'a str>,
{
    let docs: Vec<Vec<Token>> = corpus.into_iter().map(tokenize).collect();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for doc in &docs {
        for_each_gram(doc, config.max_len, stopwords, |i, j| {
            *counts.entry(join(&doc[i..j])).or_default() += 1;
        });
    }
    counts.retain(|_, c| *c >= config.min_count);
    if counts.is_empty() {
        return Vec::new();
    }

    let mut cooc: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for doc in &docs {
        for_each_gram(doc, config.max_len, stopwords, |i, j| {
            let key = join(&doc[i..j]);
            let Some((phrase, _)) = counts.get_key_value(&key) else {
                return;
            };
            let row = cooc.entry(phrase.as_str()).or_default();
            let before = i.saturating_sub(config.window)..i;
            let after = j..(j + config.window).min(doc.len());
            for k in before.chain(after) {
                let w = doc[k].text.as_str();
                if !stopwords.contains(w) {
                    *row.entry(w).or_default() += 1;
                }
            }
        });
    }

    let total: u64 = cooc.values().flat_map(|r| r.values()).sum();
    let mut col: BTreeMap<&str, u64> = BTreeMap::new();
    for row in cooc.values() {
        for (c, n) in row {
            *col.entry(c).or_default() += n;
        }
    }
    let total = total as f64;
    counts
        .iter()
        .map(|(phrase, &count)| {
            let context = match cooc.get(phrase.as_str()) {
                Some(row) => {
                    let row_sum: u64 = row.values().sum();
                    row.iter()
                        .filter_map(|(c, &n)| {
                            let pmi = libm::log(n as f64 * total / (row_sum as f64 * col[c] as f64));
                            (pmi > 0.0).then(|| (String::from(*c), pmi))
                        })
                        .collect()
                }
                None => Vec::new(),
            };
            PhraseStats {
                phrase: phrase.clone(),
                count,
                context,
            }
        })
        .collect()
}

/// True when `inner`'s tokens appear contiguously inside `outer`'s.
pub(crate) fn is_nested(inner: &str, outer: &str) -> bool {
    let a: Vec<&str> = inner.split(' ').collect();
    let b: Vec<&str> = outer.split(' ').collect();
    a.len() <= b.len() && b.windows(a.len()).any(|w| w == a.as_slice())
}
