use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::text::Stopwords;

const MAX_NAME_LEN: usize = 40;

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '+')
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().count() <= MAX_NAME_LEN
        && s.chars().all(is_name_char)
        && s.chars().any(char::is_alphanumeric)
}

/// `NAME: rest of title`.
fn colon_name(title: &str) -> Option<&str> {
    let (name, _) = title.trim_start().split_once(':')?;
    valid_name(name).then_some(name)
}

/// `NAME - a …` or `NAME - an …`, with a hyphen or dash as separator.
fn dash_name(title: &str) -> Option<&str> {
    let title = title.trim_start();
    let end = title.find(|c: char| !is_name_char(c))?;
    let name = title[..end].trim_end_matches(['-', '.']);
    let rest = title[name.len()..].trim_start();
    let rest = rest.strip_prefix(['-', '\u{2013}', '\u{2014}'])?.trim_start();
    let article = rest.split_whitespace().next()?.to_lowercase();
    (valid_name(name) && (article == "a" || article == "an")).then_some(name)
}

fn looks_like_name(word: &str) -> bool {
    let mut chars = word.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    // Capitalized, CamelCase and ALL-CAPS words all start upper-case.
    first_upper && valid_name(word)
}

/// First capitalized word in `abstract_text` followed by "is a", "provides"
/// or "enables", skipping stopwords such as "This" or "It".
fn abstract_name(abstract_text: &str, stopwords: &Stopwords) -> Option<String> {
    let words: Vec<&str> = abstract_text
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric() && !matches!(c, '_' | '+')))
        .collect();
    for (i, w) in words.iter().enumerate() {
        if !looks_like_name(w) || stopwords.contains(&w.to_lowercase()) {
            continue;
        }
        let next = |k: usize| words.get(i + k).map(|s| s.to_lowercase());
        let follows = match next(1).as_deref() {
            Some("provides") | Some("enables") => true,
            Some("is") => matches!(next(2).as_deref(), Some("a") | Some("an")),
            _ => false,
        };
        if follows {
            return Some(w.to_string());
        }
    }
    None
}

/// Candidate tool name from a publication, trying the title colon pattern,
/// then the title dash pattern, then the abstract.
pub fn extract_tool_name(title: &str, abstract_text: &str) -> Option<String> {
    colon_name(title)
        .or_else(|| dash_name(title))
        .map(String::from)
        .or_else(|| abstract_name(abstract_text, &Stopwords::english()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn title_patterns() {
        assert_eq!(
            extract_tool_name("Helix: a catalogue of biomedical software", "").as_deref(),
            Some("Helix")
        );
        assert_eq!(
            extract_tool_name("OMICtools: an informative directory for multi-omic data analysis", "").as_deref(),
            Some("OMICtools")
        );
        assert_eq!(extract_tool_name("Latent dirichlet allocation", ""), None);
        assert_eq!(extract_tool_name("BLAST+ - a new suite", "").as_deref(), Some("BLAST+"));
        assert_eq!(
            extract_tool_name("seq-tk \u{2013} an aligner", "").as_deref(),
            Some("seq-tk")
        );
        // A colon after a phrase with spaces is not a name.
        assert_eq!(extract_tool_name("Deep learning: a review", ""), None);
        assert_eq!(extract_tool_name("Heart - the organ", ""), None);
    }

    #[test]
    fn abstract_pattern() {
        let title = "A platform for integrative analysis";
        assert_eq!(
            extract_tool_name(title, "Here we describe it. GenoMap is a browser for maps.").as_deref(),
            Some("GenoMap")
        );
        assert_eq!(
            extract_tool_name(title, "This provides context. MAPPER enables fast search.").as_deref(),
            Some("MAPPER")
        );
        assert_eq!(extract_tool_name(title, "It is a good idea. Nothing else."), None);
        assert_eq!(extract_tool_name(title, ""), None);
    }

    #[test]
    fn long_names_rejected() {
        let long = "A".repeat(41);
        assert_eq!(extract_tool_name(&alloc::format!("{long}: x"), ""), None);
        let ok = "A".repeat(40);
        assert_eq!(extract_tool_name(&alloc::format!("{ok}: x"), ""), Some(ok));
    }
}
