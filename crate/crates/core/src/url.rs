//! Just enough URL handling for link validation, repository detection and
//! duplicate matching.

use alloc::string::String;

/// Borrowed pieces of an absolute `http`/`https`/`ftp` URL.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UrlParts<'a> {
    pub scheme: &'a str,
    pub host: &'a str,
    pub rest: &'a str,
}

pub fn parse(url: &str) -> Option<UrlParts<'_>> {
    let (scheme, after) = url.split_once("://")?;
    if !matches!(scheme.to_ascii_lowercase().as_str(), "http" | "https" | "ftp") {
        return None;
    }
    if url.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return None;
    }
    let host_end = after.find(['/', '?', '#']).unwrap_or(after.len());
    let authority = &after[..host_end];
    let authority = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    let host = match authority.rsplit_once(':') {
        Some((h, port)) if !port.is_empty() && port.bytes().all(|b| b.is_ascii_digit()) => h,
        Some(_) => return None,
        None => authority,
    };
    let label_ok = |l: &str| {
        !l.is_empty() && !l.starts_with('-') && !l.ends_with('-') && l.chars().all(|c| c.is_alphanumeric() || c == '-')
    };
    if host.is_empty() || !host.split('.').all(label_ok) {
        return None;
    }
    if !host.contains('.') && !host.eq_ignore_ascii_case("localhost") {
        return None;
    }
    Some(UrlParts {
        scheme,
        host,
        rest: &after[host_end..],
    })
}

pub fn is_valid(url: &str) -> bool {
    parse(url).is_some()
}

/// Lowercased host without a leading `www.`.
pub fn host(url: &str) -> Option<String> {
    let parts = parse(url)?;
    let h = parts.host.to_ascii_lowercase();
    Some(match h.strip_prefix("www.") {
        Some(s) => String::from(s),
        None => h,
    })
}

/// True when `host` is `allowed` or one of its subdomains.
pub fn host_matches(host: &str, allowed: &str) -> bool {
    let host = host.to_ascii_lowercase();
    let allowed = allowed.to_ascii_lowercase();
    host == allowed
        || (host.len() > allowed.len()
            && host.ends_with(allowed.as_str())
            && host.as_bytes()[host.len() - allowed.len() - 1] == b'.')
}

/// Comparison key for "same resource" checks: scheme dropped, host
/// lowercased without `www.`, query and fragment dropped, trailing `/` and
/// `.git` removed, path lowercased.
pub fn normalize(url: &str) -> String {
    let Some(parts) = parse(url) else {
        return url.trim().to_lowercase();
    };
    let mut key = host(url).unwrap_or_default();
    let path = parts.rest.split(['?', '#']).next().unwrap_or("");
    let mut path = path.trim_end_matches('/').to_lowercase();
    if let Some(p) = path.strip_suffix(".git") {
        path = String::from(p.trim_end_matches('/'));
    }
    key.push_str(&path);
    key
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_ordinary_urls() {
        assert!(is_valid("https://github.com/helix-lab/helix"));
        assert!(is_valid("http://example.org:8080/a?b=c#d"));
        assert!(is_valid("ftp://ftp.ncbi.nlm.nih.gov/pub"));
    }

    #[test]
    fn rejects_malformed_urls() {
        for bad in [
            "github.com/foo",
            "mailto:a@b.org",
            "https://",
            "https://exa mple.org",
            "https://nodot/path",
            "https://example.org:port/",
            "https://-bad.org",
        ] {
            assert!(!is_valid(bad), "{bad}");
        }
    }

    #[test]
    fn normalization_merges_cosmetic_variants() {
        let a = normalize("https://github.com/Foo/Bar");
        assert_eq!(a, normalize("http://www.github.com/foo/bar/"));
        assert_eq!(a, normalize("https://github.com/foo/bar.git"));
        assert_ne!(a, normalize("https://github.com/foo/baz"));
    }

    #[test]
    fn subdomain_matching() {
        assert!(host_matches("github.com", "github.com"));
        assert!(host_matches("gist.github.com", "github.com"));
        assert!(!host_matches("notgithub.com", "github.com"));
    }
}
