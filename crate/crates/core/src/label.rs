/// Canonical form of a state label: surrounding parentheses stripped,
/// lowercased, internal whitespace collapsed to single spaces.
pub fn normalize_label(raw: &str) -> String {
    let mut s = raw.trim();
    while let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        s = inner.trim();
    }
    collapse_whitespace(&s.to_lowercase())
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
