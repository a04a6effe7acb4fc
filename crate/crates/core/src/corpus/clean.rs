use std::sync::LazyLock;

use regex::Regex;

static URL_ONLY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:\[?\d+\]?\.?\s*)?<?(?:https?://|www\.)\S+>?$").unwrap()
});
static HORIZONTAL_RULE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:[-_*=]\s*){3,}$").unwrap());
static FOOTNOTE_ENTRY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(?:\d+\.|\[\d+\])\s").unwrap());
static INLINE_MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\d+\]").unwrap());

const RETURN_TO_TEXT: &str = "Return to text";

/// Removes footers and annotations line by line, keeping blank-line
/// structure intact so paragraphs can be split afterwards.
///
/// Dropped: URL-only lines (optionally numbered), lines matching a footer
/// pattern, horizontal rules, lines carrying a "Return to text" back-link,
/// and numbered footnote entries that follow a rule or a back-link. Inline
/// `[n]` reference markers are deleted.
pub fn strip_annotations(text: &str, footers: &[Regex]) -> String {
    let text = text.replace("\r\n", "\n").replace('\r', "\n");
    let mut out: Vec<String> = Vec::new();
    let mut in_notes = false;
    let mut in_entry = false;

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            in_entry = false;
            out.push(String::new());
            continue;
        }
        if HORIZONTAL_RULE.is_match(trimmed) {
            in_notes = true;
            in_entry = false;
            out.push(String::new());
            continue;
        }
        if trimmed.contains(RETURN_TO_TEXT) {
            in_notes = true;
            in_entry = false;
            continue;
        }
        if URL_ONLY.is_match(trimmed) || footers.iter().any(|f| f.is_match(trimmed)) {
            continue;
        }
        if in_notes {
            if FOOTNOTE_ENTRY.is_match(trimmed) {
                in_entry = true;
                continue;
            }
            if in_entry {
                continue;
            }
            in_notes = false;
        }
        let stripped = INLINE_MARKER.replace_all(trimmed, "");
        out.push(stripped.into_owned());
    }
    out.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbered_url_line_dropped() {
        let out = strip_annotations("Body text.\n\n1. <https://www.federalreserve.gov/x.htm>", &[]);
        assert_eq!(out.trim(), "Body text.");
    }

    #[test]
    fn footnotes_after_rule_dropped_with_continuations() {
        let text = "Main paragraph.[1]\n\n---\n1. A footnote that\nwraps onto a second line.\n2. Another one.\n";
        let out = strip_annotations(text, &[]);
        assert!(out.contains("Main paragraph."));
        assert!(!out.contains("[1]"));
        assert!(!out.contains("footnote"));
        assert!(!out.contains("Another"));
    }

    #[test]
    fn return_to_text_starts_notes() {
        let text = "Body.\n\nNote text about methodology. Return to text\n\n2. Second note.\n\nAfter notes paragraph.";
        let out = strip_annotations(text, &[]);
        assert!(!out.contains("methodology"));
        assert!(!out.contains("Second note"));
        assert!(out.contains("After notes paragraph."));
    }

    #[test]
    fn numbered_lines_without_rule_are_kept() {
        let text = "1. Inflation rose.\n2. Growth slowed.";
        let out = strip_annotations(text, &[]);
        assert_eq!(out, text);
    }

    #[test]
    fn footer_patterns_apply() {
        let footer = Regex::new(r"^Last [Uu]pdate:").unwrap();
        let out = strip_annotations("Body.\nLast Update: March 16, 2022", &[footer]);
        assert_eq!(out.trim(), "Body.");
    }
}
