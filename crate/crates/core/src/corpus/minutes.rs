use super::{DocType, PreprocessRules};

/// Drops attendance rosters, voting-name lists and directive boilerplate
/// from modern minutes. Old-format minutes of action (and every other
/// document type) pass through untouched. Retained paragraphs keep their
/// order and text.
pub fn filter_minutes_paragraphs(
    paragraphs: &[String],
    doc_type: DocType,
    rules: &PreprocessRules,
) -> Vec<String> {
    if doc_type != DocType::Minutes {
        return paragraphs.to_vec();
    }
    paragraphs
        .iter()
        .filter(|p| !is_excluded(p, rules))
        .cloned()
        .collect()
}

fn is_excluded(paragraph: &str, rules: &PreprocessRules) -> bool {
    let p = paragraph.trim_start();
    if rules
        .boilerplate_prefixes
        .iter()
        .any(|prefix| p.starts_with(prefix.as_str()))
    {
        return true;
    }
    rules.roster_markers.iter().any(|marker| {
        p.strip_prefix(marker.as_str())
            .is_some_and(|rest| capitalized_entries(rest) >= rules.roster_min_names)
    })
}

/// Counts comma/semicolon-separated entries that start with a capital
/// letter. Text up to the first colon ("Voting for this action:") is
/// skipped.
fn capitalized_entries(rest: &str) -> usize {
    let list = match rest.find(':') {
        Some(i) => &rest[i + 1..],
        None => rest,
    };
    list.split([',', ';'])
        .map(|entry| {
            let entry = entry.trim();
            entry.strip_prefix("and ").unwrap_or(entry)
        })
        .filter(|entry| entry.chars().next().is_some_and(char::is_uppercase))
        .count()
}
