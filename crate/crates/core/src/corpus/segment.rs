//! Rule-based sentence boundary detection.
//!
//! A boundary is placed after a run of `.`, `!` or `?` (plus any closing
//! quotes and brackets) when all of the following hold:
//!
//! - a space follows,
//! - the next token starts with an upper-case letter, an opening quote, or an
//!   opening parenthesis followed by an upper-case letter,
//! - the terminal is not inside an open parenthesis or bracket,
//! - for a lone period, the token it ends is not a listed abbreviation and
//!   not a single capital initial ("H.").
//!
//! Fragments without any alphabetic character are merged into a neighbour,
//! so joining the output with single spaces always reproduces the
//! whitespace-normalized input.

use std::collections::HashSet;

use super::{normalize_whitespace, PreprocessRules, Sentence};

#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, ')' | ']' | '"' | '\'' | '”' | '’')
}

fn is_opening_quote(c: char) -> bool {
    matches!(c, '"' | '“' | '‘' | '\'')
}

impl SentenceSplitter {
    pub fn new<S: AsRef<str>>(abbreviations: &[S]) -> Self {
        SentenceSplitter {
            abbreviations: abbreviations
                .iter()
                .map(|a| a.as_ref().trim().to_string())
                .collect(),
        }
    }

    fn is_abbreviation(&self, token: &str) -> bool {
        let token = token.trim_start_matches(['(', '[', '"', '“', '‘', '\'']);
        if self.abbreviations.contains(token) {
            return true;
        }
        let mut chars = token.chars();
        matches!(
            (chars.next(), chars.next(), chars.next()),
            (Some(c), Some('.'), None) if c.is_uppercase()
        )
    }

    pub fn split(&self, paragraph: &str) -> Vec<String> {
        let text = normalize_whitespace(paragraph);
        if text.is_empty() {
            return Vec::new();
        }
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let byte_at = |k: usize| chars.get(k).map_or(text.len(), |&(b, _)| b);

        let mut pieces: Vec<&str> = Vec::new();
        let mut start = 0usize;
        let mut token_start = 0usize;
        let mut depth = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i].1;
            match c {
                ' ' => token_start = i + 1,
                '(' | '[' => depth += 1,
                ')' | ']' => depth = depth.saturating_sub(1),
                _ => {}
            }
            if !is_terminal(c) {
                i += 1;
                continue;
            }

            let mut j = i + 1;
            while j < chars.len() && is_terminal(chars[j].1) {
                j += 1;
            }
            let lone_period = c == '.' && j == i + 1;
            while j < chars.len() && is_closer(chars[j].1) {
                if matches!(chars[j].1, ')' | ']') {
                    depth = depth.saturating_sub(1);
                }
                j += 1;
            }

            let followed_by_space = j < chars.len() && chars[j].1 == ' ';
            let is_boundary = followed_by_space
                && depth == 0
                && self.starts_sentence(&chars, j + 1)
                && !(lone_period && self.is_abbreviation(&text[byte_at(token_start)..byte_at(i + 1)]));
            if is_boundary {
                pieces.push(&text[byte_at(start)..byte_at(j)]);
                start = j + 1;
            }
            i = j;
        }
        if start < chars.len() {
            pieces.push(&text[byte_at(start)..]);
        }
        merge_non_alphabetic(pieces)
    }

    fn starts_sentence(&self, chars: &[(usize, char)], k: usize) -> bool {
        match chars.get(k).map(|&(_, c)| c) {
            Some(c) if c.is_uppercase() || is_opening_quote(c) => true,
            Some('(') => chars.get(k + 1).is_some_and(|&(_, c)| c.is_uppercase()),
            _ => false,
        }
    }
}

fn merge_non_alphabetic(pieces: Vec<&str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(pieces.len());
    let mut pending: Option<String> = None;
    for piece in pieces {
        let has_alpha = piece.chars().any(char::is_alphabetic);
        match (has_alpha, out.last_mut()) {
            (false, Some(prev)) => {
                prev.push(' ');
                prev.push_str(piece);
            }
            (false, None) => {
                let p = pending.get_or_insert_with(String::new);
                if !p.is_empty() {
                    p.push(' ');
                }
                p.push_str(piece);
            }
            (true, _) => {
                let mut s = pending.take().map(|p| p + " ").unwrap_or_default();
                s.push_str(piece);
                out.push(s);
            }
        }
    }
    if let Some(p) = pending {
        out.push(p);
    }
    out
}

/// Segments one paragraph with the abbreviation list from `rules`, numbering
/// sentences from `first_index`.
pub fn segment_sentences(
    paragraph: &str,
    paragraph_index: usize,
    first_index: usize,
    rules: &PreprocessRules,
) -> Vec<Sentence> {
    SentenceSplitter::new(&rules.abbreviations)
        .split(paragraph)
        .into_iter()
        .enumerate()
        .map(|(k, text)| Sentence {
            text,
            index: first_index + k,
            paragraph_index,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn split(text: &str) -> Vec<String> {
        SentenceSplitter::new(&PreprocessRules::default().abbreviations).split(text)
    }

    #[test]
    fn canonical_split() {
        assert_eq!(
            split("Inflation remains elevated. Job gains have been strong."),
            ["Inflation remains elevated.", "Job gains have been strong."]
        );
    }

    #[test]
    fn honorific_does_not_split() {
        assert_eq!(
            split("Mr. Powell noted risks. The Committee agreed."),
            ["Mr. Powell noted risks.", "The Committee agreed."]
        );
    }

    #[test]
    fn parenthetical_reference() {
        assert_eq!(
            split("Growth slowed in Q1 (see par. 3). Outlook improved."),
            ["Growth slowed in Q1 (see par. 3).", "Outlook improved."]
        );
    }

    #[test]
    fn initials_decimals_and_times() {
        assert_eq!(
            split("Jerome H. Powell spoke at 2:30 p.m. Eastern time. Rates rose 0.25 percent."),
            ["Jerome H. Powell spoke at 2:30 p.m. Eastern time.", "Rates rose 0.25 percent."]
        );
    }

    #[test]
    fn enumerations_in_parentheses() {
        assert_eq!(
            split("The Committee decided (1) to raise the rate and (2) to reduce holdings. Markets reacted."),
            [
                "The Committee decided (1) to raise the rate and (2) to reduce holdings.",
                "Markets reacted."
            ]
        );
    }

    #[test]
    fn quotes_and_questions() {
        assert_eq!(
            split("He asked, \"Is inflation transitory?\" The answer was unclear! \"Yes,\" she said."),
            [
                "He asked, \"Is inflation transitory?\"",
                "The answer was unclear!",
                "\"Yes,\" she said."
            ]
        );
    }

    #[test]
    fn lower_case_continuation_not_split() {
        assert_eq!(split("Prices rose ca. 3 percent. vs. last year."), ["Prices rose ca. 3 percent. vs. last year."]);
    }

    #[test]
    fn whole_parenthesized_sentence() {
        assert_eq!(
            split("Growth was solid. (Data were revised.) The outlook improved."),
            ["Growth was solid.", "(Data were revised.)", "The outlook improved."]
        );
    }

    #[test]
    fn non_alphabetic_fragment_merged() {
        let out = split("1. Inflation rose. 2. Growth slowed.");
        assert!(out.iter().all(|s| s.chars().any(char::is_alphabetic)));
        assert_eq!(out.join(" "), "1. Inflation rose. 2. Growth slowed.");
    }

    #[test]
    fn numbering_of_sentences() {
        let s = segment_sentences("A b c. D e f.", 4, 10, &PreprocessRules::default());
        assert_eq!(s[0].index, 10);
        assert_eq!(s[1].index, 11);
        assert!(s.iter().all(|x| x.paragraph_index == 4));
    }

    proptest! {
        #[test]
        fn concatenation_recovers_paragraph(
            words in proptest::collection::vec(
                prop_oneof![
                    "[A-Za-z]{1,8}",
                    "[A-Z][a-z]{0,6}[.!?]",
                    Just("Mr.".to_string()),
                    Just("U.S.".to_string()),
                    Just("(1)".to_string()),
                    Just("3.5".to_string()),
                    Just("\"Yes.\"".to_string()),
                ],
                1..40,
            ),
            seps in proptest::collection::vec(prop_oneof![Just(" "), Just("  "), Just("\n"), Just("\t ")], 40),
        ) {
            let mut paragraph = String::new();
            for (w, s) in words.iter().zip(seps.iter().cycle()) {
                paragraph.push_str(w);
                paragraph.push_str(s);
            }
            let sentences = split(&paragraph);
            prop_assert_eq!(sentences.join(" "), normalize_whitespace(&paragraph));
            for s in &sentences {
                prop_assert_eq!(s.trim(), s.as_str());
                prop_assert!(!s.contains('\n'));
                prop_assert!(!s.is_empty());
            }
        }
    }
}
