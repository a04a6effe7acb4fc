use std::sync::LazyLock;

use regex::Regex;

use super::CorpusError;

// Two or more all-caps words (letters, apostrophes, hyphens) followed by a
// period at the start of a line: "CHAIR POWELL.", "MICHELLE SMITH.".
static SPEAKER_LABEL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([A-Z][A-Z'’\-]+(?:[ \t]+[A-Z][A-Z'’\-]+)+)\.(?:\s+|$)").unwrap()
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerTurn {
    pub speaker: String,
    pub text: String,
}

pub(crate) fn speaker_turns(transcript: &str) -> Vec<SpeakerTurn> {
    let mut turns: Vec<SpeakerTurn> = Vec::new();
    for line in transcript.lines() {
        let trimmed = line.trim();
        if let Some(caps) = SPEAKER_LABEL.captures(trimmed) {
            let whole = caps.get(0).unwrap();
            turns.push(SpeakerTurn {
                speaker: caps[1].to_string(),
                text: trimmed[whole.end()..].to_string(),
            });
        } else if let Some(turn) = turns.last_mut() {
            turn.text.push('\n');
            turn.text.push_str(trimmed);
        }
        // Lines before the first label are title matter and are dropped.
    }
    turns
}

fn is_chair(speaker: &str, chair_prefixes: &[String]) -> bool {
    chair_prefixes.iter().any(|prefix| {
        speaker == prefix
            || speaker
                .strip_prefix(prefix.as_str())
                .is_some_and(|rest| rest.starts_with(' '))
    })
}

/// Keeps only the chair's turns (opening remarks and answers), in order,
/// separated by blank lines so each turn starts a new paragraph.
pub fn strip_reporter_questions(
    transcript: &str,
    chair_prefixes: &[String],
) -> Result<String, CorpusError> {
    let turns = speaker_turns(transcript);
    if turns.is_empty() {
        return Err(CorpusError::NoSpeakerLabels);
    }
    Ok(turns
        .into_iter()
        .filter(|t| is_chair(&t.speaker, chair_prefixes))
        .map(|t| t.text.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::normalize_whitespace;

    fn chair() -> Vec<String> {
        vec!["CHAIR".into(), "CHAIRMAN".into(), "CHAIRWOMAN".into()]
    }

    #[test]
    fn reporter_turns_removed() {
        let t = "CHAIR POWELL. Good afternoon...\nMICHELLE SMITH. First question...\nCHAIR POWELL. So I think...";
        let out = strip_reporter_questions(t, &chair()).unwrap();
        assert_eq!(normalize_whitespace(&out), "Good afternoon... So I think...");
    }

    #[test]
    fn chair_only_unchanged() {
        let t = "CHAIR POWELL. Good afternoon. Inflation is elevated.";
        let out = strip_reporter_questions(t, &chair()).unwrap();
        assert_eq!(out, "Good afternoon. Inflation is elevated.");
    }

    #[test]
    fn no_labels_is_error() {
        let err = strip_reporter_questions("Good afternoon. Thanks.", &chair()).unwrap_err();
        assert!(matches!(err, CorpusError::NoSpeakerLabels));
    }

    #[test]
    fn multi_paragraph_turns_and_title_matter() {
        let t = "Transcript of Chair Powell's Press Conference\n\nCHAIRMAN BERNANKE. First part.\n\nSecond part.\nREPORTER NAME. A question?\nCHAIRWOMAN YELLEN. Answer.";
        let turns = speaker_turns(t);
        assert_eq!(turns.len(), 3);
        assert_eq!(turns[0].speaker, "CHAIRMAN BERNANKE");
        let out = strip_reporter_questions(t, &chair()).unwrap();
        assert_eq!(out, "First part.\n\nSecond part.\n\nAnswer.");
    }

    #[test]
    fn sentence_starting_with_acronym_is_not_a_label() {
        assert!(speaker_turns("U.S. growth was solid.").is_empty());
        assert!(speaker_turns("OK. So we move on.").is_empty());
    }

    #[test]
    fn chair_prefix_must_be_a_word() {
        assert!(!is_chair("CHAIRS PANEL", &chair()));
        assert!(is_chair("CHAIR POWELL", &chair()));
    }
}
