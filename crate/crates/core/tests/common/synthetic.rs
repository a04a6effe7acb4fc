//! Seeded synthetic minutes corpus. Documents dated inside hiking phases
//! mostly use upward expressions, documents inside cutting phases mostly
//! downward ones.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stance_scope::builtin_parameters;

/// Policy-decision dates inside hiking runs of the bundled rate history.
pub const HIKE_MEETINGS: [&str; 20] = [
    "2004-06-30", "2004-08-10", "2004-09-21", "2004-11-10", "2004-12-14", "2005-02-02", "2005-03-22",
    "2005-05-03", "2005-06-30", "2005-08-09", "2005-09-20", "2005-11-01", "2005-12-13", "2006-01-31",
    "2006-03-28", "2017-03-15", "2017-06-14", "2017-12-13", "2018-03-21", "2018-06-13",
];

/// Policy-decision dates inside cutting runs of the bundled rate history.
pub const CUT_MEETINGS: [&str; 20] = [
    "2001-01-31", "2001-03-20", "2001-04-18", "2001-05-15", "2001-06-27", "2001-08-21", "2001-09-17",
    "2001-10-02", "2001-11-06", "2001-12-11", "2007-09-18", "2007-10-31", "2007-12-11", "2008-01-30",
    "2008-03-18", "2008-04-30", "2008-10-08", "2008-10-29", "2019-09-18", "2019-10-30",
];

const INTROS: [&str; 4] = [
    "Participants noted that",
    "The staff reported that",
    "Several members observed that",
    "Most participants judged that",
];

const FILLER: [&str; 3] = [
    "The Committee will continue to monitor the implications of incoming information.",
    "Members discussed the management of the balance sheet.",
    "The manager reported on developments in domestic financing markets.",
];

fn subject(category: &str) -> &'static str {
    match category {
        "inflation" => "inflation",
        "job_gain" => "job gains",
        "economic_growth" => "economic growth",
        other => panic!("no synthetic subject for {other}"),
    }
}

fn clause(rng: &mut ChaCha8Rng, category: &str, expression: &str) -> String {
    let intro = INTROS[rng.random_range(0..INTROS.len())];
    let aux = if expression.starts_with("been") { "have " } else { "had " };
    format!("{intro} {} {aux}{expression}.", subject(category))
}

/// Text of one synthetic minutes document.
pub fn document(rng: &mut ChaCha8Rng, p_up: f64) -> String {
    let mut paragraphs = vec![
        "PRESENT: Ms. Alpha, Chair; Mr. Beta, Vice Chair; Ms. Gamma; Mr. Delta; Ms. Epsilon".to_string(),
    ];
    for c in &builtin_parameters().categories {
        let n = rng.random_range(3..=6);
        let mut sentences = Vec::new();
        for _ in 0..n {
            let pool = if rng.random_bool(p_up) { &c.upward } else { &c.downward };
            let expression = &pool[rng.random_range(0..pool.len())];
            sentences.push(clause(rng, &c.category, expression));
        }
        sentences.push(FILLER[rng.random_range(0..FILLER.len())].to_string());
        paragraphs.push(sentences.join(" "));
    }
    paragraphs.push("Voting for this action: Ms. Alpha, Mr. Beta, Ms. Gamma, Mr. Delta, Ms. Epsilon.".to_string());
    paragraphs.join("\n\n") + "\n"
}

/// Writes 40 minutes documents plus a manifest under `dir`, returning
/// `(corpus_dir, manifest)`.
pub fn write_corpus(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = dir.join("corpus");
    fs::create_dir_all(corpus.join("minutes")).unwrap();
    let mut manifest = String::from("doc_id,doc_type,meeting_date,publication_date,speaker,path\n");
    let dated = HIKE_MEETINGS
        .iter()
        .map(|d| (d, 0.8))
        .chain(CUT_MEETINGS.iter().map(|d| (d, 0.2)));
    for (date, p_up) in dated {
        let rel = format!("minutes/{date}_synthetic.txt");
        fs::write(corpus.join(&rel), document(&mut rng, p_up)).unwrap();
        manifest.push_str(&format!("syn-{date},minutes,{date},{date},,{rel}\n"));
    }
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, manifest).unwrap();
    (corpus, manifest_path)
}
