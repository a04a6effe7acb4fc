//! Document scoring throughput, sequential against the rayon pool.

#[path = "../tests/common/synthetic.rs"]
#[allow(dead_code)]
mod synthetic;

use chrono::NaiveDate;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stance_scope::builtin_parameters;
use stance_scope::corpus::{DocType, Document, DocumentMeta, Preprocessor};
use stance_scope::entailment::{Entailer, LexicalOracle};
use stance_scope::exec::{self, ExecMode};
use stance_scope::pipeline::score_document;
use stance_scope::stance::CategoryScorer;
use stance_scope::topics::TopicClassifier;

fn documents(n: usize) -> Vec<Document> {
    let params = builtin_parameters();
    let pre = Preprocessor::new(params.preprocess.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let date = NaiveDate::from_ymd_opt(2018, 6, 13).unwrap();
    (0..n)
        .map(|i| {
            let meta = DocumentMeta {
                doc_id: format!("doc-{i:04}"),
                doc_type: DocType::Minutes,
                meeting_date: Some(date),
                publication_date: date,
                speaker: None,
                source_path: format!("doc-{i:04}.txt"),
            };
            let p_up = if i % 2 == 0 { 0.8 } else { 0.2 };
            pre.parse(synthetic::document(&mut rng, p_up).as_bytes(), meta).unwrap()
        })
        .collect()
}

fn bench_scoring(c: &mut Criterion) {
    let params = builtin_parameters();
    let docs = documents(200);
    let classifier = TopicClassifier::new(params.topic_list().unwrap(), &params.template().unwrap(), params.threshold);
    let scorers: Vec<CategoryScorer> = params
        .categories
        .iter()
        .map(|cat| CategoryScorer::new(cat.clone(), params.threshold, params.count_mode).unwrap())
        .collect();
    let lexicon = params.oracle_lexicon().unwrap();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());

    let mut group = c.benchmark_group("score_documents");
    group.throughput(Throughput::Elements(docs.len() as u64));
    for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel { threads })] {
        group.bench_function(name, |b| {
            b.iter_batched(
                || Entailer::new(Box::new(LexicalOracle::new(lexicon.clone(), 64))),
                |entailer| {
                    exec::try_map(mode, &docs, |d| score_document(d, &classifier, &scorers, &entailer)).unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scoring);
criterion_main!(benches);
