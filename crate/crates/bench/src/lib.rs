//! Benchmark fixtures shared by the criterion benches.

use spamadjust::corpus::generate_synthetic;
use spamadjust::pipeline::{parse_config, tokenize_corpus, PipelineConfig};
use spamadjust::{Corpus, Label, SyntheticSpec};

/// Default configuration with the synthetic corpus resized.
pub fn config(n_spam: usize, n_ham: usize) -> PipelineConfig {
    let overrides = [("n_spam", n_spam), ("n_ham", n_ham)]
        .map(|(k, v)| (k.to_string(), v.to_string()));
    parse_config("", &overrides).expect("bench config is valid")
}

pub fn corpus(n_spam: usize, n_ham: usize) -> Corpus {
    let spec = SyntheticSpec {
        n_spam,
        n_ham,
        ..SyntheticSpec::default()
    };
    generate_synthetic(&spec).expect("bench spec is valid").corpus
}

/// Normalized tokens and labels of a synthetic corpus.
pub fn tokens(n_spam: usize, n_ham: usize) -> (Vec<Vec<String>>, Vec<Label>) {
    let cfg = config(n_spam, n_ham);
    let corpus = corpus(n_spam, n_ham);
    (tokenize_corpus(&corpus, &cfg.tokenizer), corpus.labels())
}

/// English-looking text for tokenizer and stemmer benches.
pub fn prose(words: usize) -> String {
    const BASE: &[&str] = &[
        "congratulations", "you", "have", "been", "selected", "for", "exclusive", "offers", "meeting",
        "rescheduled", "attached", "minutes", "relational", "generalization", "hopefully", "running",
        "conditional", "operators", "agreed", "feudalism",
    ];
    (0..words).map(|i| BASE[(i * 7) % BASE.len()]).collect::<Vec<_>>().join(" ")
}
