//! End-to-end orchestration: configuration, per-fold fitting, and the `run`
//! and `compare` drivers that write reports to an output directory.
//!
//! The configuration is a flat `key = value` file. Every key has a default
//! (see [`PipelineConfig::default`]) and command-line overrides use the same
//! key names.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;

use crate::classifier::{train_nb, Classifier, NbModel, ScoredPrediction};
use crate::clustering::{cluster_by_label, nearest_cluster, ClusterModel, ClusterParams};
use crate::corpus::{self, Corpus, Label, SyntheticSpec};
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate_tokens, CvOutcome, EvalParams, EvalReport};
use crate::features::{build_matrix, build_vocabulary, vectorize, Vocabulary, WeightingScheme};
use crate::textproc::{self, TokenizerConfig};
use crate::weighting::{adjust_matrix, adjust_vector, AdjustParams, TermTopicScores};

const MODULE: &str = "config";

pub const REPORT_FILE: &str = "report.txt";
pub const ROC_FILE: &str = "roc_points.csv";
pub const PR_FILE: &str = "pr_points.csv";
pub const CLUSTERS_FILE: &str = "clusters.csv";
pub const TERM_SCORES_FILE: &str = "term_scores.csv";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.txt";
pub const COMPARISON_FILE: &str = "comparison.txt";

/// Files written by a pipeline run, relative to its output directory.
pub const ARTIFACTS: [&str; 6] = [
    REPORT_FILE,
    ROC_FILE,
    PR_FILE,
    CLUSTERS_FILE,
    TERM_SCORES_FILE,
    RESOLVED_CONFIG_FILE,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Synthetic,
    Tsv,
    Trec,
    SpamAssassin,
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::Synthetic => "synthetic",
            CorpusKind::Tsv => "tsv",
            CorpusKind::Trec => "trec",
            CorpusKind::SpamAssassin => "spamassassin",
        })
    }
}

impl FromStr for CorpusKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "synthetic" => Ok(CorpusKind::Synthetic),
            "tsv" => Ok(CorpusKind::Tsv),
            "trec" => Ok(CorpusKind::Trec),
            "spamassassin" => Ok(CorpusKind::SpamAssassin),
            other => Err(format!("unknown corpus kind {other:?} (expected synthetic, tsv, trec or spamassassin)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopwordSource {
    Builtin,
    None,
    File(PathBuf),
}

impl fmt::Display for StopwordSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopwordSource::Builtin => f.write_str("builtin"),
            StopwordSource::None => f.write_str("none"),
            StopwordSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Configuration keys with a one-line description each, in file order.
pub const KEYS: &[(&str, &str)] = &[
    ("corpus_kind", "synthetic | tsv | trec | spamassassin"),
    ("corpus_path", "TSV file, TREC index file or SpamAssassin root directory"),
    ("strip_headers", "reduce e-mails to subject and body"),
    ("n_spam", "synthetic: number of spam documents"),
    ("n_ham", "synthetic: number of ham documents"),
    ("subtopics_per_label", "synthetic: subtopics per label"),
    ("vocab_per_subtopic", "synthetic: distinct words per subtopic"),
    ("shared_vocab", "synthetic: size of the shared word pool"),
    ("doc_len_min", "synthetic: minimum tokens per document"),
    ("doc_len_max", "synthetic: maximum tokens per document"),
    ("noise_ratio", "synthetic: probability of drawing from the shared pool"),
    ("seed", "synthetic: generator seed"),
    ("min_len", "shortest kept token"),
    ("max_len", "longest kept token"),
    ("stopwords", "builtin | none | path to a stopword file"),
    ("stem", "apply Porter stemming"),
    ("min_df", "minimum document frequency of a vocabulary term"),
    ("max_df_ratio", "maximum document frequency as a fraction of documents"),
    ("scheme", "boolean | count | relfreq | tfidf"),
    ("k_spam", "spam subtopics"),
    ("k_ham", "ham subtopics"),
    ("max_iter", "k-means iteration limit"),
    ("cluster_scope", "per_label | global"),
    ("weighting", "run clustering and descriptor/discriminator adjustment"),
    ("alpha", "descriptor strength"),
    ("beta", "discriminator strength"),
    ("adjust_test", "adjust held-out documents through their nearest cluster"),
    ("smoothing", "Naive Bayes additive smoothing"),
    ("threshold", "log-odds above which a document is spam"),
    ("fbeta", "beta of the F-score"),
    ("fp_cost", "cost of a false positive relative to a false negative"),
    ("folds", "cross-validation folds"),
    ("shuffle_seed", "fold assignment seed"),
    ("output_dir", "directory for reports and exports"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_kind: CorpusKind,
    pub corpus_path: Option<PathBuf>,
    pub strip_headers: bool,
    pub synthetic: SyntheticSpec,
    pub stopwords: StopwordSource,
    /// Resolved tokenizer settings, including the loaded stopword set.
    pub tokenizer: TokenizerConfig,
    pub min_df: usize,
    pub max_df_ratio: f64,
    pub scheme: WeightingScheme,
    pub cluster: ClusterParams,
    /// When off, clustering and adjustment are skipped entirely.
    pub weighting: bool,
    pub adjust: AdjustParams,
    pub smoothing: f64,
    pub threshold: f64,
    pub eval: EvalParams,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_kind: CorpusKind::Synthetic,
            corpus_path: None,
            strip_headers: true,
            synthetic: SyntheticSpec::default(),
            stopwords: StopwordSource::Builtin,
            tokenizer: TokenizerConfig::default(),
            min_df: 2,
            max_df_ratio: 0.95,
            scheme: WeightingScheme::Count,
            cluster: ClusterParams::default(),
            weighting: true,
            adjust: AdjustParams::default(),
            smoothing: 1.0,
            threshold: 0.0,
            eval: EvalParams::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("malformed number {v:?}"))
}

fn at_least(v: &str, min: usize) -> std::result::Result<usize, String> {
    let n: usize = parse_num(v)?;
    if n < min {
        return Err(format!("must be at least {min}"));
    }
    Ok(n)
}

fn positive(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err("must be a positive number".into());
    }
    Ok(x)
}

fn nonnegative(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err("must be a nonnegative number".into());
    }
    Ok(x)
}

impl PipelineConfig {
    /// Sets one key from its textual value, checking single-key invariants.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "corpus_kind" => self.corpus_kind = v.parse()?,
            "corpus_path" => self.corpus_path = (!v.is_empty()).then(|| PathBuf::from(v)),
            "strip_headers" => self.strip_headers = parse_bool(v)?,
            "n_spam" => self.synthetic.n_spam = at_least(v, 1)?,
            "n_ham" => self.synthetic.n_ham = at_least(v, 1)?,
            "subtopics_per_label" => self.synthetic.subtopics_per_label = at_least(v, 1)?,
            "vocab_per_subtopic" => self.synthetic.vocab_per_subtopic = at_least(v, 1)?,
            "shared_vocab" => self.synthetic.shared_vocab = at_least(v, 1)?,
            "doc_len_min" => self.synthetic.doc_len_min = at_least(v, 1)?,
            "doc_len_max" => self.synthetic.doc_len_max = at_least(v, 1)?,
            "noise_ratio" => {
                let x: f64 = parse_num(v)?;
                if !(0.0..=1.0).contains(&x) {
                    return Err("must lie in [0, 1]".into());
                }
                self.synthetic.noise_ratio = x;
            }
            "seed" => self.synthetic.seed = parse_num(v)?,
            "min_len" => self.tokenizer.min_len = at_least(v, 1)?,
            "max_len" => self.tokenizer.max_len = at_least(v, 1)?,
            "stopwords" => {
                self.stopwords = match v {
                    "builtin" => StopwordSource::Builtin,
                    "none" | "" => StopwordSource::None,
                    path => StopwordSource::File(PathBuf::from(path)),
                }
            }
            "stem" => self.tokenizer.stem = parse_bool(v)?,
            "min_df" => self.min_df = at_least(v, 1)?,
            "max_df_ratio" => {
                let x: f64 = parse_num(v)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err("must lie in (0, 1]".into());
                }
                self.max_df_ratio = x;
            }
            "scheme" => self.scheme = v.parse()?,
            "k_spam" => self.cluster.k_spam = at_least(v, 1)?,
            "k_ham" => self.cluster.k_ham = at_least(v, 1)?,
            "max_iter" => self.cluster.max_iter = at_least(v, 1)?,
            "cluster_scope" => self.cluster.scope = v.parse()?,
            "weighting" => self.weighting = parse_bool(v)?,
            "alpha" => self.adjust.alpha = nonnegative(v)?,
            "beta" => self.adjust.beta = nonnegative(v)?,
            "adjust_test" => self.adjust.adjust_test = parse_bool(v)?,
            "smoothing" => self.smoothing = positive(v)?,
            "threshold" => {
                let x: f64 = parse_num(v)?;
                if x.is_nan() {
                    return Err("must not be NaN".into());
                }
                self.threshold = x;
            }
            "fbeta" => self.eval.fbeta = positive(v)?,
            "fp_cost" => self.eval.fp_cost = positive(v)?,
            "folds" => self.eval.folds = at_least(v, 2)?,
            "shuffle_seed" => self.eval.shuffle_seed = parse_num(v)?,
            "output_dir" => {
                if v.is_empty() {
                    return Err("must not be empty".into());
                }
                self.output_dir = PathBuf::from(v);
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Current value of a key in the textual form [`PipelineConfig::set`]
    /// accepts.
    pub fn get(&self, key: &str) -> Option<String> {
        let s = &self.synthetic;
        Some(match key {
            "corpus_kind" => self.corpus_kind.to_string(),
            "corpus_path" => self.corpus_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "strip_headers" => self.strip_headers.to_string(),
            "n_spam" => s.n_spam.to_string(),
            "n_ham" => s.n_ham.to_string(),
            "subtopics_per_label" => s.subtopics_per_label.to_string(),
            "vocab_per_subtopic" => s.vocab_per_subtopic.to_string(),
            "shared_vocab" => s.shared_vocab.to_string(),
            "doc_len_min" => s.doc_len_min.to_string(),
            "doc_len_max" => s.doc_len_max.to_string(),
            "noise_ratio" => s.noise_ratio.to_string(),
            "seed" => s.seed.to_string(),
            "min_len" => self.tokenizer.min_len.to_string(),
            "max_len" => self.tokenizer.max_len.to_string(),
            "stopwords" => self.stopwords.to_string(),
            "stem" => self.tokenizer.stem.to_string(),
            "min_df" => self.min_df.to_string(),
            "max_df_ratio" => self.max_df_ratio.to_string(),
            "scheme" => self.scheme.to_string(),
            "k_spam" => self.cluster.k_spam.to_string(),
            "k_ham" => self.cluster.k_ham.to_string(),
            "max_iter" => self.cluster.max_iter.to_string(),
            "cluster_scope" => self.cluster.scope.to_string(),
            "weighting" => self.weighting.to_string(),
            "alpha" => self.adjust.alpha.to_string(),
            "beta" => self.adjust.beta.to_string(),
            "adjust_test" => self.adjust.adjust_test.to_string(),
            "smoothing" => self.smoothing.to_string(),
            "threshold" => self.threshold.to_string(),
            "fbeta" => self.eval.fbeta.to_string(),
            "fp_cost" => self.eval.fp_cost.to_string(),
            "folds" => self.eval.folds.to_string(),
            "shuffle_seed" => self.eval.shuffle_seed.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            _ => return None,
        })
    }

    /// The full resolved configuration in the file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, doc) in KEYS {
            out.push_str(&format!("# {doc}\n{key} = {}\n", self.get(key).expect("known key")));
        }
        out
    }

    /// The same configuration with descriptor and discriminator strengths
    /// set to zero.
    pub fn baseline(&self) -> PipelineConfig {
        let mut cfg = self.clone();
        cfg.adjust.alpha = 0.0;
        cfg.adjust.beta = 0.0;
        cfg
    }
}

fn config_error(origin: &str, key: &str, msg: impl fmt::Display) -> Error {
    Error::config(MODULE, format!("{origin}: key `{key}`: {msg}"))
}

/// Parses a configuration file and applies `overrides` (from command-line
/// flags) on top. Stopword files are loaded here.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let mut origin: HashMap<String, String> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let where_ = format!("line {}", lineno + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(MODULE, format!("{where_}: expected `key = value`, got {line:?}")))?;
        let key = key.trim();
        cfg.set(key, value).map_err(|e| config_error(&where_, key, e))?;
        origin.insert(key.to_string(), where_);
    }
    for (key, value) in overrides {
        cfg.set(key, value).map_err(|e| config_error("flag", key, e))?;
        origin.insert(key.clone(), format!("flag --{key}"));
    }

    let from = |key: &str| origin.get(key).cloned().unwrap_or_else(|| "default".to_string());
    if cfg.tokenizer.min_len > cfg.tokenizer.max_len {
        return Err(config_error(&from("max_len"), "max_len", "must not be below min_len"));
    }
    if cfg.synthetic.doc_len_min > cfg.synthetic.doc_len_max {
        return Err(config_error(&from("doc_len_max"), "doc_len_max", "must not be below doc_len_min"));
    }
    if cfg.corpus_kind != CorpusKind::Synthetic && cfg.corpus_path.is_none() {
        return Err(config_error(
            &from("corpus_kind"),
            "corpus_path",
            format!("required for corpus_kind = {}", cfg.corpus_kind),
        ));
    }
    cfg.tokenizer.stopwords = match &cfg.stopwords {
        StopwordSource::Builtin => textproc::parse_stopwords(textproc::DEFAULT_STOPWORDS),
        StopwordSource::None => Default::default(),
        StopwordSource::File(p) => textproc::load_stopwords(p)?,
    };
    Ok(cfg)
}

pub fn load_corpus(cfg: &PipelineConfig) -> Result<Corpus> {
    let path = || cfg.corpus_path.as_deref().expect("validated by parse_config");
    let (corpus, report) = match cfg.corpus_kind {
        CorpusKind::Synthetic => return Ok(corpus::generate_synthetic(&cfg.synthetic)?.corpus),
        CorpusKind::Tsv => return corpus::load_tsv(path()),
        CorpusKind::Trec => corpus::load_trec_index(path(), cfg.strip_headers)?,
        CorpusKind::SpamAssassin => corpus::load_spamassassin_dir(path(), cfg.strip_headers)?,
    };
    if !report.skipped.is_empty() {
        warn!("{} files skipped while loading the corpus", report.skipped.len());
    }
    Ok(corpus)
}

pub fn tokenize_corpus(corpus: &Corpus, cfg: &TokenizerConfig) -> Vec<Vec<String>> {
    corpus
        .documents
        .par_iter()
        .map(|d| textproc::normalize(&d.text, cfg))
        .collect()
}

/// Subtopic model and term scores of a fitted pipeline.
#[derive(Debug, Clone)]
pub struct WeightingFit {
    pub clusters: ClusterModel,
    pub scores: TermTopicScores,
}

/// All stages fitted on one training set.
#[derive(Debug, Clone)]
pub struct TrainedPipeline {
    pub vocab: Vocabulary,
    pub scheme: WeightingScheme,
    pub weighting: Option<WeightingFit>,
    pub adjust: AdjustParams,
    pub model: NbModel,
    pub threshold: f64,
}

/// Fits vocabulary, matrix, clusters, term scores, adjustment and the
/// classifier on the given training documents.
pub fn fit(tokens: &[Vec<String>], doc_ids: &[usize], labels: &[Label], cfg: &PipelineConfig) -> Result<TrainedPipeline> {
    let vocab = build_vocabulary(tokens, cfg.min_df, cfg.max_df_ratio)?;
    let matrix = build_matrix(tokens, doc_ids, &vocab, cfg.scheme);

    let (train_matrix, weighting) = if cfg.weighting {
        let relfreq = if cfg.scheme == WeightingScheme::RelFreq {
            matrix.clone()
        } else {
            build_matrix(tokens, doc_ids, &vocab, WeightingScheme::RelFreq)
        };
        let clusters = cluster_by_label(&matrix, labels, &cfg.cluster)?;
        let scores = TermTopicScores::compute(&matrix, &relfreq, &clusters)?;
        let adjusted = adjust_matrix(&matrix, &scores, &cfg.adjust, &clusters.assignment)?;
        (adjusted, Some(WeightingFit { clusters, scores }))
    } else {
        (matrix, None)
    };

    let model = train_nb(&train_matrix, labels, cfg.smoothing)?;
    Ok(TrainedPipeline {
        vocab,
        scheme: cfg.scheme,
        weighting,
        adjust: cfg.adjust.clone(),
        model,
        threshold: cfg.threshold,
    })
}

impl TrainedPipeline {
    /// Scores a normalized token list, adjusting it through its nearest
    /// cluster when test-time adjustment is enabled.
    pub fn predict(&self, tokens: &[String], doc_id: usize, actual: Option<Label>) -> ScoredPrediction {
        let mut v = vectorize(tokens, &self.vocab, self.scheme);
        if let (Some(w), true) = (&self.weighting, self.adjust.adjust_test) {
            let c = nearest_cluster(&v, &w.clusters, None);
            v = adjust_vector(&v, &w.scores, &self.adjust, c);
        }
        self.model.classify(doc_id, &v, self.threshold, actual)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Result of one cross-validated run plus the pipeline fitted on the whole
/// corpus (used for the cluster and term-score exports).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub cv: CvOutcome,
    pub full: TrainedPipeline,
}

impl RunOutcome {
    pub fn report(&self) -> &EvalReport {
        &self.cv.report
    }
}

fn evaluate(tokens: &[Vec<String>], labels: &[Label], cfg: &PipelineConfig) -> Result<RunOutcome> {
    let cv = cross_validate_tokens(tokens, labels, cfg)?;
    let ids: Vec<usize> = (0..labels.len()).collect();
    let full = fit(tokens, &ids, labels, cfg)?;
    Ok(RunOutcome { cv, full })
}

/// Writes report, curve points, cluster and term-score exports into `dir`.
pub fn write_run_artifacts(dir: &Path, run: &RunOutcome, labels: &[Label]) -> Result<()> {
    ensure_dir(dir)?;
    let report = run.report();
    write_with(&dir.join(REPORT_FILE), |w| report.write_text(w))?;
    write_with(&dir.join(ROC_FILE), |w| report.write_roc_csv(w))?;
    write_with(&dir.join(PR_FILE), |w| report.write_pr_csv(w))?;
    match &run.full.weighting {
        Some(fit) => {
            write_with(&dir.join(CLUSTERS_FILE), |w| fit.clusters.write_csv(labels, w))?;
            write_with(&dir.join(TERM_SCORES_FILE), |w| fit.scores.write_csv(&run.full.vocab, w))?;
        }
        None => {
            write_with(&dir.join(CLUSTERS_FILE), |w| writeln!(w, "doc_id,label,cluster_id,similarity"))?;
            write_with(&dir.join(TERM_SCORES_FILE), |w| writeln!(w, "term,cluster_id,descriptor,discriminator"))?;
        }
    }
    Ok(())
}

fn write_resolved_config(dir: &Path, cfg: &PipelineConfig) -> Result<()> {
    ensure_dir(dir)?;
    let path = dir.join(RESOLVED_CONFIG_FILE);
    fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))
}

/// Runs the cross-validated pipeline and writes all artifacts into
/// `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutcome> {
    let corpus = load_corpus(cfg)?;
    info!(
        "loaded {} documents ({} spam, {} ham)",
        corpus.len(),
        corpus.count(Label::Spam),
        corpus.count(Label::Ham)
    );
    let labels = corpus.labels();
    let tokens = tokenize_corpus(&corpus, &cfg.tokenizer);
    let run = evaluate(&tokens, &labels, cfg)?;
    write_resolved_config(&cfg.output_dir, cfg)?;
    write_run_artifacts(&cfg.output_dir, &run, &labels)?;
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub baseline: RunOutcome,
    pub adjusted: RunOutcome,
}

impl Comparison {
    /// `(metric, baseline, adjusted, adjusted - baseline)` rows.
    pub fn rows(&self) -> Vec<(&'static str, f64, f64, f64)> {
        let b = self.baseline.report();
        let a = self.adjusted.report();
        let mut rows: Vec<(&'static str, f64, f64)> = b
            .scalars()
            .into_iter()
            .zip(a.scalars())
            .map(|((name, x), (_, y))| (name, x, y))
            .collect();
        for (name, x, y) in [
            ("tp", b.confusion.tp, a.confusion.tp),
            ("fp", b.confusion.fp, a.confusion.fp),
            ("tn", b.confusion.tn, a.confusion.tn),
            ("fn", b.confusion.fn_, a.confusion.fn_),
        ] {
            rows.push((name, x as f64, y as f64));
        }
        rows.push(("fold_mean_f_score", b.fold_mean.f_score, a.fold_mean.f_score));
        rows.push(("fold_std_f_score", b.fold_std.f_score, a.fold_std.f_score));
        rows.into_iter().map(|(n, x, y)| (n, x, y, y - x)).collect()
    }

    pub fn write_text(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# baseline: alpha = beta = 0; adjusted: configured alpha and beta")?;
        writeln!(out, "{:<22} {:>12} {:>12} {:>12}", "metric", "baseline", "adjusted", "delta")?;
        for (name, b, a, d) in self.rows() {
            writeln!(out, "{name:<22} {b:>12.6} {a:>12.6} {d:>+12.6}")?;
        }
        out.flush()
    }
}

/// Runs the baseline (alpha = beta = 0) and the configured pipeline on
/// identical folds and writes both artifact sets plus a comparison table.
pub fn run_compare(cfg: &PipelineConfig) -> Result<Comparison> {
    let corpus = load_corpus(cfg)?;
    let labels = corpus.labels();
    let tokens = tokenize_corpus(&corpus, &cfg.tokenizer);

    let baseline = evaluate(&tokens, &labels, &cfg.baseline())?;
    let adjusted = evaluate(&tokens, &labels, cfg)?;
    if baseline.cv.fold_of != adjusted.cv.fold_of {
        return Err(Error::internal("evaluation", "compared arms used different folds"));
    }

    let out = &cfg.output_dir;
    write_resolved_config(out, cfg)?;
    write_run_artifacts(&out.join("baseline"), &baseline, &labels)?;
    write_run_artifacts(&out.join("adjusted"), &adjusted, &labels)?;
    let cmp = Comparison { baseline, adjusted };
    write_with(&out.join(COMPARISON_FILE), |w| cmp.write_text(w))?;
    Ok(cmp)
}
