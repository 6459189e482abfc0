//! Labeled document collections: on-disk loaders and a synthetic generator.
//!
//! Supported layouts are a SpamAssassin-style directory tree, a TREC spam
//! track index file and a plain `label<TAB>text` file. Every loader assigns
//! document ids `0..n` in output order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MODULE: &str = "corpus";

/// Class of a message. `Spam` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Spam,
    Ham,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Spam, Label::Ham];

    pub fn is_spam(self) -> bool {
        self == Label::Spam
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Spam => "spam",
            Label::Ham => "ham",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("spam") {
            Ok(Label::Spam)
        } else if s.eq_ignore_ascii_case("ham") {
            Ok(Label::Ham)
        } else {
            Err(format!("unknown label {s:?} (expected spam or ham)"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: usize,
    /// Origin path, or `synthetic:<n>` for generated documents.
    pub source: String,
    pub label: Label,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus from `(source, label, text)` triples, numbering ids in
    /// order.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (String, Label, String)>,
    {
        let documents = entries
            .into_iter()
            .enumerate()
            .map(|(id, (source, label, text))| Document {
                id,
                source,
                label,
                text,
            })
            .collect();
        Corpus { documents }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }
}

/// Files a loader could not turn into documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub skipped: Vec<(PathBuf, String)>,
}

impl LoadReport {
    fn skip(&mut self, path: PathBuf, reason: impl Into<String>) {
        let reason = reason.into();
        warn!("skipping {}: {}", path.display(), reason);
        self.skipped.push((path, reason));
    }
}

/// Decodes a raw message, optionally reducing it to `subject \n body`.
///
/// The header block ends at the first empty line. When `strip_headers` is
/// set, the result is the first `Subject:` value (empty if absent), a
/// newline, and everything after the empty line. Invalid UTF-8 is replaced
/// with U+FFFD.
pub fn parse_email(raw: &[u8], strip_headers: bool) -> String {
    let text = String::from_utf8_lossy(raw);
    if !strip_headers {
        return text.into_owned();
    }

    let mut subject: Option<String> = None;
    let mut in_subject = false;
    let mut body = "";
    let mut pos = 0;
    while pos < text.len() {
        let (line, next) = match text[pos..].find('\n') {
            Some(off) => (&text[pos..pos + off], pos + off + 1),
            None => (&text[pos..], text.len()),
        };
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            body = &text[next..];
            break;
        }
        if in_subject && line.starts_with([' ', '\t']) {
            if let Some(s) = subject.as_mut() {
                s.push(' ');
                s.push_str(line.trim());
            }
        } else {
            in_subject = false;
            if subject.is_none() && line.len() >= 8 && line[..8].eq_ignore_ascii_case("subject:") {
                subject = Some(line[8..].trim().to_string());
                in_subject = true;
            }
        }
        pos = next;
    }

    let mut out = subject.unwrap_or_default();
    out.push('\n');
    out.push_str(body);
    out
}

fn label_from_dir_name(name: &str) -> Option<Label> {
    let lower = name.to_lowercase();
    if lower.contains("spam") {
        Some(Label::Spam)
    } else if lower.contains("ham") {
        Some(Label::Ham)
    } else {
        None
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect::<Vec<_>>();
    paths.sort();
    Ok(paths)
}

/// Loads a SpamAssassin-style tree. Each regular file is one message; its
/// label comes from the deepest ancestor directory whose name contains
/// "spam" or "ham" (case-insensitive, "spam" wins when both appear).
pub fn load_spamassassin_dir(root: &Path, strip_headers: bool) -> Result<(Corpus, LoadReport)> {
    if !root.is_dir() {
        return Err(Error::input(
            MODULE,
            format!("corpus root {} does not exist or is not a directory", root.display()),
        ));
    }

    let mut files: Vec<(PathBuf, Label)> = Vec::new();
    let mut report = LoadReport::default();
    let mut stack = vec![(root.to_path_buf(), None::<Label>)];
    while let Some((dir, inherited)) = stack.pop() {
        for path in sorted_entries(&dir)? {
            if path.is_dir() {
                let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
                let label = label_from_dir_name(&name).or(inherited);
                stack.push((path, label));
            } else if path.is_file() {
                match inherited {
                    Some(label) => files.push((path, label)),
                    None => report.skip(path, "not under a spam or ham directory"),
                }
            }
        }
    }
    files.sort();

    if files.is_empty() {
        warn!("no messages found under {}", root.display());
    }

    let mut entries = Vec::with_capacity(files.len());
    for (path, label) in files {
        match fs::read(&path) {
            Ok(raw) => entries.push((
                path.display().to_string(),
                label,
                parse_email(&raw, strip_headers),
            )),
            Err(e) => report.skip(path, format!("unreadable: {e}")),
        }
    }
    Ok((Corpus::from_entries(entries), report))
}

/// Loads a TREC spam track index: one `<label> <relative-path>` pair per
/// non-empty line, paths relative to the index file's directory.
pub fn load_trec_index(index_path: &Path, strip_headers: bool) -> Result<(Corpus, LoadReport)> {
    let raw = fs::read(index_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::input(
            MODULE,
            format!("index file {} does not exist", index_path.display()),
        ),
        _ => Error::io(index_path, e),
    })?;
    let index = String::from_utf8_lossy(&raw);
    let base = index_path.parent().unwrap_or_else(|| Path::new("."));

    let mut report = LoadReport::default();
    let mut entries = Vec::new();
    for (lineno, line) in index.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label_tok, rest) = line
            .split_once([' ', '\t'])
            .ok_or_else(|| Error::input(MODULE, format!("{}: line {}: missing path", index_path.display(), lineno + 1)))?;
        let label: Label = label_tok.parse().map_err(|e: String| {
            Error::input(MODULE, format!("{}: line {}: {e}", index_path.display(), lineno + 1))
        })?;
        let rel = rest.trim_start_matches([' ', '\t']);
        let path = base.join(rel);
        match fs::read(&path) {
            Ok(bytes) => entries.push((path.display().to_string(), label, parse_email(&bytes, strip_headers))),
            Err(e) => report.skip(path, format!("unreadable: {e}")),
        }
    }
    Ok((Corpus::from_entries(entries), report))
}

/// Loads `label<TAB>text` lines. The text is used verbatim.
pub fn load_tsv(path: &Path) -> Result<Corpus> {
    let raw = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => {
            Error::input(MODULE, format!("tsv file {} does not exist", path.display()))
        }
        _ => Error::io(path, e),
    })?;
    let content = String::from_utf8_lossy(&raw);
    let mut entries = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let (label, text) = line.split_once('\t').ok_or_else(|| {
            Error::input(MODULE, format!("{}: line {}: no tab separator", path.display(), lineno + 1))
        })?;
        let label: Label = label.parse().map_err(|e: String| {
            Error::input(MODULE, format!("{}: line {}: {e}", path.display(), lineno + 1))
        })?;
        entries.push((format!("{}:{}", path.display(), lineno + 1), label, text.to_string()));
    }
    Ok(Corpus::from_entries(entries))
}

/// Writes a corpus as `label<TAB>text` lines. Tabs and line breaks inside a
/// text are replaced by spaces.
pub fn write_tsv(corpus: &Corpus, mut out: impl std::io::Write) -> std::io::Result<()> {
    for doc in &corpus.documents {
        let text: String = doc
            .text
            .chars()
            .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
            .collect();
        writeln!(out, "{}\t{}", doc.label, text)?;
    }
    out.flush()
}

/// Parameters of the synthetic corpus generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_spam: usize,
    pub n_ham: usize,
    pub subtopics_per_label: usize,
    pub vocab_per_subtopic: usize,
    pub shared_vocab: usize,
    pub doc_len_min: usize,
    pub doc_len_max: usize,
    pub noise_ratio: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_spam: 200,
            n_ham: 200,
            subtopics_per_label: 2,
            vocab_per_subtopic: 50,
            shared_vocab: 50,
            doc_len_min: 20,
            doc_len_max: 60,
            noise_ratio: 0.2,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_spam", self.n_spam),
            ("n_ham", self.n_ham),
            ("subtopics_per_label", self.subtopics_per_label),
            ("vocab_per_subtopic", self.vocab_per_subtopic),
            ("shared_vocab", self.shared_vocab),
            ("doc_len_min", self.doc_len_min),
            ("doc_len_max", self.doc_len_max),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::config(MODULE, format!("{name} must be at least 1")));
        }
        if self.doc_len_min > self.doc_len_max {
            return Err(Error::config(MODULE, "doc_len_min must not exceed doc_len_max"));
        }
        if !(0.0..=1.0).contains(&self.noise_ratio) {
            return Err(Error::config(MODULE, "noise_ratio must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// A generated corpus together with the subtopic each document was drawn
/// from (indexed by document id, numbered within its label).
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub subtopics: Vec<usize>,
}

/// Generates a corpus whose spam and ham documents draw from disjoint
/// subtopic vocabularies (`s<t>w<i>` and `h<t>w<i>`) mixed with a shared pool
/// (`cw<i>`) at rate `noise_ratio`.
///
/// Randomness comes from ChaCha8 seeded with `spec.seed`, so the output is a
/// pure function of `spec`. Spam documents come first, then ham.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut entries = Vec::with_capacity(spec.n_spam + spec.n_ham);
    let mut subtopics = Vec::with_capacity(spec.n_spam + spec.n_ham);
    let plan = [(Label::Spam, spec.n_spam, 's'), (Label::Ham, spec.n_ham, 'h')];
    for (label, n, prefix) in plan {
        for _ in 0..n {
            let topic = rng.gen_range(0..spec.subtopics_per_label);
            let len = rng.gen_range(spec.doc_len_min..=spec.doc_len_max);
            let mut tokens = Vec::with_capacity(len);
            for _ in 0..len {
                if rng.gen::<f64>() < spec.noise_ratio {
                    tokens.push(format!("cw{}", rng.gen_range(0..spec.shared_vocab)));
                } else {
                    tokens.push(format!(
                        "{prefix}{topic}w{}",
                        rng.gen_range(0..spec.vocab_per_subtopic)
                    ));
                }
            }
            let n_doc = entries.len();
            entries.push((format!("synthetic:{n_doc}"), label, tokens.join(" ")));
            subtopics.push(topic);
        }
    }

    Ok(SyntheticCorpus {
        corpus: Corpus::from_entries(entries),
        subtopics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn write(path: &Path, content: &[u8]) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, content).unwrap();
    }

    #[test]
    fn parse_email_strips_headers() {
        let raw = b"Subject: Hi\nX: y\n\nbody";
        assert_eq!(parse_email(raw, true), "Hi\nbody");
    }

    #[test]
    fn parse_email_without_blank_line_is_all_headers() {
        assert_eq!(parse_email(b"no blank line at all", true), "\n");
    }

    #[test]
    fn parse_email_identity_without_strip() {
        let raw = "Subject: x\r\n\r\nhello \u{e9}";
        assert_eq!(parse_email(raw.as_bytes(), false), raw);
    }

    #[test]
    fn parse_email_subject_case_insensitive_and_crlf() {
        let raw = b"From: a\r\nsUbJeCt:  Buy now \r\n\r\nline1\r\nline2";
        assert_eq!(parse_email(raw, true), "Buy now\nline1\r\nline2");
    }

    #[test]
    fn parse_email_folded_subject() {
        let raw = b"Subject: part one\n  part two\nX: y\n\nb";
        assert_eq!(parse_email(raw, true), "part one part two\nb");
    }

    #[test]
    fn parse_email_replaces_invalid_bytes() {
        let out = parse_email(&[b'a', 0xff, b'b'], false);
        assert_eq!(out, "a\u{fffd}b");
    }

    #[test]
    fn spamassassin_ordering_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("ham/a.txt"), b"hello");
        write(&dir.path().join("spam/b.txt"), b"buy");
        let (corpus, report) = load_spamassassin_dir(dir.path(), false).unwrap();
        assert!(report.skipped.is_empty());
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.documents[0].label, Label::Ham);
        assert!(corpus.documents[0].source.ends_with("a.txt"));
        assert_eq!(corpus.documents[1].id, 1);
        assert_eq!(corpus.documents[1].label, Label::Spam);
    }

    #[test]
    fn spamassassin_substring_and_priority_rules() {
        assert_eq!(label_from_dir_name("easy_ham_2"), Some(Label::Ham));
        assert_eq!(label_from_dir_name("SPAM_2"), Some(Label::Spam));
        assert_eq!(label_from_dir_name("spam_not_ham"), Some(Label::Spam));
        assert_eq!(label_from_dir_name("misc"), None);
    }

    #[test]
    fn spamassassin_deepest_match_and_unmatched_dirs() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("spam/easy_ham/x"), b"1");
        write(&dir.path().join("spam/sub/y"), b"2");
        write(&dir.path().join("misc/z"), b"3");
        let (corpus, report) = load_spamassassin_dir(dir.path(), false).unwrap();
        let labels: Vec<_> = corpus.documents.iter().map(|d| (d.text.as_str(), d.label)).collect();
        assert_eq!(labels, vec![("1", Label::Ham), ("2", Label::Spam)]);
        assert_eq!(report.skipped.len(), 1);
    }

    #[test]
    fn spamassassin_empty_root() {
        let dir = tempfile::tempdir().unwrap();
        let (corpus, _) = load_spamassassin_dir(dir.path(), true).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn spamassassin_missing_root_is_input_error() {
        let err = load_spamassassin_dir(Path::new("/nonexistent/corpus"), true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn trec_index_labels_and_paths() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("data/inmail.1"), b"Subject: s\n\nspam body");
        write(&dir.path().join("full/msg7"), b"ham text");
        write(
            &dir.path().join("full/index"),
            b"spam ../data/inmail.1\n\nHAM\t msg7\nspam missing\n",
        );
        let (corpus, report) = load_trec_index(&dir.path().join("full/index"), true).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.documents[0].label, Label::Spam);
        assert_eq!(corpus.documents[0].text, "s\nspam body");
        assert_eq!(corpus.documents[1].label, Label::Ham);
        assert_eq!(corpus.documents[1].text, "\n");
        assert_eq!(report.skipped.len(), 1);
    }

    #[test]
    fn trec_index_blank_only() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("index"), b"\n  \n\n");
        let (corpus, _) = load_trec_index(&dir.path().join("index"), false).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn trec_index_unknown_label_names_line() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("index"), b"spam a\njunk b\n");
        let err = load_trec_index(&dir.path().join("index"), false).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn tsv_rules() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        fs::write(&p, "spam\tbuy now\nham\t\n").unwrap();
        let corpus = load_tsv(&p).unwrap();
        assert_eq!(corpus.documents[0].text, "buy now");
        assert_eq!(corpus.documents[0].label, Label::Spam);
        assert_eq!(corpus.documents[1].text, "");
        assert_eq!(corpus.documents[1].label, Label::Ham);

        fs::write(&p, "junk\tx\n").unwrap();
        let err = load_tsv(&p).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");

        fs::write(&p, "spam\tok\nnotab\n").unwrap();
        let err = load_tsv(&p).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn tsv_write_then_load() {
        let corpus = generate_synthetic(&SyntheticSpec::default()).unwrap().corpus;
        let mut buf = Vec::new();
        write_tsv(&corpus, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        fs::write(&p, &buf).unwrap();
        let loaded = load_tsv(&p).unwrap();
        let a: Vec<_> = corpus.documents.iter().map(|d| (d.label, &d.text)).collect();
        let b: Vec<_> = loaded.documents.iter().map(|d| (d.label, &d.text)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn synthetic_counts_and_determinism() {
        let spec = SyntheticSpec {
            n_spam: 3,
            n_ham: 2,
            ..SyntheticSpec::default()
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.corpus.count(Label::Spam), 3);
        assert_eq!(a.corpus.count(Label::Ham), 2);
        let ids: Vec<_> = a.corpus.documents.iter().map(|d| d.id).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn synthetic_noise_free_is_separable() {
        let spec = SyntheticSpec {
            noise_ratio: 0.0,
            ..SyntheticSpec::default()
        };
        let corpus = generate_synthetic(&spec).unwrap().corpus;
        let mut spam = HashSet::new();
        let mut ham = HashSet::new();
        for d in &corpus.documents {
            for tok in d.text.split(' ') {
                match d.label {
                    Label::Spam => {
                        assert!(tok.starts_with('s'));
                        spam.insert(tok);
                    }
                    Label::Ham => {
                        ham.insert(tok);
                    }
                }
            }
        }
        assert!(spam.is_disjoint(&ham));
    }

    #[test]
    fn synthetic_rejects_bad_spec() {
        let bad = [
            SyntheticSpec { n_spam: 0, ..SyntheticSpec::default() },
            SyntheticSpec { doc_len_min: 9, doc_len_max: 3, ..SyntheticSpec::default() },
            SyntheticSpec { noise_ratio: 1.5, ..SyntheticSpec::default() },
        ];
        for spec in bad {
            assert_eq!(generate_synthetic(&spec).unwrap_err().exit_code(), 3);
        }
    }
}
