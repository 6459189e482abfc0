//! Multinomial Naive Bayes over real-valued term weights.
//!
//! Weights of the (possibly adjusted) feature matrix are treated as
//! fractional term counts. Scores are log-odds: positive means spam.

use std::io::{BufRead, Write};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVector};

const MODULE: &str = "classifier";
const HEADER_TAG: &str = "nbmodel v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPrediction {
    pub doc_id: usize,
    /// Log-odds of spam versus ham.
    pub score: f64,
    pub predicted: Label,
    pub actual: Option<Label>,
}

/// A binary text classifier trained on a feature matrix.
///
/// Implementors only need `train` and `score`; thresholding is shared.
pub trait Classifier: Sized {
    type Params;

    fn train(matrix: &FeatureMatrix, labels: &[Label], params: &Self::Params) -> Result<Self>;

    /// Real-valued spam score, larger is more spam-like.
    fn score(&self, v: &SparseVector) -> f64;

    /// Predicts spam iff the score is strictly above `threshold`.
    fn classify(&self, doc_id: usize, v: &SparseVector, threshold: f64, actual: Option<Label>) -> ScoredPrediction {
        let score = self.score(v);
        ScoredPrediction {
            doc_id,
            score,
            predicted: decide(score, threshold),
            actual,
        }
    }
}

pub fn decide(score: f64, threshold: f64) -> Label {
    if score > threshold {
        Label::Spam
    } else {
        Label::Ham
    }
}

fn slot(label: Label) -> usize {
    match label {
        Label::Spam => 0,
        Label::Ham => 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    /// Indexed spam, ham.
    pub log_prior: [f64; 2],
    /// Per term: log P(t | spam), log P(t | ham).
    pub log_cond: Vec<[f64; 2]>,
    pub smoothing: f64,
}

impl NbModel {
    pub fn n_terms(&self) -> usize {
        self.log_cond.len()
    }

    pub fn log_prior(&self, label: Label) -> f64 {
        self.log_prior[slot(label)]
    }

    pub fn log_cond(&self, term: usize, label: Label) -> f64 {
        self.log_cond[term][slot(label)]
    }

    /// Unnormalized log joint `log P(label) + sum_t v(t) log P(t | label)`.
    pub fn log_joint(&self, v: &SparseVector, label: Label) -> f64 {
        let s = slot(label);
        self.log_prior[s] + v.iter().map(|(t, w)| w * self.log_cond[t][s]).sum::<f64>()
    }

    pub fn write_text(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{HEADER_TAG} |V|={} smoothing={}", self.n_terms(), self.smoothing)?;
        for label in Label::ALL {
            writeln!(out, "{label}\t{:.16e}", self.log_prior(label))?;
        }
        for (t, [s, h]) in self.log_cond.iter().enumerate() {
            writeln!(out, "{t}\t{s:.16e}\t{h:.16e}")?;
        }
        out.flush()
    }

    pub fn read_text(input: impl BufRead) -> Result<NbModel> {
        let mut lines = input.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(Error::input(MODULE, format!("model line {}: {e}", i + 1))),
                None => Err(Error::input(MODULE, format!("model file truncated before {what}"))),
            }
        };
        let bad = |line: usize, msg: &str| Error::input(MODULE, format!("model line {line}: {msg}"));
        let float = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, "malformed number"));

        let (ln, header) = next("header")?;
        let rest = header.strip_prefix(HEADER_TAG).ok_or_else(|| bad(ln, "not an nbmodel v1 file"))?;
        let mut n_terms = None;
        let mut smoothing = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("|V|=") {
                n_terms = Some(v.parse::<usize>().map_err(|_| bad(ln, "malformed |V|"))?);
            } else if let Some(v) = field.strip_prefix("smoothing=") {
                smoothing = Some(float(ln, v)?);
            } else {
                return Err(bad(ln, "unknown header field"));
            }
        }
        let (Some(n_terms), Some(smoothing)) = (n_terms, smoothing) else {
            return Err(bad(ln, "header needs |V| and smoothing"));
        };

        let mut log_prior = [0.0; 2];
        for label in Label::ALL {
            let (ln, line) = next("priors")?;
            let (name, value) = line.split_once('\t').ok_or_else(|| bad(ln, "expected label<TAB>log-prior"))?;
            if name != label.as_str() {
                return Err(bad(ln, "priors must be listed spam then ham"));
            }
            log_prior[slot(label)] = float(ln, value)?;
        }

        let mut log_cond = Vec::with_capacity(n_terms);
        for t in 0..n_terms {
            let (ln, line) = next("term weights")?;
            let parts: Vec<&str> = line.split('\t').collect();
            let [idx, s, h] = parts[..] else {
                return Err(bad(ln, "expected index<TAB>spam<TAB>ham"));
            };
            if idx.parse::<usize>().ok() != Some(t) {
                return Err(bad(ln, "term indices must be consecutive from 0"));
            }
            log_cond.push([float(ln, s)?, float(ln, h)?]);
        }
        Ok(NbModel {
            log_prior,
            log_cond,
            smoothing,
        })
    }
}

impl Classifier for NbModel {
    type Params = f64;

    fn train(matrix: &FeatureMatrix, labels: &[Label], smoothing: &f64) -> Result<Self> {
        train_nb(matrix, labels, *smoothing)
    }

    fn score(&self, v: &SparseVector) -> f64 {
        score(self, v)
    }
}

/// Fits priors from label frequencies and Laplace/Lidstone-smoothed term
/// distributions from the summed weights of each label's rows.
pub fn train_nb(matrix: &FeatureMatrix, labels: &[Label], smoothing: f64) -> Result<NbModel> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::config(MODULE, "smoothing must be a positive finite number"));
    }
    if labels.len() != matrix.n_rows() {
        return Err(Error::internal(MODULE, "labels are not aligned with matrix rows"));
    }
    let mut n_docs = [0usize; 2];
    let mut weight = vec![[0.0f64; 2]; matrix.n_terms];
    let mut total = [0.0f64; 2];
    for (row, &label) in matrix.rows.iter().zip(labels) {
        let s = slot(label);
        n_docs[s] += 1;
        for (t, w) in row.iter() {
            weight[t][s] += w;
            total[s] += w;
        }
    }
    if n_docs.contains(&0) {
        return Err(Error::input(MODULE, "training needs both spam and ham documents"));
    }

    let n = labels.len() as f64;
    let log_prior = [(n_docs[0] as f64 / n).ln(), (n_docs[1] as f64 / n).ln()];
    let v = matrix.n_terms as f64;
    let denom = [total[0] + smoothing * v, total[1] + smoothing * v];
    let log_cond = weight
        .iter()
        .map(|w| {
            [
                ((w[0] + smoothing) / denom[0]).ln(),
                ((w[1] + smoothing) / denom[1]).ln(),
            ]
        })
        .collect();
    Ok(NbModel {
        log_prior,
        log_cond,
        smoothing,
    })
}

/// Log-odds `log_joint(spam) - log_joint(ham)`.
pub fn score(model: &NbModel, v: &SparseVector) -> f64 {
    model.log_joint(v, Label::Spam) - model.log_joint(v, Label::Ham)
}

pub fn classify(model: &NbModel, doc_id: usize, v: &SparseVector, threshold: f64) -> ScoredPrediction {
    model.classify(doc_id, v, threshold, None)
}
