//! Vocabulary construction and sparse document-term vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

const MODULE: &str = "features";

/// Index-sorted sparse vector with strictly positive stored weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary `(index, weight)` pairs: duplicates are
    /// summed, zeros dropped, entries sorted.
    ///
    /// # Panics
    ///
    /// Panics if any weight is negative or not finite.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, w) in pairs {
            assert!(w.is_finite() && w >= 0.0, "invalid sparse weight {w} at {i}");
            *acc.entry(i).or_insert(0.0) += w;
        }
        SparseVector {
            entries: acc.into_iter().filter(|&(_, w)| w != 0.0).collect(),
        }
    }

    /// Wraps entries already satisfying the invariants.
    fn from_sorted(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|p| p[0].0 < p[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w > 0.0 && w.is_finite()));
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    /// Multiplies each stored weight by `f(index, weight)`. Factors must be
    /// positive so that the sparsity pattern is unchanged.
    pub fn map_weights(&self, mut f: impl FnMut(usize, f64) -> f64) -> SparseVector {
        SparseVector::from_sorted(self.entries.iter().map(|&(i, w)| (i, f(i, w))).collect())
    }

    pub fn scale(&self, factor: f64) -> SparseVector {
        assert!(factor > 0.0, "scale factor must be positive");
        self.map_weights(|_, w| w * factor)
    }
}

/// Divides by the Euclidean norm; zero vectors are returned unchanged.
pub fn l2_normalize(v: &SparseVector) -> SparseVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    v.map_weights(|_, w| w / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightingScheme {
    Boolean,
    Count,
    RelFreq,
    TfIdf,
}

impl WeightingScheme {
    pub const ALL: [WeightingScheme; 4] = [
        WeightingScheme::Boolean,
        WeightingScheme::Count,
        WeightingScheme::RelFreq,
        WeightingScheme::TfIdf,
    ];
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightingScheme::Boolean => "boolean",
            WeightingScheme::Count => "count",
            WeightingScheme::RelFreq => "relfreq",
            WeightingScheme::TfIdf => "tfidf",
        })
    }
}

impl FromStr for WeightingScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "boolean" => Ok(WeightingScheme::Boolean),
            "count" => Ok(WeightingScheme::Count),
            "relfreq" => Ok(WeightingScheme::RelFreq),
            "tfidf" => Ok(WeightingScheme::TfIdf),
            other => Err(format!("unknown weighting scheme {other:?}")),
        }
    }
}

/// Terms in lexicographic order with their document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    fn from_parts(terms: Vec<String>, df: Vec<usize>, n_docs: usize) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            terms,
            index,
            df,
            n_docs,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn df(&self, index: usize) -> usize {
        self.df[index]
    }

    /// Smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        idf(self.n_docs, self.df[index])
    }

    /// Writes `term<TAB>index<TAB>df` lines.
    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        for (i, term) in self.terms.iter().enumerate() {
            writeln!(out, "{term}\t{i}\t{}", self.df[i])?;
        }
        out.flush()
    }

    /// Reads the format produced by [`Vocabulary::write_tsv`]. The corpus
    /// size is not part of the export and has to be supplied.
    pub fn read_tsv(input: impl BufRead, n_docs: usize) -> Result<Vocabulary> {
        let mut terms = Vec::new();
        let mut df = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::input(MODULE, e.to_string()))?;
            let bad = || Error::input(MODULE, format!("vocabulary line {}: malformed", lineno + 1));
            let mut parts = line.split('\t');
            let (Some(term), Some(idx), Some(count), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad());
            };
            if idx.parse::<usize>().map_err(|_| bad())? != terms.len() {
                return Err(bad());
            }
            terms.push(term.to_string());
            df.push(count.parse::<usize>().map_err(|_| bad())?);
        }
        Ok(Vocabulary::from_parts(terms, df, n_docs))
    }
}

pub fn idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Builds a vocabulary from the (training) token lists, keeping terms with
/// `min_df <= df <= max_df_ratio * n_docs`.
pub fn build_vocabulary(
    token_lists: &[Vec<String>],
    min_df: usize,
    max_df_ratio: f64,
) -> Result<Vocabulary> {
    if min_df == 0 {
        return Err(Error::config(MODULE, "min_df must be at least 1"));
    }
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::config(MODULE, "max_df_ratio must lie in (0, 1]"));
    }

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in token_lists {
        let mut seen: Vec<&str> = tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }

    let n_docs = token_lists.len();
    let max_df = max_df_ratio * n_docs as f64;
    let (terms, dfs): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|&(_, d)| d >= min_df && d as f64 <= max_df)
        .map(|(t, d)| (t.to_string(), d))
        .unzip();

    if terms.is_empty() {
        return Err(Error::config(
            MODULE,
            format!(
                "vocabulary is empty after document-frequency filtering (n_docs={n_docs}, min_df={min_df}, max_df_ratio={max_df_ratio})"
            ),
        ));
    }
    Ok(Vocabulary::from_parts(terms, dfs, n_docs))
}

/// Weights one document's tokens against `vocab`. Out-of-vocabulary tokens
/// are ignored and do not count towards the document length.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary, scheme: WeightingScheme) -> SparseVector {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    let len: usize = counts.values().sum();
    if len == 0 {
        return SparseVector::default();
    }
    let len = len as f64;
    let entries = counts
        .into_iter()
        .map(|(i, c)| {
            let c = c as f64;
            let w = match scheme {
                WeightingScheme::Boolean => 1.0,
                WeightingScheme::Count => c,
                WeightingScheme::RelFreq => c / len,
                WeightingScheme::TfIdf => c / len * vocab.idf(i),
            };
            (i, w)
        })
        .collect();
    SparseVector::from_sorted(entries)
}

/// Document-term matrix, one sparse row per document.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<SparseVector>,
    pub doc_ids: Vec<usize>,
    pub scheme: WeightingScheme,
    /// Set once descriptor/discriminator adjustment has been applied.
    pub adjusted: bool,
    pub n_terms: usize,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn normalized_rows(&self) -> Vec<SparseVector> {
        self.rows.iter().map(l2_normalize).collect()
    }
}

pub fn build_matrix(
    corpus_tokens: &[Vec<String>],
    doc_ids: &[usize],
    vocab: &Vocabulary,
    scheme: WeightingScheme,
) -> FeatureMatrix {
    assert_eq!(corpus_tokens.len(), doc_ids.len(), "one doc id per token list");
    let rows = corpus_tokens
        .par_iter()
        .map(|tokens| vectorize(tokens, vocab, scheme))
        .collect();
    FeatureMatrix {
        rows,
        doc_ids: doc_ids.to_vec(),
        scheme,
        adjusted: false,
        n_terms: vocab.len(),
    }
}
