//! Descriptor and discriminator term scores per subtopic, and the matrix
//! adjustment driven by them.
//!
//! For a term `t` and cluster `c`:
//!
//! * `desc(t, c)` is the mean relative frequency of `t` over the documents of
//!   `c`: high when the term is frequent inside the subtopic.
//! * `disc(t, c)` is the share of `t`'s training document frequency that falls
//!   inside `c`: 1 when the term occurs only in that subtopic.
//!
//! A weight `a(d, t)` of a document assigned to cluster `c` becomes
//! `a(d, t) * (1 + alpha * desc_norm(t, c) + beta * disc(t, c))`, where
//! `desc_norm` rescales each cluster's descriptor column to a maximum of 1.

use std::io::Write;

use rayon::prelude::*;

use crate::clustering::{nearest_cluster, ClusterModel};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVector, Vocabulary, WeightingScheme};

const MODULE: &str = "weighting";

/// Dense term x cluster table.
#[derive(Debug, Clone, PartialEq)]
pub struct TermClusterMatrix {
    n_terms: usize,
    n_clusters: usize,
    values: Vec<f64>,
}

impl TermClusterMatrix {
    pub fn zeros(n_terms: usize, n_clusters: usize) -> Self {
        TermClusterMatrix {
            n_terms,
            n_clusters,
            values: vec![0.0; n_terms * n_clusters],
        }
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn get(&self, term: usize, cluster: usize) -> f64 {
        self.values[term * self.n_clusters + cluster]
    }

    fn get_mut(&mut self, term: usize, cluster: usize) -> &mut f64 {
        &mut self.values[term * self.n_clusters + cluster]
    }

    /// Scores of one term across clusters.
    pub fn term_row(&self, term: usize) -> &[f64] {
        &self.values[term * self.n_clusters..(term + 1) * self.n_clusters]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustParams {
    pub alpha: f64,
    pub beta: f64,
    pub adjust_test: bool,
}

impl Default for AdjustParams {
    fn default() -> Self {
        AdjustParams {
            alpha: 1.0,
            beta: 1.0,
            adjust_test: true,
        }
    }
}

impl AdjustParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config(MODULE, "alpha and beta must be finite and nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermTopicScores {
    pub desc: TermClusterMatrix,
    pub desc_norm: TermClusterMatrix,
    pub disc: TermClusterMatrix,
}

impl TermTopicScores {
    /// Scores every term of the training matrix against the clusters of
    /// `model`. `relfreq` must hold the same rows under the relative
    /// frequency scheme.
    pub fn compute(matrix: &FeatureMatrix, relfreq: &FeatureMatrix, model: &ClusterModel) -> Result<Self> {
        let desc = descriptor_scores(relfreq, model)?;
        let desc_norm = normalize_desc(&desc);
        let disc = discriminator_scores(matrix, model)?;
        Ok(TermTopicScores { desc, desc_norm, disc })
    }

    pub fn n_clusters(&self) -> usize {
        self.desc.n_clusters()
    }

    /// Writes `term,cluster_id,descriptor,discriminator` for every nonzero
    /// pair, ordered by cluster then descending descriptor (ties by term).
    pub fn write_csv(&self, vocab: &Vocabulary, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "term,cluster_id,descriptor,discriminator")?;
        for c in 0..self.n_clusters() {
            let mut terms: Vec<usize> = (0..self.desc.n_terms())
                .filter(|&t| self.desc.get(t, c) > 0.0 || self.disc.get(t, c) > 0.0)
                .collect();
            terms.sort_by(|&a, &b| {
                self.desc
                    .get(b, c)
                    .total_cmp(&self.desc.get(a, c))
                    .then_with(|| vocab.term(a).cmp(vocab.term(b)))
            });
            for t in terms {
                writeln!(
                    out,
                    "{},{},{},{}",
                    vocab.term(t),
                    c,
                    self.desc.get(t, c),
                    self.disc.get(t, c)
                )?;
            }
        }
        out.flush()
    }
}

fn check_alignment(matrix: &FeatureMatrix, model: &ClusterModel) -> Result<()> {
    if matrix.doc_ids != model.doc_ids {
        return Err(Error::internal(MODULE, "matrix rows do not match the clustered documents"));
    }
    Ok(())
}

/// Mean relative frequency of each term over each cluster's documents.
pub fn descriptor_scores(relfreq: &FeatureMatrix, model: &ClusterModel) -> Result<TermClusterMatrix> {
    if relfreq.scheme != WeightingScheme::RelFreq || relfreq.adjusted {
        return Err(Error::internal(MODULE, "descriptor scores need an unadjusted relfreq matrix"));
    }
    check_alignment(relfreq, model)?;
    let sizes = model.cluster_sizes();
    assert!(sizes.iter().all(|&s| s > 0), "every cluster has at least one member");

    let mut desc = TermClusterMatrix::zeros(relfreq.n_terms, model.n_clusters());
    for (row, &c) in relfreq.rows.iter().zip(&model.assignment) {
        for (t, w) in row.iter() {
            *desc.get_mut(t, c) += w;
        }
    }
    for t in 0..desc.n_terms {
        for (c, &size) in sizes.iter().enumerate() {
            *desc.get_mut(t, c) /= size as f64;
        }
    }
    Ok(desc)
}

/// Fraction of each term's training document frequency inside each cluster.
pub fn discriminator_scores(matrix: &FeatureMatrix, model: &ClusterModel) -> Result<TermClusterMatrix> {
    check_alignment(matrix, model)?;
    let k = model.n_clusters();
    let mut df_in = TermClusterMatrix::zeros(matrix.n_terms, k);
    let mut df = vec![0usize; matrix.n_terms];
    for (row, &c) in matrix.rows.iter().zip(&model.assignment) {
        for (t, _) in row.iter() {
            *df_in.get_mut(t, c) += 1.0;
            df[t] += 1;
        }
    }
    for (t, &total) in df.iter().enumerate() {
        for c in 0..k {
            let v = df_in.get_mut(t, c);
            *v = if total == 0 { 0.0 } else { *v / total as f64 };
        }
    }
    Ok(df_in)
}

/// Divides each cluster column by its maximum; all-zero columns stay zero.
pub fn normalize_desc(desc: &TermClusterMatrix) -> TermClusterMatrix {
    let mut out = desc.clone();
    for c in 0..desc.n_clusters {
        let max = (0..desc.n_terms).map(|t| desc.get(t, c)).fold(0.0, f64::max);
        if max > 0.0 {
            for t in 0..desc.n_terms {
                *out.get_mut(t, c) /= max;
            }
        }
    }
    out
}

/// Cluster of each test row: the most similar centroid over all clusters.
pub fn map_to_clusters(rows: &[SparseVector], model: &ClusterModel) -> Vec<usize> {
    rows.par_iter().map(|v| nearest_cluster(v, model, None)).collect()
}

/// Rescales every stored weight of row `d` by
/// `1 + alpha * desc_norm(t, c) + beta * disc(t, c)` with `c = cluster_of[d]`.
pub fn adjust_matrix(
    matrix: &FeatureMatrix,
    scores: &TermTopicScores,
    params: &AdjustParams,
    cluster_of: &[usize],
) -> Result<FeatureMatrix> {
    params.validate()?;
    if cluster_of.len() != matrix.n_rows() {
        return Err(Error::internal(
            MODULE,
            format!("{} rows but {} cluster mappings", matrix.n_rows(), cluster_of.len()),
        ));
    }
    if let Some(&c) = cluster_of.iter().find(|&&c| c >= scores.n_clusters()) {
        return Err(Error::internal(MODULE, format!("cluster id {c} out of range")));
    }
    let rows = matrix
        .rows
        .par_iter()
        .zip(cluster_of.par_iter())
        .map(|(row, &c)| adjust_vector(row, scores, params, c))
        .collect();
    Ok(FeatureMatrix {
        rows,
        doc_ids: matrix.doc_ids.clone(),
        scheme: matrix.scheme,
        adjusted: true,
        n_terms: matrix.n_terms,
    })
}

/// Applies the adjustment of one cluster to a single vector.
pub fn adjust_vector(v: &SparseVector, scores: &TermTopicScores, params: &AdjustParams, cluster: usize) -> SparseVector {
    v.map_weights(|t, w| w * multiplier(scores, params, t, cluster))
}

fn multiplier(scores: &TermTopicScores, params: &AdjustParams, term: usize, cluster: usize) -> f64 {
    1.0 + params.alpha * scores.desc_norm.get(term, cluster) + params.beta * scores.disc.get(term, cluster)
}
