//! Subtopic discovery with deterministic spherical k-means.
//!
//! Rows are unit-normalized and compared by cosine similarity. Seeding is
//! farthest-first starting from row 0, every tie resolves to the lowest
//! index, so a clustering is a pure function of its inputs.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVector};

const MODULE: &str = "clustering";

/// Whether each label is clustered on its own or all rows together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterScope {
    PerLabel,
    Global,
}

impl fmt::Display for ClusterScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClusterScope::PerLabel => "per_label",
            ClusterScope::Global => "global",
        })
    }
}

impl FromStr for ClusterScope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "per_label" => Ok(ClusterScope::PerLabel),
            "global" => Ok(ClusterScope::Global),
            other => Err(format!("unknown cluster scope {other:?} (expected per_label or global)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterParams {
    pub k_spam: usize,
    pub k_ham: usize,
    pub max_iter: usize,
    pub scope: ClusterScope,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            k_spam: 4,
            k_ham: 4,
            max_iter: 100,
            scope: ClusterScope::PerLabel,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_spam == 0 || self.k_ham == 0 {
            return Err(Error::config(MODULE, "k_spam and k_ham must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::config(MODULE, "max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    u.dot(v) / (nu * nv)
}

fn cosine_dense(u: &SparseVector, u_norm: f64, c: &[f64], c_norm: f64) -> f64 {
    if u_norm == 0.0 || c_norm == 0.0 {
        return 0.0;
    }
    u.dot_dense(c) / (u_norm * c_norm)
}

fn dense_norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster index per row.
    pub assignment: Vec<usize>,
    /// Unit-norm dense centroids (a centroid of only zero rows stays zero).
    pub centroids: Vec<Vec<f64>>,
    /// Cosine of each row to its centroid.
    pub similarity: Vec<f64>,
    /// Sum of `similarity`.
    pub objective: f64,
    /// Objective after each centroid update.
    pub history: Vec<f64>,
}

fn argmax_first(sims: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in sims.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best
}

/// Spherical k-means over unit-normalized rows of dimension `dim`.
///
/// `k` larger than the number of rows is clamped with a warning. Emptied
/// clusters are reseeded with the worst-assigned nonzero row.
pub fn kmeans(rows: &[SparseVector], dim: usize, k: usize, max_iter: usize) -> KMeansResult {
    let n = rows.len();
    assert!(n > 0, "kmeans needs at least one row");
    assert!(k > 0, "kmeans needs k >= 1");
    let k = if k > n {
        warn!("k = {k} exceeds the {n} rows available; clamping to {n}");
        n
    } else {
        k
    };
    let norms: Vec<f64> = rows.iter().map(SparseVector::norm).collect();

    let densify = |row: &SparseVector| {
        let mut c = vec![0.0; dim];
        for (i, w) in row.iter() {
            c[i] = w;
        }
        normalize_dense(&mut c);
        c
    };

    // Farthest-first seeding.
    let mut seeds = vec![0usize];
    let mut max_sim: Vec<f64> = rows.iter().map(|r| cosine(r, &rows[0])).collect();
    let mut chosen = vec![false; n];
    chosen[0] = true;
    while seeds.len() < k {
        let mut next = None::<(usize, f64)>;
        for i in 0..n {
            if chosen[i] {
                continue;
            }
            if next.is_none_or(|(_, s)| max_sim[i] < s) {
                next = Some((i, max_sim[i]));
            }
        }
        let (seed, _) = next.expect("k <= n leaves an unchosen row");
        chosen[seed] = true;
        seeds.push(seed);
        for i in 0..n {
            max_sim[i] = max_sim[i].max(cosine(&rows[i], &rows[seed]));
        }
    }
    let mut centroids: Vec<Vec<f64>> = seeds.iter().map(|&s| densify(&rows[s])).collect();

    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    for _ in 0..max_iter {
        let c_norms: Vec<f64> = centroids.iter().map(|c| dense_norm(c)).collect();
        let next: Vec<usize> = rows
            .par_iter()
            .zip(norms.par_iter())
            .map(|(row, &rn)| {
                argmax_first(
                    centroids
                        .iter()
                        .zip(&c_norms)
                        .map(|(c, &cn)| cosine_dense(row, rn, c, cn)),
                )
                .0
            })
            .collect();
        if next == assignment {
            break;
        }
        assignment = next;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (row, &c) in rows.iter().zip(&assignment) {
            sizes[c] += 1;
            for (i, w) in row.iter() {
                sums[c][i] += w;
            }
        }
        for (c, sum) in sums.iter_mut().enumerate() {
            if sizes[c] > 0 {
                normalize_dense(sum);
                centroids[c] = std::mem::take(sum);
            }
        }

        let empty: Vec<usize> = (0..k).filter(|&c| sizes[c] == 0).collect();
        if !empty.is_empty() {
            let sims = similarities(rows, &norms, &assignment, &centroids);
            let mut order: Vec<usize> = (0..n).collect();
            // Nonzero rows first, then by similarity, then by index.
            order.sort_by(|&a, &b| {
                (norms[a] == 0.0)
                    .cmp(&(norms[b] == 0.0))
                    .then(sims[a].total_cmp(&sims[b]))
                    .then(a.cmp(&b))
            });
            for (c, &row) in empty.iter().zip(&order) {
                centroids[*c] = densify(&rows[row]);
            }
        }

        history.push(similarities(rows, &norms, &assignment, &centroids).iter().sum());
    }

    let similarity = similarities(rows, &norms, &assignment, &centroids);
    let objective = similarity.iter().sum();
    KMeansResult {
        assignment,
        centroids,
        similarity,
        objective,
        history,
    }
}

fn normalize_dense(c: &mut [f64]) {
    let norm = dense_norm(c);
    if norm > 0.0 {
        c.iter_mut().for_each(|x| *x /= norm);
    }
}

fn similarities(
    rows: &[SparseVector],
    norms: &[f64],
    assignment: &[usize],
    centroids: &[Vec<f64>],
) -> Vec<f64> {
    rows.iter()
        .zip(norms)
        .zip(assignment)
        .map(|((row, &rn), &c)| cosine_dense(row, rn, &centroids[c], dense_norm(&centroids[c])))
        .collect()
}

/// Subtopic partition of a training matrix.
///
/// Under [`ClusterScope::PerLabel`] clusters `0..k_spam` hold spam rows and
/// the remaining ones hold ham rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centroids: Vec<Vec<f64>>,
    /// Label owning each cluster; `None` for globally clustered models.
    pub cluster_labels: Vec<Option<Label>>,
    /// Document id of each clustered row, in matrix row order.
    pub doc_ids: Vec<usize>,
    /// Global cluster id per row.
    pub assignment: Vec<usize>,
    pub similarity: Vec<f64>,
    pub objective: f64,
    pub scope: ClusterScope,
}

impl ClusterModel {
    pub fn n_clusters(&self) -> usize {
        self.centroids.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters()];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == cluster)
            .map(|(row, _)| row)
    }

    /// Writes `doc_id,label,cluster_id,similarity` rows.
    pub fn write_csv(&self, labels: &[Label], mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "doc_id,label,cluster_id,similarity")?;
        for (row, &c) in self.assignment.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                self.doc_ids[row], labels[row], c, self.similarity[row]
            )?;
        }
        out.flush()
    }
}

/// Clusters a matrix (rows aligned with `labels`), normalizing a copy of each
/// row first.
pub fn cluster_by_label(
    matrix: &FeatureMatrix,
    labels: &[Label],
    params: &ClusterParams,
) -> Result<ClusterModel> {
    params.validate()?;
    if labels.len() != matrix.n_rows() {
        return Err(Error::internal(MODULE, "labels are not aligned with matrix rows"));
    }
    for label in Label::ALL {
        if !labels.contains(&label) {
            return Err(Error::input(
                MODULE,
                format!("training set has no {label} documents"),
            ));
        }
    }
    let rows = matrix.normalized_rows();
    let dim = matrix.n_terms;
    let n = rows.len();

    let mut model = ClusterModel {
        centroids: Vec::new(),
        cluster_labels: Vec::new(),
        doc_ids: matrix.doc_ids.clone(),
        assignment: vec![0; n],
        similarity: vec![0.0; n],
        objective: 0.0,
        scope: params.scope,
    };

    match params.scope {
        ClusterScope::PerLabel => {
            for (label, k) in [(Label::Spam, params.k_spam), (Label::Ham, params.k_ham)] {
                let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == label).collect();
                let k = if k > idx.len() {
                    warn!("k_{label} = {k} exceeds the {} {label} documents; clamping", idx.len());
                    idx.len()
                } else {
                    k
                };
                let subset: Vec<SparseVector> = idx.iter().map(|&i| rows[i].clone()).collect();
                let result = kmeans(&subset, dim, k, params.max_iter);
                let offset = model.centroids.len();
                for (j, &i) in idx.iter().enumerate() {
                    model.assignment[i] = offset + result.assignment[j];
                    model.similarity[i] = result.similarity[j];
                }
                model.objective += result.objective;
                model.cluster_labels.extend(std::iter::repeat_n(Some(label), result.centroids.len()));
                model.centroids.extend(result.centroids);
            }
        }
        ClusterScope::Global => {
            let result = kmeans(&rows, dim, params.k_spam + params.k_ham, params.max_iter);
            model.cluster_labels = vec![None; result.centroids.len()];
            model.centroids = result.centroids;
            model.assignment = result.assignment;
            model.similarity = result.similarity;
            model.objective = result.objective;
        }
    }
    Ok(model)
}

/// Most similar centroid, optionally restricted to one label's clusters.
/// A scope is ignored for globally clustered models, which have no
/// label-owned clusters.
pub fn nearest_cluster(v: &SparseVector, model: &ClusterModel, label_scope: Option<Label>) -> usize {
    let candidates: Vec<usize> = match label_scope {
        Some(label) if model.scope == ClusterScope::PerLabel => (0..model.n_clusters())
            .filter(|&c| model.cluster_labels[c] == Some(label))
            .collect(),
        _ => (0..model.n_clusters()).collect(),
    };
    let vn = v.norm();
    let (best, _) = argmax_first(candidates.iter().map(|&c| {
        let centroid = &model.centroids[c];
        cosine_dense(v, vn, centroid, dense_norm(centroid))
    }));
    candidates[best]
}
