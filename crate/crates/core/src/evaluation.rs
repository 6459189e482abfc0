//! Classification metrics and stratified cross-validation.
//!
//! Spam is the positive class throughout. Point metrics use 0 for any 0/0
//! ratio; curve metrics report [`Error::UndefinedMetric`] when a class they
//! need is missing.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::ScoredPrediction;
use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};
use crate::pipeline::{self, PipelineConfig, TrainedPipeline};

const MODULE: &str = "evaluation";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, actual: Label, predicted: Label) {
        match (actual, predicted) {
            (Label::Spam, Label::Spam) => self.tp += 1,
            (Label::Spam, Label::Ham) => self.fn_ += 1,
            (Label::Ham, Label::Spam) => self.fp += 1,
            (Label::Ham, Label::Ham) => self.tn += 1,
        }
    }
}

pub fn confusion(predictions: &[ScoredPrediction]) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for p in predictions {
        let actual = p.actual.ok_or_else(|| {
            Error::input(MODULE, format!("prediction for document {} has no actual label", p.doc_id))
        })?;
        cm.add(actual, p.predicted);
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    pub fbeta: f64,
    /// Cost of one false positive relative to one false negative.
    pub fp_cost: f64,
    pub folds: usize,
    pub shuffle_seed: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            fbeta: 1.0,
            fp_cost: 9.0,
            folds: 10,
            shuffle_seed: 42,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fbeta > 0.0 && self.fbeta.is_finite()) {
            return Err(Error::config(MODULE, "fbeta must be positive"));
        }
        if !(self.fp_cost > 0.0 && self.fp_cost.is_finite()) {
            return Err(Error::config(MODULE, "fp_cost must be positive"));
        }
        if self.folds < 2 {
            return Err(Error::config(MODULE, "folds must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub g_mean: f64,
    pub cost_weighted_error: f64,
}

impl PointMetrics {
    pub const NAMES: [&'static str; 5] = ["precision", "recall", "f_score", "g_mean", "cost_weighted_error"];

    pub fn values(&self) -> [f64; 5] {
        [self.precision, self.recall, self.f_score, self.g_mean, self.cost_weighted_error]
    }

    fn from_values(v: [f64; 5]) -> Self {
        PointMetrics {
            precision: v[0],
            recall: v[1],
            f_score: v[2],
            g_mean: v[3],
            cost_weighted_error: v[4],
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn point_metrics(cm: &ConfusionMatrix, params: &EvalParams) -> PointMetrics {
    let (tp, fp, tn, fn_) = (cm.tp as f64, cm.fp as f64, cm.tn as f64, cm.fn_ as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let b2 = params.fbeta * params.fbeta;
    let f_score = ratio((1.0 + b2) * precision * recall, b2 * precision + recall);
    let tnr = ratio(tn, tn + fp);
    let g_mean = (recall * tnr).sqrt();
    let lambda = params.fp_cost;
    let cost_weighted_error = ratio(lambda * fp + fn_, lambda * (fp + tn) + (fn_ + tp));
    PointMetrics {
        precision,
        recall,
        f_score,
        g_mean,
        cost_weighted_error,
    }
}

/// Groups of tied scores in descending order, as (spam, ham) counts.
fn descending_groups(scores: &[f64], labels: &[Label]) -> Vec<(usize, usize)> {
    assert_eq!(scores.len(), labels.len(), "one label per score");
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut prev: Option<f64> = None;
    for i in order {
        if prev != Some(scores[i]) {
            groups.push((0, 0));
            prev = Some(scores[i]);
        }
        let g = groups.last_mut().expect("group pushed");
        match labels[i] {
            Label::Spam => g.0 += 1,
            Label::Ham => g.1 += 1,
        }
    }
    groups
}

fn class_counts(labels: &[Label]) -> (usize, usize) {
    let spam = labels.iter().filter(|l| l.is_spam()).count();
    (spam, labels.len() - spam)
}

/// Pairwise ROC AUC (ties count one half) and the ROC curve from `(0, 0)` to
/// `(1, 1)` as `(fpr, tpr)` points, one per distinct score.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<(f64, Vec<(f64, f64)>)> {
    let (n_spam, n_ham) = class_counts(labels);
    if n_spam == 0 || n_ham == 0 {
        return Err(Error::UndefinedMetric {
            metric: "roc_auc",
            reason: "needs at least one spam and one ham instance",
        });
    }
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    // Twice the number of correctly ordered pairs, kept integral.
    let mut twice_pairs: u128 = 0;
    for (gs, gh) in descending_groups(scores, labels) {
        let below = (n_ham - fp - gh) as u128;
        twice_pairs += 2 * gs as u128 * below + (gs * gh) as u128;
        tp += gs;
        fp += gh;
        points.push((fp as f64 / n_ham as f64, tp as f64 / n_spam as f64));
    }
    let auc = twice_pairs as f64 / (2.0 * n_spam as f64 * n_ham as f64);
    Ok((auc, points))
}

/// Average precision and the `(recall, precision)` points of each distinct
/// score threshold, thresholds descending.
pub fn pr_auc(scores: &[f64], labels: &[Label]) -> Result<(f64, Vec<(f64, f64)>)> {
    let (n_spam, _) = class_counts(labels);
    if n_spam == 0 {
        return Err(Error::UndefinedMetric {
            metric: "pr_auc",
            reason: "needs at least one spam instance",
        });
    }
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    for (gs, gh) in descending_groups(scores, labels) {
        tp += gs;
        fp += gh;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += precision * gs as f64;
        points.push((tp as f64 / n_spam as f64, precision));
    }
    Ok(((ap / n_spam as f64).min(1.0), points))
}

/// Two-sample Kolmogorov-Smirnov statistic between the spam and ham score
/// distributions: the largest gap between their empirical CDFs.
pub fn ks_statistic(scores: &[f64], labels: &[Label]) -> Result<f64> {
    let (n_spam, n_ham) = class_counts(labels);
    if n_spam == 0 || n_ham == 0 {
        return Err(Error::UndefinedMetric {
            metric: "ks",
            reason: "needs at least one spam and one ham instance",
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut below_spam, mut below_ham) = (0usize, 0usize);
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            match labels[order[i]] {
                Label::Spam => below_spam += 1,
                Label::Ham => below_ham += 1,
            }
            i += 1;
        }
        let gap = (below_spam as f64 / n_spam as f64 - below_ham as f64 / n_ham as f64).abs();
        ks = ks.max(gap);
    }
    Ok(ks)
}

/// Fold index of every document. Per label, ids are shuffled with ChaCha8
/// seeded by `seed` (spam first, then ham, from one stream) and dealt
/// round-robin.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::config(MODULE, "folds must be at least 2"));
    }
    let (n_spam, n_ham) = class_counts(labels);
    if n_spam < folds || n_ham < folds {
        return Err(Error::input(
            MODULE,
            format!("cannot stratify {folds} folds: {n_spam} spam and {n_ham} ham documents (each label needs at least {folds})"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for label in Label::ALL {
        let mut ids: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        ids.shuffle(&mut rng);
        for (pos, id) in ids.into_iter().enumerate() {
            assignment[id] = pos % folds;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub test_ids: Vec<usize>,
    pub confusion: ConfusionMatrix,
    pub metrics: PointMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_docs: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: PointMetrics,
    pub roc_auc: f64,
    pub pr_auc: f64,
    pub ks: f64,
    pub roc_points: Vec<(f64, f64)>,
    pub pr_points: Vec<(f64, f64)>,
    pub folds: Vec<FoldResult>,
    pub fold_mean: PointMetrics,
    pub fold_std: PointMetrics,
}

impl EvalReport {
    /// Builds a report from pooled predictions and per-fold results.
    pub fn from_predictions(
        predictions: &[ScoredPrediction],
        folds: Vec<FoldResult>,
        params: &EvalParams,
    ) -> Result<EvalReport> {
        let cm = confusion(predictions)?;
        let scores: Vec<f64> = predictions.iter().map(|p| p.score).collect();
        let labels: Vec<Label> = predictions.iter().map(|p| p.actual.expect("checked by confusion")).collect();
        let (roc, roc_points) = roc_auc(&scores, &labels)?;
        let (ap, pr_points) = pr_auc(&scores, &labels)?;
        let ks = ks_statistic(&scores, &labels)?;

        let k = folds.len() as f64;
        let mut mean = [0.0; 5];
        for f in &folds {
            for (m, v) in mean.iter_mut().zip(f.metrics.values()) {
                *m += v / k;
            }
        }
        let mut var = [0.0; 5];
        if folds.len() > 1 {
            for f in &folds {
                for ((s, v), m) in var.iter_mut().zip(f.metrics.values()).zip(mean) {
                    *s += (v - m) * (v - m) / (k - 1.0);
                }
            }
        }

        Ok(EvalReport {
            n_docs: predictions.len(),
            confusion: cm,
            metrics: point_metrics(&cm, params),
            roc_auc: roc,
            pr_auc: ap,
            ks,
            roc_points,
            pr_points,
            folds,
            fold_mean: PointMetrics::from_values(mean),
            fold_std: PointMetrics::from_values(var.map(f64::sqrt)),
        })
    }

    /// Every pooled scalar metric by name.
    pub fn scalars(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = PointMetrics::NAMES.into_iter().zip(self.metrics.values()).collect();
        out.extend([("roc_auc", self.roc_auc), ("pr_auc", self.pr_auc), ("ks", self.ks)]);
        out
    }

    /// Writes the structured-text report: `key = value` scalars followed by
    /// a whitespace-separated fold table.
    pub fn write_text(&self, mut out: impl Write) -> std::io::Result<()> {
        let cm = &self.confusion;
        writeln!(out, "# evaluation report")?;
        writeln!(out, "documents = {}", self.n_docs)?;
        writeln!(out, "folds = {}", self.folds.len())?;
        writeln!(out, "tp = {}", cm.tp)?;
        writeln!(out, "fp = {}", cm.fp)?;
        writeln!(out, "tn = {}", cm.tn)?;
        writeln!(out, "fn = {}", cm.fn_)?;
        for (name, value) in self.scalars() {
            writeln!(out, "{name} = {value}")?;
        }
        writeln!(out, "roc_points = roc_points.csv")?;
        writeln!(out, "pr_points = pr_points.csv")?;
        writeln!(out)?;
        writeln!(out, "[folds]")?;
        writeln!(out, "fold n_test tp fp tn fn {}", PointMetrics::NAMES.join(" "))?;
        let fmt = |m: &PointMetrics| m.values().map(|v| format!("{v:.6}")).join(" ");
        for f in &self.folds {
            let c = &f.confusion;
            writeln!(out, "{} {} {} {} {} {} {}", f.fold, f.test_ids.len(), c.tp, c.fp, c.tn, c.fn_, fmt(&f.metrics))?;
        }
        writeln!(out, "mean - - - - - {}", fmt(&self.fold_mean))?;
        writeln!(out, "std - - - - - {}", fmt(&self.fold_std))?;
        out.flush()
    }

    pub fn write_roc_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "fpr,tpr")?;
        for (x, y) in &self.roc_points {
            writeln!(out, "{x},{y}")?;
        }
        out.flush()
    }

    pub fn write_pr_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "recall,precision")?;
        for (x, y) in &self.pr_points {
            writeln!(out, "{x},{y}")?;
        }
        out.flush()
    }
}

/// Everything a cross-validation run produced.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub report: EvalReport,
    /// Held-out predictions of all folds, ordered by document id.
    pub predictions: Vec<ScoredPrediction>,
    /// Fold index of every document.
    pub fold_of: Vec<usize>,
    /// The pipeline fitted for each fold.
    pub fits: Vec<TrainedPipeline>,
}

/// Stratified k-fold cross-validation of the whole pipeline. Every stage is
/// fitted on the training folds only; curve metrics are computed on the
/// pooled held-out predictions.
pub fn cross_validate(corpus: &Corpus, config: &PipelineConfig) -> Result<CvOutcome> {
    let tokens = pipeline::tokenize_corpus(corpus, &config.tokenizer);
    cross_validate_tokens(&tokens, &corpus.labels(), config)
}

pub fn cross_validate_tokens(tokens: &[Vec<String>], labels: &[Label], config: &PipelineConfig) -> Result<CvOutcome> {
    let params = &config.eval;
    params.validate()?;
    let fold_of = stratified_folds(labels, params.folds, params.shuffle_seed)?;

    let runs: Vec<(TrainedPipeline, Vec<ScoredPrediction>)> = (0..params.folds)
        .into_par_iter()
        .map(|fold| {
            let (train, test): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| fold_of[i] != fold);
            let train_tokens: Vec<Vec<String>> = train.iter().map(|&i| tokens[i].clone()).collect();
            let train_labels: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
            let fit = pipeline::fit(&train_tokens, &train, &train_labels, config)?;
            let preds = test
                .iter()
                .map(|&i| fit.predict(&tokens[i], i, Some(labels[i])))
                .collect();
            Ok((fit, preds))
        })
        .collect::<Result<_>>()?;

    let mut fits = Vec::with_capacity(runs.len());
    let mut folds = Vec::with_capacity(runs.len());
    let mut predictions = Vec::with_capacity(labels.len());
    for (fold, (fit, preds)) in runs.into_iter().enumerate() {
        let cm = confusion(&preds)?;
        folds.push(FoldResult {
            fold,
            test_ids: preds.iter().map(|p| p.doc_id).collect(),
            confusion: cm,
            metrics: point_metrics(&cm, params),
        });
        predictions.extend(preds);
        fits.push(fit);
    }
    predictions.sort_by_key(|p| p.doc_id);

    let report = EvalReport::from_predictions(&predictions, folds, params)?;
    Ok(CvOutcome {
        report,
        predictions,
        fold_of,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: Label = Label::Spam;
    const H: Label = Label::Ham;

    fn pred(actual: Label, predicted: Label) -> ScoredPrediction {
        ScoredPrediction { doc_id: 0, score: 0.0, predicted, actual: Some(actual) }
    }

    #[test]
    fn confusion_examples() {
        let preds: Vec<_> = [(S, S), (S, H), (H, S), (H, H)].iter().map(|&(a, p)| pred(a, p)).collect();
        assert_eq!(confusion(&preds).unwrap(), ConfusionMatrix { tp: 1, fn_: 1, fp: 1, tn: 1 });
        let perfect: Vec<_> = [(S, S), (H, H)].iter().map(|&(a, p)| pred(a, p)).collect();
        let cm = confusion(&perfect).unwrap();
        assert_eq!((cm.fp, cm.fn_), (0, 0));
        assert_eq!(confusion(&[]).unwrap(), ConfusionMatrix::default());
        let mut missing = pred(S, S);
        missing.actual = None;
        assert!(confusion(&[missing]).is_err());
    }

    #[test]
    fn point_metric_examples() {
        let p = EvalParams::default();
        let m = point_metrics(&ConfusionMatrix { tp: 8, fp: 2, tn: 0, fn_: 0 }, &p);
        assert_close!(m.precision, 0.8, 1e-15);
        let m = point_metrics(&ConfusionMatrix { tp: 9, fn_: 1, tn: 5, fp: 5 }, &p);
        assert_close!(m.g_mean, (0.9f64 * 0.5).sqrt(), 1e-12);
        assert_close!(m.g_mean, 0.67082, 1e-5);
        // (9*5 + 1) / (9*10 + 10)
        assert_close!(m.cost_weighted_error, 46.0 / 100.0, 1e-12);
        let zero = point_metrics(&ConfusionMatrix::default(), &p);
        assert_eq!(zero.values(), [0.0; 5]);
    }

    #[test]
    fn fbeta_weighting() {
        let cm = ConfusionMatrix { tp: 6, fp: 2, tn: 10, fn_: 4 };
        let (pr, rc) = (0.75, 0.6);
        let f2 = point_metrics(&cm, &EvalParams { fbeta: 2.0, ..EvalParams::default() }).f_score;
        assert_close!(f2, 5.0 * pr * rc / (4.0 * pr + rc), 1e-12);
        let f1 = point_metrics(&cm, &EvalParams::default()).f_score;
        assert_close!(f1, 2.0 * pr * rc / (pr + rc), 1e-12);
    }

    #[test]
    fn roc_examples() {
        let (auc, pts) = roc_auc(&[0.9, 0.8, 0.3, 0.2], &[S, S, H, H]).unwrap();
        assert_eq!(auc, 1.0);
        assert_eq!(pts.first(), Some(&(0.0, 0.0)));
        assert_eq!(pts.last(), Some(&(1.0, 1.0)));
        let (auc, _) = roc_auc(&[0.9, 0.3, 0.8, 0.2], &[S, S, H, H]).unwrap();
        assert_eq!(auc, 0.75);
        let (auc, _) = roc_auc(&[0.5, 0.5], &[S, H]).unwrap();
        assert_eq!(auc, 0.5);
        assert!(matches!(roc_auc(&[0.1], &[S]), Err(Error::UndefinedMetric { .. })));
    }

    #[test]
    fn pr_examples() {
        let (ap, _) = pr_auc(&[0.9, 0.8, 0.3, 0.2], &[S, S, H, H]).unwrap();
        assert_eq!(ap, 1.0);
        let (ap, pts) = pr_auc(&[0.9, 0.3, 0.8, 0.2], &[S, S, H, H]).unwrap();
        assert_close!(ap, 5.0 / 6.0, 1e-12);
        assert_eq!(pts[0], (0.5, 1.0));
        let (ap, _) = pr_auc(&[1.0; 5], &[S, H, H, H, H]).unwrap();
        assert_close!(ap, 0.2, 1e-15);
        assert!(pr_auc(&[0.1, 0.2], &[H, H]).is_err());
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[0.9, 0.8, 0.2, 0.1], &[S, S, H, H]).unwrap(), 1.0);
        assert_eq!(ks_statistic(&[0.9, 0.2, 0.8, 0.1], &[S, S, H, H]).unwrap(), 0.5);
        assert_eq!(ks_statistic(&[0.3, 0.7, 0.3, 0.7], &[S, S, H, H]).unwrap(), 0.0);
        assert!(ks_statistic(&[0.3], &[H]).is_err());
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<Label> = (0..10).map(|i| if i < 5 { S } else { H }).collect();
        let f = stratified_folds(&labels, 5, 7).unwrap();
        for fold in 0..5 {
            let spam = (0..10).filter(|&i| f[i] == fold && labels[i] == S).count();
            let ham = (0..10).filter(|&i| f[i] == fold && labels[i] == H).count();
            assert_eq!((spam, ham), (1, 1));
        }
    }

    #[test]
    fn folds_round_robin_sizes() {
        let labels = [S, S, S, H, H];
        let f = stratified_folds(&labels, 2, 1).unwrap();
        let mut spam_sizes = [0, 0];
        for i in 0..3 {
            spam_sizes[f[i]] += 1;
        }
        assert_eq!(spam_sizes, [2, 1]);
    }

    #[test]
    fn folds_reject_impossible_stratification() {
        let err = stratified_folds(&[S, H, H], 2, 1).unwrap_err();
        assert!(err.to_string().contains("1 spam and 2 ham"), "{err}");
        assert!(stratified_folds(&[S, H], 1, 1).is_err());
    }
}
