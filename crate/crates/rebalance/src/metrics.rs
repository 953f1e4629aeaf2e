//! Skew-insensitive evaluation metrics over a multi-class confusion matrix.
//!
//! All four aggregate metrics live in `[0, 1]` and weight every class
//! equally, so a classifier that ignores a rare class is penalized no
//! matter how small the class is. Any per-class term with a zero
//! denominator contributes 0.

use crate::error::{Error, Result};

/// Row-major `C x C` count matrix; `count(i, j)` is the number of rows
/// with true class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    n_classes: usize,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![0; n_classes * n_classes],
            n_classes,
        }
    }

    /// Builds the matrix from parallel label vectors; the class count is
    /// inferred as `max label + 1`.
    pub fn from_labels(truth: &[u32], predicted: &[u32]) -> Result<Self> {
        let c = truth
            .iter()
            .chain(predicted)
            .copied()
            .max()
            .map(|m| m as usize + 1)
            .unwrap_or(0);
        Self::with_classes(truth, predicted, c)
    }

    /// Builds the matrix over an explicit class space.
    pub fn with_classes(truth: &[u32], predicted: &[u32], n_classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} true labels vs {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut cm = Self::new(n_classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            if t as usize >= n_classes || p as usize >= n_classes {
                return Err(Error::UnknownLabel(t.max(p)));
            }
            cm.add(t, p);
        }
        Ok(cm)
    }

    pub fn add(&mut self, truth: u32, predicted: u32) {
        self.counts[truth as usize * self.n_classes + predicted as usize] += 1;
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.n_classes + predicted]
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        (0..self.n_classes).map(|j| self.count(truth, j)).sum()
    }

    pub fn col_sum(&self, predicted: usize) -> u64 {
        (0..self.n_classes).map(|i| self.count(i, predicted)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// One-vs-rest statistics for a single class.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub accuracy: f64,
}

/// The four aggregate metrics plus the per-class breakdown they average.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricReport {
    /// Mean one-vs-rest binary accuracy.
    pub av_acc: f64,
    /// Geometric mean of the per-class recalls.
    pub m_avg: f64,
    /// Mean per-class F-beta.
    pub av_f: f64,
    /// Mean of `count(i, i) / max(row_sum(i), col_sum(i))`.
    pub cba: f64,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Computes all metrics from a confusion matrix. `beta` weights recall
/// against precision in the F term.
pub fn evaluate(cm: &ConfusionMatrix, beta: f64) -> MetricReport {
    let c = cm.n_classes();
    let total = cm.total() as f64;
    let mut per_class = Vec::with_capacity(c);
    let mut recall_product = 1.0;
    let mut cba_sum = 0.0;
    for i in 0..c {
        let tp = cm.count(i, i) as f64;
        let row = cm.row_sum(i) as f64;
        let col = cm.col_sum(i) as f64;
        let tn = total - row - col + tp;
        let precision = ratio(tp, col);
        let recall = ratio(tp, row);
        let b2 = beta * beta;
        let f_beta = ratio((1.0 + b2) * precision * recall, b2 * precision + recall);
        let accuracy = ratio(tp + tn, total);
        recall_product *= recall;
        cba_sum += ratio(tp, row.max(col));
        per_class.push(ClassMetrics {
            precision,
            recall,
            f_beta,
            accuracy,
        });
    }
    let c_f = c as f64;
    MetricReport {
        av_acc: per_class.iter().map(|m| m.accuracy).sum::<f64>() / c_f,
        m_avg: recall_product.powf(1.0 / c_f),
        av_f: per_class.iter().map(|m| m.f_beta).sum::<f64>() / c_f,
        cba: cba_sum / c_f,
        per_class,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn matrix(rows: &[&[u64]]) -> ConfusionMatrix {
        let c = rows.len();
        let mut cm = ConfusionMatrix::new(c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                for _ in 0..v {
                    cm.add(i as u32, j as u32);
                }
            }
        }
        cm
    }

    #[test]
    fn from_labels_counts_identity() {
        let cm = ConfusionMatrix::from_labels(&[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!(cm.count(0, 0), 1);
        assert_eq!(cm.count(1, 1), 2);
        assert_eq!(cm.count(0, 1), 0);
    }

    #[test]
    fn from_labels_counts_misclassification() {
        let cm = ConfusionMatrix::from_labels(&[0, 0], &[1, 1]).unwrap();
        assert_eq!(cm.count(0, 1), 2);
        assert_eq!(cm.count(0, 0), 0);
        assert_eq!(cm.count(1, 0), 0);
        assert_eq!(cm.count(1, 1), 0);
    }

    #[test]
    fn marginals_match_label_counts() {
        let mut s = RandomStream::new(8, 21);
        let n = 1000;
        let truth: Vec<u32> = (0..n).map(|_| s.below(4) as u32).collect();
        let predicted: Vec<u32> = (0..n).map(|_| s.below(4) as u32).collect();
        let cm = ConfusionMatrix::with_classes(&truth, &predicted, 4).unwrap();
        assert_eq!(cm.total(), n as u64);
        for class in 0..4u32 {
            let t = truth.iter().filter(|&&x| x == class).count() as u64;
            let p = predicted.iter().filter(|&&x| x == class).count() as u64;
            assert_eq!(cm.row_sum(class as usize), t);
            assert_eq!(cm.col_sum(class as usize), p);
        }
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(ConfusionMatrix::from_labels(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn perfect_prediction_scores_one_everywhere() {
        let report = evaluate(&matrix(&[&[5, 0], &[0, 5]]), 1.0);
        assert_eq!(report.av_acc, 1.0);
        assert_eq!(report.m_avg, 1.0);
        assert_eq!(report.av_f, 1.0);
        assert_eq!(report.cba, 1.0);
    }

    #[test]
    fn binary_fixture_matches_hand_computation() {
        let report = evaluate(&matrix(&[&[3, 1], &[2, 4]]), 1.0);
        assert!((report.av_acc - 0.70000).abs() <= 1e-5, "av_acc {}", report.av_acc);
        assert!((report.m_avg - 0.70711).abs() <= 1e-5, "m_avg {}", report.m_avg);
        assert!((report.av_f - 0.69697).abs() <= 1e-5, "av_f {}", report.av_f);
        assert!((report.cba - 0.63333).abs() <= 1e-5, "cba {}", report.cba);
    }

    #[test]
    fn missed_class_zeroes_the_geometric_mean() {
        let report = evaluate(&matrix(&[&[0, 3], &[0, 7]]), 1.0);
        assert_eq!(report.m_avg, 0.0);
        assert!(report.av_acc > 0.0);
    }

    #[test]
    fn empty_class_space_is_harmless() {
        let cm = ConfusionMatrix::from_labels(&[], &[]).unwrap();
        assert_eq!(cm.n_classes(), 0);
    }

    fn arbitrary_matrix() -> impl Strategy<Value = ConfusionMatrix> {
        (2usize..5).prop_flat_map(|c| {
            prop::collection::vec(0u64..30, c * c).prop_map(move |counts| ConfusionMatrix {
                counts,
                n_classes: c,
            })
        })
    }

    proptest! {
        #[test]
        fn metrics_stay_in_the_unit_interval(cm in arbitrary_matrix(), beta in 0.5f64..2.0) {
            let r = evaluate(&cm, beta);
            for v in [r.av_acc, r.m_avg, r.av_f, r.cba] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{v}");
            }
        }

        #[test]
        fn geometric_mean_never_exceeds_arithmetic(cm in arbitrary_matrix()) {
            let r = evaluate(&cm, 1.0);
            let mean_recall: f64 =
                r.per_class.iter().map(|m| m.recall).sum::<f64>() / r.per_class.len() as f64;
            prop_assert!(r.m_avg <= mean_recall + 1e-12);
        }

        #[test]
        fn class_permutation_leaves_metrics_unchanged(cm in arbitrary_matrix()) {
            let c = cm.n_classes();
            // Rotate the class ids by one.
            let mut rotated = ConfusionMatrix::new(c);
            for i in 0..c {
                for j in 0..c {
                    for _ in 0..cm.count(i, j) {
                        rotated.add(((i + 1) % c) as u32, ((j + 1) % c) as u32);
                    }
                }
            }
            let a = evaluate(&cm, 1.0);
            let b = evaluate(&rotated, 1.0);
            prop_assert!((a.av_acc - b.av_acc).abs() <= 1e-12);
            prop_assert!((a.m_avg - b.m_avg).abs() <= 1e-12);
            prop_assert!((a.av_f - b.av_f).abs() <= 1e-12);
            prop_assert!((a.cba - b.cba).abs() <= 1e-12);
        }

        #[test]
        fn scaling_every_count_leaves_metrics_unchanged(cm in arbitrary_matrix(), scale in 2u64..6) {
            let scaled = ConfusionMatrix {
                counts: cm.counts.iter().map(|&v| v * scale).collect(),
                n_classes: cm.n_classes(),
            };
            let a = evaluate(&cm, 1.0);
            let b = evaluate(&scaled, 1.0);
            prop_assert!((a.av_acc - b.av_acc).abs() <= 1e-12);
            prop_assert!((a.m_avg - b.m_avg).abs() <= 1e-12);
            prop_assert!((a.av_f - b.av_f).abs() <= 1e-12);
            prop_assert!((a.cba - b.cba).abs() <= 1e-12);
        }
    }
}
