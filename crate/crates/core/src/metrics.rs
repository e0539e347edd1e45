//! Binary-classification metrics: confusion counts, accuracy, precision,
//! recall, F1, ROC AUC and log loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROBA_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 0 when there are no actual positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// 0 when precision and recall are both 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn check_lengths(labels: &[f64], other: &[f64]) -> Result<()> {
    if labels.len() != other.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: other.len(),
        });
    }
    if let Some(i) = labels.iter().position(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::validation(
            "labels",
            format!("entry {i} is {}, expected 0 or 1", labels[i]),
        ));
    }
    Ok(())
}

/// Counts with the rule "predict positive iff `proba >= threshold`".
pub fn confusion(labels: &[f64], probas: &[f64], threshold: f64) -> Result<Confusion> {
    check_lengths(labels, probas)?;
    let mut c = Confusion::default();
    for (&y, &p) in labels.iter().zip(probas) {
        match (y == 1.0, p >= threshold) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Area under the ROC curve as the Mann-Whitney statistic
/// `P(s_pos > s_neg) + P(s_pos == s_neg) / 2`, from mid-ranks of the sorted
/// scores.
pub fn roc_auc(labels: &[f64], scores: &[f64]) -> Result<f64> {
    check_lengths(labels, scores)?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::validation("scores", "NaN score"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1.0).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based mid-ranks over the positives.
    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        let pos_in_group = order[start..end]
            .iter()
            .filter(|&&i| labels[i] == 1.0)
            .count();
        pos_rank_sum += mid_rank * pos_in_group as f64;
        start = end;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    Ok((pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// Mean binary cross-entropy with probabilities clamped to
/// `[1e-15, 1 - 1e-15]`.
pub fn log_loss(labels: &[f64], probas: &[f64]) -> Result<f64> {
    check_lengths(labels, probas)?;
    if labels.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = labels
        .iter()
        .zip(probas)
        .map(|(&y, &p)| {
            let p = p.clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / labels.len() as f64)
}

/// The full evaluation suite at one threshold.
///
/// Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub roc_auc: f64,
    pub log_loss: f64,
    pub threshold: f64,
    pub confusion: Confusion,
}

impl EvalReport {
    pub fn compute(labels: &[f64], probas: &[f64], threshold: f64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("nothing to evaluate"));
        }
        if probas.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::validation("probas", "outside [0, 1]"));
        }
        let confusion = confusion(labels, probas, threshold)?;
        Ok(Self {
            accuracy: confusion.accuracy(),
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
            roc_auc: roc_auc(labels, probas)?,
            log_loss: log_loss(labels, probas)?,
            threshold,
            confusion,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Human-readable summary, one metric per line.
    pub fn render_text(&self) -> String {
        format!(
            "Accuracy: {:.4}\nPrecision: {:.4}\nRecall: {:.4}\nF1 Score: {:.4}\n\
             ROC AUC Score: {:.4}\nLog Loss: {:.4}\n",
            self.accuracy, self.precision, self.recall, self.f1, self.roc_auc, self.log_loss
        )
    }
}
