//! Baseline-driven anomaly detection on top of a trained map.
//!
//! A map trained on normal traffic defines the baseline. Each input's
//! residual is its distance to its best-matching unit; inputs whose residual
//! exceeds a percentile of the calibration residuals are flagged.

use std::fmt;
use std::io::Write;

use crate::dataio::Label;
use crate::error::{Result, SomError};
use crate::scalar::Scalar;
use crate::som::{FeatureVector, SomMap};

pub const VERDICT_CSV_HEADER: &str = "index,bmu,residual,is_anomalous";

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyBaseline<T> {
    map: SomMap<T>,
    threshold: T,
    percentile: f64,
    calibration_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict<T> {
    pub input_index: usize,
    pub bmu: usize,
    pub residual: T,
    pub is_anomalous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSummary {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    /// `TP / (TP + FN)`, or 0 when no input was labelled anomalous.
    pub detection_rate: f64,
    /// `FP / (FP + TN)`, or 0 when no input was labelled normal.
    pub false_positive_rate: f64,
    pub no_anomalous_labels: bool,
    pub no_normal_labels: bool,
}

/// Nearest-rank percentile of unsorted values: the `ceil(p / 100 * N)`-th
/// smallest, 1-based.
pub fn nearest_rank<T: Scalar>(values: &[T], percentile: f64) -> Result<T> {
    check_percentile(percentile)?;
    if values.is_empty() {
        return Err(SomError::Empty("percentile of an empty set".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    let n = sorted.len();
    let rank = ((percentile * n as f64) / 100.0).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

fn check_percentile(p: f64) -> Result<()> {
    if p > 0.0 && p <= 100.0 {
        Ok(())
    } else {
        Err(SomError::domain(format!("percentile must lie in (0, 100], got {p}")))
    }
}

impl<T: Scalar> AnomalyBaseline<T> {
    /// Derives the residual threshold from `normal_data`.
    pub fn calibrate(map: SomMap<T>, normal_data: &[FeatureVector<T>], percentile: f64) -> Result<Self> {
        check_percentile(percentile)?;
        if normal_data.is_empty() {
            return Err(SomError::Empty("calibration set has no vectors".into()));
        }
        let residuals = normal_data
            .iter()
            .map(|x| map.find_bmu(x).map(|b| b.distance))
            .collect::<Result<Vec<_>>>()?;
        let threshold = nearest_rank(&residuals, percentile)?;
        Ok(Self {
            map,
            threshold,
            percentile,
            calibration_size: normal_data.len(),
        })
    }

    /// Baseline with an explicit threshold, bypassing calibration.
    pub fn with_threshold(map: SomMap<T>, threshold: T) -> Result<Self> {
        if !(threshold >= T::zero()) || !threshold.is_finite() {
            return Err(SomError::domain(format!(
                "threshold must be finite and non-negative, got {threshold}"
            )));
        }
        Ok(Self {
            map,
            threshold,
            percentile: 100.0,
            calibration_size: 1,
        })
    }

    pub fn map(&self) -> &SomMap<T> {
        &self.map
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn percentile(&self) -> f64 {
        self.percentile
    }

    pub fn calibration_size(&self) -> usize {
        self.calibration_size
    }

    /// Scores one input. A residual equal to the threshold counts as normal.
    pub fn score(&self, x: &FeatureVector<T>) -> Result<Verdict<T>> {
        self.score_indexed(0, x)
    }

    fn score_indexed(&self, input_index: usize, x: &FeatureVector<T>) -> Result<Verdict<T>> {
        let bmu = self.map.find_bmu(x)?;
        Ok(Verdict {
            input_index,
            bmu: bmu.index,
            residual: bmu.distance,
            is_anomalous: bmu.distance > self.threshold,
        })
    }

    /// Scores every input, numbering verdicts by position.
    pub fn score_all(&self, data: &[FeatureVector<T>]) -> Result<Vec<Verdict<T>>> {
        data.iter()
            .enumerate()
            .map(|(i, x)| self.score_indexed(i, x))
            .collect()
    }

    pub fn evaluate(&self, labeled: &[(FeatureVector<T>, Label)]) -> Result<EvalSummary> {
        if labeled.is_empty() {
            return Err(SomError::Empty("no labelled vectors to evaluate".into()));
        }
        let mut counts = [0usize; 4];
        for (i, (x, label)) in labeled.iter().enumerate() {
            let flagged = self.score_indexed(i, x)?.is_anomalous;
            let slot = match (label, flagged) {
                (Label::Anomalous, true) => 0,
                (Label::Normal, true) => 1,
                (Label::Normal, false) => 2,
                (Label::Anomalous, false) => 3,
            };
            counts[slot] += 1;
        }
        Ok(EvalSummary::from_counts(counts[0], counts[1], counts[2], counts[3]))
    }
}

impl EvalSummary {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self {
            true_positives: tp,
            false_positives: fp,
            true_negatives: tn,
            false_negatives: fn_,
            detection_rate: rate(tp, tp + fn_),
            false_positive_rate: rate(fp, fp + tn),
            no_anomalous_labels: tp + fn_ == 0,
            no_normal_labels: fp + tn == 0,
        }
    }

    /// `TP,FP,TN,FN,detection_rate,false_positive_rate` with rates to four decimals.
    pub fn machine_line(&self) -> String {
        format!(
            "{},{},{},{},{:.4},{:.4}",
            self.true_positives,
            self.false_positives,
            self.true_negatives,
            self.false_negatives,
            self.detection_rate,
            self.false_positive_rate
        )
    }
}

impl fmt::Display for EvalSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "true positives:      {}", self.true_positives)?;
        writeln!(f, "false positives:     {}", self.false_positives)?;
        writeln!(f, "true negatives:      {}", self.true_negatives)?;
        writeln!(f, "false negatives:     {}", self.false_negatives)?;
        write!(f, "detection rate:      {:.4}", self.detection_rate)?;
        if self.no_anomalous_labels {
            write!(f, " (undefined: no anomalous labels)")?;
        }
        writeln!(f)?;
        write!(f, "false positive rate: {:.4}", self.false_positive_rate)?;
        if self.no_normal_labels {
            write!(f, " (undefined: no normal labels)")?;
        }
        Ok(())
    }
}

/// Writes verdicts as CSV under [`VERDICT_CSV_HEADER`], in the given order.
pub fn write_verdicts_csv<T: Scalar, W: Write>(mut w: W, verdicts: &[Verdict<T>]) -> Result<()> {
    writeln!(w, "{VERDICT_CSV_HEADER}")?;
    for v in verdicts {
        writeln!(w, "{},{},{},{}", v.input_index, v.bmu, v.residual, v.is_anomalous)?;
    }
    w.flush()?;
    Ok(())
}
