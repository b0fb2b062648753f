use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FeatureVector, SomMap, TrainingSchedule};
use crate::error::{Result, SomError};
use crate::scalar::Scalar;

/// RNG stream used for stimulus selection, distinct from initialisation.
const STIMULUS_STREAM: u64 = 1;

/// Cutoff radius, in neighbourhood widths, used by [`KernelCutoff::standard`].
///
/// At 8 widths the skipped kernel weight is below `exp(-32)`, small enough
/// that final quantisation error moves by less than 1e-9. A 4-width cutoff
/// moves it by around 1e-4.
pub const DEFAULT_CUTOFF_SIGMAS: f64 = 8.0;

/// Skips nodes far from the winner during adaptation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelCutoff<T> {
    /// Every node is updated on every step.
    None,
    /// Nodes further than this many widths from the winner are skipped.
    Sigmas(T),
}

impl<T: Scalar> KernelCutoff<T> {
    pub fn standard() -> Self {
        KernelCutoff::Sigmas(T::from_f64_lossy(DEFAULT_CUTOFF_SIGMAS))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions<T> {
    /// Quantisation error is sampled every this many steps. Zero samples
    /// only the start and the end.
    pub qe_sample_every: u64,
    /// Stop once a sampled quantisation error falls below this value.
    pub early_stop_qe: Option<T>,
    pub cutoff: KernelCutoff<T>,
    /// Seed for stimulus selection; the map's own seed when `None`.
    pub seed: Option<u64>,
}

impl<T> Default for TrainOptions<T> {
    fn default() -> Self {
        Self {
            qe_sample_every: 1000,
            early_stop_qe: None,
            cutoff: KernelCutoff::None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport<T> {
    pub steps: u64,
    pub initial_qe: T,
    pub final_qe: T,
    /// `(steps completed, quantisation error)` samples, starting at step 0.
    pub qe_history: Vec<(u64, T)>,
    pub stopped_early: bool,
}

/// Draws one training vector uniformly, with replacement.
pub fn select_stimulus<'a, T, R: Rng + ?Sized>(
    training_set: &'a [FeatureVector<T>],
    rng: &mut R,
) -> Result<&'a FeatureVector<T>> {
    if training_set.is_empty() {
        return Err(SomError::Empty("training set has no vectors".into()));
    }
    Ok(&training_set[rng.random_range(0..training_set.len())])
}

/// Runs the incremental Kohonen loop: select a stimulus, find its winner,
/// adapt the map, `schedule.total_steps()` times or until early stop.
pub fn train<T: Scalar>(
    map: &mut SomMap<T>,
    training_set: &[FeatureVector<T>],
    schedule: &TrainingSchedule<T>,
    options: &TrainOptions<T>,
) -> Result<TrainingReport<T>> {
    if training_set.is_empty() {
        return Err(SomError::Empty("training set has no vectors".into()));
    }
    for x in training_set {
        map.check_dim(x.dim())?;
    }
    let cutoff = match options.cutoff {
        KernelCutoff::None => None,
        KernelCutoff::Sigmas(k) if k > T::zero() => Some(k),
        KernelCutoff::Sigmas(k) => {
            return Err(SomError::domain(format!("kernel cutoff must be positive, got {k}")))
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.unwrap_or(map.seed()));
    rng.set_stream(STIMULUS_STREAM);

    let initial_qe = map.quantization_error_unchecked(training_set);
    let mut qe_history = vec![(0, initial_qe)];
    let mut last_qe = initial_qe;
    let mut steps = 0;
    let mut stopped_early = false;

    if let Some(threshold) = options.early_stop_qe {
        if initial_qe < threshold {
            stopped_early = true;
        }
    }

    while !stopped_early && steps < schedule.total_steps() {
        let (alpha, sigma) = schedule.at_unchecked(steps);
        let x = select_stimulus(training_set, &mut rng)?.as_slice();
        let winner = map.bmu_unchecked(x).index;
        let radius_sq = cutoff.map(|k| {
            let r = k * sigma;
            r * r
        });
        map.adapt_unchecked(x, winner, alpha, sigma, radius_sq);
        steps += 1;

        if options.qe_sample_every > 0 && steps % options.qe_sample_every == 0 {
            last_qe = map.quantization_error_unchecked(training_set);
            qe_history.push((steps, last_qe));
            if options.early_stop_qe.is_some_and(|thr| last_qe < thr) {
                stopped_early = true;
            }
        }
    }

    if qe_history.last().map(|&(s, _)| s) != Some(steps) {
        last_qe = map.quantization_error_unchecked(training_set);
        qe_history.push((steps, last_qe));
    }

    Ok(TrainingReport {
        steps,
        initial_qe,
        final_qe: last_qe,
        qe_history,
        stopped_early,
    })
}
