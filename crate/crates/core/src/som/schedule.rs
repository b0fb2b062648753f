use crate::error::{Result, SomError};
use crate::grid::GridShape;
use crate::scalar::Scalar;

/// Steps per map unit in the default run length.
pub const STEPS_PER_UNIT: u64 = 500;

/// Length of the default global-ordering stage.
pub const DEFAULT_ORDERING_STEPS: u64 = 1000;

/// Piecewise-linear learning-rate and neighbourhood-width decay.
///
/// During the ordering stage (`t < ordering_steps`) the learning rate falls
/// linearly from `alpha_start` to `alpha_mid` and the width from
/// `sigma_start` to `sigma_end`. During fine-tuning the rate falls from
/// `alpha_mid` towards `alpha_end` and the width stays at `sigma_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSchedule<T> {
    ordering_steps: u64,
    total_steps: u64,
    alpha_start: T,
    alpha_mid: T,
    alpha_end: T,
    sigma_start: T,
    sigma_end: T,
}

impl<T: Scalar> TrainingSchedule<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ordering_steps: u64,
        total_steps: u64,
        alpha_start: T,
        alpha_mid: T,
        alpha_end: T,
        sigma_start: T,
        sigma_end: T,
    ) -> Result<Self> {
        if ordering_steps > total_steps {
            return Err(SomError::domain(format!(
                "ordering stage ({ordering_steps} steps) exceeds total steps ({total_steps})"
            )));
        }
        let alphas_ok = alpha_end > T::zero()
            && alpha_end <= alpha_mid
            && alpha_mid <= alpha_start
            && alpha_start <= T::one();
        if !alphas_ok {
            return Err(SomError::domain(format!(
                "learning rates must satisfy 0 < end <= mid <= start <= 1, got {alpha_start}, {alpha_mid}, {alpha_end}"
            )));
        }
        if !(sigma_end > T::zero() && sigma_end <= sigma_start && sigma_start.is_finite()) {
            return Err(SomError::domain(format!(
                "neighbourhood widths must satisfy 0 < end <= start, got {sigma_start}, {sigma_end}"
            )));
        }
        Ok(Self {
            ordering_steps,
            total_steps,
            alpha_start,
            alpha_mid,
            alpha_end,
            sigma_start,
            sigma_end,
        })
    }

    /// Defaults for a map of the given shape: 500 steps per unit, a
    /// 1000-step ordering stage, rates 0.9 / 0.2 / 0.01 and widths
    /// `max(rows, cols) / 2` down to 1.
    ///
    /// The starting width is raised to 1 on maps too small to reach it.
    pub fn defaults(shape: GridShape) -> Self {
        let total = STEPS_PER_UNIT * shape.node_count() as u64;
        let sigma_end = T::one();
        let half_side = T::from_usize_lossy(shape.rows().max(shape.cols())) / T::from_f64_lossy(2.0);
        Self {
            ordering_steps: DEFAULT_ORDERING_STEPS.min(total),
            total_steps: total,
            alpha_start: T::from_f64_lossy(0.9),
            alpha_mid: T::from_f64_lossy(0.2),
            alpha_end: T::from_f64_lossy(0.01),
            sigma_start: half_side.max(sigma_end),
            sigma_end,
        }
    }

    /// Same rates and widths with a different run length. The ordering
    /// stage is shortened if it would not fit.
    pub fn with_total_steps(mut self, total_steps: u64) -> Self {
        self.total_steps = total_steps;
        self.ordering_steps = self.ordering_steps.min(total_steps);
        self
    }

    pub fn with_ordering_steps(self, ordering_steps: u64) -> Result<Self> {
        Self::new(
            ordering_steps,
            self.total_steps,
            self.alpha_start,
            self.alpha_mid,
            self.alpha_end,
            self.sigma_start,
            self.sigma_end,
        )
    }

    pub fn with_alphas(self, start: T, mid: T, end: T) -> Result<Self> {
        Self::new(
            self.ordering_steps,
            self.total_steps,
            start,
            mid,
            end,
            self.sigma_start,
            self.sigma_end,
        )
    }

    pub fn with_sigmas(self, start: T, end: T) -> Result<Self> {
        Self::new(
            self.ordering_steps,
            self.total_steps,
            self.alpha_start,
            self.alpha_mid,
            self.alpha_end,
            start,
            end,
        )
    }

    pub fn ordering_steps(&self) -> u64 {
        self.ordering_steps
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn alpha_start(&self) -> T {
        self.alpha_start
    }

    pub fn alpha_mid(&self) -> T {
        self.alpha_mid
    }

    pub fn alpha_end(&self) -> T {
        self.alpha_end
    }

    pub fn sigma_start(&self) -> T {
        self.sigma_start
    }

    pub fn sigma_end(&self) -> T {
        self.sigma_end
    }

    /// Learning rate and neighbourhood width at step `t`.
    pub fn at(&self, t: u64) -> Result<(T, T)> {
        if t >= self.total_steps {
            return Err(SomError::domain(format!(
                "step {t} outside schedule of {} steps",
                self.total_steps
            )));
        }
        Ok(self.at_unchecked(t))
    }

    pub(crate) fn at_unchecked(&self, t: u64) -> (T, T) {
        if t < self.ordering_steps {
            let f = fraction::<T>(t, self.ordering_steps);
            (
                lerp(self.alpha_start, self.alpha_mid, f),
                lerp(self.sigma_start, self.sigma_end, f),
            )
        } else {
            let f = fraction::<T>(t - self.ordering_steps, self.total_steps - self.ordering_steps);
            (lerp(self.alpha_mid, self.alpha_end, f), self.sigma_end)
        }
    }
}

fn fraction<T: Scalar>(num: u64, den: u64) -> T {
    T::from_u64(num).unwrap_or_else(T::infinity) / T::from_u64(den).unwrap_or_else(T::infinity)
}

// a + (b - a) * f is monotone in f for fixed a >= b, which keeps the decay
// non-increasing under rounding.
fn lerp<T: Scalar>(a: T, b: T, f: T) -> T {
    a + (b - a) * f
}
