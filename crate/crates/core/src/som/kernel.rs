use crate::error::{Result, SomError};
use crate::grid::GridPosition;
use crate::scalar::Scalar;

/// Gaussian neighbourhood factor `alpha * exp(-|r_c - r_i|^2 / (2 sigma^2))`.
///
/// `alpha` must lie in `(0, 1]` and `sigma` must be positive.
pub fn kernel<T: Scalar>(c: GridPosition, i: GridPosition, alpha: T, sigma: T) -> Result<T> {
    validate(alpha, sigma)?;
    let d2 = T::from_usize_lossy(c.squared_distance(&i));
    Ok(alpha * (-d2 / ((sigma + sigma) * sigma)).exp())
}

pub(crate) fn validate<T: Scalar>(alpha: T, sigma: T) -> Result<()> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(SomError::domain(format!(
            "neighbourhood width must be positive and finite, got {sigma}"
        )));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(SomError::domain(format!(
            "learning rate must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}
