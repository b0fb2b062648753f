//! Kohonen self-organising map: initialisation, best-matching-unit search,
//! adaptation and quantisation error.
//!
//! One training "step" is one stimulus, response and adaptation cycle. The
//! literature sometimes calls this an epoch; here an epoch never means a full
//! pass over the data.

mod kernel;
mod persist;
mod schedule;
mod train;

pub use kernel::kernel;
pub use persist::{MAP_FORMAT_VERSION, MAP_MAGIC};
pub use schedule::{TrainingSchedule, DEFAULT_ORDERING_STEPS, STEPS_PER_UNIT};
pub use train::{
    select_stimulus, train, KernelCutoff, TrainOptions, TrainingReport, DEFAULT_CUTOFF_SIGMAS,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SomError};
use crate::grid::{position_of, GridPosition, GridShape};
use crate::scalar::{euclidean, Scalar};

/// An input vector with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T>(Vec<T>);

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(SomError::domain("feature vector must have at least one component"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SomError::domain(format!(
                "feature component {pos} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for FeatureVector<T> {
    type Error = SomError;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

impl<T> AsRef<[T]> for FeatureVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// Winner of a best-matching-unit search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bmu<T> {
    pub index: usize,
    pub distance: T,
}

/// A lattice of nodes, each carrying a weight vector of length `dim`.
///
/// Weights are stored flat and row-major: node `i` owns
/// `weights[i * dim..(i + 1) * dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SomMap<T> {
    shape: GridShape,
    dim: usize,
    weights: Vec<T>,
    seed: u64,
    steps_trained: u64,
}

impl<T: Scalar> SomMap<T> {
    /// Builds a map with every weight component drawn uniformly from its
    /// dimension's `[min, max]` range.
    pub fn initialize(shape: GridShape, dim: usize, bounds: &[(T, T)], seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(SomError::domain("map dimension must be at least 1"));
        }
        if bounds.len() != dim {
            return Err(SomError::DimensionMismatch {
                expected: dim,
                actual: bounds.len(),
            });
        }
        for (d, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(SomError::domain(format!("bounds of dimension {d} are not finite")));
            }
            if lo > hi {
                return Err(SomError::domain(format!(
                    "bounds of dimension {d} are inverted: min {lo} > max {hi}"
                )));
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(shape.node_count() * dim);
        for _ in 0..shape.node_count() {
            for &(lo, hi) in bounds {
                let u = T::from_f64_lossy(rng.random::<f64>());
                let w = lo + u * (hi - lo);
                weights.push(w.max(lo).min(hi));
            }
        }
        Ok(Self {
            shape,
            dim,
            weights,
            seed,
            steps_trained: 0,
        })
    }

    /// Assembles a map from explicit row-major weights.
    pub fn from_weights(
        shape: GridShape,
        dim: usize,
        weights: Vec<T>,
        seed: u64,
        steps_trained: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(SomError::domain("map dimension must be at least 1"));
        }
        let expected = shape.node_count() * dim;
        if weights.len() != expected {
            return Err(SomError::domain(format!(
                "expected {expected} weight components for a {shape} map of dimension {dim}, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(SomError::domain("map weights must be finite"));
        }
        Ok(Self {
            shape,
            dim,
            weights,
            seed,
            steps_trained,
        })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps_trained(&self) -> u64 {
        self.steps_trained
    }

    pub fn node_count(&self) -> usize {
        self.shape.node_count()
    }

    /// All weights, row-major.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weight vector of node `index`. Panics if out of range.
    pub fn weight(&self, index: usize) -> &[T] {
        &self.weights[index * self.dim..(index + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[T]> {
        self.weights.chunks_exact(self.dim)
    }

    pub fn position(&self, index: usize) -> Result<GridPosition> {
        position_of(index, self.shape)
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim {
            return Err(SomError::DimensionMismatch {
                expected: self.dim,
                actual,
            });
        }
        Ok(())
    }

    /// Best-matching unit: the node whose weight vector is nearest to `x`
    /// in Euclidean distance. Ties go to the lowest node index.
    pub fn find_bmu(&self, x: &FeatureVector<T>) -> Result<Bmu<T>> {
        self.check_dim(x.dim())?;
        Ok(self.bmu_unchecked(x.as_slice()))
    }

    pub(crate) fn bmu_unchecked(&self, x: &[T]) -> Bmu<T> {
        let mut best = Bmu {
            index: 0,
            distance: T::infinity(),
        };
        for (i, w) in self.nodes().enumerate() {
            let d = euclidean(x, w);
            if d < best.distance {
                best = Bmu { index: i, distance: d };
            }
        }
        best
    }

    /// Applies one adaptation step towards `x` with winner `winner`.
    ///
    /// Every node moves by `h_ci * (x - w_i)` where `h_ci` is the Gaussian
    /// neighbourhood kernel around the winner.
    pub fn adapt(&mut self, x: &FeatureVector<T>, winner: usize, alpha: T, sigma: T) -> Result<()> {
        self.check_dim(x.dim())?;
        if winner >= self.node_count() {
            return Err(SomError::domain(format!(
                "winner index {winner} out of range for {} nodes",
                self.node_count()
            )));
        }
        kernel::validate(alpha, sigma)?;
        self.adapt_unchecked(x.as_slice(), winner, alpha, sigma, None);
        Ok(())
    }

    /// `cutoff`, when set, is a squared lattice radius beyond which nodes are skipped.
    pub(crate) fn adapt_unchecked(
        &mut self,
        x: &[T],
        winner: usize,
        alpha: T,
        sigma: T,
        cutoff: Option<T>,
    ) {
        let cols = self.shape.cols();
        let c = GridPosition::new(winner / cols, winner % cols);
        let two_sigma_sq = (sigma + sigma) * sigma;
        let dim = self.dim;
        for (i, w) in self.weights.chunks_exact_mut(dim).enumerate() {
            let d2 = T::from_usize_lossy(c.squared_distance(&GridPosition::new(i / cols, i % cols)));
            if cutoff.is_some_and(|r2| d2 > r2) {
                continue;
            }
            let h = alpha * (-d2 / two_sigma_sq).exp();
            for (wk, &xk) in w.iter_mut().zip(x) {
                *wk = *wk + h * (xk - *wk);
            }
        }
        self.steps_trained += 1;
    }

    /// Mean distance from each vector in `data` to its best-matching unit.
    pub fn quantization_error(&self, data: &[FeatureVector<T>]) -> Result<T> {
        if data.is_empty() {
            return Err(SomError::Empty(
                "quantization error needs at least one vector".into(),
            ));
        }
        for x in data {
            self.check_dim(x.dim())?;
        }
        Ok(self.quantization_error_unchecked(data))
    }

    pub(crate) fn quantization_error_unchecked(&self, data: &[FeatureVector<T>]) -> T {
        let total = data
            .iter()
            .fold(T::zero(), |acc, x| acc + self.bmu_unchecked(x.as_slice()).distance);
        total / T::from_usize_lossy(data.len())
    }
}

/// Per-dimension `(min, max)` over a set of vectors, for seeding [`SomMap::initialize`].
pub fn data_bounds<T: Scalar>(data: &[FeatureVector<T>]) -> Result<Vec<(T, T)>> {
    let first = data
        .first()
        .ok_or_else(|| SomError::Empty("cannot derive bounds from an empty data set".into()))?;
    let mut bounds: Vec<(T, T)> = first.as_slice().iter().map(|&v| (v, v)).collect();
    for x in &data[1..] {
        if x.dim() != bounds.len() {
            return Err(SomError::DimensionMismatch {
                expected: bounds.len(),
                actual: x.dim(),
            });
        }
        for (b, &v) in bounds.iter_mut().zip(x.as_slice()) {
            b.0 = b.0.min(v);
            b.1 = b.1.max(v);
        }
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector<f64> {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn map_from(rows: usize, cols: usize, dim: usize, w: Vec<f64>) -> SomMap<f64> {
        SomMap::from_weights(GridShape::new(rows, cols).unwrap(), dim, w, 0, 0).unwrap()
    }

    #[test]
    fn feature_vector_rejects_non_finite() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f64::INFINITY]).is_err());
        assert!(FeatureVector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn initialize_degenerate_bounds() {
        let m = SomMap::initialize(GridShape::new(1, 1).unwrap(), 2, &[(0.0, 0.0), (0.0, 0.0)], 99)
            .unwrap();
        assert_eq!(m.weights(), &[0.0, 0.0]);
        assert_eq!(m.steps_trained(), 0);
    }

    #[test]
    fn initialize_within_bounds() {
        let bounds = [(-1.0, 1.0), (0.0, 10.0), (5.0, 5.5), (-3.0, -2.0), (100.0, 200.0)];
        let m = SomMap::initialize(GridShape::new(3, 4).unwrap(), 5, &bounds, 42).unwrap();
        assert_eq!(m.node_count(), 12);
        assert_eq!(m.weights().len(), 60);
        for w in m.nodes() {
            assert_eq!(w.len(), 5);
            for (v, (lo, hi)) in w.iter().zip(bounds) {
                assert!(*v >= lo && *v <= hi);
            }
        }
    }

    #[test]
    fn initialize_is_deterministic() {
        let s = GridShape::new(2, 2).unwrap();
        let a = SomMap::initialize(s, 1, &[(0.0, 1.0)], 7).unwrap();
        let b = SomMap::initialize(s, 1, &[(0.0, 1.0)], 7).unwrap();
        let bits = |m: &SomMap<f64>| m.weights().iter().map(|w| w.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = SomMap::initialize(s, 1, &[(0.0, 1.0)], 8).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn initialize_rejects_inverted_bounds() {
        let s = GridShape::new(2, 2).unwrap();
        assert!(SomMap::initialize(s, 1, &[(1.0, 0.0)], 1).is_err());
        assert!(SomMap::initialize(s, 2, &[(0.0, 1.0)], 1).is_err());
        assert!(SomMap::<f64>::initialize(s, 0, &[], 1).is_err());
    }

    #[test]
    fn bmu_examples() {
        let m = map_from(1, 2, 2, vec![0.0, 0.0, 1.0, 1.0]);
        let b = m.find_bmu(&fv(&[0.1, 0.1])).unwrap();
        assert_eq!(b.index, 0);
        assert!((b.distance - 0.02f64.sqrt()).abs() < 1e-15);

        let m = map_from(2, 2, 2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 5.0, 5.0]);
        let b = m.find_bmu(&fv(&[5.0, 5.0])).unwrap();
        assert_eq!((b.index, b.distance), (3, 0.0));

        assert!(matches!(
            m.find_bmu(&fv(&[1.0])),
            Err(SomError::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn bmu_tie_goes_to_lowest_index() {
        let m = map_from(1, 3, 1, vec![2.0, 0.0, 2.0]);
        let b = m.find_bmu(&fv(&[1.0])).unwrap();
        assert_eq!(b.index, 0);
        assert_eq!(b.distance, 1.0);
    }

    #[test]
    fn adapt_full_rate_copies_input() {
        let mut m = map_from(1, 2, 2, vec![0.3, -2.0, 9.0, 9.0]);
        m.adapt(&fv(&[1.0, 2.0]), 0, 1.0, 0.5).unwrap();
        assert_eq!(m.weight(0), &[1.0, 2.0]);
        assert_eq!(m.steps_trained(), 1);
    }

    #[test]
    fn adapt_tiny_rate_is_identity() {
        let before = vec![0.3, -2.0, 9.0, 9.0];
        let mut m = map_from(1, 2, 2, before.clone());
        m.adapt(&fv(&[1.0, 2.0]), 1, 1e-20, 3.0).unwrap();
        for (a, b) in m.weights().iter().zip(&before) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn adapt_half_step() {
        // h = 0.5 for the winner itself: alpha 0.5, distance 0
        let mut m = map_from(1, 1, 2, vec![0.0, 0.0]);
        m.adapt(&fv(&[1.0, 1.0]), 0, 0.5, 1.0).unwrap();
        let expected = 0.0 + 0.5 * (1.0 - 0.0);
        assert_eq!(m.weight(0), &[expected, expected]);
        assert_eq!(expected, 0.5);
    }

    #[test]
    fn adapt_rejects_bad_arguments() {
        let mut m = map_from(1, 2, 1, vec![0.0, 1.0]);
        assert!(m.adapt(&fv(&[1.0]), 2, 0.5, 1.0).is_err());
        assert!(m.adapt(&fv(&[1.0, 2.0]), 0, 0.5, 1.0).is_err());
        assert!(m.adapt(&fv(&[1.0]), 0, 0.5, 0.0).is_err());
        assert_eq!(m.steps_trained(), 0);
    }

    #[test]
    fn quantization_error_examples() {
        let m = map_from(1, 1, 2, vec![0.0, 0.0]);
        assert_eq!(m.quantization_error(&[fv(&[3.0, 4.0])]).unwrap(), 5.0);
        assert!(m.quantization_error(&[]).is_err());

        let m = map_from(1, 3, 2, vec![0.0, 0.0, 1.0, 2.0, -4.0, 0.5]);
        let data = vec![fv(&[1.0, 2.0]), fv(&[-4.0, 0.5]), fv(&[1.0, 2.0])];
        assert_eq!(m.quantization_error(&data).unwrap(), 0.0);
    }

    #[test]
    fn data_bounds_spans_data() {
        let data = vec![fv(&[1.0, -1.0]), fv(&[3.0, 2.0]), fv(&[2.0, 0.0])];
        assert_eq!(data_bounds(&data).unwrap(), vec![(1.0, 3.0), (-1.0, 2.0)]);
        assert!(data_bounds::<f64>(&[]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = GridShape::new(2, 2).unwrap();
        let mut m = SomMap::<f32>::initialize(s, 2, &[(0.0, 1.0), (0.0, 1.0)], 3).unwrap();
        let x = FeatureVector::new(vec![0.5f32, 0.5]).unwrap();
        let b = m.find_bmu(&x).unwrap();
        m.adapt(&x, b.index, 1.0, 1.0).unwrap();
        assert_eq!(m.weight(b.index), &[0.5, 0.5]);
    }

    proptest! {
        #[test]
        fn winner_contracts_towards_input(
            w in proptest::collection::vec(-10.0f64..10.0, 12),
            x in proptest::collection::vec(-10.0f64..10.0, 3),
            alpha in 1e-6f64..=1.0,
            sigma in 0.1f64..5.0,
        ) {
            let mut m = map_from(2, 2, 3, w);
            let x = FeatureVector::new(x).unwrap();
            let c = m.find_bmu(&x).unwrap();
            m.adapt(&x, c.index, alpha, sigma).unwrap();
            let after = euclidean(m.weight(c.index), x.as_slice());
            prop_assert!(after <= c.distance + 1e-12);
        }
    }
}
