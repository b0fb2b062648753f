use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Result, SomError};
use crate::scalar::Scalar;

/// RNG stream used for shuffling, distinct from map initialisation and
/// stimulus selection.
const SPLIT_STREAM: u64 = 2;

/// Shuffles `data` with `seed` and cuts it into train, calibration and test
/// partitions.
///
/// Calibration and test sizes are `round(N * fraction)`; train takes the
/// remainder, so the three always sum to `N`.
pub fn split<T: Scalar>(
    data: &Dataset<T>,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(Dataset<T>, Dataset<T>, Dataset<T>)> {
    let (ft, fc, fs) = fractions;
    if [ft, fc, fs].iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(SomError::domain(format!(
            "split fractions must be non-negative, got ({ft}, {fc}, {fs})"
        )));
    }
    if ((ft + fc + fs) - 1.0).abs() > 1e-9 {
        return Err(SomError::domain(format!(
            "split fractions must sum to 1, got {}",
            ft + fc + fs
        )));
    }
    if data.is_empty() {
        return Err(SomError::Empty("cannot split an empty dataset".into()));
    }

    let n = data.len();
    let mut n_cal = ((n as f64) * fc).round() as usize;
    let mut n_test = ((n as f64) * fs).round() as usize;
    while n_cal + n_test > n {
        if n_test >= n_cal {
            n_test -= 1;
        } else {
            n_cal -= 1;
        }
    }
    let n_train = n - n_cal - n_test;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);
    order.shuffle(&mut rng);

    let (train, rest) = order.split_at(n_train);
    let (cal, test) = rest.split_at(n_cal);
    Ok((data.select(train), data.select(cal), data.select(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::Label;
    use crate::som::FeatureVector;
    use proptest::prelude::*;

    fn numbered(n: usize) -> Dataset<f64> {
        Dataset::new(
            (0..n)
                .map(|i| FeatureVector::new(vec![i as f64]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn ids(ds: &Dataset<f64>) -> Vec<usize> {
        ds.vectors().iter().map(|v| v.as_slice()[0] as usize).collect()
    }

    #[test]
    fn everything_to_train() {
        let (a, b, c) = split(&numbered(7), (1.0, 0.0, 0.0), 3).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (7, 0, 0));
    }

    #[test]
    fn exact_rounding() {
        let (a, b, c) = split(&numbered(10), (0.8, 0.1, 0.1), 1).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (8, 1, 1));
    }

    #[test]
    fn remainder_goes_to_train() {
        let (a, b, c) = split(&numbered(1), (0.0, 0.5, 0.5), 1).unwrap();
        assert_eq!(a.len() + b.len() + c.len(), 1);
        let (a, b, c) = split(&numbered(7), (0.2, 0.4, 0.4), 1).unwrap();
        assert_eq!((b.len(), c.len()), (3, 3));
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = numbered(50);
        let first = split(&ds, (0.6, 0.2, 0.2), 9).unwrap();
        let again = split(&ds, (0.6, 0.2, 0.2), 9).unwrap();
        assert_eq!(first, again);
        let other = split(&ds, (0.6, 0.2, 0.2), 10).unwrap();
        assert_ne!(ids(&first.0), ids(&other.0));
    }

    #[test]
    fn invalid_fractions() {
        let ds = numbered(5);
        assert!(split(&ds, (0.5, 0.5, 0.5), 1).is_err());
        assert!(split(&ds, (1.2, -0.1, -0.1), 1).is_err());
        assert!(split(&ds, (f64::NAN, 0.5, 0.5), 1).is_err());
        assert!(split(&numbered(0), (1.0, 0.0, 0.0), 1).is_err());
    }

    #[test]
    fn labels_follow_their_rows() {
        let labels: Vec<Label> = (0..20)
            .map(|i| if i % 3 == 0 { Label::Anomalous } else { Label::Normal })
            .collect();
        let ds = numbered(20).with_labels(labels, "label").unwrap();
        let (a, b, c) = split(&ds, (0.5, 0.25, 0.25), 4).unwrap();
        for part in [a, b, c] {
            for (v, l) in part.vectors().iter().zip(part.labels().unwrap()) {
                let id = v.as_slice()[0] as usize;
                assert_eq!(*l == Label::Anomalous, id.is_multiple_of(3));
            }
        }
    }

    proptest! {
        #[test]
        fn partitions_cover_disjointly(
            n in 1usize..200,
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
            seed: u64,
        ) {
            let fc = a / 2.0;
            let fs = b * (1.0 - fc) / 2.0;
            let ft = 1.0 - fc - fs;
            let (x, y, z) = split(&numbered(n), (ft, fc, fs), seed).unwrap();
            let mut all: Vec<usize> = ids(&x).into_iter().chain(ids(&y)).chain(ids(&z)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
