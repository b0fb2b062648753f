//! Kohonen self-organising maps for feature-space anomaly detection.
//!
//! The crate trains a rectangular SOM with the incremental Kohonen rule,
//! derives a U-Matrix from the trained map, and turns the map into an
//! anomaly detector by thresholding best-matching-unit residuals. CSV
//! ingestion, normalisation and seeded splits round out the pipeline.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which the CLI uses throughout.

// `!(x > 0)`-style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anomaly;
pub mod dataio;
pub mod error;
pub mod grid;
pub mod scalar;
pub mod som;
pub mod umatrix;

pub use anomaly::{write_verdicts_csv, AnomalyBaseline, EvalSummary, Verdict};
pub use dataio::{fit_normalizer, load_csv, split, Dataset, Label, NormMethod, NormalizationModel};
pub use error::{Result, SomError};
pub use grid::{grid_distance, index_of, neighbors_of, position_of, GridPosition, GridShape};
pub use scalar::Scalar;
pub use som::{
    data_bounds, kernel, select_stimulus, train, Bmu, FeatureVector, KernelCutoff, SomMap,
    TrainOptions, TrainingReport, TrainingSchedule,
};
pub use umatrix::{compute_umatrix, UMatrix, UMatrixFormat};

pub type Features = FeatureVector<f64>;
pub type Map = SomMap<f64>;
pub type Schedule = TrainingSchedule<f64>;
pub type Report = TrainingReport<f64>;
pub type Baseline = AnomalyBaseline<f64>;
pub type UMat = UMatrix<f64>;
pub type Data = Dataset<f64>;
pub type Normalizer = NormalizationModel<f64>;

pub type Features32 = FeatureVector<f32>;
pub type Map32 = SomMap<f32>;
pub type Schedule32 = TrainingSchedule<f32>;
pub type Baseline32 = AnomalyBaseline<f32>;
pub type Data32 = Dataset<f32>;
