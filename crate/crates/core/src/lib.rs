//! Numerical laboratory for log-concave measures: Poincaré and Cheeger
//! constants, Gaussian and stochastic localization, matrix inequalities,
//! Monge transport duality and isotropic constants.

pub mod error;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub mod cubature;
pub mod eldansl;
pub mod measures;
pub mod poly;
pub mod matrixineq;
pub mod localize;
pub mod mc;
pub mod monge;
pub mod onedim;
pub mod slicing;
pub mod spectral;

pub use error::{LcError, Result};
pub use measures::{make_isotropic, ConvexBody, LogConcaveMeasure, Potential};
pub use mc::{Method, SampleBatch};
pub use stats::Estimate;
