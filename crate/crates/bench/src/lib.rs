//! Fixtures shared by the benchmarks.

use lclab_core::onedim::Law1D;
use lclab_core::LogConcaveMeasure as M;

/// Measures the sampler benchmarks run on, with a short label each.
pub fn sampler_catalog() -> Vec<(&'static str, M)> {
    vec![
        ("gaussian_d8", M::std_gaussian(8)),
        ("cube_d8", M::cube(8, 1.0)),
        ("simplex_d8", M::simplex(8)),
        ("ball_d8", M::ball(8, 1.0)),
    ]
}

/// The one-dimensional law of a 1D catalog measure.
pub fn law(m: &M) -> Law1D {
    Law1D::from_measure(m).expect("1D measure")
}
