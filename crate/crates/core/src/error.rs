use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LcError {
    #[error("no exact oracle")]
    NoExactOracle,
    #[error("tilt not integrable")]
    TiltNotIntegrable,
    #[error("degenerate support")]
    DegenerateSupport,
    #[error("moment diverges")]
    MomentDiverges,
    #[error("disconnected support")]
    DisconnectedSupport,
    #[error("use direct or reflected sampler")]
    UseDirectSampler,
    #[error("reduce basis")]
    ReduceBasis,
    #[error("overflow regime")]
    OverflowRegime,
    #[error("coupling not cyclically monotone")]
    NotCyclicallyMonotone,
    #[error("Laplace transform diverges")]
    LaplaceDiverges,
    #[error("entropy estimator unreliable")]
    EntropyUnreliable,
    #[error("unequal mass: {0} vs {1}")]
    UnequalMass(f64, f64),
    #[error("law is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("matrix is not positive semi-definite")]
    NotPsd,
    #[error("Lipschitz spot check failed: ratio {0}")]
    NotLipschitz(f64),
    #[error("strong convexity not certified")]
    NotStronglyConvex,
    #[error("singular Hessian at a sample point")]
    SingularHessian,
    #[error("divergent integrand")]
    DivergentIntegrand,
    #[error("quadrature failure at t = {t}, theta = {theta:?}")]
    QuadratureFailure { t: f64, theta: Vec<f64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, LcError>;

