use thiserror::Error;

/// Failures reported by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// The result is not representable as a finite double.
    #[error("overflow: {0}")]
    Overflow(&'static str),

    /// Successive refinements of a quadrature failed to settle.
    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    NonConvergence { estimate: f64, error: f64 },

    /// A declared singularity lies on the integration contour.
    #[error("singularity on the integration contour")]
    PoleOnContour,

    /// The spectral parameter lies in the spectrum of the operator.
    #[error("spectral parameter lies in the spectrum")]
    Spectrum,

    /// The kernel was evaluated on its diagonal.
    #[error("kernel evaluated at coinciding points")]
    Coincidence,

    /// Time grids must be strictly increasing inside the horizon.
    #[error("invalid time grid: {0}")]
    Grid(&'static str),

    /// A tabulated density lost normalization beyond the accepted tolerance.
    #[error("table resolution too coarse: normalization off by {deviation:e}")]
    TableResolution { deviation: f64 },

    /// The time step does not resolve the potential well.
    #[error("step {step:e} exceeds the admissible bound {bound:e}")]
    StepTooLarge { step: f64, bound: f64 },

    /// Invalid sampler or contour configuration.
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
