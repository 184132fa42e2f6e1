use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not symplectic: |det - 1| = {residual:.3e}")]
    NotSymplectic { residual: f64 },

    #[error("Krein form degenerate (near-parabolic input), |form| = {magnitude:.3e}")]
    DegenerateKrein { magnitude: f64 },

    #[error("integrator could not meet the requested tolerance: {0}")]
    ToleranceNotMet(String),

    #[error("winding data and multiplier spectrum disagree: {0}")]
    InconsistentClassification(String),

    #[error("input lies inside the resonance tolerance band: {0}")]
    NearDegenerate(String),

    #[error("monodromy is resonant (eigenvalue-one stratum); operation requires a nonresonant input")]
    ResonantInput,

    #[error("polar-angle lift step too large ({step:.3e} >= pi/2); path sampling too coarse")]
    LiftStepTooLarge { step: f64 },

    #[error("trichotomy undecidable: extremal winding test within tolerance of the boundary")]
    Undecidable,

    #[error("no bisection bracket found for spectral level {level}")]
    BracketNotFound { level: i64 },

    #[error("rotation data not monotone across the spectral sweep near lambda = {lambda:.6e}")]
    MonotonicityViolated { lambda: f64 },

    #[error("spectrum window exhausted before all nonpositive eigenvalues were found")]
    InsufficientSpectrum,

    #[error("rotation intervals overlap; candidate gap cannot be certified")]
    GapUncertified,

    #[error("no order k with nonempty candidate set stabilizes within the horizon")]
    NoneWithinHorizon,

    #[error("trajectory left the safety ball (|z| > {radius:.3e}) during integration")]
    BlowUp { radius: f64 },

    #[error("twist radii not found: {0}")]
    TwistNotFound(String),

    #[error("no periodic orbit located in the twist annulus")]
    NoOrbitFound,

    #[error("supplied reference function is not a periodic solution (residual {residual:.3e})")]
    NotASolution { residual: f64 },

    #[error("rotation certificate failed: {0}")]
    CertificateFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
