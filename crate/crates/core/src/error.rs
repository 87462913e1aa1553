use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid rational function: {0}")]
    InvalidFunction(String),

    #[error("point is within the guard radius of pole {index}")]
    PoleProximity { index: usize },

    #[error("root finder did not converge (worst residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("level {level} is too close to the critical modulus {critical_modulus}")]
    LevelNearCriticalValue { level: f64, critical_modulus: f64 },

    #[error("the set |R| >= t touches the tracing window")]
    WindowTooSmall,

    #[error("could not resolve the level-set topology: {0}")]
    TopologyUnresolved(String),

    #[error("point lies on a lemniscate curve (distance {distance:e})")]
    OnBoundary { distance: f64 },

    #[error("singular capacity system")]
    SingularSystem,

    #[error("panel charges went negative ({min_weight:e}); boundary is under-resolved")]
    NegativeWeights { min_weight: f64 },

    #[error("two measures share a support point")]
    CoincidentPoints,

    #[error("source point is not inside the requested domain")]
    SourceOutsideDomain,

    #[error("{failed} of {walks} walks did not reach the boundary")]
    NonAbsorbingWalk { failed: usize, walks: usize },

    #[error("pivot lies inside the domain or on its boundary")]
    PivotInsideDomain,

    #[error("a critical value lies on the unit circle (|R(c)| = {modulus})")]
    CriticalValueOnCircle { modulus: f64 },

    #[error("rational function is not good at level {level}")]
    NotGood { level: f64 },

    #[error("no injectivity radius could be certified for component {index}")]
    NoRadiusFound { index: usize },

    #[error("perturbed function is not good at epsilon = {epsilon:e}")]
    NotGoodAtEpsilon { epsilon: f64 },

    #[error("capacity estimators disagree (panel {panel}, leja {leja}); boundary is under-resolved")]
    UnderResolution { panel: f64, leja: f64 },
}
