use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("gapless mode at alpha = {alpha}: Bogoliubov angle undefined")]
    GaplessMode { alpha: f64 },

    #[error("degenerate Fermi ratio: 1 - gamma^2 = 0, use the gamma -> 1 limit")]
    DegenerateRatio,

    #[error("bad chain length {0}: must be even and at least 4")]
    BadSize(usize),

    #[error("critical point (gamma = {gamma}, lambda = {lambda}): gap {gap:e}")]
    CriticalPoint { gamma: f64, lambda: f64, gap: f64 },

    #[error("momentum grids differ ({0} vs {1} sites)")]
    GridMismatch(usize, usize),

    #[error("band assignment differs at mode k = {k}")]
    BandMismatch { k: i64 },

    #[error("finite-difference stencil crosses a critical region (gap {gap:e})")]
    StencilCrossesCritical { gap: f64 },

    #[error("finite-difference estimate unstable: h and h/2 differ by {deviation:e}")]
    RichardsonMismatch { deviation: f64 },

    #[error("degenerate ground state: E1 - E0 = {splitting:e}")]
    DegenerateGroundState { splitting: f64 },

    #[error("chain length {n} exceeds the dense limit {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("vanishing overlap between consecutive loop points ({modulus:e})")]
    ZeroOverlap { modulus: f64 },

    #[error("lambda = {lambda} is within {margin} of the critical field")]
    TooCloseToCritical { lambda: f64, margin: f64 },

    #[error("quadrature did not converge: error estimate {error:e} above tolerance {tol:e}")]
    QuadratureNotConverged { error: f64, tol: f64 },

    #[error("grid point (phi = {phi}, gamma = {gamma}) is gapless at this chain length")]
    GaplessOnGrid { phi: f64, gamma: f64 },

    #[error("plaquette ({i}, {j}) has ambiguous phase {phase}")]
    VortexOnPlaquette { i: usize, j: usize, phase: f64 },

    #[error("no Chern jump between lambda = {lo} and lambda = {hi}")]
    NoJumpFound { lo: f64, hi: f64 },

    #[error("Chern value {0} has no phase label")]
    UnlabeledChern(i64),
}
