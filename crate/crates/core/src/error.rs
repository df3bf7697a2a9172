use thiserror::Error;

/// Errors surfaced by the numerical operations.
#[derive(Debug, Error)]
pub enum ConfsurfError {
    /// The tangent frame lost rank at a grid node.
    #[error("degenerate immersion at node {node}: second Gram-Schmidt pivot {pivot:.3e} below {threshold:.3e}")]
    DegenerateFrame {
        node: usize,
        pivot: f64,
        threshold: f64,
    },

    /// A test function fails the compact-support precondition.
    #[error(
        "test function does not vanish near the grid boundary (node {node}, value {value:.3e})"
    )]
    TestFunctionSupport { node: usize, value: f64 },

    /// Interior margin leaves no nodes to evaluate.
    #[error("interior margin {margin} leaves no interior nodes on this grid")]
    EmptyInterior { margin: f64 },

    /// A requested circle radius is not covered by the grid.
    #[error("radius {radius} outside the annulus [{rmin}, {rmax}]")]
    RadiusOutsideAnnulus { radius: f64, rmin: f64, rmax: f64 },

    /// Branch-order regression did not land near an integer.
    #[error("branch classification failed: slope {alpha:.4} is {gap:.4} from the nearest integer (grid too coarse or not a branch point)")]
    ClassificationFailed { alpha: f64, gap: f64 },

    /// Conformal factor decays too fast for finite area.
    #[error("slope {alpha:.4} < -0.5 contradicts finite area near the singularity")]
    NotFiniteArea { alpha: f64 },

    /// Möbius inversion center lies on (or too close to) the surface.
    #[error("inversion center on surface: node {node} at distance {distance:.3e}")]
    CenterOnSurface { node: usize, distance: f64 },

    /// A declared preimage of the inversion center is not on the surface.
    #[error(
        "declared preimage {index} is {distance:.3e} from the surface (tolerance {tolerance:.3e})"
    )]
    PreimageOffSurface {
        index: usize,
        distance: f64,
        tolerance: f64,
    },

    /// Monotonicity annulus with σ ≥ ρ.
    #[error("need sigma < rho, got sigma = {sigma}, rho = {rho}")]
    BadAnnulus { sigma: f64, rho: f64 },

    /// Collar coordinate outside the cylinder.
    #[error("t = {t} outside the collar (|t| must stay below T = {t_max})")]
    OutOfCollar { t: f64, t_max: f64 },

    /// Lattice reduction failed to terminate (NaN guard).
    #[error(
        "lattice normalization did not terminate after {iterations} moves (tau = {re} + {im}i)"
    )]
    LatticeNonTermination { iterations: usize, re: f64, im: f64 },

    /// Invalid surface specification string.
    #[error("invalid surface spec: {0}")]
    BadSurfaceSpec(String),

    /// Invalid grid-file contents.
    #[error("grid file error at line {line}: {message}")]
    GridFile { line: usize, message: String },

    /// Requested operation is not defined for this grid layout.
    #[error("operation requires a {required} grid layout")]
    WrongLayout { required: &'static str },

    /// Generic invalid-input error.
    #[error("{0}")]
    InvalidInput(String),
}
