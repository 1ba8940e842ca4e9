use thiserror::Error;

#[derive(Debug, Error)]
pub enum MfgError {
    #[error("inner solver for the Hamiltonian did not converge after {iterations} iterations (gradient-map norm {residual:.3e})")]
    HamiltonianDiverged { iterations: usize, residual: f64 },

    #[error("contraction solve exceeded {max_iter} iterations (residual {residual:.3e}, tolerance {tol:.3e})")]
    ContractionMaxIter {
        max_iter: usize,
        residual: f64,
        tol: f64,
    },

    #[error("CFL condition fails: dt={dt:.6e} (max {dt_max:.6e}), h={h:.6e} (max {h_max:.6e})")]
    CflViolation {
        dt: f64,
        dt_max: f64,
        h: f64,
        h_max: f64,
    },

    #[error("theta = 1 is not admissible: the CFL bounds are undefined for a fully implicit diffusion step")]
    ThetaOne,

    #[error("energy campaign requires theta > 1/2, got {0}")]
    ThetaTooSmall(f64),

    #[error("dense transition build requires N^d <= {max}, got {actual}")]
    TransitionSizeGuard { actual: usize, max: usize },

    #[error("control field violates the bound: max |v| = {max_abs:.6e} > {bound:.6e}")]
    ControlBoundViolation { max_abs: f64, bound: f64 },

    #[error("perturbed solution has negative mass (min m = {0:.3e}); the fundamental inequality requires m >= 0")]
    NegativeMass(f64),

    #[error("outer fixed-point loop exceeded {max_outer} iterations (best residual {residual:.3e})")]
    MaxOuterExceeded { max_outer: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MfgError>;
