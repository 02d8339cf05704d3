use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not skew within tolerance: relative symmetric residue {residue:.3e}")]
    NotSkew { residue: f64 },

    #[error("normal is not unit length: |n| = {norm:.17}")]
    NonUnitNormal { norm: f64 },

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),

    #[error("field degree {degree} exceeds the supported cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("quadrature order {have} cannot integrate degree {need} exactly")]
    QuadratureOrder { need: u32, have: u32 },

    #[error("unknown boundary patch '{0}'")]
    UnknownPatch(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("stiffness is singular on the constrained space: kernel dimension {kernel_dim}")]
    Singular { kernel_dim: usize },

    #[error("saddle system too ill-conditioned: estimate {estimate:.3e} exceeds {limit:.3e}")]
    IllConditioned { estimate: f64, limit: f64 },
}
