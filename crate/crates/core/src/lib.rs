//! Verification laboratory for the linear indeterminate couple stress model.
//!
//! The library provides exact polynomial field calculus, the constitutive
//! quantities of the model (Cauchy stress, trace-free couple stress, total
//! force stress), two competing traction sets on smooth and edged boundaries,
//! virtual-power balance assembly that decides which set closes the power
//! identity, and a dense Ritz solver driven by either traction set.
//!
//! Conventions used throughout:
//! `(grad v)_ik = dv_i/dx_k`, `(Div P)_i = dP_ij/dx_j`,
//! `(anti v)_ij = -eps_ijk v_k`, `(curl v)_i = eps_ijk dv_k/dx_j`,
//! `(C : B)_i = C_ijp B_pj` for a third-order tensor against a matrix,
//! and `<A, B> = A_ij B_ij` for the matrix inner product.

pub mod constitutive;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod poly;
pub mod report;
pub mod ritz;
pub mod tensor;
pub mod traction;
pub mod virtual_work;

pub use nalgebra;

pub use constitutive::MaterialParams;
pub use error::Error;
pub use geometry::{
    make_ball, make_box, DomainGeometry, DomainKind, EdgeCurve, NormalExtension, QuadNode,
    SurfacePatch,
};
pub use jet::Jet;
pub use poly::{PolyMatrix, PolyScalar, PolyTen3, PolyVector, MAX_FIELD_DEGREE};
pub use report::{Check, CheckKind};
pub use ritz::{BasisSpec, RitzSolution, SolveReport, SystemStats};
pub use tensor::{Mat3, Ten3, Vec3};
pub use traction::{EdgeJump, TractionField, TractionFlavor, TractionSample};
pub use virtual_work::{balance_report, BalanceReport};
