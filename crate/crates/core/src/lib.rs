//! Exact computations for the W-algebra W(2,2).
//!
//! * [`lie`]: basis, bracket, Jacobi check and the `Vir[e]` embedding.
//! * [`pbw`]: PBW normal ordering and the highest-weight action.
//! * [`verma`]: Verma module levels, raising operators and singular vectors.
//! * [`intermediate`]: intermediate-series modules and windowed probes.
//! * [`classify`]: windowed constraint systems for classifying weight modules.

pub mod classify;
pub mod error;
pub mod intermediate;
pub mod lie;
pub mod linalg;
pub mod pbw;
pub mod scalar;
pub mod verma;

pub use error::Error;
pub use lie::{BasisElement, LieElement};
pub use pbw::{HighestWeightParams, PbwMonomial, UeaElement};
pub use scalar::Scalar;
