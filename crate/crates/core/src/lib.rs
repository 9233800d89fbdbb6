pub mod algebra;
pub mod dvr;
pub mod poly;
pub mod error;
pub mod fp_module;
pub mod lattice;
pub mod resolution;
pub mod congruence;
pub mod problem;

pub use dvr::{Dvr, DvrKind, FinOModule, IdealO, Mat, Scalar};
pub use error::{Error, Result};
