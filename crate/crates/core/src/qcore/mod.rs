//! Scalars, q-series and dense linear algebra at configurable precision.

pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod series;

pub use linalg::{eigh, CMatrix, Eigh};
pub use poly::Polynomial;
pub use scalar::{Complex, PrecisionContext, QContext};
pub use series::{askey_wilson, basic_hypergeometric, bracket, q_pochhammer, AwForm, BracketKind, PochLength};
