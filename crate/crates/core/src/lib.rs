//! Gaussian product inequality machinery for principal minors of Wishart
//! matrices: dense linear algebra helpers, special functions of matrix
//! argument, a Wishart model with deterministic sampling, and the inequality
//! engine built on top of them.

pub mod gpi;
pub mod linalg;
pub mod oracles;
pub mod special;
pub mod wishart;
