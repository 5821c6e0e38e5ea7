pub mod arbprec;
pub mod basis;
pub mod cli;
pub mod convergence;
pub mod elliptic;
pub mod error;
pub mod export;
pub mod geometry;
pub mod laplace;
pub mod lattice;
pub mod linalg;
pub mod steklov;
