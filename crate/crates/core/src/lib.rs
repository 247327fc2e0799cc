//! Exact algebra, Newtonian n-body dynamics, the Gram-form reduction and the
//! hinge certificate pipeline.

pub mod algebra;
pub mod dynamics;
pub mod exec;
pub mod hinge;
pub mod reduction;

pub use exec::Exec;
