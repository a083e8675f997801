mod literal;
mod rational;
mod real;
mod scalar;
mod surd;

pub use literal::parse_scalar;
pub use rational::Rational;
pub use real::CertReal;
pub use scalar::{sqrt_surd, Scalar};
pub use surd::{QuadraticSurd, SurdOrRational};
