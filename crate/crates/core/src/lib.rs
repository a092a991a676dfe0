//! Finite-blocklength analysis of ORBGRAND decoding on binary-input
//! memoryless channels.
//!
//! The deterministic kernels (quadrature, saddlepoint, exact tail tables)
//! are generic over [`scalar::Real`]; the aliases below fix them to `f64`.

pub mod bounds;
pub mod channel;
pub mod codes;
pub mod error;
pub mod mc;
pub mod metric;
pub mod quadrature;
pub mod saddlepoint;
pub mod scalar;
pub mod tail;

pub use channel::{BinaryInputChannel, BpskAwgn, ReliabilityModel};
pub use error::{Error, Result};

pub type Quadrature = quadrature::Quadrature<f64>;
pub type SaddlepointSolution = saddlepoint::SaddlepointSolution<f64>;
pub type TailTable = tail::TailTable<f64>;
