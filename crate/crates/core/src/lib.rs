//! Relay-aided double-RIS link simulation.
//!
//! The math is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar for the common double-precision use. The Monte
//! Carlo engine in [`simulate`] runs in `f64`.

pub mod channels;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod phaseopt;
pub mod scalar;
pub mod schemes;
pub mod simulate;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type Point2D64 = geometry::Point2D<f64>;
pub type Topology64 = geometry::Topology<f64>;
pub type PathLossParams64 = geometry::PathLossParams<f64>;
pub type ChannelParams64 = channels::ChannelParams<f64>;
pub type ChannelRealization64 = channels::ChannelRealization<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type PhaseVector64 = phaseopt::PhaseVector<f64>;
pub type FractionalProblem64 = phaseopt::FractionalProblem<f64>;
pub type MmState64 = phaseopt::MmState<f64>;
pub type SchemeResult64 = schemes::SchemeResult<f64>;
pub type PowerSplit64 = schemes::PowerSplit<f64>;

pub type PhaseVector32 = phaseopt::PhaseVector<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;
