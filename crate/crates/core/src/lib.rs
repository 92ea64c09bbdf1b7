//! Repeated-interaction quantum channels `Q -> Tr_2(U (Q ⊗ β) U*)`.
//!
//! The crate builds the channel from an interaction unitary `U` on `C^n ⊗ C^n`
//! and an environment state `β`, exposes its Stinespring, Kraus and
//! superoperator forms, and analyses its fixed points:
//!
//! * [`linalg`]: dense complex matrices, Kronecker products, the partial trace
//!   over the environment, numerical rank and Haar sampling.
//! * [`channel`]: [`ChannelSpec`], [`KrausSet`] and [`Superoperator`].
//! * [`fixed_point`]: rank of `Φ - I`, fixed density matrices, iteration.
//! * [`circulant`]: phase-decorated cyclic-shift unitaries with certified
//!   generic phases, whose channels have a unique fixed point.
//! * [`dim2`]: closed-form analysis of the qubit case.
//! * [`format`]: JSON and CSV encodings shared with the command-line tool.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the tolerances in the tests assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod circulant;
pub mod dim2;
mod error;
pub mod fixed_point;
pub mod format;
pub mod linalg;
mod scalar;

pub use channel::{ChannelSpec, KrausSet, Superoperator};
pub use error::{Error, Result};
pub use fixed_point::{FixedPointReport, Trajectory};
pub use linalg::ComplexMatrix;
pub use scalar::{cplx, modulus, unit_phase, Complex, Real};

pub type C64 = Complex<f64>;
pub type CMatrix = ComplexMatrix<f64>;
pub type CMatrix32 = ComplexMatrix<f32>;
pub type Spec = ChannelSpec<f64>;
pub type Kraus = KrausSet<f64>;
pub type SuperOp = Superoperator<f64>;
pub type Report = FixedPointReport<f64>;

pub type Phases = circulant::PhaseVector<f64>;
pub type Coefficients2 = dim2::Dim2Coefficients<f64>;
