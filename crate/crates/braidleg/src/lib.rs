//! Exact noncommutative computer algebra for braided phase spaces.
//!
//! The engine works over a `2s x 2s` matrix of formal braiding variables
//! `q[i,j]` (with `q[i,i] = 1`, `q[i,j]*q[j,i] = 1`) and a fixed taxonomy of
//! generators whose commutation factors are entirely determined by a pair of
//! signed multi-indices, the [`weight::BraidWeight`]. On top of the PBW
//! normal form it provides:
//!
//! * the q-Poisson bracket (a bilinear q-biderivation) and its Jacobi check,
//! * the Hamilton-Jacobi coefficient recursion for braided action series,
//! * the braided Hamiltonian coefficient flow,
//! * the braided Legendre transformation built from the U/V/A-sharp
//!   recursions with q-commutative units-of-measurement bookkeeping,
//! * a lean bracketing (epoche) algebra indexed by leaf-labelled planar
//!   binary trees,
//! * classical (all-braidings-one) series oracles used to cross-check every
//!   pipeline exactly, in rational arithmetic.
//!
//! All coefficients are exact: Laurent polynomials in the `q[i,j]` over the
//! rationals. There is no floating point anywhere in the engine.

pub mod bracket;
pub mod classical;
pub mod cli;
pub mod context;
pub mod element;
pub mod epoche;
pub mod error;
pub mod gen;
pub mod hamsys;
pub mod hj;
pub mod legendre;
pub mod monomial;
pub mod parse;
pub mod problem;
pub mod qcoeff;
pub mod verify;
pub mod weight;

pub use context::{Context, QAssignment};
pub use element::Element;
pub use error::{EngineError, Result};
pub use gen::GenId;
pub use monomial::Monomial;
pub use qcoeff::{QMono, QPoly, Rat};
pub use weight::{swap_factor, BraidWeight, MultiIndex};
