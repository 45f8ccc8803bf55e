//! Exact classification and fusion rules for the irreducible modules of
//! the fixed-point subalgebra of a lattice vertex algebra under its
//! canonical involution, together with the analogous rules for the
//! one-free-boson fixed-point algebra and a symbolic verifier for the
//! leading terms of the twisted vertex operator expansion.
//!
//! All arithmetic is exact (big integers and big rationals); there is no
//! floating point anywhere in the crate.
//!
//! The main entry points are:
//!
//! * [`lattice::Lattice`] -- validated even positive-definite lattice with
//!   dual-coset bookkeeping,
//! * [`cocycle::CocycleContext`] -- the bilinear 2-cocycle data on the
//!   dual lattice and the commutator pairing,
//! * [`twisted::TwistedSector`] -- central characters of the finite
//!   Heisenberg-type group acting on twisted modules,
//! * [`vl::FusionContext`] -- module classification, fusion rules, fusion
//!   products and whole-algebra verification,
//! * [`m1::*`] -- fusion rules for the one-boson fixed-point algebra,
//! * [`fock::*`] -- exact truncated operator expansions on twisted Fock
//!   spaces.

pub mod cocycle;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod m1;
pub mod matrix;
pub mod presets;
pub mod twisted;
pub mod vl;

pub use error::{FusionError, Result};
pub use matrix::{Int, Rat};
