//! Wave propagation through truncated periodic media in one dimension.
//!
//! The crate computes, for a periodic potential cut off after `N` periods:
//!
//! * the monodromy matrix and its Chebyshev-recurrence powers ([`transfer`]),
//! * the Floquet discriminant, Bloch dispersion, spectral bands and group
//!   velocity ([`spectrum`]),
//! * reflection/transmission coefficients of the finite slab and of the
//!   semi-infinite medium, transparency points and gap decay rates
//!   ([`scattering`]),
//! * a time-domain leapfrog simulation of a pulse hitting the slab, with a
//!   conserved-energy ledger split into reflected / in-slab / transmitted
//!   parts ([`timedomain`]).
//!
//! Potentials are one period of a profile: delta terms plus piecewise-smooth
//! parts, all scaled by a common amplitude ([`potentials`]).  The built-in
//! verification suite lives in [`verify`].

pub mod potentials;
pub mod scattering;
pub mod spectrum;
pub mod timedomain;
pub mod transfer;
pub mod verify;

pub use potentials::{DeltaTerm, PotentialSpec, Profile, SmoothPiece, SpecError, Truncation};
pub use transfer::{Frequency, Mat2, TransferError};
