//! Core library for desk-scale experiments on quadratic twist families
//! `E_d : dy^2 = x^3 + Ax + B` having a nontorsion rational point of
//! almost-minimal canonical height.
//!
//! The crate is organised around the pipeline used by the `twistlab` CLI:
//!
//! * [`arith`] — 64-bit factorization, Möbius/square-free tests, the
//!   Kronecker symbol and fundamental discriminants;
//! * [`curve`] — exact twist models, projective points, the group law and
//!   naive/canonical heights;
//! * [`family`] — evaluation of `Q(u,v,w) = v F(u, vw^2)`, region membership,
//!   triple enumeration and the per-`d` census;
//! * [`moments`] — second moments, the diagonal term two ways, and
//!   sign-restricted first moments;
//! * [`sieve`] — the square-free sieve toolbox: `rho`, weighted main terms,
//!   `N_{w,l}` / `V_{w,l}` counts and the derived constant chain;
//! * [`signs`] — root numbers of twists and residue-class sign structure.
//!
//! Everything here is `no_std` + `alloc`; IO, networking and the CLI live in
//! the companion `twistlab-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "oracle"))]
extern crate std;

pub mod arith;
pub mod curve;
pub mod family;
pub mod interval;
pub mod moments;
pub mod sieve;
pub mod signs;

mod mathf;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use curve::{CurveParams, ProjectivePoint, TwistedCurve};
pub use family::{Alpha, FamilyRecord, RegionMode, RegionParams, Triple};
