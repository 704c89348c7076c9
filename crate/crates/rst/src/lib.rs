//! A small verification kernel for a reduced set theory.
//!
//! The crate provides the prefix-notation formula language ([`syntax`]),
//! a Hilbert-style proof checker with derived rules ([`kernel`]), the
//! axiom schemas and theory extensions ([`schemas`]), elimination of
//! defined symbols ([`elaborator`]), hereditarily finite sets ([`hfset`])
//! and finite model checking over them ([`model`]).
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is
//! disabled; the `spin` feature then supplies the intern-table lock.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(not(any(feature = "std", feature = "spin")))]
compile_error!("enable either the `std` or the `spin` feature");

mod sync;

pub mod elaborator;
pub mod hfset;
pub mod kernel;
pub mod model;
pub mod schemas;
pub mod script;
pub mod syntax;

pub use hfset::HfSet;
pub use kernel::{check_proof, Justification, Proof, Step, Verdict};

pub use schemas::{SchemaId, Theory};
pub use syntax::{Formula, Signature, Term, Variable};
