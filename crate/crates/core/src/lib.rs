//! Fault localization for a small Java-like imperative language.
//!
//! A program annotated with a postcondition is parsed, turned into a control
//! flow graph, unrolled and put in dynamic single assignment form. Given a
//! counterexample, the localizer searches for minimal sets of branch
//! deviations that make the run satisfy the postcondition and, for each path
//! of interest, computes the minimal correction subsets of its constraint
//! system.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cfg;
pub mod frontend;
pub mod input;
pub mod interp;
mod loc;
pub mod locfaults;
pub mod mcs;
pub mod pathgen;
pub mod solver;
#[cfg(test)]
mod testgen;

pub use loc::LocRef;
