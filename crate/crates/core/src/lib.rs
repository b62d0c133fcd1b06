//! Exact arithmetic for strong external difference families in finite
//! abelian groups: a battery of nonexistence rules, character spectra,
//! and a brute-force search for small orders.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod cyclotomic;
pub mod groups;
pub mod numtheory;
pub mod rules;
pub mod sedf;
pub mod spectra;
