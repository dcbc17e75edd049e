//! Exact-arithmetic toolkit for planar point sets whose longest spanning
//! path, longest spanning cycle or longest perfect matching is unique and
//! noncrossing.
//!
//! Everything here is `no_std` (with `alloc`): rationals, certified square
//! roots, planar predicates, the one-dimensional characterizations, exact
//! maximum-structure solvers, the constructions and the structural checks.
//! File formats, rendering and the command line live in the `noncross`
//! crate.
#![no_std]

extern crate alloc;

pub mod constructions;
pub mod exactnum;
pub mod geometry;
pub mod line1d;
pub mod maxsolvers;
pub mod structprops;

pub use exactnum::{Interval, PrecisionPolicy, RadicalOrdering, Rat};
