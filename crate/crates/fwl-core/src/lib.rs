//! Numerical laboratory for convex cocompact hyperbolic surface quotients.
//!
//! The crate builds Schottky and bent (quasifuchsian) groups acting on the
//! unit disk / Riemann sphere, samples their limit sets, estimates the limit
//! set dimension three independent ways (box counting, orbital counting,
//! largest real zero of a truncated Selberg zeta), counts zeta zeros in
//! rectangles by the argument principle, tests fractal Weyl-type counting
//! bounds along the imaginary axis, and implements the explicit phase-space
//! model of the hyperbolic cylinder (trapped sets, escape functions, radial
//! linearization at fiber infinity).
//!
//! The crate is `no_std`-compatible (`alloc` required): build with
//! `--no-default-features --features libm` for a no_std target.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cylinder;
mod fit;
pub mod groups;
pub mod limitset;
pub mod moebius;
pub mod weyl;
pub mod zeta;

pub use num_complex::Complex64;
