//! Command-line front end for the hyperbolic-surface toolkit: builds
//! groups, samples limit sets, hunts zeta zeros, fits counting
//! exponents, and integrates the cylinder flow, writing CSV/JSON/SVG
//! plus a manifest that lets any run be replayed byte-for-byte.

pub mod cache;
pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod groups_io;
pub mod manifest;
pub mod svg;

pub use commands::{execute, init_threads, rerun, CommandKind, RerunReport};
pub use config::RunConfig;
pub use error::CliError;
pub use manifest::RunManifest;
