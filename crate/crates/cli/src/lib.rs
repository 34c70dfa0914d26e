//! Library half of the command-line front end: the versioned JSON
//! workspace format and the command runner. The binary in `main.rs` is a
//! thin argument-parsing shell around [`run::run`], and the integration
//! tests drive the same code paths directly.

pub mod format;
pub mod run;
