//! Experiment orchestration for blue-noise graph sampling: config-driven
//! runs, the analytic identity checker and SVG plot emission. The `gbn`
//! binary is a thin layer over this library so that integration tests can
//! drive the same code paths in-process.

pub mod config;
pub mod experiment;
pub mod plot;
pub mod theory;
