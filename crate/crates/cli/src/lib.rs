//! Drivers around the spectral forge: the grid sizing policy, sweep
//! orchestration, and the on-disk formats (CSV tables, certificate files).

pub mod certio;
pub mod config;
pub mod policy;
pub mod sweep;
