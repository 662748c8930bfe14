//! IO, experiment drivers, and CLI plumbing around `cdc-core`.

pub mod csv;
pub mod experiments;
