//! Test support for the debunk workspace: brute-force oracles, seeded
//! generators and on-disk fixtures. Not part of the shipped pipeline.

pub mod checks;
pub mod fixtures;
pub mod gen;
pub mod oracle;
