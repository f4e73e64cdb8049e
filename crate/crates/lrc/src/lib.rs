//! Locally recoverable codes built as subfield-subcodes of J-affine variety
//! codes, with erasure-recovery procedures and brute-force parameter checks.

pub mod ambient;
pub mod config;
pub mod evalcode;
pub mod galois;
pub mod linalg;
pub mod locality;
pub mod metrics;
pub mod tables;
