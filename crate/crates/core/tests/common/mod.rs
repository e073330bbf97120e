//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod analysis;
pub mod augment;
pub mod metrics;
pub mod seq2seq;
