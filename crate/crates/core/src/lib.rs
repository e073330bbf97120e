pub mod analysis;
pub mod augment;
pub mod cleanse;
pub mod cli;
pub mod corpus;
pub mod features;
pub mod metrics;
pub mod seq2seq;
pub mod stem;
pub mod text;
