//! Leader election and topology recognition in anonymous colored networks
//! with port labels.
//!
//! [`netmodel`] holds networks and quotient graphs, [`views`] the hash-consed
//! truncated views, [`engine`] a synchronous round executor, [`protocol`] the
//! distributed algorithm, [`oracle`] the centralized reference answers and
//! [`generators`] the network families used in experiments.

pub mod netmodel;
pub mod views;
pub mod engine;
pub mod oracle;
pub mod protocol;
pub mod generators;
