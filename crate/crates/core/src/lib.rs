//! Friends-and-strangers graphs `FS(X, Y)`.
//!
//! Exact component analysis at small `n`, exchangeability and its transfer
//! through embeddings, the structured gadget graphs used to certify
//! exchangeable pairs, embedding searches and their probabilistic
//! hypothesis, packing-based disconnection certificates, and seeded Monte
//! Carlo sweeps over pairs of random graphs.

pub mod dsu;
pub mod embed;
pub mod error;
pub mod exchange;
pub mod exec;
pub mod fs_graph;
pub mod gadgets;
pub mod graph;
pub mod lab;
pub mod packing;
pub mod perm;
pub mod seed;

pub use error::{FsError, Result};
pub use exchange::{ExchangeMode, ExchangeStatus, ExchangeVerdict};
pub use exec::Execution;
pub use fs_graph::{ComponentSummary, ComponentTable, FsInstance, PathSearch};
pub use graph::{Graph, NamedGraph};
pub use perm::Permutation;
