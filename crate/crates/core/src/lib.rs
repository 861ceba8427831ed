//! Quantifies how word-order grammars trade off Dependency Locality (short
//! head-dependent distances) against Information Locality (mutually predictive
//! adjacent words), maps the Pareto frontier of counterfactual ordering
//! grammars per corpus, and fits an Ornstein-Uhlenbeck model of trait
//! evolution on dated language trees.
//!
//! The crate is organized along the pipeline:
//!
//! * [`conllu`] — CoNLL-U treebank parsing, validation, train/held-out splits
//! * [`grammar`] — ordering grammars: linearization, mutation, fitting
//! * [`metrics`] — dependency length, bigram mutual information, usage statistics
//! * [`optimize`] — baseline sampling, hill climbing, the efficiency plane
//! * [`pareto`] — non-dominated frontier, constrained spline, kernel smoothing
//! * [`phylo`] — dated trees, OU likelihood and variants, Metropolis sampling

pub mod conllu;
pub mod grammar;
pub mod metrics;
pub mod optimize;
pub mod pareto;
pub mod phylo;

mod seed;

pub use seed::derive_seed;
