//! Ontology-to-tools compilation.
//!
//! A T-Box is parsed ([`rdf`]), reduced to a machine-readable contract
//! ([`schema`]), compiled into typed tools and an iteration plan
//! ([`compiler`]), and executed with call-time constraint checks
//! ([`runtime`]) behind a JSON-RPC tool endpoint ([`mcp`]). A scripted agent
//! ([`runner`]) drives the endpoint from traces, [`grounder`] aligns minted
//! IRIs with a reference graph, and [`eval`] scores graph-recoverable
//! records against ground truth.

pub mod compiler;
pub mod eval;
pub mod grounder;
pub mod mcp;
pub mod rdf;
pub mod runner;
pub mod runtime;
pub mod schema;
