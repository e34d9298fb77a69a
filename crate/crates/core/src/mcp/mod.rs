//! JSON-RPC 2.0 tool endpoint over newline-delimited stdio, and a client
//! for driving it in-process or as a child process.

mod client;
mod server;

pub use client::{Client, ClientError, Endpoint, LocalEndpoint, ProcessEndpoint};
pub use server::{
    serve, Server, FINALIZE_METHOD, INTERNAL_ERROR, INVALID_PARAMS, INVALID_REQUEST, METHOD_NOT_FOUND, NOT_INITIALIZED,
    PARSE_ERROR, PROTOCOL_VERSION,
};
