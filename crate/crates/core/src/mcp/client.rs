use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde_json::{json, Value};
use thiserror::Error;

use super::server::{Server, FINALIZE_METHOD, PROTOCOL_VERSION};
use crate::runtime::{CallOutcome, FinalizeOutcome};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("rpc error {code}: {message}")]
    Rpc { code: i64, message: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Protocol(String),
}

/// Something that answers one JSON-RPC request line with one response line.
pub trait Endpoint {
    fn exchange(&mut self, request: &str) -> Result<String, ClientError>;
}

/// Runs a [`Server`] in the same process.
pub struct LocalEndpoint {
    server: Server,
}

impl LocalEndpoint {
    pub fn new(server: Server) -> Self {
        LocalEndpoint { server }
    }

    pub fn server(&self) -> &Server {
        &self.server
    }

    pub fn into_server(self) -> Server {
        self.server
    }
}

impl Endpoint for LocalEndpoint {
    fn exchange(&mut self, request: &str) -> Result<String, ClientError> {
        self.server
            .handle_line(request)
            .ok_or_else(|| ClientError::Protocol("no response to request".into()))
    }
}

/// Talks to a server child process over its stdin/stdout.
pub struct ProcessEndpoint {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl ProcessEndpoint {
    pub fn spawn(program: impl Into<PathBuf>, args: &[String]) -> Result<Self, ClientError> {
        let program = program.into();
        let mut child = Command::new(&program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ClientError::Transport(format!("spawning {}: {e}", program.display())))?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ProcessEndpoint { child, stdin, stdout })
    }

    /// Closes the server's input and waits for it to exit.
    pub fn shutdown(mut self) -> Result<std::process::ExitStatus, ClientError> {
        self.stdin.take();
        self.child.wait().map_err(|e| ClientError::Transport(e.to_string()))
    }
}

impl Endpoint for ProcessEndpoint {
    fn exchange(&mut self, request: &str) -> Result<String, ClientError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| ClientError::Transport("server input closed".into()))?;
        stdin
            .write_all(request.as_bytes())
            .and_then(|_| stdin.write_all(b"\n"))
            .and_then(|_| stdin.flush())
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let mut line = String::new();
        let n = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        if n == 0 {
            return Err(ClientError::Transport("server closed its output".into()));
        }
        Ok(line.trim_end().to_string())
    }
}

impl Drop for ProcessEndpoint {
    fn drop(&mut self) {
        self.stdin.take();
        let _ = self.child.wait();
    }
}

/// Typed JSON-RPC client over any [`Endpoint`].
pub struct Client<E: Endpoint> {
    endpoint: E,
    next_id: i64,
}

impl<E: Endpoint> Client<E> {
    pub fn new(endpoint: E) -> Self {
        Client { endpoint, next_id: 1 }
    }

    pub fn endpoint(&self) -> &E {
        &self.endpoint
    }

    pub fn into_endpoint(self) -> E {
        self.endpoint
    }

    pub fn request(&mut self, method: &str, params: Value) -> Result<Value, ClientError> {
        let id = self.next_id;
        self.next_id += 1;
        let request = json!({"jsonrpc": "2.0", "id": id, "method": method, "params": params});
        let line = self.endpoint.exchange(&request.to_string())?;
        let response: Value = serde_json::from_str(&line).map_err(|e| ClientError::Protocol(format!("{e}: {line}")))?;
        if response.get("id") != Some(&json!(id)) {
            return Err(ClientError::Protocol(format!("response id mismatch: {line}")));
        }
        if let Some(err) = response.get("error") {
            return Err(ClientError::Rpc {
                code: err.get("code").and_then(Value::as_i64).unwrap_or(0),
                message: err
                    .get("message")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
            });
        }
        response
            .get("result")
            .cloned()
            .ok_or_else(|| ClientError::Protocol(format!("response without result: {line}")))
    }

    pub fn initialize(&mut self) -> Result<Value, ClientError> {
        self.request(
            "initialize",
            json!({"protocolVersion": PROTOCOL_VERSION, "clientInfo": {"name": "ontoforge-runner"}, "capabilities": {}}),
        )
    }

    pub fn list_tools(&mut self) -> Result<Vec<String>, ClientError> {
        let result = self.request("tools/list", json!({}))?;
        let tools = result
            .get("tools")
            .and_then(Value::as_array)
            .ok_or_else(|| ClientError::Protocol("tools/list without tools".into()))?;
        Ok(tools
            .iter()
            .filter_map(|t| t.get("name").and_then(Value::as_str).map(str::to_string))
            .collect())
    }

    pub fn call_tool(&mut self, name: &str, arguments: &Value) -> Result<CallOutcome, ClientError> {
        let result = self.request("tools/call", json!({"name": name, "arguments": arguments}))?;
        decode_text(&result)
    }

    pub fn finalize(&mut self) -> Result<FinalizeOutcome, ClientError> {
        let result = self.request(FINALIZE_METHOD, json!({}))?;
        decode_text(&result)
    }
}

fn decode_text<T: serde::de::DeserializeOwned>(result: &Value) -> Result<T, ClientError> {
    let text = result
        .pointer("/content/0/text")
        .and_then(Value::as_str)
        .ok_or_else(|| ClientError::Protocol(format!("tool result without text content: {result}")))?;
    serde_json::from_str(text).map_err(|e| ClientError::Protocol(format!("{e}: {text}")))
}
