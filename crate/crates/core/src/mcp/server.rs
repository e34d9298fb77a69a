use std::io::{self, BufRead, Write};

use serde_json::{json, Map, Value};

use crate::compiler::{emit_manifest, Manifest};
use crate::runtime::{CallOutcome, RuntimeError, Session};

pub const PROTOCOL_VERSION: &str = "2024-11-05";
pub const FINALIZE_METHOD: &str = "ontoforge/finalize";

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;
pub const INTERNAL_ERROR: i64 = -32603;
pub const NOT_INITIALIZED: i64 = -32002;

struct RpcError {
    code: i64,
    message: String,
}

fn rpc_error(code: i64, message: impl Into<String>) -> RpcError {
    RpcError {
        code,
        message: message.into(),
    }
}

fn error_response(id: Value, err: RpcError) -> Value {
    json!({"jsonrpc": "2.0", "id": id, "error": {"code": err.code, "message": err.message}})
}

fn text_result(body: &impl serde::Serialize, is_error: bool) -> Value {
    let text = serde_json::to_string(body).expect("tool body serializes");
    json!({"content": [{"type": "text", "text": text}], "isError": is_error})
}

/// JSON-RPC front end owning one [`Session`].
pub struct Server {
    session: Session,
    manifest: Manifest,
    initialized: bool,
}

impl Server {
    pub fn new(session: Session) -> Self {
        let manifest = emit_manifest(session.toolset());
        Server {
            session,
            manifest,
            initialized: false,
        }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn into_session(self) -> Session {
        self.session
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    /// Handles one framed line; returns the response line, if any.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        if line.trim().is_empty() {
            return None;
        }
        let response = match serde_json::from_str::<Value>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => Some(error_response(
                Value::Null,
                rpc_error(PARSE_ERROR, format!("parse error: {e}")),
            )),
        };
        response.map(|v| serde_json::to_string(&v).expect("response serializes"))
    }

    /// Handles one decoded message. Notifications get no response.
    pub fn handle(&mut self, msg: Value) -> Option<Value> {
        let Value::Object(obj) = msg else {
            let what = if msg.is_array() {
                "batch requests are not supported"
            } else {
                "request must be an object"
            };
            return Some(error_response(Value::Null, rpc_error(INVALID_REQUEST, what)));
        };
        let id = match obj.get("id") {
            None => None,
            Some(id @ (Value::String(_) | Value::Null)) => Some(id.clone()),
            Some(Value::Number(n)) if n.is_i64() || n.is_u64() => Some(Value::Number(n.clone())),
            Some(_) => {
                return Some(error_response(
                    Value::Null,
                    rpc_error(INVALID_REQUEST, "id must be an integer or string"),
                ))
            }
        };
        if obj.get("jsonrpc").and_then(Value::as_str) != Some("2.0") {
            return Some(error_response(
                id.unwrap_or(Value::Null),
                rpc_error(INVALID_REQUEST, "jsonrpc must be \"2.0\""),
            ));
        }
        let Some(method) = obj.get("method").and_then(Value::as_str) else {
            return Some(error_response(
                id.unwrap_or(Value::Null),
                rpc_error(INVALID_REQUEST, "method must be a string"),
            ));
        };
        let Some(id) = id else {
            log::debug!("notification {method}");
            return None;
        };
        let empty = Value::Object(Map::new());
        let params = match obj.get("params") {
            None | Some(Value::Null) => &empty,
            Some(p @ Value::Object(_)) => p,
            Some(_) => {
                return Some(error_response(
                    id,
                    rpc_error(INVALID_PARAMS, "params must be an object"),
                ))
            }
        };
        let result = self.dispatch(method, params);
        Some(match result {
            Ok(result) => json!({"jsonrpc": "2.0", "id": id, "result": result}),
            Err(err) => error_response(id, err),
        })
    }

    fn dispatch(&mut self, method: &str, params: &Value) -> Result<Value, RpcError> {
        match method {
            "initialize" => {
                if let Some(v) = params.get("protocolVersion").and_then(Value::as_str) {
                    if v != PROTOCOL_VERSION {
                        log::warn!("client protocol version {v} differs from {PROTOCOL_VERSION}");
                    }
                }
                self.initialized = true;
                Ok(json!({
                    "protocolVersion": PROTOCOL_VERSION,
                    "serverInfo": {"name": "ontoforge", "version": env!("CARGO_PKG_VERSION")},
                    "capabilities": {"tools": {}}
                }))
            }
            "ping" => Ok(json!({})),
            "tools/list" | "tools/call" | FINALIZE_METHOD if !self.initialized => {
                Err(rpc_error(NOT_INITIALIZED, "server not initialized"))
            }
            "tools/list" => Ok(self.tools_list()),
            "tools/call" => self.tools_call(params),
            FINALIZE_METHOD => {
                let outcome = self.session.finalize().map_err(internal)?;
                Ok(text_result(&outcome, !outcome.is_done()))
            }
            other => Err(rpc_error(METHOD_NOT_FOUND, format!("method not found: {other}"))),
        }
    }

    fn tools_list(&self) -> Value {
        let tools: Vec<Value> = self
            .manifest
            .tools
            .iter()
            .map(|t| json!({"name": t.name, "description": t.doc, "inputSchema": t.input_schema}))
            .collect();
        json!({"tools": tools})
    }

    fn tools_call(&mut self, params: &Value) -> Result<Value, RpcError> {
        let name = params
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| rpc_error(INVALID_PARAMS, "tools/call requires a string 'name'"))?;
        let args = match params.get("arguments") {
            None | Some(Value::Null) => Value::Object(Map::new()),
            Some(a) => a.clone(),
        };
        match self.session.invoke(name, &args) {
            Ok(CallOutcome::Ok(r)) => Ok(text_result(&r, false)),
            Ok(CallOutcome::Violation(v)) => Ok(text_result(&v, true)),
            Err(e @ (RuntimeError::UnknownTool(_) | RuntimeError::ArgumentsNotObject)) => {
                Err(rpc_error(INVALID_PARAMS, e.to_string()))
            }
            Err(e) => Err(internal(e)),
        }
    }
}

fn internal(e: RuntimeError) -> RpcError {
    log::error!("{e}");
    rpc_error(INTERNAL_ERROR, e.to_string())
}

/// Newline-delimited request loop. Returns at end of input; invalid UTF-8
/// is decoded lossily and answered like any other malformed line.
pub fn serve<R: BufRead, W: Write>(server: &mut Server, mut input: R, mut output: W) -> io::Result<()> {
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if input.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        let line = String::from_utf8_lossy(&buf);
        if let Some(response) = server.handle_line(line.trim_end_matches(['\n', '\r'])) {
            output.write_all(response.as_bytes())?;
            output.write_all(b"\n")?;
            output.flush()?;
        }
    }
}
