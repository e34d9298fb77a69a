//! The `serve` subcommand driven over real stdin/stdout.

mod common;

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde_json::{json, Value};

use common::fixture;

struct Proc {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl Proc {
    fn spawn(workdir: &std::path::Path, extra: &[&str]) -> Proc {
        let mut child = Command::new(env!("CARGO_BIN_EXE_ontoforge"))
            .arg("serve")
            .arg("--tbox")
            .arg(fixture("synthesis_tbox.ttl"))
            .args(["--doc-id", "proc-test", "--workdir"])
            .arg(workdir)
            .args(extra)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().unwrap());
        Proc { child, stdin, stdout }
    }

    fn send(&mut self, line: &str) {
        let stdin = self.stdin.as_mut().unwrap();
        stdin.write_all(line.as_bytes()).unwrap();
        stdin.write_all(b"\n").unwrap();
        stdin.flush().unwrap();
    }

    fn recv(&mut self) -> Value {
        let mut line = String::new();
        assert!(
            self.stdout.read_line(&mut line).unwrap() > 0,
            "server closed its output"
        );
        serde_json::from_str(&line).unwrap()
    }

    fn call(&mut self, msg: Value) -> Value {
        self.send(&msg.to_string());
        self.recv()
    }

    fn close(mut self) -> std::process::ExitStatus {
        self.stdin.take();
        self.child.wait().unwrap()
    }
}

fn error_code(v: &Value) -> i64 {
    v["error"]["code"].as_i64().unwrap_or_else(|| panic!("no error in {v}"))
}

#[test]
fn scripted_session() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = Proc::spawn(dir.path(), &[]);

    let r = p.call(json!({"jsonrpc": "2.0", "id": 1, "method": "tools/list"}));
    assert_eq!(error_code(&r), -32002);

    let r =
        p.call(json!({"jsonrpc": "2.0", "id": 2, "method": "initialize", "params": {"protocolVersion": "2024-11-05"}}));
    assert_eq!(r["result"]["protocolVersion"], "2024-11-05");

    let r = p.call(json!({"jsonrpc": "2.0", "id": 3, "method": "tools/list"}));
    assert_eq!(r["result"]["tools"].as_array().unwrap().len(), 18);

    let r = p.call(json!({"jsonrpc": "2.0", "id": 4, "method": "tools/call",
        "params": {"name": "create_synthesis", "arguments": {"doc_id": "proc-test", "label": "S"}}}));
    assert_eq!(r["result"]["isError"], false);
    let body: Value = serde_json::from_str(r["result"]["content"][0]["text"].as_str().unwrap()).unwrap();
    assert_eq!(body["status"], "created");

    let r = p.call(json!({"jsonrpc": "2.0", "id": 5, "method": "tools/call", "params": {"name": "no_such_tool"}}));
    assert_eq!(error_code(&r), -32602);
    let r = p.call(json!({"jsonrpc": "2.0", "id": 6, "method": "resources/list"}));
    assert_eq!(error_code(&r), -32601);

    p.send("{not json");
    assert_eq!(error_code(&p.recv()), -32700);

    // a notification gets no reply, so the next line answers the ping
    p.send(&json!({"jsonrpc": "2.0", "method": "notifications/initialized"}).to_string());
    let r = p.call(json!({"jsonrpc": "2.0", "id": "ping-1", "method": "ping"}));
    assert_eq!(r["id"], "ping-1");

    assert!(p.close().success());
    assert!(dir.path().join("proc-test.ttl").exists());
    let log = std::fs::read_to_string(dir.path().join("proc-test.log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 1);
}

#[test]
fn survives_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = Proc::spawn(dir.path(), &[]);
    let junk = [
        "null",
        "[]",
        "[1,2]",
        "42",
        "\"str\"",
        "{\"jsonrpc\":\"1.0\",\"id\":1,\"method\":\"ping\"}",
        "{\"jsonrpc\":\"2.0\",\"id\":{},\"method\":\"ping\"}",
        "{\"jsonrpc\":\"2.0\",\"id\":1,\"method\":7}",
        "{\"jsonrpc\":\"2.0\",\"id\":1,\"method\":\"tools/call\",\"params\":[1]}",
        "\u{0}\u{1}",
        "{{{{",
        "}",
    ];
    for line in junk {
        p.send(line);
        let r = p.recv();
        assert!(r.get("error").is_some(), "{line:?} -> {r}");
    }
    // blank lines are skipped without a reply
    p.send("");
    p.send("   ");
    let r = p.call(json!({"jsonrpc": "2.0", "id": 8, "method": "ping"}));
    assert_eq!(r["id"], 8);
    // invalid UTF-8 is answered too
    p.stdin.as_mut().unwrap().write_all(b"\xff\xfe{\n").unwrap();
    assert_eq!(error_code(&p.recv()), -32700);
    let r = p.call(json!({"jsonrpc": "2.0", "id": 9, "method": "initialize"}));
    assert!(r.get("result").is_some());
    assert!(p.close().success());
}

#[test]
fn resumes_from_workdir() {
    let dir = tempfile::tempdir().unwrap();
    let create = json!({"jsonrpc": "2.0", "id": 2, "method": "tools/call",
        "params": {"name": "create_synthesis", "arguments": {"doc_id": "proc-test", "label": "S"}}});
    let mut p = Proc::spawn(dir.path(), &[]);
    p.call(json!({"jsonrpc": "2.0", "id": 1, "method": "initialize"}));
    p.call(create.clone());
    assert!(p.close().success());

    let mut p = Proc::spawn(dir.path(), &[]);
    p.call(json!({"jsonrpc": "2.0", "id": 1, "method": "initialize"}));
    let r = p.call(create);
    let body: Value = serde_json::from_str(r["result"]["content"][0]["text"].as_str().unwrap()).unwrap();
    assert_eq!(body["error_type"], "DuplicateCall");
    assert!(p.close().success());
}
