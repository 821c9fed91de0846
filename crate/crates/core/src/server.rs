//! Interactive proof sessions over newline-delimited JSON.
//!
//! Each request is one line `{"id": n, "method": m, "params": {...}}`; each
//! response is one line `{"id": n, "result": ...}` or
//! `{"id": n, "error": {"reason": r, "message": s, "span"?: {start, end}}}`.
//! Object keys are emitted in sorted order.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde_json::{json, Value};

use crate::driver::syntax_code;
use crate::elab::command::elab_statement;
use crate::elab::ElabOptions;
use crate::env::Environment;
use crate::kernel::TypeChecker;
use crate::prelude::{load_prelude, prelude_digest};
use crate::syntax::parser::{parse_statement, parse_tactics};
use crate::syntax::{Span, SyntaxError};
use crate::tactic::{ProofState, TacticError, TacticErrorKind};
use crate::term::MVarId;

pub const SERVER_NAME: &str = "microprover";
pub const UNDO_LIMIT: usize = 200;

/// A structured error reply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolError {
    pub reason: String,
    pub message: String,
    pub span: Option<Span>,
}

impl ProtocolError {
    fn new(reason: &str, message: impl Into<String>) -> Self {
        ProtocolError {
            reason: reason.into(),
            message: message.into(),
            span: None,
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({"reason": self.reason, "message": self.message});
        if let Some(s) = self.span {
            v["span"] = json!({"start": s.start, "end": s.end});
        }
        v
    }
}

impl From<SyntaxError> for ProtocolError {
    fn from(e: SyntaxError) -> Self {
        ProtocolError {
            reason: syntax_code(e.kind).into(),
            message: e.message,
            span: Some(e.span),
        }
    }
}

impl From<TacticError> for ProtocolError {
    fn from(e: TacticError) -> Self {
        ProtocolError {
            reason: e.kind.reason().into(),
            message: e.message,
            span: Some(e.span),
        }
    }
}

type PResult<T> = Result<T, ProtocolError>;

struct Session {
    state: ProofState,
    undo: VecDeque<ProofState>,
}

pub struct Server {
    env: Environment,
    digest: String,
    next_id: AtomicU64,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    undo_limit: usize,
}

impl Default for Server {
    fn default() -> Self {
        Server::new()
    }
}

impl Server {
    pub fn new() -> Server {
        Server::with_env(load_prelude())
    }

    pub fn with_env(env: Environment) -> Server {
        Server {
            env,
            digest: prelude_digest(),
            next_id: AtomicU64::new(1),
            sessions: Mutex::new(HashMap::new()),
            undo_limit: UNDO_LIMIT,
        }
    }

    pub fn with_undo_limit(mut self, n: usize) -> Server {
        self.undo_limit = n;
        self
    }

    /// Handles one request line and returns the response line (no newline).
    pub fn handle_line(&self, line: &str) -> String {
        let resp = match serde_json::from_str::<Value>(line) {
            Ok(v) => self.handle(&v),
            Err(e) => json!({
                "id": Value::Null,
                "error": ProtocolError::new("MalformedRequest", e.to_string()).to_json(),
            }),
        };
        resp.to_string()
    }

    pub fn handle(&self, req: &Value) -> Value {
        let id = req.get("id").cloned().unwrap_or(Value::Null);
        let method = req.get("method").and_then(Value::as_str);
        let params = req.get("params").cloned().unwrap_or_else(|| json!({}));
        let out = match method {
            None => Err(ProtocolError::new("MalformedRequest", "missing 'method'")),
            Some(m) => self.dispatch(m, &params),
        };
        match out {
            Ok(result) => json!({"id": id, "result": result}),
            Err(e) => json!({"id": id, "error": e.to_json()}),
        }
    }

    fn dispatch(&self, method: &str, params: &Value) -> PResult<Value> {
        match method {
            "initialize" => Ok(json!({
                "name": SERVER_NAME,
                "version": env!("CARGO_PKG_VERSION"),
                "preludeDigest": self.digest,
            })),
            "startSession" => self.start_session(str_param(params, "statementSource")?),
            "applyTactic" => {
                let sid = str_param(params, "sessionId")?;
                let src = str_param(params, "tacticSource")?;
                self.with_session(sid, |s| self.apply_tactic(s, src))
            }
            "undo" => self.with_session(str_param(params, "sessionId")?, |s| self.undo(s)),
            "prettyGoal" => {
                let sid = str_param(params, "sessionId")?;
                let gid = params
                    .get("goalId")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| ProtocolError::new("MalformedParams", "missing numeric 'goalId'"))?;
                self.with_session(sid, |s| {
                    let g = MVarId(gid);
                    if !s.state.goals.contains(&g) {
                        return Err(ProtocolError::new("UnknownGoal", format!("no open goal {gid}")));
                    }
                    Ok(serde_json::to_value(s.state.goal_report(g)).expect("goal report"))
                })
            }
            "endSession" => {
                let sid = str_param(params, "sessionId")?;
                match self.sessions.lock().expect("sessions").remove(sid) {
                    Some(_) => Ok(json!({"ended": sid})),
                    None => Err(unknown_session(sid)),
                }
            }
            other => Err(ProtocolError::new("UnknownMethod", format!("unknown method '{other}'"))),
        }
    }

    fn start_session(&self, src: &str) -> PResult<Value> {
        let st = parse_statement(src)?;
        let (lctx, target) = elab_statement(&self.env, &st.binders, &st.statement, ElabOptions::default())
            .map_err(|e| ProtocolError::from(TacticError::from(e)))?;
        let state = ProofState::new(&self.env, &lctx, &target).map_err(|e| ProtocolError {
            reason: TacticErrorKind::Elab(crate::elab::ElabErrorKind::Kernel).reason().into(),
            message: e.to_string(),
            span: Some(st.span),
        })?;
        let sid = format!("s{}", self.next_id.fetch_add(1, Ordering::SeqCst));
        let goals = state.goal_reports();
        self.sessions.lock().expect("sessions").insert(
            sid.clone(),
            Arc::new(Mutex::new(Session {
                state,
                undo: VecDeque::new(),
            })),
        );
        Ok(json!({"sessionId": sid, "goals": goals}))
    }

    /// Runs `f` holding the session's own lock, so requests for one session
    /// are serialized while other sessions proceed.
    fn with_session<T>(&self, sid: &str, f: impl FnOnce(&mut Session) -> PResult<T>) -> PResult<T> {
        let s = self
            .sessions
            .lock()
            .expect("sessions")
            .get(sid)
            .cloned()
            .ok_or_else(|| unknown_session(sid))?;
        let mut guard = s.lock().expect("session");
        f(&mut guard)
    }

    fn apply_tactic(&self, s: &mut Session, src: &str) -> PResult<Value> {
        let start = Instant::now();
        let tacs = parse_tactics(src)?;
        let next = s.state.run_all(&tacs)?;
        if next.is_solved() && !next.used_sorry {
            recheck_proof(&next)?;
        }
        let prev = std::mem::replace(&mut s.state, next);
        s.undo.push_back(prev);
        if s.undo.len() > self.undo_limit {
            s.undo.pop_front();
        }
        Ok(json!({
            "goals": s.state.goal_reports(),
            "usedSorry": s.state.used_sorry,
            "closed": s.state.is_solved(),
            "elapsed": start.elapsed().as_secs_f64() * 1000.0,
        }))
    }

    fn undo(&self, s: &mut Session) -> PResult<Value> {
        let prev = s
            .undo
            .pop_back()
            .ok_or_else(|| ProtocolError::new("NothingToUndo", "no earlier state in this session"))?;
        s.state = prev;
        Ok(json!({
            "goals": s.state.goal_reports(),
            "usedSorry": s.state.used_sorry,
            "closed": s.state.is_solved(),
        }))
    }

    /// Serves requests from `input` until EOF, one response line per request.
    pub fn serve<R: BufRead, W: Write>(&self, input: R, mut output: W) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            writeln!(output, "{}", self.handle_line(&line))?;
            output.flush()?;
        }
        Ok(())
    }

    /// Accepts loopback TCP connections; each connection is served on its own thread.
    pub fn serve_tcp(self: Arc<Self>, port: u16) -> std::io::Result<()> {
        let listener = std::net::TcpListener::bind(("127.0.0.1", port))?;
        for stream in listener.incoming() {
            let stream = stream?;
            let server = Arc::clone(&self);
            std::thread::spawn(move || {
                let Ok(reader) = stream.try_clone() else {
                    return;
                };
                let _ = server.serve(std::io::BufReader::new(reader), stream);
            });
        }
        Ok(())
    }
}

/// Type-checks a finished proof in a fresh kernel context.
fn recheck_proof(st: &ProofState) -> PResult<()> {
    let kernel_err = |m: String| ProtocolError::new("KernelError", m);
    let proof = st.proof().ok_or_else(|| kernel_err("proof has unassigned holes".into()))?;
    let decl = st.mctx.decl(st.root);
    let mut tc = TypeChecker::with_context(&st.env, decl.lctx.clone());
    tc.check(&proof, &decl.ty).map_err(|e| kernel_err(e.to_string()))
}

fn str_param<'a>(params: &'a Value, key: &str) -> PResult<&'a str> {
    params
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ProtocolError::new("MalformedParams", format!("missing string '{key}'")))
}

fn unknown_session(sid: &str) -> ProtocolError {
    ProtocolError::new("UnknownSession", format!("unknown session '{sid}'"))
}
