//! Thin client for the qpmut service. The transport is pluggable so the
//! command line can talk to a router in the same process or to a server.

use std::future::Future;

use serde_json::{json, Value};

pub const BUDGET_HEADER: &str = "x-qpmut-budget-exhausted";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub budget_exhausted: bool,
    pub body: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// The service answered with an error document.
    #[error("{code}: {detail}")]
    Api { status: u16, code: String, detail: String, budget_exhausted: bool },
    #[error("transport: {0}")]
    Transport(String),
}

impl ClientError {
    pub fn code(&self) -> &str {
        match self {
            ClientError::Api { code, .. } => code,
            ClientError::Transport(_) => "Transport",
        }
    }
}

pub trait Transport: Send + Sync {
    fn send(&self, method: Method, path: &str, body: Option<Value>) -> impl Future<Output = Result<Reply, ClientError>> + Send;
}

#[derive(Debug, Clone)]
pub struct HttpTransport {
    base: String,
    http: reqwest::Client,
}

impl HttpTransport {
    /// `base` like `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        HttpTransport { base: base.into().trim_end_matches('/').to_string(), http: reqwest::Client::new() }
    }
}

impl Transport for HttpTransport {
    async fn send(&self, method: Method, path: &str, body: Option<Value>) -> Result<Reply, ClientError> {
        let url = format!("{}{}", self.base, path);
        let req = match method {
            Method::Get => self.http.get(url),
            Method::Post => self.http.post(url).json(&body.unwrap_or(Value::Null)),
        };
        let resp = req.send().await.map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let budget_exhausted = resp.headers().contains_key(BUDGET_HEADER);
        let bytes = resp.bytes().await.map_err(|e| ClientError::Transport(e.to_string()))?;
        let body = serde_json::from_slice(&bytes).map_err(|e| ClientError::Transport(format!("bad response body: {e}")))?;
        Ok(Reply { status, budget_exhausted, body })
    }
}

#[derive(Debug, Clone)]
pub struct Client<T> {
    transport: T,
}

impl Client<HttpTransport> {
    pub fn http(base: impl Into<String>) -> Self {
        Client::new(HttpTransport::new(base))
    }
}

impl<T: Transport> Client<T> {
    pub fn new(transport: T) -> Self {
        Client { transport }
    }

    async fn call(&self, method: Method, path: &str, body: Option<Value>) -> Result<Value, ClientError> {
        let r = self.transport.send(method, path, body).await?;
        if (200..300).contains(&r.status) {
            return Ok(r.body);
        }
        let text = |k: &str| r.body.get(k).and_then(Value::as_str).unwrap_or_default().to_string();
        Err(ClientError::Api { status: r.status, code: text("error"), detail: text("detail"), budget_exhausted: r.budget_exhausted })
    }

    /// `request` is the op body: `{"input": …}` plus the op's flags.
    pub async fn op(&self, op: &str, request: Value) -> Result<Value, ClientError> {
        self.call(Method::Post, &format!("/ops/{op}"), Some(request)).await
    }

    pub async fn create_session(&self, state: Value) -> Result<Value, ClientError> {
        self.call(Method::Post, "/sessions", Some(state)).await
    }

    pub async fn session(&self, id: &str) -> Result<Value, ClientError> {
        self.call(Method::Get, &format!("/sessions/{id}"), None).await
    }

    pub async fn mutate(&self, id: &str, kind: &str, vertex: u32) -> Result<Value, ClientError> {
        self.call(Method::Post, &format!("/sessions/{id}/mutate"), Some(json!({"kind": kind, "vertex": vertex}))).await
    }

    pub async fn flip(&self, id: &str, arc: &str) -> Result<Value, ClientError> {
        self.call(Method::Post, &format!("/sessions/{id}/mutate"), Some(json!({"kind": "flip", "arc": arc}))).await
    }

    pub async fn undo(&self, id: &str) -> Result<Value, ClientError> {
        self.call(Method::Post, &format!("/sessions/{id}/undo"), None).await
    }

    pub async fn history(&self, id: &str) -> Result<Value, ClientError> {
        self.call(Method::Get, &format!("/sessions/{id}/history"), None).await
    }

    pub async fn analysis(&self, id: &str, bound: usize) -> Result<Value, ClientError> {
        self.call(Method::Get, &format!("/sessions/{id}/analysis?bound={bound}"), None).await
    }
}
