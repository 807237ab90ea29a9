//! The `qpmut` command line. Every subcommand is a request to the service:
//! by default to a router living in this process, with `--server` to a
//! running `qpmut serve`.

use std::io::Read;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use clap::{Args, Parser, Subcommand, ValueEnum};
use http_body_util::BodyExt;
use qpmut_client::{Client, ClientError, HttpTransport, Method, Reply, Transport};
use serde_json::{json, Value};
use tower::ServiceExt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Sends requests straight into an in-memory router.
#[derive(Clone)]
pub struct InProcess {
    router: axum::Router,
}

impl InProcess {
    pub fn new(truncation: usize) -> Self {
        InProcess { router: qpmut_service::router(Arc::new(qpmut_service::AppState::new(truncation))) }
    }
}

impl Transport for InProcess {
    async fn send(&self, method: Method, path: &str, body: Option<Value>) -> Result<Reply, ClientError> {
        let method = match method {
            Method::Get => "GET",
            Method::Post => "POST",
        };
        let req = axum::http::Request::builder()
            .method(method)
            .uri(path)
            .header("content-type", "application/json")
            .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let resp = self.router.clone().oneshot(req).await.map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let budget_exhausted = resp.headers().contains_key(qpmut_client::BUDGET_HEADER);
        let bytes = resp.into_body().collect().await.map_err(|e| ClientError::Transport(e.to_string()))?.to_bytes();
        let body = serde_json::from_slice(&bytes).map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(Reply { status, budget_exhausted, body })
    }
}

#[derive(Debug, Parser)]
#[command(name = "qpmut", version, about = "Quiver and QP mutation toolkit")]
pub struct Cli {
    /// Send requests to a running `qpmut serve` instead of in-process.
    #[arg(long, global = true, env = "QPMUT_SERVER")]
    pub server: Option<String>,
    /// Truncation order for potentials.
    #[arg(long, global = true, env = "QPMUT_TRUNCATION")]
    pub truncation: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// Input JSON file; `-` or absent reads standard input.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub max_quivers: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Fz,
    Dwz,
    Left,
    Right,
    Flip,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate a quiver, QP, graded QP or triangulation.
    Mutate {
        #[arg(long, value_enum, default_value = "fz")]
        kind: Kind,
        #[arg(long)]
        vertex: Option<u32>,
        #[arg(long)]
        arc: Option<String>,
        #[command(flatten)]
        input: InputArg,
    },
    /// Split off the trivial part of a QP.
    Reduce(InputArg),
    /// Dimension of the Jacobian algebra (or of a presented algebra).
    JacobianDim {
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        input: InputArg,
    },
    /// Rigidity of the potential.
    Rigid {
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        input: InputArg,
    },
    /// Graded QP of an algebra presented by quiver and relations.
    FromAlgebra(InputArg),
    /// Algebra cut out by the degree-1 arrows of a graded QP.
    ToAlgebra(InputArg),
    /// Preprojective algebra of an acyclic quiver.
    Preprojective(InputArg),
    /// QP of a triangulation.
    SurfaceQuiver(InputArg),
    /// Flip an arc of a triangulation.
    Flip {
        #[arg(long)]
        arc: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Mutation class up to isomorphism (or labeled).
    MutationClass {
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        labeled: bool,
        /// One member per line instead of a single document.
        #[arg(long)]
        ndjson: bool,
        /// Continue an enumeration saved with `--ndjson`.
        #[arg(long, conflicts_with = "input")]
        resume: Option<PathBuf>,
        #[command(flatten)]
        input: InputArg,
    },
    /// Look for an acyclic quiver in the mutation class.
    Acyclic {
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        input: InputArg,
    },
    /// Certify acyclic cluster type: rigid potential and mutation-acyclic quiver.
    ClusterType {
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        input: InputArg,
    },
    /// Search for left/right graded mutations from one graded QP to another.
    SearchEquiv {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        from: PathBuf,
        to: PathBuf,
    },
    /// Parse and print in normal form.
    Normalize(InputArg),
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Load sessions from this file at start, save them on shutdown.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, error: &str, detail: &str) -> Self {
        let body = json!({"error": error, "detail": detail});
        Outcome { code, stdout: String::new(), stderr: render(&body) + "\n" }
    }
}

fn render(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialize")
}

fn read_input(path: Option<&PathBuf>) -> Result<Value, Outcome> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Outcome::fail(EXIT_INPUT, "Io", &format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Outcome::fail(EXIT_INPUT, "Io", &e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Outcome::fail(EXIT_INPUT, "Parse", &e.to_string()))
}

fn limits_json(req: &mut Value, l: &LimitArgs) {
    if let Some(m) = l.max_quivers {
        req["max_quivers"] = json!(m);
    }
    if let Some(d) = l.max_depth {
        req["max_depth"] = json!(d);
    }
}

/// NDJSON class dump from the `mutation-class` response.
fn class_to_ndjson(class: &Value) -> String {
    let members = class["members"].as_array().cloned().unwrap_or_default();
    let mut edges: Vec<Vec<Value>> = vec![Vec::new(); members.len()];
    for e in class["edges"].as_array().into_iter().flatten() {
        let (from, v, to) = (e[0].as_u64().unwrap_or(0) as usize, &e[1], e[2].as_u64().unwrap_or(0) as usize);
        if from < members.len() && to < members.len() {
            edges[from].push(json!({"vertex": v, "to": members[to]["key"]}));
        }
    }
    members
        .iter()
        .zip(edges)
        .map(|(m, e)| {
            let line = json!({"key": m["key"], "quiver": m["quiver"], "depth": m["depth"], "edges": e});
            render(&line) + "\n"
        })
        .collect()
}

fn error_outcome(e: ClientError) -> Outcome {
    match e {
        ClientError::Api { status, code, detail, budget_exhausted } => {
            let exit = if budget_exhausted {
                EXIT_BUDGET
            } else if status == 409 {
                EXIT_PRECONDITION
            } else {
                EXIT_INPUT
            };
            Outcome::fail(exit, &code, &detail)
        }
        ClientError::Transport(d) => Outcome::fail(EXIT_INPUT, "Transport", &d),
    }
}

/// The request for a subcommand, or the early outcome of reading its input.
fn request(cmd: &Command) -> Result<(&'static str, Value, bool), Outcome> {
    let with = |input: &InputArg| read_input(input.input.as_ref()).map(|v| json!({"input": v}));
    Ok(match cmd {
        Command::Mutate { kind, vertex, arc, input } => {
            let mut r = with(input)?;
            let k = match kind {
                Kind::Fz => "fz",
                Kind::Dwz => "dwz",
                Kind::Left => "left",
                Kind::Right => "right",
                Kind::Flip => "flip",
            };
            r["kind"] = json!(k);
            if let Some(v) = vertex {
                r["vertex"] = json!(v);
            }
            if let Some(a) = arc {
                r["arc"] = json!(a);
            }
            ("mutate", r, false)
        }
        Command::Reduce(i) => ("reduce", with(i)?, false),
        Command::JacobianDim { bound, input } => {
            let mut r = with(input)?;
            r["bound"] = json!(bound);
            ("jacobian-dim", r, false)
        }
        Command::Rigid { bound, input } => {
            let mut r = with(input)?;
            r["bound"] = json!(bound);
            ("rigid", r, false)
        }
        Command::FromAlgebra(i) => ("from-algebra", with(i)?, false),
        Command::ToAlgebra(i) => ("to-algebra", with(i)?, false),
        Command::Preprojective(i) => ("preprojective", with(i)?, false),
        Command::SurfaceQuiver(i) => ("surface-quiver", with(i)?, false),
        Command::Flip { arc, input } => {
            let mut r = with(input)?;
            r["arc"] = json!(arc);
            ("flip", r, false)
        }
        Command::MutationClass { limits, labeled, ndjson, resume, input } => {
            let mut r = match resume {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Outcome::fail(EXIT_INPUT, "Io", &format!("{}: {e}", path.display())))?;
                    let lines = text
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(serde_json::from_str)
                        .collect::<Result<Vec<Value>, _>>()
                        .map_err(|e| Outcome::fail(EXIT_INPUT, "Parse", &e.to_string()))?;
                    json!({"input": {"resume": lines}})
                }
                None => with(input)?,
            };
            limits_json(&mut r, limits);
            if *labeled {
                r["labeled"] = json!(true);
            }
            ("mutation-class", r, *ndjson)
        }
        Command::Acyclic { limits, input } => {
            let mut r = with(input)?;
            limits_json(&mut r, limits);
            ("acyclic", r, false)
        }
        Command::ClusterType { bound, limits, input } => {
            let mut r = with(input)?;
            r["bound"] = json!(bound);
            limits_json(&mut r, limits);
            ("cluster-type", r, false)
        }
        Command::SearchEquiv { depth, from, to } => {
            let (f, t) = (read_input(Some(from))?, read_input(Some(to))?);
            ("search-equiv", json!({"input": f, "target": t, "depth": depth}), false)
        }
        Command::Normalize(i) => ("normalize", with(i)?, false),
        Command::Serve { .. } => unreachable!("serve is handled before dispatch"),
    })
}

async fn dispatch<T: Transport>(client: &Client<T>, cli: &Cli) -> Outcome {
    let (op, mut req, ndjson) = match request(&cli.command) {
        Ok(r) => r,
        Err(o) => return o,
    };
    if let Some(n) = cli.truncation {
        req["truncation"] = json!(n);
    }
    match client.op(op, req).await {
        Ok(v) if ndjson => Outcome::ok(class_to_ndjson(&v)),
        Ok(v) => Outcome::ok(render(&v) + "\n"),
        Err(e) => error_outcome(e),
    }
}

/// Runs one invocation; `serve` blocks until ctrl-c.
pub async fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(EXIT_INPUT, "Usage", text.trim()),
            };
        }
    };
    let truncation = cli.truncation.unwrap_or_else(qpmut_service::truncation_from_env);
    if let Command::Serve { port, host, snapshot } = &cli.command {
        let listener = match tokio::net::TcpListener::bind((host.as_str(), *port)).await {
            Ok(l) => l,
            Err(e) => return Outcome::fail(EXIT_INPUT, "Io", &e.to_string()),
        };
        let config = qpmut_service::ServeConfig { truncation, snapshot: snapshot.clone() };
        return match qpmut_service::serve(listener, config).await {
            Ok(()) => Outcome::ok(String::new()),
            Err(e) => Outcome::fail(EXIT_INPUT, "Io", &e.to_string()),
        };
    }
    match &cli.server {
        Some(url) => dispatch(&Client::new(HttpTransport::new(url.clone())), &cli).await,
        None => dispatch(&Client::new(InProcess::new(truncation)), &cli).await,
    }
}
