use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use qpmut_service::{router, AppState, BUDGET_HEADER};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Resp {
    status: StatusCode,
    budget: bool,
    body: Value,
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Resp {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let budget = resp.headers().contains_key(BUDGET_HEADER);
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Resp { status, budget, body: serde_json::from_slice(&bytes).unwrap() }
}

fn app() -> axum::Router {
    router(Arc::new(AppState::new(12)))
}

/// Graded QP: a: 2->1, b: 3->2, c: 1->3 in degree 0, the
/// relation arrow r1: 1->3 in degree 1, W = r1 a b.
fn example_graded() -> Value {
    json!({
        "vertices": [1, 2, 3],
        "arrows": [
            {"id": "a", "source": 2, "target": 1, "degree": 0},
            {"id": "b", "source": 3, "target": 2, "degree": 0},
            {"id": "c", "source": 1, "target": 3, "degree": 0},
            {"id": "r1", "source": 1, "target": 3, "degree": 1}
        ],
        "potential": [{"coeff": "1", "cycle": ["b", "a", "r1"]}]
    })
}

fn degree_triples(state: &Value) -> Vec<(u64, u64, i64)> {
    let mut v: Vec<_> = state["arrows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a["source"].as_u64().unwrap(), a["target"].as_u64().unwrap(), a["degree"].as_i64().unwrap()))
        .collect();
    v.sort();
    v
}

#[tokio::test]
async fn graded_session_round_trip() {
    let app = app();
    let created = call(&app, "POST", "/sessions", Some(example_graded())).await;
    assert_eq!(created.status, StatusCode::CREATED);
    let id = created.body["id"].as_str().unwrap().to_string();
    let h0 = created.body["hash"].as_str().unwrap().to_string();
    assert_eq!(created.body["kind"], "graded");
    assert_eq!(created.body["legal"]["left"], json!([1, 2, 3]));

    let m = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({"kind": "left", "vertex": 2}))).await;
    assert_eq!(m.status, StatusCode::OK);
    assert_eq!(degree_triples(&m.body["state"]), vec![(1, 2, 0), (1, 3, 0), (2, 3, 1)]);
    assert_eq!(m.body["state"]["potential"], json!([]));
    assert_ne!(m.body["hash"], json!(h0));

    let hist = call(&app, "GET", &format!("/sessions/{id}/history"), None).await;
    assert_eq!(hist.body["initial_hash"], json!(h0));
    assert_eq!(hist.body["history"][0]["prior_hash"], json!(h0));
    assert_eq!(hist.body["history"][0]["params"], json!({"kind": "left", "vertex": 2}));

    let u = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(u.status, StatusCode::OK);
    assert_eq!(u.body["hash"], json!(h0));
    let again = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(again.status, StatusCode::CONFLICT);
    assert_eq!(again.body["error"], "NothingToUndo");
    assert_eq!(again.body["hash"], json!(h0));
}

#[tokio::test]
async fn analysis_reports_all_three() {
    let app = app();
    let id = call(&app, "POST", "/sessions", Some(example_graded())).await.body["id"].as_str().unwrap().to_string();
    let a = call(&app, "GET", &format!("/sessions/{id}/analysis?bound=6"), None).await;
    assert_eq!(a.status, StatusCode::OK);
    assert_eq!(a.body["jacobian"]["finite"], true);
    assert_eq!(a.body["rigidity"]["rigid"], "certified");
    assert_eq!(a.body["acyclicity"]["found"], true);
    assert_eq!(a.body["acyclicity"]["path"], json!([2]));
    assert!(a.body["hash"].is_string());
}

#[tokio::test]
async fn precondition_and_lookup_errors() {
    let app = app();
    let two_cycle = json!({"vertices": [1, 2, 3], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 1}, {"id": "c", "source": 2, "target": 3}]});
    let id = call(&app, "POST", "/sessions", Some(two_cycle)).await.body["id"].as_str().unwrap().to_string();
    let m = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({"kind": "fz", "vertex": 2}))).await;
    assert_eq!(m.status, StatusCode::CONFLICT);
    assert_eq!(m.body["error"], "LoopOrTwoCyclePresent");
    assert!(m.body["hash"].is_string());

    assert_eq!(call(&app, "GET", "/sessions/nope", None).await.status, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "POST", "/sessions/nope/undo", None).await.status, StatusCode::NOT_FOUND);
    let bad = call(&app, "POST", "/sessions", Some(json!({"vertices": "x"}))).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
    assert_eq!(bad.body["error"], "Parse");
    assert_eq!(call(&app, "POST", "/ops/frobnicate", Some(json!({"input": {}}))).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn budget_errors_are_flagged() {
    let app = app();
    let dense = json!({"vertices": [1, 2], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 1, "target": 2},
        {"id": "c", "source": 2, "target": 1}, {"id": "d", "source": 2, "target": 1}]});
    let r = call(&app, "POST", "/ops/jacobian-dim", Some(json!({"input": dense, "bound": 30}))).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(r.budget);
    assert_eq!(r.body["error"], "ResourceLimit");
}

#[tokio::test]
async fn ops_endpoint_golden() {
    let app = app();
    let three_cycle = json!({"vertices": [1, 2, 3], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}, {"id": "c", "source": 3, "target": 1}],
        "potential": [{"coeff": "1", "cycle": ["a", "b", "c"]}]});
    let r = call(&app, "POST", "/ops/jacobian-dim", Some(json!({"input": three_cycle, "bound": 3}))).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, json!({"finite": true, "dim": 6, "bound": 3}));
}

#[tokio::test]
async fn triangulation_sessions_flip() {
    let app = app();
    let fan = hexagon_fan();
    let c = call(&app, "POST", "/sessions", Some(fan)).await;
    assert_eq!(c.body["kind"], "triangulation");
    assert_eq!(c.body["legal"]["flip"], json!(["1", "2", "3"]));
    let id = c.body["id"].as_str().unwrap().to_string();
    let f = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({"kind": "flip", "arc": "2"}))).await;
    assert_eq!(f.status, StatusCode::OK);
    let bad = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({"kind": "flip", "arc": "b1"}))).await;
    assert_eq!(bad.status, StatusCode::CONFLICT);
}

/// Fan triangulation of the hexagon from corner 0.
fn hexagon_fan() -> Value {
    let side = |id: &str, kind: &str| json!({"id": id, "kind": kind});
    json!({
        "sides": [side("1", "arc"), side("2", "arc"), side("3", "arc"),
                  side("b1", "boundary"), side("b2", "boundary"), side("b3", "boundary"),
                  side("b4", "boundary"), side("b5", "boundary"), side("b6", "boundary")],
        "triangles": [["1", "b2", "b1"], ["2", "b3", "1"], ["3", "b4", "2"], ["b6", "b5", "3"]]
    })
}
