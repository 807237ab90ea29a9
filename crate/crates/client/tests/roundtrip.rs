use qpmut_client::{Client, ClientError, HttpTransport};
use qpmut_service::{serve, ServeConfig};
use serde_json::json;

async fn spawn_server() -> Client<HttpTransport> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve(listener, ServeConfig { truncation: 12, snapshot: None }));
    Client::http(format!("http://{addr}"))
}

fn a3() -> serde_json::Value {
    json!({"vertices": [1, 2, 3], "arrows": [{"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}]})
}

#[tokio::test]
async fn session_over_http() {
    let client = spawn_server().await;
    let created = client.create_session(a3()).await.unwrap();
    let id = created["id"].as_str().unwrap();
    let h0 = created["hash"].clone();
    let m = client.mutate(id, "fz", 2).await.unwrap();
    assert_eq!(m["state"]["arrows"].as_array().unwrap().len(), 3);
    assert_eq!(client.session(id).await.unwrap()["hash"], m["hash"]);
    assert_eq!(client.history(id).await.unwrap()["history"].as_array().unwrap().len(), 1);
    assert_eq!(client.undo(id).await.unwrap()["hash"], h0);
    let analysis = client.analysis(id, 4).await.unwrap();
    assert_eq!(analysis["acyclicity"]["path"], json!([]));
}

#[tokio::test]
async fn errors_carry_codes() {
    let client = spawn_server().await;
    match client.session("missing").await {
        Err(ClientError::Api { status: 404, code, .. }) => assert_eq!(code, "UnknownSession"),
        other => panic!("{other:?}"),
    }
    match client.op("mutate", json!({"input": a3(), "vertex": 7})).await {
        Err(ClientError::Api { status: 409, code, budget_exhausted: false, .. }) => assert_eq!(code, "UnknownVertex"),
        other => panic!("{other:?}"),
    }
    let out = client.op("mutate", json!({"input": a3(), "kind": "fz", "vertex": 2})).await.unwrap();
    assert_eq!(out["vertices"], json!([1, 2, 3]));
}

#[tokio::test]
async fn unreachable_server_is_a_transport_error() {
    let client = Client::http("http://127.0.0.1:9");
    assert!(matches!(client.session("x").await, Err(ClientError::Transport(_))));
}
