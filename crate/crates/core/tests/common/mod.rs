//! In-process HTTP servers and a small JSON client for integration tests.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::mpsc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use serde_json::Value;
use writeright::service::http::router;
use writeright::service::{Service, ServiceConfig};

/// An axum router served on an ephemeral port from its own runtime thread.
pub struct Running {
    pub addr: SocketAddr,
    stop: Option<mpsc::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl Running {
    pub fn spawn(app: axum::Router) -> Self {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").expect("bind");
        listener.set_nonblocking(true).expect("nonblocking");
        let addr = listener.local_addr().expect("local addr");
        let (tx, rx) = mpsc::channel::<()>();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread()
                .worker_threads(2)
                .enable_all()
                .build()
                .expect("runtime");
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
                let stop = async move {
                    let _ = tokio::task::spawn_blocking(move || rx.recv()).await;
                };
                axum::serve(listener, app).with_graceful_shutdown(stop).await.expect("serve");
            });
        });
        Self {
            addr,
            stop: Some(tx),
            thread: Some(thread),
        }
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn stop(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for Running {
    fn drop(&mut self) {
        self.stop();
    }
}

/// The submission service behind its HTTP API.
pub struct TestServer {
    pub service: Service,
    pub http: Running,
}

impl TestServer {
    pub fn start(config: &ServiceConfig) -> Self {
        let pipeline = config.build_pipeline().expect("pipeline");
        let service = Service::start(config, pipeline).expect("service");
        let http = Running::spawn(router(service.clone()));
        Self { service, http }
    }

    pub fn client(&self) -> Client {
        Client::new(self.http.url())
    }

    pub fn stop(mut self) {
        self.http.stop();
        self.service.shutdown();
    }
}

/// An address nothing listens on.
pub fn dead_endpoint() -> String {
    let l = std::net::TcpListener::bind("127.0.0.1:0").expect("bind");
    let addr = l.local_addr().expect("addr");
    drop(l);
    format!("http://{addr}")
}

pub struct Client {
    agent: ureq::Agent,
    base: String,
}

impl Client {
    pub fn new(base: String) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(10)))
            .http_status_as_error(false)
            .build()
            .into();
        Self { agent, base }
    }

    fn finish(resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> (u16, Value) {
        let mut resp = resp.expect("request");
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().expect("body");
        let value = if body.is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&body).unwrap_or(Value::String(body))
        };
        (status, value)
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        Self::finish(self.agent.get(format!("{}{path}", self.base)).call())
    }

    pub fn post(&self, path: &str, body: &Value) -> (u16, Value) {
        self.post_raw(path, &body.to_string())
    }

    pub fn post_raw(&self, path: &str, body: &str) -> (u16, Value) {
        Self::finish(
            self.agent
                .post(format!("{}{path}", self.base))
                .header("content-type", "application/json")
                .send(body.to_string()),
        )
    }

    /// Submits an essay and returns its id.
    pub fn submit(&self, learner: &str, prompt: u8, text: &str) -> String {
        let (code, body) = self.post(
            "/api/submissions",
            &serde_json::json!({"learner_id": learner, "prompt_id": prompt, "text": text}),
        );
        assert_eq!(code, 201, "submit: {body}");
        body["id"].as_str().expect("id").to_string()
    }

    /// Polls the status endpoint until it reports `want`.
    pub fn wait_for(&self, id: &str, want: &str) -> Value {
        let deadline = Instant::now() + Duration::from_secs(20);
        loop {
            let (code, body) = self.get(&format!("/api/submissions/{id}"));
            assert_eq!(code, 200, "status: {body}");
            if body["status"] == want {
                return body;
            }
            assert!(Instant::now() < deadline, "{id} stuck at {body}");
            std::thread::sleep(Duration::from_millis(20));
        }
    }
}
