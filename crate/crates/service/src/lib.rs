//! Local HTTP service over the earnings and sensitivity engines.
//!
//! All responses are canonical JSON, so numbers match the library's own
//! serialization byte for byte. Jobs live in memory only and are lost when
//! the process exits.

mod error;
mod handlers;
mod jobs;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::sync::Arc;
use std::time::Duration;

use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use tokio::sync::Semaphore;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::{ApiError, ErrorBody};
pub use jobs::{JobRecord, JobState, JobTable};

pub const DEFAULT_PORT: u16 = 8787;
pub const DEFAULT_SYNC_THRESHOLD: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Sobol specs needing fewer model evaluations than this run inline.
    pub sync_threshold: u64,
    pub max_concurrent_jobs: usize,
    /// How long finished jobs stay pollable.
    pub retention: Duration,
    /// Allow browser requests from `localhost` and loopback origins.
    pub local_cors: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            max_concurrent_jobs: 1,
            retention: Duration::from_secs(3600),
            local_cors: true,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub config: Arc<ServiceConfig>,
    pub jobs: Arc<JobTable>,
    permits: Arc<Semaphore>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            jobs: Arc::new(JobTable::new(config.retention)),
            permits: Arc::new(Semaphore::new(config.max_concurrent_jobs.max(1))),
            config: Arc::new(config),
        }
    }
}

pub fn default_addr() -> SocketAddr {
    SocketAddr::new(IpAddr::V4(Ipv4Addr::LOCALHOST), DEFAULT_PORT)
}

/// Serialize `value` as canonical JSON with the given status.
pub fn canonical_response<T: Serialize + ?Sized>(status: StatusCode, value: &T) -> Response {
    let body = llm_roi_core::io::to_canonical_json(value);
    (status, [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], body).into_response()
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else {
        return false;
    };
    let Some(rest) = origin.strip_prefix("http://").or_else(|| origin.strip_prefix("https://")) else {
        return false;
    };
    let host = match rest.strip_prefix('[') {
        Some(v6) => v6.split(']').next().map(|h| format!("[{h}]")).unwrap_or_default(),
        None => rest.split(':').next().unwrap_or_default().to_string(),
    };
    matches!(host.as_str(), "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: AppState) -> Router {
    let local_cors = state.config.local_cors;
    let app = Router::new()
        .route("/health", get(handlers::health))
        .route("/v1/evaluate", post(handlers::evaluate))
        .route("/v1/compare", post(handlers::compare))
        .route("/v1/breakeven", post(handlers::breakeven))
        .route("/v1/sweep", post(handlers::sweep))
        .route("/v1/sensitivity/local", post(handlers::local_sensitivity))
        .route("/v1/sensitivity/sobol", post(handlers::submit_sobol))
        .route("/v1/jobs/{id}", get(handlers::poll_job))
        .with_state(state);
    if local_cors {
        app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        )
    } else {
        app
    }
}

/// Bind `addr` and serve until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_origins() {
        for ok in ["http://localhost:5173", "http://127.0.0.1", "https://localhost", "http://[::1]:3000"] {
            assert!(is_local_origin(&HeaderValue::from_static(ok)), "{ok}");
        }
        for bad in ["http://example.com", "http://localhost.evil.com", "file://localhost", "null"] {
            assert!(!is_local_origin(&HeaderValue::from_static(bad)), "{bad}");
        }
    }
}
