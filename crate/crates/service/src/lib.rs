//! HTTP service for collecting human benchmark verdicts.

pub mod config;
pub mod http;
pub mod log;
pub mod manifest;
pub mod state;

use std::future::Future;

pub use config::ServiceConfig;
pub use http::{router, AppState};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Manifest(#[from] manifest::ManifestError),
    #[error(transparent)]
    Log(#[from] log::LogError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

/// Runs until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(config: ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServiceError> {
    let state = AppState::open(&config)?;
    let app = router(state.clone(), config.ui_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|source| ServiceError::Bind { addr: config.bind.clone(), source })?;
    let addr = listener.local_addr().map_err(ServiceError::Serve)?;
    // the CLI and tests parse this line to find an ephemeral port
    println!("listening on http://{addr}");
    ::log::info!("listening on {addr}");
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await.map_err(ServiceError::Serve)?;
    state.flush();
    ::log::info!("shut down");
    Ok(())
}
