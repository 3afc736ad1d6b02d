use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::HeaderValue;
use clap::Parser;
use tracing_subscriber::EnvFilter;

use storyboard_service::{router, AppState, Store};

/// Serves the storyboard HTTP API.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Directory holding session images, styles and pages.
    #[arg(long, env = "STORYBOARD_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    /// Browser origin allowed by CORS; repeat for several. Any origin when omitted.
    #[arg(long = "cors-origin")]
    cors_origins: Vec<String>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();
    let store = Store::open(&args.data_dir)?;
    let origins = if args.cors_origins.is_empty() {
        None
    } else {
        Some(args.cors_origins.iter().map(|o| HeaderValue::from_str(o)).collect::<Result<Vec<_>, _>>()?)
    };
    let app = router(Arc::new(AppState { store }), origins);
    let addr = SocketAddr::new(args.host, args.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{addr}, data in {}", args.data_dir.display());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
