use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use codetrail_tracker::{api, Tracker, TrackerConfig};
use tokio::net::TcpListener;

#[derive(Parser)]
#[command(name = "tracker", about = "Tracks a programming session on the local machine")]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let args = Args::parse();
    let config = TrackerConfig::load(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;

    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, config.local_port));
    let panel_dir = config.panel_dir.clone();
    let tracker = Tracker::start(config).await?;
    let listener = TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    tracing::info!(
        "local API on http://{}, phase {:?}",
        listener.local_addr()?,
        tracker.state().phase
    );
    tokio::select! {
        res = api::serve(listener, tracker, panel_dir) => res?,
        _ = tokio::signal::ctrl_c() => tracing::info!("shutting down"),
    }
    Ok(())
}
