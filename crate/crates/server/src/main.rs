use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use codetrail_server::{serve, AppState, ConfigSources, Storage};
use tokio::net::TcpListener;

#[derive(Parser)]
#[command(name = "server", about = "Collects tracked programming sessions")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Root directory of the submission store.
    #[arg(long)]
    storage: PathBuf,
    /// Task set served to trackers. Without it the task list is empty.
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// UI translations bundle.
    #[arg(long)]
    translations: Option<PathBuf>,
    #[arg(long, default_value = "0.0.0.0")]
    bind: std::net::IpAddr,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let args = Args::parse();

    let storage = Storage::open(&args.storage)
        .with_context(|| format!("opening storage at {}", args.storage.display()))?;
    let sources = ConfigSources {
        tasks: args.tasks,
        translations: args.translations,
    };
    let state = AppState::new(sources, storage).context("loading configuration")?;

    let addr = SocketAddr::new(args.bind, args.port);
    let listener = TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    serve(listener, state).await?;
    Ok(())
}
