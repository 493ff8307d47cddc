use clap::Parser;
use comptrack_service::{prepare, shutdown_signal, Config};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let config = Config::parse();
    let result = async {
        let prepared = prepare(&config).await?;
        tracing::info!("listening on {}", prepared.local_addr()?);
        prepared.run(shutdown_signal()).await
    }
    .await;
    if let Err(e) = result {
        eprintln!("{}: {e}", e.code());
        std::process::exit(1);
    }
}
