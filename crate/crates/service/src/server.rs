use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use comptrack_core::{DataDirLock, Error, PlacementTable, Score, SharedStore, SystemClock};
use tokio::net::TcpListener;

use crate::api::{router, AppState, Settings};

/// Every option can also be set through the environment.
#[derive(Debug, Clone, Parser)]
#[command(name = "comptrack-server", version, about = "Competency tracking HTTP service")]
pub struct Config {
    /// Directory holding store.json and its lock file.
    #[arg(long, env = "COMPTRACK_DATA_DIR", default_value = "comptrack-data")]
    pub data_dir: PathBuf,
    #[arg(long, env = "COMPTRACK_BIND", default_value = "127.0.0.1")]
    pub bind: std::net::IpAddr,
    #[arg(long, env = "COMPTRACK_PORT", default_value_t = 8080)]
    pub port: u16,
    /// CSV with header `test,min,max,level`.
    #[arg(long, env = "COMPTRACK_PLACEMENT_TABLE")]
    pub placement_table: Option<PathBuf>,
    #[arg(long, env = "COMPTRACK_CHECKLIST_THRESHOLD", default_value_t = 4)]
    pub checklist_threshold: i64,
    /// Shared bearer token; when set, every endpoint but /health requires it.
    #[arg(long, env = "COMPTRACK_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("address {0} is already in use")]
    PortInUse(SocketAddr),
    #[error(transparent)]
    Store(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ServeError {
    pub fn code(&self) -> &'static str {
        match self {
            ServeError::Config(_) => "config.invalid",
            ServeError::PortInUse(_) => "server.port_in_use",
            ServeError::Store(e) => e.code(),
            ServeError::Io(_) => "io.error",
        }
    }
}

/// A service ready to accept connections: data directory locked, store
/// loaded, socket bound.
pub struct Prepared {
    pub state: AppState,
    pub listener: TcpListener,
    _lock: DataDirLock,
}

impl Prepared {
    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until `shutdown` resolves, then persists the store.
    pub async fn run(self, shutdown: impl std::future::Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
        let Prepared { state, listener, _lock } = self;
        axum::serve(listener, router(state.clone()))
            .with_graceful_shutdown(shutdown)
            .await?;
        state.store().flush()?;
        tracing::info!("store flushed, shutting down");
        Ok(())
    }
}

pub async fn prepare(config: &Config) -> Result<Prepared, ServeError> {
    let threshold = Score::new(config.checklist_threshold)
        .map_err(|e| ServeError::Config(format!("checklist threshold: {e}")))?;
    let placement = match &config.placement_table {
        Some(p) => Some(PlacementTable::load(p).map_err(|e| ServeError::Config(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let lock = DataDirLock::acquire(&config.data_dir)?;
    let store = SharedStore::open(lock.store_path(), Arc::new(SystemClock))?;
    let addr = SocketAddr::new(config.bind, config.port);
    let listener = TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => ServeError::PortInUse(addr),
        _ => ServeError::Io(e),
    })?;
    let settings = Settings {
        placement,
        checklist_threshold: threshold,
        token: config.token.clone().filter(|t| !t.is_empty()),
    };
    tracing::info!(data_dir = %config.data_dir.display(), %addr, "store loaded");
    Ok(Prepared {
        state: AppState::new(store, settings),
        listener,
        _lock: lock,
    })
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
