use wisp_service::ServiceConfig;

use crate::args::ServeArgs;
use crate::config::CliConfig;
use crate::error::{CliError, Result};

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    log::info!("shutdown requested");
}

pub fn run(args: ServeArgs, cfg: &CliConfig) -> Result<()> {
    let mut sc: ServiceConfig = cfg.serve.clone();
    sc.policy = cfg.bench.policy;
    if let Some(v) = args.bind {
        sc.bind = v;
    }
    if let Some(v) = args.manifest {
        sc.manifest = v;
    }
    if let Some(v) = args.log {
        sc.log = v;
    }
    if let Some(v) = args.ui_dir {
        sc.ui_dir = Some(v);
    }
    if let Some(v) = args.lease_secs {
        sc.lease_secs = v;
    }
    if let Some(v) = args.policy {
        sc.policy = v;
    }
    if !sc.manifest.exists() {
        return Err(CliError::Usage(format!("manifest {} does not exist", sc.manifest.display())));
    }
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Data(format!("cannot start runtime: {e}")))?;
    rt.block_on(wisp_service::serve(sc, shutdown_signal()))?;
    Ok(())
}
