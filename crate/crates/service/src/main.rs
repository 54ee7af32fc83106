use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "actmap-serve", version, about = "Serve prebuilt mapper graphs over HTTP")]
struct Cli {
    /// Directory holding `manifest.json` and/or one subdirectory per dataset.
    #[arg(long)]
    data_dir: PathBuf,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Skip loading matrices; POST /pca then answers 409.
    #[arg(long)]
    no_matrices: bool,
}

#[tokio::main]
async fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let state = match actmap_service::load_data_dir(&cli.data_dir, !cli.no_matrices) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: failed to load {}: {e}", cli.data_dir.display());
            return ExitCode::from(3);
        }
    };
    let addr = SocketAddr::new(cli.host, cli.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {addr}: {e}");
            return ExitCode::from(2);
        }
    };
    log::info!("serving {} dataset(s) on http://{addr}", state.datasets.len());
    if let Err(e) = axum::serve(listener, actmap_service::router(state)).await {
        eprintln!("error: {e}");
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}
