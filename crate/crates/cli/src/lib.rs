//! Experiment runner for the moving-wall diffusion laboratory: config
//! parsing, the `solve` / `kernel` / `particles` / `rates` modes, SVG plot
//! output, and the ten-criterion acceptance suite behind `verify`.

pub mod acceptance;
pub mod config;
pub mod runner;
pub mod svg;

use std::path::{Path, PathBuf};

/// Output-root resolution: the `MOVINGWALL_OUT` environment variable
/// overrides the `--out` flag, which overrides the config's `out` key;
/// the default is `./out`.
pub fn resolve_out_root(cli_out: Option<&Path>, cfg_out: Option<&Path>) -> PathBuf {
    if let Ok(env) = std::env::var("MOVINGWALL_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| cfg_out.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("out"))
}
