//! Artifact writers. Every file carries the schema version; JSON summaries
//! echo the originating config for provenance.

use crate::CliError;
use sphere_gas::energy::Configuration;
use sphere_gas::SCHEMA_VERSION;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::failure(format!("cannot create {}: {e}", dir.display())))
}

/// Compact one-line JSON of a config, for the `# config=` provenance comment
/// every CSV artifact carries.
pub fn config_echo<T: serde::Serialize>(config: &T) -> String {
    serde_json::to_string(config).unwrap_or_else(|_| "{}".into())
}

/// One CSV row per point: sample_id, point_id, x, y, z.
pub fn write_configurations_csv(
    path: &Path,
    configurations: &[Configuration],
    echo: &str,
) -> Result<(), CliError> {
    let mut out = Vec::new();
    writeln!(out, "# schema_version={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# config={echo}").unwrap();
    writeln!(out, "sample_id,point_id,x,y,z").unwrap();
    for (sample_id, config) in configurations.iter().enumerate() {
        for (point_id, p) in config.points().iter().enumerate() {
            writeln!(out, "{sample_id},{point_id},{},{},{}", p.x(), p.y(), p.z()).unwrap();
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::failure(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn out_file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
