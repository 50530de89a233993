//! Shared plumbing: config loading and output-directory handling.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::CliError;

/// Loads the JSON config when a path is given, otherwise the type default.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", p.display())))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// Creates the output directory; refuses to reuse a non-empty one without
/// `--force`.
pub fn prepare_out_dir(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() {
        let non_empty = fs::read_dir(path)
            .map_err(|e| CliError::Io(format!("cannot inspect {}: {e}", path.display())))?
            .next()
            .is_some();
        if non_empty && !force {
            return Err(CliError::Config(format!(
                "output directory {} is not empty; pass --force to overwrite",
                path.display()
            )));
        }
    }
    fs::create_dir_all(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize {}: {e}", path.display())))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
