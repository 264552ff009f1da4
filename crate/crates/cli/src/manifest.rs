//! Run manifests and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qle_core::io::write_table;
use qle_core::quadrature::QuadratureSpec;
use qle_core::units::UnitSystem;

use crate::commands::{Artifacts, Inputs};
use crate::config::{Command, RunConfig};
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub key: String,
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub units: UnitSystem,
    pub quadrature: QuadratureSpec,
    /// Every parameter, defaults included.
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads every input file named by the config, recording its digest.
pub fn load_inputs(cfg: &RunConfig) -> Result<(Inputs, Vec<FileDigest>), CliError> {
    let mut inputs = Inputs::new();
    let mut digests = Vec::new();
    for (key, path) in cfg.inputs() {
        let bytes = fs::read(path).map_err(|e| CliError::config(key, &format!("{}: {e}", path.display())))?;
        digests.push(FileDigest {
            key: key.to_string(),
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        inputs.insert(key.to_string(), bytes);
    }
    Ok((inputs, digests))
}

fn json_mirror(table: &crate::commands::Table, art: &Artifacts) -> serde_json::Value {
    let comments: serde_json::Map<String, serde_json::Value> = table
        .comments
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    serde_json::json!({
        "columns": table.columns,
        "rows": table.rows,
        "scalars": art.scalars,
        "comments": comments,
    })
}

/// Renders every output file, in memory, as `(file name, bytes)`.
pub fn render(command: Command, cfg: &RunConfig, art: &Artifacts) -> Result<Vec<(String, Vec<u8>)>, CliError> {
    let mut files = Vec::new();
    for table in &art.tables {
        let mut comments = vec![
            ("command".to_string(), command.name().to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("units".to_string(), cfg.unit_system()?.mode.name().to_string()),
        ];
        comments.extend(table.comments.iter().cloned());
        for (k, v) in &art.scalars {
            comments.push((k.clone(), format!("{v:e}")));
        }
        let columns: Vec<&str> = table.columns.iter().map(String::as_str).collect();
        let mut csv = Vec::new();
        write_table(&mut csv, &comments, &columns, &table.rows)?;
        files.push((format!("{}.csv", table.name), csv));
        let mut json = serde_json::to_vec_pretty(&json_mirror(table, art)).map_err(|e| CliError::Io(e.to_string()))?;
        json.push(b'\n');
        files.push((format!("{}.json", table.name), json));
    }
    files.extend(art.binaries.iter().cloned());
    Ok(files)
}

pub fn build(
    command: Command,
    cfg: &RunConfig,
    inputs: Vec<FileDigest>,
    files: &[(String, Vec<u8>)],
) -> Result<Manifest, CliError> {
    Ok(Manifest {
        tool: "qle".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        units: cfg.unit_system()?,
        quadrature: cfg.quadrature.spec(),
        config: cfg.clone(),
        inputs,
        outputs: files
            .iter()
            .map(|(name, bytes)| FileDigest {
                key: name.clone(),
                path: PathBuf::from(name),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    })
}

/// Writes the rendered files and the manifest into `dir`, and nowhere else.
pub fn emit(dir: &Path, files: &[(String, Vec<u8>)], manifest: &Manifest) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, bytes) in files {
        debug_assert!(!name.contains(['/', '\\']));
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let mut json = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    json.push(b'\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("manifest {}: {e}", path.display())))
}

/// Inputs of a replayed run must be byte-identical to the recorded ones.
pub fn check_inputs(recorded: &[FileDigest], current: &[FileDigest]) -> Result<(), CliError> {
    for r in recorded {
        match current.iter().find(|c| c.key == r.key) {
            Some(c) if c.sha256 == r.sha256 => {}
            Some(_) => {
                return Err(CliError::Validation(format!(
                    "input {} ({}) has changed since the manifest was written",
                    r.key,
                    r.path.display()
                )))
            }
            None => return Err(CliError::Validation(format!("input {} is missing", r.key))),
        }
    }
    Ok(())
}

/// Names of outputs whose digest differs from the recorded one.
pub fn differing_outputs(recorded: &[FileDigest], current: &[FileDigest]) -> Vec<String> {
    let mut out = Vec::new();
    for r in recorded {
        if !current.iter().any(|c| c.key == r.key && c.sha256 == r.sha256) {
            out.push(r.key.clone());
        }
    }
    for c in current {
        if !recorded.iter().any(|r| r.key == c.key) {
            out.push(c.key.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn changed_inputs_are_rejected() {
        let d = |s: &str| FileDigest {
            key: "bath.table".into(),
            path: "t.csv".into(),
            sha256: s.into(),
        };
        assert!(check_inputs(&[d("aa")], &[d("aa")]).is_ok());
        assert!(check_inputs(&[d("aa")], &[d("bb")]).is_err());
        assert!(check_inputs(&[d("aa")], &[]).is_err());
        assert_eq!(differing_outputs(&[d("aa")], &[d("bb")]), vec!["bath.table".to_string()]);
    }
}
