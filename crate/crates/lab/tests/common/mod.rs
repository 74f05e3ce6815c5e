#![allow(dead_code)] // each test target uses a different subset

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const SCHEMA_BASE: &str = "https://noetherlab.invalid/schemas/";

/// Fresh, empty directory under the cargo-managed scratch area.
pub fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Runs `noetherlab <command> --config <cfg> --out <dir>/out` plus `extra`.
pub fn lab(command: &str, cfg: &Path, extra: &[&str]) -> Output {
    let out = cfg.parent().unwrap().join("out");
    Command::new(env!("CARGO_BIN_EXE_noetherlab"))
        .arg(command)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn schema(name: &str) -> Value {
    read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json")))
}

/// Validates against a shipped schema; the report schema is registered so
/// the sweep schema can refer to it offline.
pub fn validate(name: &str, instance: &Value) -> Result<(), String> {
    let report = jsonschema::Resource::from_contents(schema("report")).map_err(|e| e.to_string())?;
    let validator = jsonschema::options()
        .with_resource(format!("{SCHEMA_BASE}report.schema.json"), report)
        .build(&schema(name))
        .map_err(|e| e.to_string())?;
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors.join("; "))
    }
}
