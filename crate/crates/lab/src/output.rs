use crate::LabError;
use noetherlab_core::dynamics::{Chart, PhaseState};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits in scientific notation; Rust formatting never
/// consults the locale.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // NaN and the infinities have no digits to pad
        format!("{x}")
    }
}

pub fn state_columns(chart: Chart) -> [&'static str; 4] {
    match chart {
        Chart::Polar => ["r", "theta", "rdot", "thetadot"],
        Chart::Cartesian => ["q1", "q2", "v1", "v2"],
    }
}

pub fn state_row(s: &PhaseState) -> [f64; 5] {
    [s.t, s.q[0], s.q[1], s.v[0], s.v[1]]
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, c) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match c {
                    Cell::Num(x) => out.push_str(&num(*x)),
                    Cell::Text(t) => out.push_str(t),
                    Cell::Missing => {}
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Num(x) => serde_json::json!(x),
                        Cell::Text(t) => serde_json::json!(t),
                        Cell::Missing => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({ "schema": SCHEMA_VERSION, "columns": self.header, "rows": rows })
    }
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), LabError> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| LabError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions and maps are ordered, so equal inputs give equal bytes.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), LabError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| LabError::Runtime(e.to_string()))?;
    let _ = writeln!(text);
    write_text(dir, name, &text)
}
