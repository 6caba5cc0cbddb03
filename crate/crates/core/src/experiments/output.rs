//! CSV/JSON writers and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::experiments::config::Format;
use crate::thermo::ThermoRecord;

/// 17 significant digits, round-trip exact.
pub fn fmt_number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_optional(v: Option<f64>) -> String {
    v.map(fmt_number).unwrap_or_default()
}

/// CSV text from a header and rows of optional numbers or raw strings.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn records_csv(records: &[ThermoRecord]) -> String {
    csv_text(
        &ThermoRecord::COLUMNS,
        records.iter().map(|r| r.row().iter().map(|v| fmt_optional(*v)).collect()),
    )
}

/// Validate every record, then write them in the requested format.
pub fn write_records(path: &Path, records: &[ThermoRecord], format: Format) -> Result<()> {
    for r in records {
        r.validate()?;
    }
    let text = match format {
        Format::Csv => records_csv(records),
        Format::Json => to_json(&records)?,
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| std::io::Error::other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Manifest next to `output`: resolved configuration, derived constants,
/// tool version and wall time.
pub fn write_manifest<C: Serialize>(output: &Path, command: &str, config: &C, constants: Value, wall_seconds: f64) -> Result<()> {
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "output": output.display().to_string(),
        "config": serde_json::to_value(config).map_err(|e| std::io::Error::other(e.to_string()))?,
        "constants": constants,
        "wall_time_seconds": wall_seconds,
    });
    fs::write(manifest_path(output), to_json(&manifest)?)?;
    Ok(())
}

/// Render a long-format table: a header and rows of already formatted cells.
pub fn table_json(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let objects: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (k, cell) in header.iter().zip(row) {
                let v = if cell.is_empty() {
                    Value::Null
                } else if let Ok(x) = cell.parse::<f64>() {
                    json!(x)
                } else {
                    json!(cell)
                };
                obj.insert((*k).to_string(), v);
            }
            Value::Object(obj)
        })
        .collect();
    to_json(&objects)
}

pub fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => csv_text(header, rows),
        Format::Json => table_json(header, &rows)?,
    };
    fs::write(path, text)?;
    Ok(())
}
