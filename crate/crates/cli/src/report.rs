//! Report documents: one JSON file per task, plus a plain-text rendering
//! for the console. Serialization is deterministic (struct field order,
//! sorted maps, no timestamps), so identical configs and seeds give
//! byte-identical reports.

use serde::Serialize;
use serde_json::Value;

use crate::config::Tolerances;
use crate::tasks::{TaskResult, TaskStatus};

#[derive(Serialize)]
pub struct TaskReport {
    pub tool_version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub manifold: String,
    pub tolerances: Tolerances,
    pub task: String,
    pub index: usize,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub details: Value,
}

impl TaskReport {
    pub fn new(
        config_hash: &str,
        seed: u64,
        manifold: &str,
        tolerances: Tolerances,
        task: &str,
        index: usize,
        result: &TaskResult,
    ) -> Self {
        TaskReport {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash.to_string(),
            seed,
            manifold: manifold.to_string(),
            tolerances,
            task: task.to_string(),
            index,
            status: result.status,
            error: result.error.clone(),
            details: result.details.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn file_name(&self) -> String {
        format!("{:02}-{}.json", self.index, self.task)
    }

    /// One human-readable line per residual entry; residuals shown with
    /// three significant digits (full precision lives in the JSON).
    pub fn render_text(&self) -> String {
        let status = match self.status {
            TaskStatus::Pass => "PASS",
            TaskStatus::Fail => "FAIL",
            TaskStatus::Error => "ERROR",
        };
        let mut out = format!("task {:02} {:<20} {}\n", self.index, self.task, status);
        if let Some(err) = &self.error {
            out.push_str(&format!("    error: {err}\n"));
        }
        render_value(&mut out, &self.details, 1);
        out
    }
}

fn render_value(out: &mut String, value: &Value, depth: usize) {
    let indent = "    ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{indent}{key}:\n"));
                        render_value(out, val, depth + 1);
                    }
                    _ => out.push_str(&format!("{indent}{key}: {}\n", render_scalar(val))),
                }
            }
        }
        Value::Array(items) => {
            // long arrays (per-point residual lists) live in the JSON file;
            // the console shows a preview
            let preview = if items.len() > 4 { 3 } else { items.len() };
            for item in &items[..preview] {
                match item {
                    Value::Object(_) | Value::Array(_) => render_value(out, item, depth + 1),
                    _ => out.push_str(&format!("{indent}- {}\n", render_scalar(item))),
                }
            }
            if preview < items.len() {
                out.push_str(&format!(
                    "{indent}... ({} entries, see JSON report)\n",
                    items.len()
                ));
            }
        }
        other => out.push_str(&format!("{indent}{}\n", render_scalar(other))),
    }
}

fn render_scalar(value: &Value) -> String {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if f != 0.0 && (f.abs() < 1e-3 || f.abs() >= 1e4) {
                    return format!("{f:.2e}");
                }
                if f.fract() != 0.0 {
                    return format!("{f:.6}");
                }
            }
            n.to_string()
        }
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "-".to_string(),
        other => other.to_string(),
    }
}
