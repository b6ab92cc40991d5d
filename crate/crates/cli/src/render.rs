use std::fmt::Write as _;
use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Md,
    /// Only for profiles.
    Csv,
}

#[derive(Debug)]
pub struct Report {
    pub title: String,
    pub value: Value,
    /// false means a checked property failed (exit 1).
    pub ok: bool,
    pub csv: Option<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, value: impl Serialize, ok: bool) -> Self {
        Report {
            title: title.into(),
            value: serde_json::to_value(value).expect("report serializes"),
            ok,
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("value serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Md => {
                let mut s = format!("# {}\n\n", self.title);
                markdown(&mut s, &self.value, 2);
                Ok(s)
            }
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| "csv output is only available for profiles".to_string()),
        }
    }

    pub fn emit(&self, format: Format) -> Result<(), String> {
        let text = self.render(format)?;
        io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string())
    }
}

fn scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    s.replace('|', "\\|")
}

fn markdown(out: &mut String, v: &Value, level: usize) {
    let hashes = "#".repeat(level.min(6));
    match v {
        Value::Object(map) => {
            let rows: Vec<_> = map.iter().filter(|(_, x)| scalar(x)).collect();
            if !rows.is_empty() {
                out.push_str("| field | value |\n|---|---|\n");
                for (k, x) in rows {
                    let _ = writeln!(out, "| {k} | {} |", cell(x));
                }
                out.push('\n');
            }
            for (k, x) in map.iter().filter(|(_, x)| !scalar(x)) {
                let _ = writeln!(out, "{hashes} {k}\n");
                markdown(out, x, level + 1);
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("(none)\n\n"),
        Value::Array(items) if items.iter().all(|x| matches!(x, Value::Object(_))) => {
            let mut cols: Vec<&String> = Vec::new();
            for x in items {
                for k in x.as_object().expect("object").keys() {
                    if !cols.contains(&k) {
                        cols.push(k);
                    }
                }
            }
            let head: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
            let _ = writeln!(out, "| {} |", head.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(cols.len()));
            for x in items {
                let row: Vec<String> = cols.iter().map(|k| cell(x.get(k.as_str()).unwrap_or(&Value::Null))).collect();
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out.push('\n');
        }
        Value::Array(items) => {
            for x in items {
                let _ = writeln!(out, "- {}", cell(x));
            }
            out.push('\n');
        }
        other => {
            let _ = writeln!(out, "{}\n", cell(other));
        }
    }
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    #[test]
    fn markdown_layout() {
        let r = Report::new(
            "demo",
            json!({"ok": true, "items": [{"a": 1, "b": "x|y"}, {"a": 2}], "tags": ["p", "q"]}),
            true,
        );
        let md = r.render(Format::Md).unwrap();
        assert!(md.starts_with("# demo\n\n| field | value |\n|---|---|\n| ok | true |\n"));
        assert!(md.contains("## items\n\n| a | b |\n|---|---|\n| 1 | x\\|y |\n| 2 |  |\n"));
        assert!(md.contains("## tags\n\n- p\n- q\n"));
        assert!(r.render(Format::Csv).is_err());
        assert!(r.render(Format::Json).unwrap().ends_with("}\n"));
    }
}
