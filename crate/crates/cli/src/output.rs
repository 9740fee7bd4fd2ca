use serde_json::{json, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Tabular result of one subcommand, renderable as CSV or JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub header: Vec<String>,
    /// CSV cells, already formatted.
    pub rows: Vec<Vec<String>>,
    /// Full-precision JSON results.
    pub results: Value,
    /// False when a verification check failed.
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, inputs: Value, header: &[&str]) -> Self {
        Self {
            command,
            inputs,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            results: Value::Array(Vec::new()),
            passed: true,
        }
    }

    pub fn push(&mut self, row: Vec<String>, result: Value) {
        self.rows.push(row);
        if let Value::Array(items) = &mut self.results {
            items.push(result);
        }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "inputs": self.inputs,
                    "results": self.results,
                });
                serde_json::to_string_pretty(&doc)
                    .map(|s| s + "\n")
                    .map_err(|e| e.to_string())
            }
        }
    }

    fn to_csv(&self) -> Result<String, String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .flexible(false)
            .from_writer(Vec::new());
        writer.write_record(&self.header).map_err(|e| e.to_string())?;
        for row in &self.rows {
            writer.write_record(row).map_err(|e| e.to_string())?;
        }
        let bytes = writer.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_quotes_codes() {
        let mut r = Report::new("t", json!({}), &["code", "value"]);
        r.push(vec!["(2,2)".into(), "0.5".into()], json!({"value": 0.5}));
        assert_eq!(r.render(Format::Csv).unwrap(), "code,value\n\"(2,2)\",0.5\n");
    }

    #[test]
    fn json_has_schema_inputs_results() {
        let mut r = Report::new("t", json!({"x": 1}), &["v"]);
        r.push(vec!["1".into()], json!({"v": 1}));
        let v: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["inputs"]["x"], 1);
        assert_eq!(v["results"][0]["v"], 1);
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("t", json!({}), &["a", "b"]);
        assert_eq!(r.render(Format::Csv).unwrap(), "a,b\n");
    }
}
