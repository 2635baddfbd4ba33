use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A result table: free-form metadata plus named columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Renders the table with a self-describing header. `config` is the
    /// JSON echo of the run configuration.
    pub fn render(&self, format: Format, config: &Value) -> Result<String, CliError> {
        match format {
            Format::Csv => self.render_csv(config),
            Format::Jsonl => Ok(self.render_jsonl(config)),
        }
    }

    fn render_csv(&self, config: &Value) -> Result<String, CliError> {
        let mut out = format!("# eigenrate {VERSION}\n# config: {config}\n");
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key}: {}\n", cell(value)));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(cell))?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("CSV output is UTF-8"));
        Ok(out)
    }

    fn render_jsonl(&self, config: &Value) -> String {
        let mut header = Map::new();
        header.insert("eigenrate".into(), VERSION.into());
        header.insert("config".into(), config.clone());
        for (key, value) in &self.meta {
            header.insert(key.clone(), value.clone());
        }
        let mut out = Value::Object(header).to_string();
        out.push('\n');
        for row in &self.rows {
            let record: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), v.clone()))
                .collect();
            out.push_str(&Value::Object(record).to_string());
            out.push('\n');
        }
        out
    }
}

/// CSV cell text: strings bare, `null` empty, arrays joined with `;`.
fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// A float as JSON; non-finite values become the strings `inf`, `-inf`
/// or `nan`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

/// Reads a float cell written by [`num`].
pub fn parse_num(text: &str) -> Option<f64> {
    match text.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "" => None,
        t => t.parse().ok(),
    }
}

pub fn value_num(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => parse_num(s),
        _ => None,
    }
}
