//! Rendering of tables and flat records as CSV or JSON.

use anyhow::Result;
use qcorr::figures::{format_sig17, Table};
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

/// Ordered field list of a single result.
#[derive(Debug, Clone, Default)]
pub struct Record {
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        let v = serde_json::Number::from_f64(value).map_or_else(|| Value::String(value.to_string()), Value::Number);
        self.push(key, v)
    }

    pub fn vec3(&mut self, key: &str, v: &qcorr::Vec3) -> &mut Self {
        // + 0.0 turns −0 into 0
        self.push(key, json!([v.x + 0.0, v.y + 0.0, v.z + 0.0]))
    }
}

/// A list of records with identical keys renders as a table.
pub enum Output {
    Table(Table),
    Record(Record),
    Rows(Vec<Record>),
}

fn config_object(cfg: &RunConfig) -> Value {
    Value::Object(cfg.entries().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or_else(|| n.to_string(), format_sig17),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn csv_rows(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn comments(cfg: &RunConfig, command: &str) -> String {
    let mut s = format!("# command = {command}\n");
    for line in cfg.echo() {
        s.push_str(&format!("# {line}\n"));
    }
    s
}

pub fn render(output: &Output, cfg: &RunConfig, command: &str) -> Result<String> {
    match cfg.format()? {
        Format::Csv => {
            let mut s = comments(cfg, command);
            match output {
                Output::Table(t) => {
                    let body = t.to_csv(&[]);
                    s.push_str(&body);
                }
                Output::Record(r) => {
                    let rows: Vec<Vec<String>> = r.fields.iter().map(|(k, v)| vec![k.clone(), cell(v)]).collect();
                    s.push_str(&csv_rows(&["field".into(), "value".into()], &rows)?);
                }
                Output::Rows(records) => {
                    let header: Vec<String> =
                        records.first().map(|r| r.fields.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
                    let rows: Vec<Vec<String>> =
                        records.iter().map(|r| r.fields.iter().map(|(_, v)| cell(v)).collect()).collect();
                    s.push_str(&csv_rows(&header, &rows)?);
                }
            }
            Ok(s)
        }
        Format::Json => {
            let result = match output {
                Output::Table(t) => json!({ "columns": t.columns, "rows": t.rows }),
                Output::Record(r) => record_object(r),
                Output::Rows(records) => Value::Array(records.iter().map(record_object).collect()),
            };
            let doc = json!({ "command": command, "config": config_object(cfg), "result": result });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

fn record_object(r: &Record) -> Value {
    let mut m = Map::new();
    for (k, v) in &r.fields {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}
