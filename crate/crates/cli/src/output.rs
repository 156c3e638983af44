use std::fs::OpenOptions;
use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use splitlab::lab::{LabError, LabResult};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::Out;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

pub const SCHEMA: u32 = 1;

pub struct Record {
    command: &'static str,
    config: Value,
    seed: Option<u64>,
    payload: Value,
    csv: Option<String>,
}

impl Record {
    pub fn new(command: &'static str, config: Value, seed: Option<u64>, payload: Value) -> Self {
        Record {
            command,
            config,
            seed,
            payload,
            csv: None,
        }
    }

    /// Table used for `--format csv` in place of the flattened record.
    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn to_json(&self, runtime_ms: u64, wall_clock: Option<String>) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("command".into(), json!(self.command));
        m.insert("version".into(), json!(env!("SPLITLAB_VERSION")));
        m.insert("seed".into(), json!(self.seed));
        m.insert("wall_clock".into(), json!(wall_clock));
        m.insert("config".into(), self.config.clone());
        match &self.payload {
            Value::Object(p) => m.extend(p.clone()),
            other => {
                m.insert("result".into(), other.clone());
            }
        }
        m.insert("runtime_ms".into(), json!(runtime_ms));
        Value::Object(m)
    }

    pub fn emit(&self, out: &Out, start: Instant) -> LabResult<()> {
        let (runtime_ms, wall_clock) = if out.deterministic {
            (0, None)
        } else {
            let now = OffsetDateTime::now_utc().format(&Rfc3339).ok();
            (start.elapsed().as_millis() as u64, now)
        };
        let record = self.to_json(runtime_ms, wall_clock);
        let text = match out.format {
            Format::Jsonl => {
                let mut line = serde_json::to_string(&record).map_err(|e| LabError::Invariant(e.to_string()))?;
                line.push('\n');
                line
            }
            Format::Csv => match &self.csv {
                Some(t) => t.clone(),
                None => flat_csv(&record)?,
            },
        };
        match &out.out {
            Some(path) => OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| LabError::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// `key,value` rows with dotted paths.
fn flat_csv(record: &Value) -> LabResult<String> {
    let mut rows = Vec::new();
    flatten("", record, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| LabError::Invariant(e.to_string());
    w.write_record(["key", "value"]).map_err(err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Invariant(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::Invariant(e.to_string()))
}
