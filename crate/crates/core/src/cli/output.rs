use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Md,
}

/// Settings shared by every subcommand, echoed at the top of each report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub digits: u32,
    pub cap: u32,
    pub p: u64,
    pub n: u32,
    pub convention: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            digits: 50,
            cap: 16,
            p: 5,
            n: 8,
            convention: "weighted".into(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn summary(&self) -> String {
        format!(
            "digits={} cap={} p={} N={} convention={} seed={}",
            self.digits, self.cap, self.p, self.n, self.convention, self.seed
        )
    }
}

/// One output row: ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, String)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn columns(records: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for (k, _) in &r.0 {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(records: &[Record], format: OutputFormat, config: &RunConfig) -> String {
    let cols = columns(records);
    let cell = |r: &Record, c: &str| r.get(c).unwrap_or("").to_string();
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            let arr: Vec<Value> = records
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    m.insert("config".into(), Value::String(config.summary()));
                    for (k, v) in &r.0 {
                        m.insert(k.clone(), Value::String(v.clone()));
                    }
                    Value::Object(m)
                })
                .collect();
            out.push_str(&serde_json::to_string_pretty(&Value::Array(arr)).expect("serializable"));
            out.push('\n');
        }
        OutputFormat::Csv => {
            let _ = writeln!(out, "# {}", config.summary());
            let _ = writeln!(out, "{}", cols.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            for r in records {
                let row: Vec<String> = cols.iter().map(|c| csv_field(&cell(r, c))).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        OutputFormat::Md => {
            let _ = writeln!(out, "config: `{}`", config.summary());
            let _ = writeln!(out);
            let _ = writeln!(out, "| {} |", cols.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(cols.len()));
            for r in records {
                let row: Vec<String> = cols.iter().map(|c| cell(r, c).replace('|', "\\|")).collect();
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let rows = vec![
            Record::new().with("n", 1).with("e", "2"),
            Record::new().with("n", 2).with("note", "a,b"),
        ];
        let cfg = RunConfig::default();
        let csv = render(&rows, OutputFormat::Csv, &cfg);
        assert!(csv.contains("n,e,note\n1,2,\n2,,\"a,b\"\n"));
        let md = render(&rows, OutputFormat::Md, &cfg);
        assert!(md.contains("| n | e | note |"));
        let json: Value = serde_json::from_str(&render(&rows, OutputFormat::Json, &cfg)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 2);
        assert_eq!(json[0]["e"], "2");
    }
}
