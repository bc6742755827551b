//! Tabular output in CSV or JSON and the run manifest.

use serde::Serialize;
use serde_json::{json, Value};

/// One named table of string cells; every row has `columns.len()` cells.
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Render the tables; CSV separates multiple tables with a blank line.
pub fn render(tables: &[Table], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut parts = Vec::with_capacity(tables.len());
            for table in tables {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.columns).expect("csv header");
                for row in &table.rows {
                    w.write_record(row).expect("csv row");
                }
                let bytes = w.into_inner().expect("csv flush");
                parts.push(String::from_utf8(bytes).expect("csv is utf-8"));
            }
            parts.join("\n")
        }
        Format::Json => {
            let tables: Vec<Value> = tables
                .iter()
                .map(|t| {
                    let rows: Vec<Value> = t
                        .rows
                        .iter()
                        .map(|r| {
                            Value::Object(
                                t.columns
                                    .iter()
                                    .zip(r)
                                    .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                                    .collect(),
                            )
                        })
                        .collect();
                    json!({ "name": t.name, "columns": t.columns, "rows": rows })
                })
                .collect();
            let mut s =
                serde_json::to_string_pretty(&json!({ "tables": tables })).expect("json render");
            s.push('\n');
            s
        }
    }
}

/// Everything needed to reproduce a run: the exact argv plus the resolved
/// configuration and seeds.
#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest render");
        s.push('\n');
        s
    }
}

/// Shortest round-trip formatting, so re-parsing reproduces the exact value.
pub fn cell(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_embedded_commas() {
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.push(vec!["x,y".into(), "1".into()]);
        let s = render(&[t], Format::Csv);
        assert_eq!(s, "a,b\n\"x,y\",1\n");
    }

    #[test]
    fn json_mirrors_rows_as_objects() {
        let mut t = Table::new("demo", vec!["a"]);
        t.push(vec!["1".into()]);
        let s = render(&[t], Format::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["tables"][0]["rows"][0]["a"], "1");
    }

    #[test]
    fn cells_round_trip() {
        assert_eq!(cell(0.5), "0.5");
        assert_eq!(cell(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }
}
