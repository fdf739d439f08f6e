//! Output artifacts: a metadata block plus a table, rendered as CSV or JSON.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            // NaN and ±inf have no JSON form; the meta notes say why a value is missing
            Cell::Num(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Units {
    pub m: f64,
    pub hbar: f64,
    pub system: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub command: String,
    pub potential: String,
    pub params: Map<String, Value>,
    pub method: Vec<String>,
    pub version: String,
    pub units: Units,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

pub fn render_csv(meta: &Meta, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# command: {}\n", meta.command));
    out.push_str(&format!("# potential: {}\n", meta.potential));
    let params: Vec<String> = meta.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str(&format!("# params: {}\n", params.join(",")));
    out.push_str(&format!("# method: {}\n", meta.method.join(",")));
    out.push_str(&format!("# version: {}\n", meta.version));
    out.push_str(&format!("# units: m={} hbar={} ({})\n", meta.units.m, meta.units.hbar, meta.units.system));
    for n in &meta.notes {
        out.push_str(&format!("# note: {n}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(meta: &Meta, table: &Table) -> String {
    let data: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(obj)
        })
        .collect();
    let doc = serde_json::json!({ "meta": meta, "data": data });
    let mut s = serde_json::to_string_pretty(&doc).expect("artifact serializes");
    s.push('\n');
    s
}
