//! Tabular result emission as CSV or JSON lines.
//!
//! Column order is fixed per table kind. Floats are written in scientific
//! notation with 9 significant digits, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cryo::HeatSource;
use crate::error::{Error, Result};
use crate::optimizer::{ComparisonTable, OptimizationResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

/// Scientific notation with 9 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        // print negative zero as zero
        format!("{:.8e}", x + 0.0)
    }
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Num(x) => format_number(*x),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Num(x) if x.is_finite() => format_number(*x),
            Value::Num(_) | Value::Missing => "null".to_string(),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => serde_json::to_string(s).expect("strings serialize"),
            Value::Bool(b) => b.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns, "tables must share columns");
        self.rows.extend(other.rows);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            _ => Err(Error::Config(vec![format!("unknown format '{s}', expected csv or jsonl")])),
        }
    }
}

pub fn to_csv(table: &Table) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Value::csv_field)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn to_jsonl(table: &Table) -> String {
    let mut out = String::new();
    for row in &table.rows {
        out.push('{');
        for (i, (c, v)) in table.columns.iter().zip(row).enumerate() {
            if i > 0 {
                out.push(',');
            }
            let key = serde_json::to_string(c).expect("strings serialize");
            let _ = write!(out, "{key}:{}", v.json());
        }
        out.push_str("}\n");
    }
    out
}

pub fn render(table: &Table, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(table),
        Format::Jsonl => Ok(to_jsonl(table)),
    }
}

pub fn write_table(path: &Path, table: &Table, format: Format) -> Result<()> {
    let text = render(table, format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Columns of the result table after any sweep coordinates.
pub const RESULT_COLUMNS: &[&str] = &[
    "label",
    "problem",
    "feasible",
    "target",
    "t_qb_k",
    "t_gen_k",
    "a_total",
    "k",
    "m",
    "power_w",
    "metric_achieved",
    "per_qubit_power_w",
    "physical_qubits",
    "error_rate",
    "step_t_qb_log10",
    "step_t_gen_log10",
    "step_a_log10",
    "diagnostic",
];

fn result_values(label: &str, r: &OptimizationResult) -> Vec<Value> {
    let c = r.control;
    vec![
        label.into(),
        r.problem.label().into(),
        r.feasible.into(),
        r.target.into(),
        c.t_qb.into(),
        c.t_gen.into(),
        c.a_total.into(),
        Value::from(r.feasible.then_some(c.k)),
        c.m.into(),
        r.power_w.into(),
        r.metric_achieved.into(),
        r.per_qubit_power_w.into(),
        r.physical_qubits.into(),
        r.error_rate.into(),
        r.grid_step.t_qb_log10.into(),
        r.grid_step.t_gen_log10.into(),
        r.grid_step.a_log10.into(),
        r.diagnostic.clone().into(),
    ]
}

/// One row per optimization, with sweep coordinates as leading columns.
pub fn results_table(coord_keys: &[String], rows: &[(String, Vec<f64>, &OptimizationResult)]) -> Table {
    let mut cols: Vec<String> = coord_keys.to_vec();
    cols.extend(RESULT_COLUMNS.iter().map(|s| s.to_string()));
    let mut t = Table::new(&cols);
    for (label, coords, r) in rows {
        let mut row: Vec<Value> = coords.iter().map(|&x| x.into()).collect();
        row.extend(result_values(label, r));
        t.push(row);
    }
    t
}

pub const BREAKDOWN_COLUMNS: &[&str] =
    &["label", "stage_temperature_k", "source", "heat_extracted_w", "electrical_power_w"];

/// One row per (stage, source), in the order sources first appear.
pub fn breakdown_table(label: &str, r: &OptimizationResult) -> Table {
    let mut merged: Vec<(f64, HeatSource, f64, f64)> = Vec::new();
    for rec in &r.per_stage {
        match merged
            .iter_mut()
            .find(|m| m.0 == rec.stage_temperature_k && m.1 == rec.source)
        {
            Some(m) => {
                m.2 += rec.heat_extracted_w;
                m.3 += rec.electrical_power_w;
            }
            None => merged.push((
                rec.stage_temperature_k,
                rec.source,
                rec.heat_extracted_w,
                rec.electrical_power_w,
            )),
        }
    }
    let mut t = Table::new(BREAKDOWN_COLUMNS);
    for (temp, src, heat, elec) in merged {
        t.push(vec![label.into(), temp.into(), src.label().into(), heat.into(), elec.into()]);
    }
    t
}

pub const LEVEL_COLUMNS: &[&str] = &["label", "level", "feasible", "power_w", "t_qb_k", "t_gen_k", "a_total"];

/// Best point per concatenation level or compression index.
pub fn levels_table(label: &str, r: &OptimizationResult) -> Table {
    let mut t = Table::new(LEVEL_COLUMNS);
    for l in &r.per_level {
        t.push(vec![
            label.into(),
            l.level.into(),
            l.feasible.into(),
            l.power_w.into(),
            l.t_qb.into(),
            l.t_gen.into(),
            l.a_total.into(),
        ]);
    }
    t
}

pub const COMPARISON_COLUMNS: &[&str] = &[
    "config",
    "n_bits",
    "feasible",
    "k",
    "power_w",
    "t_classical_s",
    "t_quantum_s",
    "e_classical_j",
    "e_quantum_j",
    "h_classical_bit_per_j",
    "h_quantum_bit_per_j",
    "quantum_faster",
    "quantum_more_efficient",
    "time_crossover_n",
    "energy_crossover_n",
];

pub fn comparison_table(c: &ComparisonTable) -> Table {
    let mut t = Table::new(COMPARISON_COLUMNS);
    for r in &c.rows {
        let cross = c.crossovers.iter().find(|x| x.config == r.config);
        t.push(vec![
            r.config.clone().into(),
            r.n_bits.into(),
            r.feasible.into(),
            Value::from(r.feasible.then_some(r.k)),
            r.power_w.into(),
            r.t_classical_s.into(),
            r.t_quantum_s.into(),
            r.e_classical_j.into(),
            r.e_quantum_j.into(),
            r.h_classical_bit_per_j.into(),
            r.h_quantum_bit_per_j.into(),
            r.quantum_faster.into(),
            r.quantum_more_efficient.into(),
            cross.and_then(|x| x.time_n).into(),
            cross.and_then(|x| x.energy_n).into(),
        ]);
    }
    t
}
