//! Run reports and their table, JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Rounding allowance above 1 for a reported probability.
pub const PROBABILITY_SLACK: f64 = 1e-10;
pub const PROBABILITY_CEILING: f64 = 1.0 + PROBABILITY_SLACK;

/// Significant digits of every number in a rendered report.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            // Round-tripping through the fixed-precision text keeps JSON
            // output identical to the table and CSV renderings.
            Cell::Num(x) if x.is_finite() => s.serialize_f64(format_number(*x).parse().unwrap_or(*x)),
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(n) => s.serialize_i64(*n),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(n.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped, scientific
/// notation outside `[1e-4, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Too long for the terminal table; still written as CSV and JSON.
    #[serde(skip)]
    pub bulky: bool,
}

impl Table {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            bulky: false,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in `{}`", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// The cell in column `col` of the first row whose first cell renders
    /// as `key`.
    pub fn lookup(&self, key: &str, col: &str) -> Option<&Cell> {
        let c = self.column(col)?;
        self.rows.iter().find(|r| r[0].render() == key).map(|r| &r[c])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub kind: String,
    /// The scenario as it was understood, defaults filled in where the
    /// schema has them.
    pub input: Value,
    pub metadata: BTreeMap<String, String>,
    /// Headline scalars, also the columns of a sweep.
    pub summary: Vec<(String, f64)>,
    pub tables: Vec<Table>,
}

impl RunReport {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Every cell in a column called `probability` must lie in
    /// `[0, 1 + 1e-10]`.
    pub fn check_probabilities(&self) -> Result<()> {
        for t in &self.tables {
            let Some(c) = t.column("probability") else { continue };
            for row in &t.rows {
                if let Some(p) = row[c].as_f64() {
                    if !(0.0..=PROBABILITY_CEILING).contains(&p) {
                        return Err(CliError::Probability { table: t.name.clone(), value: p });
                    }
                }
            }
        }
        Ok(())
    }

    fn summary_table(&self) -> Table {
        let mut t = Table::new("summary", ["quantity", "value"]);
        for (name, v) in &self.summary {
            t.push(vec![name.as_str().into(), (*v).into()]);
        }
        t
    }

    /// Summary first, then the result tables.
    pub fn all_tables(&self) -> Vec<Table> {
        let mut out = vec![self.summary_table()];
        out.extend(self.tables.iter().cloned());
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            kind: &'a str,
            input: &'a Value,
            metadata: &'a BTreeMap<String, String>,
            tables: Vec<Table>,
        }
        let doc = Doc { kind: &self.kind, input: &self.input, metadata: &self.metadata, tables: self.all_tables() };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind: {}", self.kind);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "{k}: {v}");
        }
        for t in self.all_tables() {
            out.push('\n');
            if t.bulky {
                let _ = writeln!(out, "[{}] {} rows; use --format csv or json to get them", t.name, t.rows.len());
                continue;
            }
            out.push_str(&render_text_table(&t));
        }
        out
    }

    /// Tables by name, rendered as CSV.
    pub fn to_csv(&self) -> Result<Vec<(String, String)>> {
        self.all_tables().iter().map(|t| Ok((t.name.clone(), render_csv(t)?))).collect()
    }
}

pub fn render_text_table(t: &Table) -> String {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |items: &[String]| {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = format!("[{}]\n", t.name);
    out.push_str(&line(&t.columns));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn render_csv(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out_err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&t.columns).map_err(out_err)?;
    for row in &t.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(out_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
