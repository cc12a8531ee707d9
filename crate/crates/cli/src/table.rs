//! Tabular output shared by all commands.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// 17 significant digits, independent of locale.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) if v.is_nan() => "NaN".into(),
            Cell::Num(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar metadata; `# key: value` lines ahead of the CSV header.
    pub meta: Vec<(String, Cell)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = out;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {}", v.render())?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    /// One array per column, in column order; non-finite numbers become null.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        if !self.meta.is_empty() {
            let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
            obj.insert("meta".into(), Value::Object(meta));
        }
        obj.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        for (i, c) in self.columns.iter().enumerate() {
            obj.insert(c.clone(), Value::Array(self.rows.iter().map(|r| r[i].to_json()).collect()));
        }
        Value::Object(obj)
    }
}

/// One validation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= limit,
            measured,
            threshold: format!("<={limit:e}"),
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured >= limit,
            measured,
            threshold: format!(">={limit:e}"),
        }
    }

    pub fn failed(name: impl Into<String>, reason: &str) -> Self {
        Check {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            threshold: format!("error:{}", reason.replace(char::is_whitespace, "_")),
        }
    }

    /// `name status measured threshold`.
    pub fn line(&self) -> String {
        format!(
            "{} {} {} {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            Cell::Num(self.measured).render(),
            self.threshold
        )
    }
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut t = Table::new(["name", "status", "measured", "threshold"]);
    for c in checks {
        t.push(vec![
            c.name.clone().into(),
            if c.passed { "PASS" } else { "FAIL" }.into(),
            c.measured.into(),
            c.threshold.clone().into(),
        ]);
    }
    t
}
