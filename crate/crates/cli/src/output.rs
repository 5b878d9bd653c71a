use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Shortest decimal that round-trips the value rounded to 12 significant
/// digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    if rounded != 0.0 && !(1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    B(bool),
    None,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => sig12(*x),
            Cell::U(x) => x.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::None => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::U(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::None, Into::into)
    }
}

/// A CSV document: `#` lines for the configuration, a header, rows, and
/// optional trailing `#` summary lines.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(config: &Map<String, Value>, header: &[&str]) -> Self {
        let mut text = String::new();
        for (k, v) in config {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => match n.as_f64() {
                    Some(x) if !n.is_u64() && !n.is_i64() => sig12(x),
                    _ => n.to_string(),
                },
                other => other.to_string(),
            };
            writeln!(text, "# {k} = {v}").unwrap();
        }
        writeln!(text, "{}", header.join(",")).unwrap();
        Self { text }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.text, "{}", line.join(",")).unwrap();
    }

    pub fn comment(&mut self, line: &str) {
        writeln!(self.text, "# {line}").unwrap();
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// JSON document with the configuration under `config`.
pub fn json_doc(config: Map<String, Value>, body: Value) -> String {
    let mut doc = Map::new();
    doc.insert("config".into(), Value::Object(config));
    match body {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

pub fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(0.054640579896014_6), "0.054640579896");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-2.5e-20), "-2.5e-20");
        assert_eq!(sig12(1e-9), "1e-9");
        assert_eq!(sig12(44100.0), "44100");
    }
}
