//! Tabular reports, rendered as aligned CSV or JSON.

use serde::{Deserialize, Serialize};

/// Decimal places in CSV output; JSON keeps full precision.
pub const DECIMALS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Empty,
    Bool(bool),
    Int(u64),
    Num(f64),
    Text(String),
    List(Vec<f64>),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Bool(b) => b.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => format_value(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::List(xs) => xs.iter().map(|&x| format_value(x)).collect::<Vec<_>>().join(";"),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Vec<f64>> for Cell {
    fn from(xs: Vec<f64>) -> Self {
        Cell::List(xs)
    }
}

/// Fixed-point with [`DECIMALS`] places; negative zero prints as zero.
pub fn format_value(x: f64) -> String {
    let s = format!("{:.*}", DECIMALS, x);
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Rows whose check failed; a nonzero count turns into exit code 1.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub failures: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            failures: 0,
        }
    }

    /// Appends a row given as `(column, value)` pairs; unnamed columns stay
    /// empty.
    pub fn push(&mut self, cells: Vec<(&str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        for (name, cell) in cells {
            let idx = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
            row[idx] = cell;
        }
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    /// First row whose `quantity` column equals `quantity`.
    pub fn find(&self, quantity: &str) -> Option<usize> {
        let idx = self.column("quantity")?;
        self.rows.iter().position(|r| r[idx].as_str() == Some(quantity))
    }

    pub fn value(&self, quantity: &str) -> Option<f64> {
        self.cell(self.find(quantity)?, "value")?.as_f64()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Comma-separated with columns padded to a common width; notes follow
    /// as `#` lines.
    pub fn to_csv(&self) -> String {
        let rendered: Vec<Vec<String>> =
            self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| rendered.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &mut dyn Iterator<Item = &str>| {
            let parts: Vec<String> = cells
                .zip(&widths)
                .enumerate()
                .map(|(j, (c, &w))| if j + 1 == widths.len() { c.to_owned() } else { format!("{c:<w$}") })
                .collect();
            parts.join(", ").trim_end().to_owned()
        };
        let mut out = line(&mut self.columns.iter().map(String::as_str));
        out.push('\n');
        for r in &rendered {
            out.push_str(&line(&mut r.iter().map(String::as_str)));
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}
