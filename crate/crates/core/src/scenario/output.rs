//! CSV tables with full-precision floats.

use std::io::{Read, Write};

use super::ScenarioError;

/// Column-major table; every column has the same length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    /// 17 significant digits, enough to round-trip any `f64`.
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Table {
    pub fn new() -> Self {
        Table::default()
    }

    pub fn num(mut self, header: &str, values: impl IntoIterator<Item = f64>) -> Self {
        self.headers.push(header.to_string());
        self.columns.push(values.into_iter().map(Cell::Num).collect());
        self
    }

    pub fn int(mut self, header: &str, values: impl IntoIterator<Item = i64>) -> Self {
        self.headers.push(header.to_string());
        self.columns.push(values.into_iter().map(Cell::Int).collect());
        self
    }

    pub fn text(mut self, header: &str, values: impl IntoIterator<Item = String>) -> Self {
        self.headers.push(header.to_string());
        self.columns.push(values.into_iter().map(Cell::Text).collect());
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Numeric column by header.
    pub fn column(&self, header: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == header)?;
        self.columns[k]
            .iter()
            .map(|c| match c {
                Cell::Num(x) => Some(*x),
                Cell::Int(i) => Some(*i as f64),
                Cell::Text(s) => s.parse().ok(),
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), ScenarioError> {
        if self.columns.iter().any(|c| c.len() != self.rows()) {
            return Err(io_error("table", "columns differ in length"));
        }
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.headers).map_err(|e| io_error("csv", e))?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| c[r].render())).map_err(|e| io_error("csv", e))?;
        }
        w.flush().map_err(|e| io_error("csv", e))
    }
}

/// Reads a CSV written by [`Table::write_csv`]; every cell comes back as
/// text or a number, whichever parses.
pub fn read_table<R: Read>(source: R) -> Result<Table, ScenarioError> {
    let mut r = csv::Reader::from_reader(source);
    let headers: Vec<String> = r.headers().map_err(|e| io_error("csv", e))?.iter().map(String::from).collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for record in r.records() {
        let record = record.map_err(|e| io_error("csv", e))?;
        for (k, field) in record.iter().enumerate() {
            let cell = field.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(field.to_string()));
            columns[k].push(cell);
        }
    }
    Ok(Table { headers, columns })
}

pub(super) fn io_error(path: &str, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Io { path: path.to_string(), message: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let xs = vec![0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-7, -2.5e300, 5e-324];
        let t = Table::new().num("x", xs.clone()).text("label", xs.iter().map(|x| format!("{x}")));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back.column("x").unwrap(), xs);
        assert_eq!(back.headers, vec!["x", "label"]);
    }
}
