use std::io::{self, Write};

use serde_json::{Map, Number, Value};

use crate::args::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Named columns of numbers or text, emitted in any [`OutputFormat`].
///
/// A record holds a single row; it is written as a JSON object rather than an
/// array and as `name value` lines in pretty mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    record: bool,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
            record: false,
        }
    }

    pub fn record(headers: Vec<&'static str>) -> Self {
        Self {
            record: true,
            ..Self::new(headers)
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> io::Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
            OutputFormat::Pretty => self.write_pretty(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(&self.headers)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format!("{x:.16e}"),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        wr.flush()
    }

    fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| ((*h).to_owned(), json_cell(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        match (self.record, rows.as_slice()) {
            (true, [one]) => serde_json::to_writer_pretty(&mut out, one)?,
            _ => serde_json::to_writer_pretty(&mut out, &rows)?,
        }
        writeln!(out)
    }

    fn write_pretty<W: Write>(&self, mut out: W) -> io::Result<()> {
        if let (true, [row]) = (self.record, self.rows.as_slice()) {
            let width = self.headers.iter().map(|h| h.len()).max().unwrap_or(0);
            for (h, c) in self.headers.iter().zip(row) {
                writeln!(out, "{h:<width$}  {}", pretty_cell(c))?;
            }
            return Ok(());
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(pretty_cell).collect())
            .collect();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.headers[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |out: &mut W, items: Vec<&str>| -> io::Result<()> {
            let parts: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            writeln!(out, "{}", parts.join("  ").trim_end())
        };
        line(&mut out, self.headers.clone())?;
        for r in &cells {
            line(&mut out, r.iter().map(String::as_str).collect())?;
        }
        Ok(())
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

fn pretty_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => sig10(*x),
        Cell::Text(s) => s.clone(),
    }
}

/// Ten significant digits, fixed-point when the magnitude allows.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        let decimals = (9 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["x", "label"]);
        t.push(vec![Cell::Num(1.0 / 3.0), "a,b".into()]);
        t.push(vec![Cell::Num(-2.5e-12), "plain".into()]);
        t
    }

    fn render(t: &Table, f: OutputFormat) -> String {
        let mut buf = Vec::new();
        t.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn ten_digit_pretty_numbers() {
        assert_eq!(sig10(std::f64::consts::E.recip()), "0.3678794412");
        assert_eq!(sig10(4.810_477_380_965_351), "4.810477381");
        assert_eq!(sig10(-1234.5), "-1234.500000");
        assert_eq!(sig10(6.02e23), "6.020000000e23");
        assert_eq!(sig10(0.0), "0");
    }

    #[test]
    fn csv_quotes_and_keeps_17_digits() {
        let s = render(&sample(), OutputFormat::Csv);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("x,label"));
        assert_eq!(lines.next(), Some("3.3333333333333331e-1,\"a,b\""));
        let back: f64 = s
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(back, -2.5e-12);
    }

    #[test]
    fn json_is_one_array() {
        let v: Value = serde_json::from_str(&render(&sample(), OutputFormat::Json)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[0]["x"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v[1]["label"], "plain");
    }

    #[test]
    fn record_is_an_object() {
        let mut t = Table::record(vec!["value", "method"]);
        t.push(vec![Cell::Num(0.5), "series".into()]);
        let v: Value = serde_json::from_str(&render(&t, OutputFormat::Json)).unwrap();
        assert_eq!(v["method"], "series");
        assert_eq!(
            render(&t, OutputFormat::Pretty),
            "value   0.5000000000\nmethod  series\n"
        );
    }

    #[test]
    fn pretty_aligns_columns() {
        let s = render(&sample(), OutputFormat::Pretty);
        let lens: Vec<usize> = s.lines().map(str::len).collect();
        assert!(lens.windows(2).all(|w| w[0] == w[1]), "{s}");
    }
}
