//! Deterministic CSV output.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes.

use std::io;

/// A header and rows of pre-formatted cells. Rows may differ in length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Appends all rows of `other`, ignoring its header.
    pub fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
    }

    pub fn write_to<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = ::csv::WriterBuilder::new().flexible(true).from_writer(out);
        if !self.header.is_empty() {
            w.write_record(&self.header)?;
        }
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("cells are UTF-8")
    }
}
