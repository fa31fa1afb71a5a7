//! Numeric tables written as CSV behind a `#`-prefixed metadata header.

use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Sets a metadata entry, replacing an earlier value for the same key.
    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let (key, value) = (key.into(), value.to_string());
        match self.metadata.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.metadata.push((key, value)),
        }
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Metadata lines, then the header, then one record per row. Values use
    /// the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |source| crate::error::CliError::Io {
            context: "writing csv".into(),
            source,
        };
        writeln!(out, "# fblec {}", env!("CARGO_PKG_VERSION")).map_err(io)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = Table::new(["x", "y"]);
        t.meta("figure", "demo").meta("figure", "demo");
        t.push(vec![0.1, 2.0]);
        t.push(vec![1e-7, -3.5]);
        let s = t.to_csv_string().unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# fblec "));
        assert_eq!(lines[1], "# figure: demo");
        assert_eq!(lines[2], "x,y");
        assert_eq!(lines[3], "0.1,2");
        assert_eq!(lines[4], "0.0000001,-3.5");
        assert_eq!(t.column("y").unwrap(), vec![2.0, -3.5]);
        assert!(t.column("z").is_none());
    }
}
