//! CSV-shaped results with a `#`-prefixed metadata preamble.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    metadata: Vec<(String, String)>,
}

/// Shortest representation that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        "nan".into()
    } else if a == 0.0 || (1e-4..1e15).contains(&a) || a.is_infinite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl ResultTable {
    pub fn new(header: &[&str]) -> ResultTable {
        ResultTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Panics when the row width differs from the header; that is a bug in the caller.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        // newlines would break the preamble
        let v = value.to_string().replace('\n', " ");
        self.metadata.push((key.to_string(), v));
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    /// Header and rows only.
    pub fn body(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for r in &self.rows {
            w.write_record(r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.body());
        out
    }

    /// Writes through a temporary file in the target directory and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> std::io::Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir)?;
        tmp.write_all(self.render().as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Splits rendered output into metadata pairs and the CSV body.
pub fn split_rendered(text: &str) -> (Vec<(String, String)>, String) {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(": ") {
                meta.push((k.to_string(), v.to_string()));
                continue;
            }
        }
        body.push_str(line);
        body.push('\n');
    }
    (meta, body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_split() {
        let mut t = ResultTable::new(&["n", "value"]);
        t.meta("command", "norm");
        t.push(vec!["1".into(), num(0.5)]);
        t.push(vec!["2".into(), num(f64::NAN)]);
        let text = t.render();
        assert!(text.starts_with("# command: norm\n"));
        let (meta, body) = split_rendered(&text);
        assert_eq!(meta, vec![("command".to_string(), "norm".to_string())]);
        assert_eq!(body, t.body());
        assert_eq!(body, "n,value\n1,0.5\n2,nan\n");
        assert_eq!(num(1.5e-17), "1.5e-17");
        assert_eq!(num(-1.5e-17).parse::<f64>().unwrap(), -1.5e-17);
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        ResultTable::new(&["a", "b"]).push(vec!["1".into()]);
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        let mut t = ResultTable::new(&["x"]);
        t.push(vec![num(1.25)]);
        t.write_atomic(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x\n1.25\n");
    }
}
