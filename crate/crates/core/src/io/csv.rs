//! Minimal CSV tables: header row, comma separated, no quoting (fields never
//! contain commas), numbers in scientific notation with 17 significant
//! digits.

use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float losslessly: `d.dddddddddddddddde±x`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_num(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.trim().parse::<f64>().map_err(|e| Error::Io(format!("bad number `{s}`: {e}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| Error::Io(format!("missing column `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<String>> {
        let k = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[k].clone()).collect())
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?.iter().map(|s| parse_num(s)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = lines.next().ok_or_else(|| Error::Io("empty csv".into()))?.split(',').map(String::from).collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            if l.is_empty() {
                continue;
            }
            let r: Vec<String> = l.split(',').map(String::from).collect();
            if r.len() != header.len() {
                return Err(Error::Io(format!("row {} has {} fields, expected {}", i + 1, r.len(), header.len())));
            }
            rows.push(r);
        }
        Ok(CsvTable { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Io(format!("bad path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 6.02214076e23, -1e-300, f64::MAX, f64::MIN_POSITIVE, 12.285] {
            let s = fmt_num(v);
            let w = parse_num(&s).unwrap();
            assert_eq!(v.to_bits(), w.to_bits(), "{s}");
            assert_eq!(fmt_num(w), s);
        }
        assert!(parse_num(&fmt_num(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn table_round_trip() {
        let mut t = CsvTable::new(&["P", "band"]);
        t.push(vec![fmt_num(1.5), "alpha".into()]);
        t.push(vec![fmt_num(-2.0), "delta".into()]);
        let text = t.to_text();
        let back = CsvTable::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert_eq!(back.numeric_column("P").unwrap(), vec![1.5, -2.0]);
        assert!(CsvTable::parse("a,b\n1\n").is_err());
    }
}
