//! Tabular output: RFC-4180 CSV with `\n` line endings and shortest
//! round-trip float formatting, or a JSON array.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Output(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| Error::Output(e.to_string()))
        }
    }
}

pub fn to_bytes<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        label: String,
        opt: Option<f64>,
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let xs = [0.1 + 0.2, 1e-300, -2.5e17, 1.0 / 3.0];
        let rows: Vec<Row> = xs
            .iter()
            .map(|&x| Row { x, label: "a,\"b\"".into(), opt: if x > 0.0 { Some(x) } else { None } })
            .collect();
        let text = String::from_utf8(to_bytes(&rows, Format::Csv).unwrap()).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,label,opt");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",\"a,\"\"b\"\"\",0.30000000000000004"));
        assert!(lines[3].ends_with(",\"a,\"\"b\"\"\","));
        for (line, &x) in lines[1..].iter().zip(&xs) {
            let first: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert_eq!(first.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn json_is_an_array() {
        let rows = vec![Row { x: 1.5, label: "k".into(), opt: None }];
        let v: serde_json::Value = serde_json::from_slice(&to_bytes(&rows, Format::Json).unwrap()).unwrap();
        assert_eq!(v[0]["x"], 1.5);
        assert!(v[0]["opt"].is_null());
    }
}
