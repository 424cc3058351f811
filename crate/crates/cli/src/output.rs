//! Number formatting and the CSV/JSON writers shared by every subcommand.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use infodist::RegionPoint;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits; the shortest representation of the result
/// then prints with at most 12 digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    // Avoid "-0" for values that round to zero from below.
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

pub fn join_spectrum(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt12(v))
        .collect::<Vec<_>>()
        .join(";")
}

/// Stdout or a file, buffered.
pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// The invocation with a stable program name, for CSV metadata.
pub fn invocation() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::iter::once("infodist".to_string())
        .chain(args)
        .collect::<Vec<_>>()
        .join(" ")
}

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    /// Writes the metadata comment line, then the header row.
    pub fn new(mut sink: Box<dyn Write>, header: &[&str]) -> io::Result<Self> {
        writeln!(sink, "# {}", invocation())?;
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        Ok(self.writer.write_record(fields)?)
    }

    pub fn point(&mut self, label: Option<&str>, p: &RegionPoint) -> io::Result<()> {
        let mut fields = Vec::with_capacity(4);
        if let Some(label) = label {
            fields.push(label.to_string());
        }
        fields.push(fmt12(p.x));
        fields.push(fmt12(p.y));
        fields.push(join_spectrum(p.source_spectrum.values()));
        self.row(fields)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// A JSON report with `schema_version` first and every float at 12 significant digits.
pub fn report_json<T: Serialize>(body: &T) -> serde_json::Result<String> {
    let mut value = serde_json::to_value(body)?;
    round_value(&mut value);
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    match value {
        Value::Object(map) => doc.extend(map),
        other => {
            doc.insert("result".into(), other);
        }
    }
    serde_json::to_string_pretty(&Value::Object(doc))
}
