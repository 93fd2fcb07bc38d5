use std::collections::BTreeMap;
use std::io::{self, Write};

use clap::ValueEnum;
use rigidsum::cyclotomic::Cyclotomic;
use rigidsum::ff::{Elem, Field};
use rigidsum::notation::{field_notation, format_elem};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub const CSV_COLUMNS: [&str; 6] = ["datum", "q", "x", "value", "float_re", "float_im"];

/// Ordered parameters echoed at the top of every report.
#[derive(Debug, Default)]
pub struct Header {
    pub command: String,
    pub params: BTreeMap<String, String>,
}

impl Header {
    pub fn new(command: &str) -> Header {
        Header {
            command: command.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn field(&mut self, field: &Field) {
        self.set("q", field_notation(field).trim_start_matches("q=").to_string());
        self.set("generator", format_elem(field, field.primitive_root()));
        let modulus: Vec<String> = field.modulus().iter().map(u32::to_string).collect();
        self.set("modulus", format!("[{}]", modulus.join(",")));
    }
}

/// Single ordered writer for all report lines.
pub struct Emitter {
    format: Format,
    out: io::BufWriter<io::StdoutLock<'static>>,
}

impl Emitter {
    pub fn new(format: Format) -> Emitter {
        Emitter {
            format,
            out: io::BufWriter::new(io::stdout().lock()),
        }
    }

    fn line(&mut self, s: &str) {
        // A closed pipe is not an error worth reporting.
        let _ = writeln!(self.out, "{s}");
    }

    pub fn header(&mut self, h: &Header) {
        match self.format {
            Format::Json => {
                let mut cfg = serde_json::Map::new();
                cfg.insert("command".into(), json!(h.command));
                cfg.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
                for (k, v) in &h.params {
                    cfg.insert(k.clone(), json!(v));
                }
                self.line(&json!({ "config": cfg }).to_string());
            }
            Format::Csv | Format::Human => {
                let mut s = format!("# rigidsum {} version={}", h.command, env!("CARGO_PKG_VERSION"));
                for (k, v) in &h.params {
                    s.push_str(&format!(" {k}={v}"));
                }
                self.line(&s);
                if self.format == Format::Csv {
                    self.csv_row(CSV_COLUMNS);
                }
            }
        }
    }

    fn csv_row<I, T>(&mut self, fields: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(fields).expect("in-memory write");
        let buf = w.into_inner().expect("in-memory write");
        let _ = self.out.write_all(&buf);
    }

    /// A record that is not a trace value; omitted from CSV output.
    pub fn record(&mut self, value: Value, human: impl FnOnce() -> String) {
        match self.format {
            Format::Json => self.line(&value.to_string()),
            Format::Human => {
                let s = human();
                self.line(&s);
            }
            Format::Csv => {}
        }
    }

    /// One trace value at a point.
    pub fn point(&mut self, label: &str, field: &Field, x: Elem, value: &Cyclotomic, extra: Value) {
        let z = value.embed_complex();
        match self.format {
            Format::Json => {
                let mut obj = json!({
                    "x": x.0,
                    "elem": format_elem(field, x),
                    "value": value.to_string(),
                    "exact": value,
                    "float": { "re": z.re, "im": z.im },
                });
                if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
                    o.extend(e);
                }
                self.line(&obj.to_string());
            }
            Format::Human => {
                let mut s = format!(
                    "x={:<10} {:>12.6} {:+.6}i  {}",
                    format_elem(field, x),
                    z.re,
                    z.im,
                    value
                );
                if let Value::Object(e) = extra {
                    for (k, v) in e {
                        s.push_str(&format!("  {k}={v}"));
                    }
                }
                self.line(&s);
            }
            Format::Csv => {
                self.csv_row([
                    label.to_string(),
                    field.q().to_string(),
                    x.0.to_string(),
                    value.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ]);
            }
        }
    }

    pub fn finish(mut self) {
        let _ = self.out.flush();
    }
}
