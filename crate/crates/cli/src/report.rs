//! Output plumbing: configuration echo, format selection, destination.

use std::fs;
use std::io::{self, Write};

use misobc_core::format::json_num;
use serde_json::{Map, Value};

use crate::args::{Common, Format};
use crate::Failure;

/// Effective configuration of one run, echoed ahead of every output.
pub struct RunConfig {
    entries: Map<String, Value>,
}

impl RunConfig {
    pub fn new(command: &str, common: &Common) -> Self {
        let mut entries = Map::new();
        entries.insert("command".into(), command.into());
        entries.insert("samples".into(), common.samples.into());
        entries.insert("seed".into(), common.seed.into());
        entries.insert("format".into(), common.format.name().into());
        let output = common.output.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        entries.insert("output".into(), output.into());
        entries.insert("workers".into(), common.workers.into());
        RunConfig { entries }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.insert(key.into(), value.into());
        self
    }

    pub fn set_num(&mut self, key: &str, value: f64) -> &mut Self {
        self.set(key, json_num(value))
    }

    pub fn set_nums(&mut self, key: &str, values: &[f64]) -> &mut Self {
        self.set(key, values.iter().map(|&v| json_num(v)).collect::<Vec<_>>())
    }

    /// `# key: value` lines.
    pub fn write_comment<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.entries {
            match v {
                Value::String(s) => writeln!(w, "# {k}: {s}")?,
                other => writeln!(w, "# {k}: {other}")?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.entries.clone())
    }
}

/// Renders the report in the requested format and sends it to the
/// configured destination. CSV output starts with the commented config;
/// JSON output is `{"config": ..., <key>: body}`.
pub fn emit(
    common: &Common,
    config: &RunConfig,
    csv: impl FnOnce(&mut Vec<u8>) -> misobc_core::Result<()>,
    key: &str,
    json: impl FnOnce() -> Value,
) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match common.format {
        Format::Csv => {
            config.write_comment(&mut buf)?;
            csv(&mut buf)?;
        }
        Format::Json => {
            let mut top = Map::new();
            top.insert("config".into(), config.to_json());
            top.insert(key.into(), json());
            serde_json::to_writer_pretty(&mut buf, &Value::Object(top)).map_err(misobc_core::Error::from)?;
            buf.push(b'\n');
        }
    }
    match &common.output {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

/// Flattens nested JSON into `key,value` CSV rows with dotted keys.
pub fn write_flat_csv<W: Write>(value: &Value, mut w: W) -> io::Result<()> {
    fn walk<W: Write>(prefix: &str, v: &Value, w: &mut W) -> io::Result<()> {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, w)?;
                }
                Ok(())
            }
            Value::Null => writeln!(w, "{prefix},"),
            Value::String(s) => writeln!(w, "{prefix},{s}"),
            Value::Number(n) => match n.as_f64() {
                Some(x) if !(n.is_u64() || n.is_i64()) => writeln!(w, "{prefix},{}", misobc_core::format::sig(x)),
                _ => writeln!(w, "{prefix},{n}"),
            },
            other => writeln!(w, "{prefix},{other}"),
        }
    }
    writeln!(w, "key,value")?;
    walk("", value, &mut w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let mut out = Vec::new();
        write_flat_csv(&json!({"a": 1, "b": {"c": 0.5, "d": null}, "e": true}), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "key,value\na,1\nb.c,0.5\nb.d,\ne,true\n");
    }
}
