//! Report output: JSON lines with a header, or CSV rows.
//!
//! In JSON mode the output file doubles as the checkpoint. The first line is
//! a header carrying the configuration; each further line is one record. On
//! `--resume` the header must match byte for byte, a torn final line is
//! dropped, and every complete record must parse.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::{Format, Global};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Corrupt(_) => 4,
        }
    }
}

impl From<quasinv::Error> for CliError {
    fn from(e: quasinv::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Internal(format!("i/o: {e}"))
}

#[derive(Serialize)]
struct Line<'a, T: Serialize> {
    schema: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json_line<T: Serialize>(kind: &str, body: &T) -> Result<String, CliError> {
    let line = Line { schema: SCHEMA, kind, body };
    serde_json::to_string(&line).map_err(|e| CliError::Internal(e.to_string()))
}

enum Out {
    Json(Box<dyn Write>),
    Csv(csv::Writer<Box<dyn Write>>),
}

pub struct Sink {
    out: Out,
    path: Option<PathBuf>,
    kind: &'static str,
}

/// Records already present in a resumed output file.
pub struct Resumed {
    pub records: Vec<Value>,
}

impl Resumed {
    /// The next `m` to compute for a stream starting at `start`.
    pub fn next_m(&self, start: u32) -> u32 {
        start + self.records.len() as u32
    }
}

impl Sink {
    /// Open the output, write or verify the header, and return the records
    /// found when resuming. `header` is the configuration object.
    pub fn open<H: Serialize>(g: &Global, kind: &'static str, header: &H, streaming_from: Option<u32>) -> Result<(Sink, Resumed), CliError> {
        let header_line = json_line("header", header)?;
        let mut resumed = Resumed { records: Vec::new() };
        if g.resume {
            if g.format != Format::Json {
                return Err(CliError::Config("--resume requires --format json".into()));
            }
            let Some(path) = &g.output else {
                return Err(CliError::Config("--resume requires --output".into()));
            };
            if path.exists() {
                resumed = read_checkpoint(path, &header_line, kind, streaming_from)?;
                let file = OpenOptions::new().append(true).open(path).map_err(io_err)?;
                let mut sink = Sink { out: Out::Json(Box::new(BufWriter::new(file))), path: Some(path.clone()), kind };
                if fs::metadata(path).map_err(io_err)?.len() == 0 {
                    sink.write_raw(&header_line)?;
                }
                return Ok((sink, resumed));
            }
        }
        let writer: Box<dyn Write> = match &g.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let mut sink = match g.format {
            Format::Json => Sink { out: Out::Json(writer), path: g.output.clone(), kind },
            Format::Csv => Sink {
                out: Out::Csv(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(writer)),
                path: g.output.clone(),
                kind,
            },
        };
        if let Out::Json(_) = sink.out {
            sink.write_raw(&header_line)?;
        }
        Ok((sink, resumed))
    }

    pub fn is_json(&self) -> bool {
        matches!(self.out, Out::Json(_))
    }

    fn write_raw(&mut self, line: &str) -> Result<(), CliError> {
        match &mut self.out {
            Out::Json(w) => {
                w.write_all(line.as_bytes()).map_err(io_err)?;
                w.write_all(b"\n").map_err(io_err)
            }
            Out::Csv(_) => Err(CliError::Internal("raw line on a CSV sink".into())),
        }
    }

    pub fn record<T: Serialize>(&mut self, body: &T) -> Result<(), CliError> {
        let line = json_line(self.kind, body)?;
        self.write_raw(&line)
    }

    pub fn rows<R: Serialize>(&mut self, rows: &[R]) -> Result<(), CliError> {
        match &mut self.out {
            Out::Csv(w) => {
                for r in rows {
                    w.serialize(r).map_err(|e| CliError::Internal(format!("csv: {e}")))?;
                }
                Ok(())
            }
            Out::Json(_) => Err(CliError::Internal("CSV rows on a JSON sink".into())),
        }
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        match &mut self.out {
            Out::Json(w) => w.flush().map_err(io_err),
            Out::Csv(w) => w.flush().map_err(io_err),
        }
    }

    /// Sidecar path for state that the records alone cannot rebuild cheaply.
    pub fn sidecar(&self, suffix: &str) -> Option<PathBuf> {
        if !self.is_json() {
            return None;
        }
        self.path.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        })
    }
}

fn read_checkpoint(path: &Path, header_line: &str, kind: &str, streaming_from: Option<u32>) -> Result<Resumed, CliError> {
    let bytes = fs::read(path).map_err(io_err)?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Corrupt(format!("{} is not UTF-8", path.display())))?;
    let complete = text.rfind('\n').map(|i| i + 1).unwrap_or(0);
    if complete < text.len() {
        // Torn final line from an interrupted write.
        let f = OpenOptions::new().write(true).open(path).map_err(io_err)?;
        f.set_len(complete as u64).map_err(io_err)?;
    }
    let mut lines = text[..complete].lines();
    let Some(first) = lines.next() else {
        return Ok(Resumed { records: Vec::new() });
    };
    if first != header_line {
        return Err(CliError::Corrupt(format!(
            "header of {} does not match the current configuration",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Corrupt(format!("record {} does not parse: {e}", i + 1)))?;
        if v.get("schema") != Some(&Value::from(SCHEMA)) || v.get("kind").and_then(Value::as_str) != Some(kind) {
            return Err(CliError::Corrupt(format!("record {} has the wrong schema or kind", i + 1)));
        }
        match streaming_from {
            Some(start) => {
                let want = start as u64 + i as u64;
                if v.get("m").and_then(Value::as_u64) != Some(want) {
                    return Err(CliError::Corrupt(format!("record {} should have m = {want}", i + 1)));
                }
            }
            None if i > 0 => return Err(CliError::Corrupt("more than one record".into())),
            None => {}
        }
        records.push(v);
    }
    Ok(Resumed { records })
}

/// Write `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let internal: CliError = quasinv::Error::TheoremViolation("x".into()).into();
        assert_eq!(internal.code(), 3);
        let config: CliError = quasinv::Error::BadCharacteristic("x".into()).into();
        assert_eq!(config.code(), 2);
        assert_eq!(CliError::Corrupt("x".into()).code(), 4);
    }

    #[test]
    fn line_carries_schema_and_kind() {
        let line = json_line("sweep", &serde_json::json!({"m": 3})).unwrap();
        assert_eq!(line, r#"{"schema":1,"kind":"sweep","m":3}"#);
    }
}
