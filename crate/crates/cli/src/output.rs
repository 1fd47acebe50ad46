use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use dtaopt_core::SCHEMA_VERSION;

use crate::args::Format;

/// Where and how a command writes its report.
pub struct Sink {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Sink {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// Writes `{schema_version, command, config, result}` as JSON, or the
    /// flat `rows` as CSV.
    pub fn emit<C, T, R>(&self, command: &str, config: &C, result: &T, rows: &[R]) -> Result<()>
    where
        C: Serialize,
        T: Serialize,
        R: Serialize,
    {
        let mut out = self.writer()?;
        match self.format {
            Format::Json => {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": command,
                    "config": config,
                    "result": result,
                });
                serde_json::to_writer_pretty(&mut out, &doc)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                for row in rows {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Writes a bare JSON document (model files).
    pub fn raw_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut out = self.writer()?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

/// Machine-readable tag for an error chain.
pub fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<dtaopt_core::Error>() {
            return e.kind();
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return "io";
        }
        if cause.downcast_ref::<csv::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return "serialization";
        }
    }
    "invalid_argument"
}

pub fn error_record(err: &anyhow::Error) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": {
            "kind": error_kind(err),
            "message": format!("{err:#}"),
        }
    })
}

/// Joins numbers for single-cell CSV output.
pub fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}
