//! Result emission: JSON envelopes and CSV tables, both stamped with the
//! config hash and seed.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("key `format`: unknown format {other:?}"))),
        }
    }
}

/// Where and how a command writes its result.
#[derive(Clone, Debug)]
pub struct Sink {
    pub config_hash: String,
    pub seed: u64,
    pub config: Value,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Flag values take precedence over the config's `format` and `out`.
    pub fn new(cfg: &Config, format: Option<Format>, out: Option<PathBuf>, default: Format) -> CliResult<Self> {
        let format = match format {
            Some(f) => f,
            None => cfg.str_opt("format")?.map(Format::parse).transpose()?.unwrap_or(default),
        };
        let out = out.or(cfg.str_opt("out")?.map(PathBuf::from));
        Ok(Self {
            config_hash: cfg.hash(),
            seed: cfg.seed()?,
            config: cfg.canonical(),
            format,
            out,
        })
    }

    pub fn to_file(&self) -> bool {
        self.out.is_some()
    }

    /// Stream for human-readable summaries: stdout when the result goes to a
    /// file, stderr otherwise.
    pub fn summary(&self) -> Box<dyn Write> {
        if self.to_file() {
            Box::new(io::stdout())
        } else {
            Box::new(io::stderr())
        }
    }

    fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    pub fn json<T: Serialize>(&self, result: &T) -> CliResult<()> {
        let envelope = json!({
            "config_hash": self.config_hash,
            "seed": self.seed,
            "config": self.config,
            "result": result,
        });
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, &envelope)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn csv<T: Serialize>(&self, rows: &[T]) -> CliResult<()> {
        if rows.is_empty() {
            return Err(CliError::Output("no rows to write".into()));
        }
        let mut w = csv::Writer::from_writer(self.writer()?);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Emit `rows` as CSV or `result` as a JSON envelope, per the format.
    pub fn emit<T: Serialize, R: Serialize>(&self, result: &T, rows: &[R]) -> CliResult<()> {
        match self.format {
            Format::Json => self.json(result),
            Format::Csv => self.csv(rows),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cfg = Config::parse("format = \"csv\"\nout = \"x.csv\"", PathBuf::new()).unwrap();
        let sink = Sink::new(&cfg, None, None, Format::Json).unwrap();
        assert_eq!(sink.format, Format::Csv);
        assert_eq!(sink.out, Some(PathBuf::from("x.csv")));
        let sink = Sink::new(&cfg, Some(Format::Json), Some("y.json".into()), Format::Csv).unwrap();
        assert_eq!(sink.format, Format::Json);
        assert_eq!(sink.out, Some(PathBuf::from("y.json")));
        let bad = Config::parse("format = \"xml\"", PathBuf::new()).unwrap();
        assert!(Sink::new(&bad, None, None, Format::Json).is_err());
    }

    #[test]
    fn empty_tables_are_rejected() {
        let sink = Sink::new(&Config::default(), None, None, Format::Csv).unwrap();
        assert!(sink.csv::<(u8,)>(&[]).is_err());
    }
}
