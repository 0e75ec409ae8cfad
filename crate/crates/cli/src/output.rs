use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use schurscape::io::fmt17;
use schurscape::phasespace::Field;

use crate::config::{OutputConfig, RunConfig};
use crate::error::CliError;

/// An output directory. Every file is written through here so that the set of
/// formats follows the `[output]` section.
pub struct Output {
    dir: PathBuf,
    formats: OutputConfig,
}

/// One `key = value` line of `summary.toml`.
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl Output {
    /// Creates the directory and writes `manifest.toml`: the command, the tool
    /// version and the fully resolved config, loadable with `--config`.
    pub fn create(command: &str, cfg: &RunConfig) -> Result<Self, CliError> {
        let dir = cfg.output.dir.clone();
        fs::create_dir_all(&dir)?;
        let out = Self { dir, formats: cfg.output.clone() };
        out.text("manifest.toml", |w| {
            writeln!(w, "# Rerun with: schurscape {command} --config <this file>")?;
            writeln!(w, "[run]")?;
            writeln!(w, "command = \"{command}\"")?;
            writeln!(w, "version = \"{}\"", env!("CARGO_PKG_VERSION"))?;
            writeln!(w)?;
            write!(w, "{}", cfg.to_toml())?;
            Ok(())
        })?;
        Ok(out)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes a text file regardless of the format switches.
    pub fn text(
        &self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(self.path(name))?);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes a CSV table if CSV output is enabled.
    pub fn csv(
        &self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> schurscape::Result<()>,
    ) -> Result<(), CliError> {
        if !self.formats.csv {
            return Ok(());
        }
        let mut w = BufWriter::new(File::create(self.path(name))?);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// `<stem>.bin`, `<stem>.csv` and `<stem>.pgm`, as enabled.
    pub fn field(&self, stem: &str, field: &Field, meta: &[(String, String)]) -> Result<(), CliError> {
        if self.formats.binary {
            let mut w = BufWriter::new(File::create(self.path(&format!("{stem}.bin")))?);
            field.save(&mut w, meta)?;
            w.flush()?;
        }
        self.csv(&format!("{stem}.csv"), |w| field.write_csv(w))?;
        if self.formats.pgm {
            let mut w = BufWriter::new(File::create(self.path(&format!("{stem}.pgm")))?);
            field.write_pgm(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    /// `summary.toml` with the headline numbers of the run.
    pub fn summary(&self, entries: Vec<(&str, Value)>) -> Result<(), CliError> {
        self.text("summary.toml", |w| {
            for (k, v) in &entries {
                match v {
                    Value::Int(i) => writeln!(w, "{k} = {i}")?,
                    Value::Float(x) if x.is_finite() => writeln!(w, "{k} = {}", fmt17(*x))?,
                    Value::Float(x) => writeln!(w, "{k} = \"{x}\"")?,
                    Value::Text(s) => writeln!(w, "{k} = {s:?}")?,
                    Value::Bool(b) => writeln!(w, "{k} = {b}")?,
                }
            }
            Ok(())
        })?;
        for (k, v) in &entries {
            let shown = match v {
                Value::Int(i) => i.to_string(),
                Value::Float(x) => format!("{x:.6}"),
                Value::Text(s) => s.clone(),
                Value::Bool(b) => b.to_string(),
            };
            println!("{k:>24}  {shown}");
        }
        Ok(())
    }
}
