use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use angmax_core::verify::{Report, Row};
use serde_json::Value;

use crate::config::Format;
use crate::CliError;

/// Where and how artifacts are written.
#[derive(Debug, Clone)]
pub struct Target {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A report that is not produced by an experiment runner.
pub fn report(command: &str, seed: Option<u64>, config: Value, rows: Vec<Row>) -> Report {
    Report {
        experiment: command.to_string(),
        version: angmax_core::VERSION.to_string(),
        seed,
        config,
        rows,
        empirical_constants: BTreeMap::new(),
        flags: Vec::new(),
    }
}

impl Target {
    /// Write `csv` as `<stem>.csv` and `json` as `<stem>.json` into the output
    /// directory (both by default), or the selected one to standard output.
    pub fn emit(
        &self,
        stem: &str,
        csv: &Report,
        json: &Report,
        stdout_default: Format,
    ) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let format = self.format.unwrap_or(Format::Both);
                if matches!(format, Format::Csv | Format::Both) {
                    let path = dir.join(format!("{stem}.csv"));
                    write_file(&path, |w| csv.write_csv(w))?;
                    eprintln!("wrote {}", path.display());
                }
                if matches!(format, Format::Json | Format::Both) {
                    let path = dir.join(format!("{stem}.json"));
                    write_file(&path, |w| json.write_json(w))?;
                    eprintln!("wrote {}", path.display());
                }
            }
            None => {
                let format = self.format.unwrap_or(stdout_default);
                let stdout = io::stdout();
                let mut out = stdout.lock();
                if matches!(format, Format::Csv | Format::Both) {
                    csv.write_csv(&mut out)?;
                }
                if matches!(format, Format::Json | Format::Both) {
                    json.write_json(&mut out)?;
                }
                out.flush()?;
            }
        }
        Ok(())
    }
}

fn write_file(
    path: &std::path::Path,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}
