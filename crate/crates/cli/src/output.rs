use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::{CliError, CliResult};

/// Output schema version carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

fn open(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf), e)
}

/// Writes `body` as pretty JSON with a top-level `"schema"` field.
pub fn write_json(path: Option<&Path>, body: Value) -> CliResult<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), SCHEMA_VERSION.into());
    match body {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut w = open(path)?;
    serde_json::to_writer_pretty(&mut w, &Value::Object(doc)).map_err(|e| io_err(path)(e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes a header and rows of preformatted fields as CSV.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(open(path)?);
    let csv_err = |e: csv::Error| io_err(path)(e.into());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}
