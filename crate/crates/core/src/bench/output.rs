use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?} (expected csv or json)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Writes `rows` to `dir/stem.{csv,json}`. The JSON form is an array of
/// objects with the CSV's column names; missing values are `null` there
/// and empty cells in the CSV. An empty CSV still gets its header line.
pub fn write_rows<T: Serialize + Default>(dir: &Path, stem: &str, rows: &[T], format: Format) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    match format {
        Format::Csv => {
            if rows.is_empty() {
                let mut probe = csv::Writer::from_writer(Vec::new());
                probe.serialize(T::default())?;
                let text = probe.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
                let header = text.split_inclusive(|&b| b == b'\n').next().unwrap_or_default();
                std::fs::write(&path, header).map_err(|e| Error::io(&path, e))?;
                return Ok(path);
            }
            let mut w = csv::Writer::from_path(&path)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        Format::Json => {
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, rows)?;
            w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(path)
}
