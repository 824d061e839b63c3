//! Record loading with format detection by extension.

use std::path::Path;

use beatpack::{io, EcgRecord, Error, Result};

/// Metadata flags for formats that do not carry their own.
#[derive(Debug, Clone, Copy)]
pub struct PlainMeta {
    pub sampling_rate: f64,
    pub adc_bits: u8,
}

fn record_id_from(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "record".into())
}

/// Loads `.hea`/`.dat` (WFDB 212), `.csv`, or `.raw16`/`.raw`/`.bin`.
pub fn load_record(path: &Path, channel: usize, meta: PlainMeta) -> Result<EcgRecord> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "hea" => io::read_record_file(path, channel),
        "dat" => io::read_record_file(&path.with_extension("hea"), channel),
        "csv" => {
            let text = std::fs::read_to_string(path)?;
            io::read_csv(&text, meta.sampling_rate, meta.adc_bits, &record_id_from(path))
        }
        "raw16" | "raw" | "bin" => {
            let bytes = std::fs::read(path)?;
            io::read_raw16(&bytes, meta.sampling_rate, meta.adc_bits, &record_id_from(path))
        }
        other => Err(Error::InvalidArgument(format!(
            "unsupported input extension {other:?} (use .hea, .dat, .csv, .raw16, .raw, .bin)"
        ))),
    }
}

/// Writes decoded samples as CSV or raw16 depending on the extension.
pub fn write_record(path: &Path, record: &EcgRecord) -> Result<()> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "csv" => std::fs::write(path, io::write_csv(&record.samples))?,
        "raw16" | "raw" | "bin" => std::fs::write(path, io::write_raw16(&record.samples)?)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unsupported output extension {other:?} (use .csv, .raw16, .raw, .bin)"
            )))
        }
    }
    Ok(())
}
