//! Record ingestion: WFDB format 212, CSV, and raw 16-bit little-endian.

mod text;
mod wfdb;

pub use text::{read_csv, read_raw16, write_csv, write_raw16};
pub use wfdb::{pack_wfdb_212, parse_hea, read_record_file, read_wfdb_212, WfdbHeader};
