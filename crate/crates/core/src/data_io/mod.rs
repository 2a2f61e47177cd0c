//! Dataset readers (LIBSVM, dense CSV) and the trace CSV format.

mod dense;
mod libsvm;
mod trace_csv;

pub use dense::parse_dense_csv;
pub use libsvm::parse_libsvm;
pub use trace_csv::{read_trace_csv, write_trace_csv, TRACE_HEADER};

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::Result;
use crate::problems::Dataset;

pub fn load_libsvm(path: &Path, d_hint: Option<usize>) -> Result<Dataset> {
    parse_libsvm(BufReader::new(File::open(path)?), d_hint)
}

pub fn load_dense_csv(path: &Path, label_column: usize) -> Result<Dataset> {
    parse_dense_csv(File::open(path)?, label_column)
}
