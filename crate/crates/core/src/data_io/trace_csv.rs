use std::io::{Read, Write};

use csv::ReaderBuilder;

use crate::error::{Error, Result};
use crate::trace::{RunTrace, TraceRecord};

pub const TRACE_HEADER: &str = "epoch,f_value,subopt,queries,elapsed_ms";

/// One header line, then one row per record. Floats carry 17 significant
/// digits so they parse back to the same bits.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, mut sink: W) -> Result<()> {
    writeln!(sink, "{TRACE_HEADER}")?;
    for r in &trace.records {
        let subopt = r.subopt.map(|s| format!("{s:.16e}")).unwrap_or_default();
        writeln!(
            sink,
            "{},{:.16e},{},{},{}",
            r.epoch, r.f_value, subopt, r.queries, r.elapsed_ms
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(reader: R) -> Result<Vec<TraceRecord>> {
    let mut reader = ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = reader.headers().map_err(|e| csv_error(1, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != TRACE_HEADER {
        return Err(Error::Csv {
            row: 1,
            message: format!("unexpected header, want `{TRACE_HEADER}`"),
        });
    }
    let mut records = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| csv_error(line, e))?;
        let field = |j: usize| row.get(j).unwrap_or("");
        let bad = |j: usize| Error::Csv {
            row: line,
            message: format!("bad value `{}` in column {}", field(j), j + 1),
        };
        let subopt = match field(2) {
            "" => None,
            s => Some(s.parse().map_err(|_| bad(2))?),
        };
        records.push(TraceRecord {
            epoch: field(0).parse().map_err(|_| bad(0))?,
            f_value: field(1).parse().map_err(|_| bad(1))?,
            subopt,
            queries: field(3).parse().map_err(|_| bad(3))?,
            elapsed_ms: field(4).parse().map_err(|_| bad(4))?,
        });
    }
    Ok(records)
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Csv {
        row,
        message: e.to_string(),
    }
}
