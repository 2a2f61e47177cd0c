use std::io::BufRead;

use log::warn;

use crate::error::{Error, Result};
use crate::problems::Dataset;

struct Sample {
    label: f64,
    entries: Vec<(usize, f64)>,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits on ASCII whitespace, keeping each token's 1-based column.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_ascii_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - text.as_ptr() as usize + 1, tok))
}

fn parse_line(text: &str, line: usize) -> Result<Option<Sample>> {
    let text = text.split('#').next().unwrap_or("");
    let mut toks = tokens(text);
    let Some((col, label)) = toks.next() else {
        return Ok(None);
    };
    let label: f64 = label
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| parse_error(line, col, format!("invalid label `{label}`")))?;

    let mut entries = Vec::new();
    let mut last = 0usize;
    for (col, tok) in toks {
        let (idx, val) = tok.split_once(':').ok_or_else(|| {
            parse_error(line, col, format!("expected `index:value`, found `{tok}`"))
        })?;
        let idx: i64 = idx
            .parse()
            .map_err(|_| parse_error(line, col, format!("invalid feature index `{idx}`")))?;
        if idx <= 0 {
            return Err(parse_error(
                line,
                col,
                format!("feature index {idx} is not 1-based"),
            ));
        }
        let idx = idx as usize;
        if idx == last {
            return Err(parse_error(
                line,
                col,
                format!("duplicate feature index {idx}"),
            ));
        }
        if idx < last {
            return Err(parse_error(
                line,
                col,
                format!("feature index {idx} follows {last}"),
            ));
        }
        let val: f64 = val
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| {
                parse_error(
                    line,
                    col + tok.len() - val.len(),
                    format!("invalid value `{val}`"),
                )
            })?;
        entries.push((idx, val));
        last = idx;
    }
    Ok(Some(Sample { label, entries }))
}

/// Reads `<label> <idx>:<val> ...` lines into a dense dataset.
///
/// `d` is the largest index seen, or `d_hint` when that is larger. Labels
/// drawn only from {0, 1} are remapped to {−1, +1}.
pub fn parse_libsvm<R: BufRead>(reader: R, d_hint: Option<usize>) -> Result<Dataset> {
    let mut samples = Vec::new();
    for (i, text) in reader.lines().enumerate() {
        if let Some(sample) = parse_line(&text?, i + 1)? {
            samples.push(sample);
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let seen = samples
        .iter()
        .filter_map(|s| s.entries.last().map(|e| e.0))
        .max()
        .unwrap_or(0);
    let d = seen.max(d_hint.unwrap_or(0));
    if d == 0 {
        return Err(Error::InvalidParameter("no features present".into()));
    }

    let mut features = vec![0.0; samples.len() * d];
    let mut labels = Vec::with_capacity(samples.len());
    for (row, sample) in samples.iter().enumerate() {
        for &(idx, val) in &sample.entries {
            features[row * d + idx - 1] = val;
        }
        labels.push(sample.label);
    }

    if labels.iter().all(|&y| y == 0.0 || y == 1.0) && labels.contains(&0.0) {
        warn!("labels are in {{0, 1}}; remapping 0 to -1");
        labels.iter_mut().for_each(|y| *y = 2.0 * *y - 1.0);
    }
    Dataset::from_flat(features, labels, d)
}
