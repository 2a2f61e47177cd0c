//! Manifest-driven batches of experiments.
//!
//! A manifest is a list of blocks separated by blank lines. Each block holds
//! `key = value` lines whose keys are the `run` flags without the leading
//! dashes (`_` and `-` are interchangeable), plus an optional `name` that
//! fixes the trace file name. `#` starts a comment. Relative dataset paths
//! are resolved against the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use log::warn;
use rayon::prelude::*;

use crate::args::{EntryArgs, RunArgs};
use crate::error::CliError;
use crate::experiment::{run_experiment, Outcome};
use crate::output::write_atomically;

pub const INDEX_FILE: &str = "index.csv";

const INDEX_HEADER: [&str; 15] = [
    "entry",
    "name",
    "status",
    "solver",
    "problem",
    "lambda",
    "seed",
    "epochs",
    "final_f",
    "final_subopt",
    "queries",
    "fstar",
    "fstar_source",
    "trace",
    "message",
];

/// One block of the manifest, before flag parsing.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    /// 1-based line of the block's first entry.
    pub line: usize,
    pub pairs: Vec<(String, String)>,
    /// Malformed lines, reported when the block runs.
    pub problems: Vec<String>,
}

pub fn parse_manifest(text: &str) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut current: Option<Block> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() {
                blocks.extend(current.take());
            }
            continue;
        }
        let block = current.get_or_insert_with(|| Block {
            line: k + 1,
            pairs: Vec::new(),
            problems: Vec::new(),
        });
        match line.split_once('=') {
            Some((key, value)) if !key.trim().is_empty() => {
                block
                    .pairs
                    .push((key.trim().replace('_', "-"), value.trim().to_string()));
            }
            _ => block.problems.push(format!(
                "line {}: expected `key = value`, found `{line}`",
                k + 1
            )),
        }
    }
    blocks.extend(current);
    blocks
}

#[derive(Debug)]
struct Entry {
    index: usize,
    name: String,
    args: Result<RunArgs, String>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "._-".contains(c))
}

fn entry_args(block: &Block, name: &str, base: &Path, out_dir: &Path) -> Result<RunArgs, String> {
    if let Some(p) = block.problems.first() {
        return Err(p.clone());
    }
    if !valid_name(name) {
        return Err(format!("invalid entry name `{name}`"));
    }
    let mut seen = HashSet::new();
    let mut argv = Vec::new();
    for (key, value) in &block.pairs {
        if !seen.insert(key.as_str()) {
            return Err(format!("key `{key}` given twice"));
        }
        match key.as_str() {
            "name" => {}
            "out" => {
                return Err(
                    "`out` is not allowed in a manifest; traces go to the output directory".into(),
                )
            }
            "scale-features" => match value.as_str() {
                "true" => argv.push("--scale-features".to_string()),
                "false" => {}
                other => {
                    return Err(format!(
                        "scale-features must be true or false, got `{other}`"
                    ))
                }
            },
            "dataset" => {
                argv.push("--dataset".into());
                argv.push(base.join(value).to_string_lossy().into_owned());
            }
            _ => {
                argv.push(format!("--{key}"));
                argv.push(value.clone());
            }
        }
    }
    argv.push("--out".into());
    argv.push(
        out_dir
            .join(format!("{name}.csv"))
            .to_string_lossy()
            .into_owned(),
    );
    EntryArgs::try_parse_from(&argv)
        .map(|e| e.run)
        .map_err(|e| {
            e.to_string()
                .lines()
                .next()
                .unwrap_or("invalid entry")
                .trim()
                .to_string()
        })
}

fn entries(blocks: &[Block], base: &Path, out_dir: &Path) -> Vec<Entry> {
    let mut names = HashSet::new();
    blocks
        .iter()
        .enumerate()
        .map(|(k, block)| {
            let index = k + 1;
            let name = block
                .pairs
                .iter()
                .find(|(key, _)| key == "name")
                .map_or_else(|| format!("entry-{index:03}"), |(_, v)| v.clone());
            let args = if names.insert(name.clone()) {
                entry_args(block, &name, base, out_dir)
            } else {
                Err(format!("duplicate entry name `{name}`"))
            };
            let args = args.map_err(|m| format!("block at line {}: {m}", block.line));
            Entry { index, name, args }
        })
        .collect()
}

/// Worker count from `ZODFO_THREADS`; rayon's default when unset.
pub fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var("ZODFO_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "ZODFO_THREADS must be a positive integer, got `{v}`"
            ))),
        },
    }
}

#[derive(Debug)]
pub struct GridReport {
    pub index: PathBuf,
    pub total: usize,
    pub failed: usize,
    pub diverged: usize,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn index_row(entry: &Entry, result: &Result<Outcome, CliError>) -> Vec<String> {
    let mut row = vec![entry.index.to_string(), entry.name.clone()];
    let (args, outcome) = match (&entry.args, result) {
        (Ok(args), Ok(outcome)) => (Some(args), Some(outcome)),
        (Ok(args), Err(_)) => (Some(args), None),
        _ => (None, None),
    };
    let status = match (outcome, result) {
        (Some(o), _) if o.diverged.is_some() => "diverged",
        (Some(_), _) => "ok",
        _ => "failed",
    };
    row.push(status.into());
    match args {
        Some(a) => row.extend([
            a.solver.name().to_string(),
            a.problem.name().to_string(),
            a.lambda.to_string(),
            a.seed.to_string(),
            a.epochs.to_string(),
        ]),
        None => row.extend(std::iter::repeat_n(String::new(), 5)),
    }
    match outcome {
        Some(o) => row.extend([
            fmt_opt(o.trace.final_value()),
            fmt_opt(o.trace.final_subopt()),
            o.trace.total_queries().to_string(),
            fmt_opt(o.f_star),
            o.f_star_source.to_string(),
            o.out
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            o.diverged.clone().unwrap_or_default(),
        ]),
        None => {
            row.extend(std::iter::repeat_n(String::new(), 6));
            row.push(match result {
                Err(e) => e.to_string(),
                Ok(_) => String::new(),
            });
        }
    }
    row
}

/// Runs every manifest entry and writes `index.csv` in `out_dir`. Entry
/// failures are recorded in the index and do not stop the others.
pub fn run_grid(manifest: &Path, out_dir: &Path) -> Result<GridReport, CliError> {
    let text = fs::read_to_string(manifest)
        .map_err(|e| CliError::Data(format!("cannot read manifest {}: {e}", manifest.display())))?;
    let threads = thread_limit()?;
    let base = manifest.parent().unwrap_or(Path::new(""));
    let entries = entries(&parse_manifest(&text), base, out_dir);
    fs::create_dir_all(out_dir).map_err(CliError::output(out_dir))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<Outcome, CliError>> = pool.install(|| {
        entries
            .par_iter()
            .map(|entry| match &entry.args {
                Ok(args) => run_experiment(args),
                Err(m) => Err(CliError::Config(m.clone())),
            })
            .collect()
    });

    let mut report = GridReport {
        index: out_dir.join(INDEX_FILE),
        total: entries.len(),
        failed: 0,
        diverged: 0,
    };
    let rows: Vec<Vec<String>> = entries
        .iter()
        .zip(&results)
        .map(|(e, r)| index_row(e, r))
        .collect();
    for (entry, row) in entries.iter().zip(&rows) {
        match row[2].as_str() {
            "failed" => {
                report.failed += 1;
                warn!("entry {} ({}) failed: {}", entry.index, entry.name, row[14]);
            }
            "diverged" => {
                report.diverged += 1;
                warn!(
                    "entry {} ({}) diverged: {}",
                    entry.index, entry.name, row[14]
                );
            }
            _ => {}
        }
    }
    write_atomically(&report.index, |sink| {
        let mut w = csv::Writer::from_writer(sink);
        let io = |e: csv::Error| CliError::Output {
            path: out_dir.join(INDEX_FILE),
            source: std::io::Error::other(e.to_string()),
        };
        w.write_record(INDEX_HEADER).map_err(io)?;
        for row in &rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush()
            .map_err(CliError::output(out_dir.join(INDEX_FILE)))
    })?;
    Ok(report)
}
