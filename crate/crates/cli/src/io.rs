use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fs_core::{FsError, Graph, Permutation};
use thiserror::Error;

use crate::args::FORMAT_VERSION;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: FsError },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_graph(path: &Path) -> CliResult<Graph> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Graph::parse_edge_list(&text).map_err(|source| CliError::Input { path: path.into(), source })
}

/// Accepts `2 0 1` as well as `2,0,1`.
pub fn parse_perm(s: &str) -> CliResult<Permutation> {
    Ok(s.replace(',', " ").parse()?)
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("{what}: `{t}` is not a valid entry"))))
        .collect()
}

/// `0,1;2;5,6` as a list of vertex sets. An empty segment is an empty set.
pub fn parse_sets(s: &str) -> CliResult<Vec<Vec<usize>>> {
    s.split(';')
        .map(|seg| if seg.trim().is_empty() { Ok(Vec::new()) } else { parse_list(seg, "--sets") })
        .collect()
}

/// Quotes a CSV field when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn join_path(path: &[Permutation]) -> String {
    path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("|")
}

/// The single provenance line that starts every output.
pub fn header(argv: &[String], seed: Option<u64>, extra: &str) -> String {
    let quote = |a: &String| if a.is_empty() || a.contains(char::is_whitespace) { format!("'{a}'") } else { a.clone() };
    let cmd = std::iter::once("fs".to_string()).chain(argv.iter().skip(1).map(quote)).collect::<Vec<_>>().join(" ");
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    let mut line = format!("# {cmd} | seed={seed} | fs {} format {FORMAT_VERSION}", env!("CARGO_PKG_VERSION"));
    if !extra.is_empty() {
        line.push_str(" | ");
        line.push_str(extra);
    }
    line.push('\n');
    line
}

pub fn emit(out: Option<&Path>, header: &str, body: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut text = String::with_capacity(header.len() + body.len());
            text.push_str(header);
            text.push_str(body);
            fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
        }
        None => {
            let mut lock = io::stdout().lock();
            lock.write_all(header.as_bytes())
                .and_then(|_| lock.write_all(body.as_bytes()))
                .and_then(|_| lock.flush())
                .or_else(|e| if e.kind() == io::ErrorKind::BrokenPipe { Ok(()) } else { Err(e) })
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
