//! JSON-lines graph set format and atomic file writes.
//!
//! One graph per line:
//! `{"label":0,"n":4,"edges":[[0,1],[1,2]],"provenance":{...}}`
//! with every edge written as `[u, v]`, `u < v`, in sorted order. Files whose
//! name ends in `.gz` are decompressed transparently on read.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSet, Provenance};

#[derive(Serialize)]
struct RecordOut<'a> {
    label: i64,
    n: usize,
    edges: Vec<[usize; 2]>,
    provenance: &'a Provenance,
}

#[derive(Deserialize)]
struct RecordIn {
    label: i64,
    n: usize,
    edges: Vec<Vec<i64>>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

/// Serializes every graph as one JSON line.
pub fn graphset_to_string(gs: &GraphSet) -> String {
    let mut out = String::new();
    for g in &gs.graphs {
        let rec = RecordOut {
            label: gs.label,
            n: g.node_count(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            provenance: &gs.provenance,
        };
        out.push_str(&serde_json::to_string(&rec).expect("graph record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_graphset(gs: &GraphSet, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), graphset_to_string(gs).as_bytes())
}

pub fn read_graphset(path: impl AsRef<Path>) -> Result<GraphSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(flate2::read::GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    parse_graphset(BufReader::new(reader), path)
}

/// Parses the JSON-lines format; `origin` is only used in error messages.
pub fn parse_graphset(reader: impl BufRead, origin: &Path) -> Result<GraphSet> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut graphs = Vec::new();
    let mut label = None;
    let mut provenance = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RecordIn = serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;
        let mut edges = Vec::with_capacity(rec.edges.len());
        for pair in &rec.edges {
            let [u, v] = pair[..] else {
                return Err(parse_err(
                    lineno,
                    "field `edges`: each edge must have two endpoints".into(),
                ));
            };
            if u < 0 || v < 0 || u as usize >= rec.n || v as usize >= rec.n {
                return Err(parse_err(
                    lineno,
                    format!("field `edges`: edge ({u},{v}) out of range for n={}", rec.n),
                ));
            }
            if u == v {
                return Err(parse_err(
                    lineno,
                    format!("field `edges`: self-loop at line {lineno} (node {u})"),
                ));
            }
            edges.push((u as usize, v as usize));
        }
        let g = Graph::from_edges(rec.n, &edges).map_err(|e| parse_err(lineno, format!("field `edges`: {e}")))?;
        match label {
            None => label = Some(rec.label),
            Some(l) if l != rec.label => {
                return Err(parse_err(
                    lineno,
                    format!("field `label`: {} differs from set label {l}", rec.label),
                ))
            }
            _ => {}
        }
        if provenance.is_none() {
            provenance = rec.provenance;
        }
        graphs.push(g);
    }
    if graphs.is_empty() {
        return Err(parse_err(0, "no graphs in file".into()));
    }
    GraphSet::new(
        graphs,
        label.unwrap_or(0),
        provenance.unwrap_or_else(|| Provenance::new("external", None)),
    )
}

/// Writes to a sibling temp file then renames, so failures leave no partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::param(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}
