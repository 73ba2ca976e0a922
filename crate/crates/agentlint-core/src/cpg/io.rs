//! Node and edge file export: `nodes.jsonl` and `edges.jsonl`, one JSON
//! object per line, in graph order. Import reverses export exactly.

use super::{CodePropertyGraph, GraphEdge, GraphNode};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const NODES_FILE: &str = "nodes.jsonl";
pub const EDGES_FILE: &str = "edges.jsonl";

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("graph io on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Decode {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GraphIoError + '_ {
    move |source| GraphIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `nodes.jsonl` and `edges.jsonl` under `dir`; returns the two
/// paths. An empty graph produces two zero-line files.
pub fn export_graph(
    cpg: &CodePropertyGraph,
    dir: &Path,
) -> Result<(PathBuf, PathBuf), GraphIoError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let nodes_path = dir.join(NODES_FILE);
    let edges_path = dir.join(EDGES_FILE);

    let mut nodes_out = Vec::new();
    for node in &cpg.nodes {
        serde_json::to_writer(&mut nodes_out, node).expect("node serialization");
        nodes_out.push(b'\n');
    }
    std::fs::File::create(&nodes_path)
        .and_then(|mut f| f.write_all(&nodes_out))
        .map_err(io_err(&nodes_path))?;

    let mut edges_out = Vec::new();
    for edge in &cpg.edges {
        serde_json::to_writer(&mut edges_out, edge).expect("edge serialization");
        edges_out.push(b'\n');
    }
    std::fs::File::create(&edges_path)
        .and_then(|mut f| f.write_all(&edges_out))
        .map_err(io_err(&edges_path))?;

    Ok((nodes_path, edges_path))
}

/// Reads a graph back from a directory written by [`export_graph`]. The
/// result carries no AST side tables.
pub fn import_graph(dir: &Path) -> Result<CodePropertyGraph, GraphIoError> {
    let nodes_path = dir.join(NODES_FILE);
    let edges_path = dir.join(EDGES_FILE);
    let mut graph = CodePropertyGraph::default();

    let nodes_text = std::fs::read_to_string(&nodes_path).map_err(io_err(&nodes_path))?;
    for (idx, line) in nodes_text.lines().enumerate() {
        let node: GraphNode =
            serde_json::from_str(line).map_err(|source| GraphIoError::Decode {
                path: nodes_path.clone(),
                line: idx + 1,
                source,
            })?;
        graph.nodes.push(node);
    }

    let edges_text = std::fs::read_to_string(&edges_path).map_err(io_err(&edges_path))?;
    for (idx, line) in edges_text.lines().enumerate() {
        let edge: GraphEdge =
            serde_json::from_str(line).map_err(|source| GraphIoError::Decode {
                path: edges_path.clone(),
                line: idx + 1,
                source,
            })?;
        graph.edges.push(edge);
    }

    Ok(graph)
}
