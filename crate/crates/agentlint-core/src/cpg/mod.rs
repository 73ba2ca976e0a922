//! Code property graph: per-file ASTs plus a project-wide graph of
//! classes, functions, calls, imports, and assignments with inheritance,
//! containment, call, def-use, and package-import edges.

pub mod ast;
pub mod build;
pub mod io;
pub mod lexer;
pub mod parser;

pub use ast::{AstUnit, Span, SyntaxIssue};
pub use build::build_cpg;
pub use io::{export_graph, import_graph};
pub use parser::parse_source;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Class,
    Function,
    Call,
    Import,
    Assignment,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Inherits,
    Contains,
    Calls,
    DefUse,
    ImportsPackage,
}

/// Graph node. `file` is empty and `span` is `(0, 0)` for synthesized
/// nodes: unresolved call stubs and external package hubs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Qualified within the file where derivable, e.g. `Agent.run`.
    pub name: String,
    pub file: String,
    /// 1-based inclusive line span.
    pub span: (u32, u32),
}

impl GraphNode {
    pub fn is_synthesized(&self) -> bool {
        self.file.is_empty()
    }

    /// Last dotted segment of the qualified name.
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
}

/// Byte-precise location of a node's AST within its parsed unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AstLocation {
    /// Index into [`CodePropertyGraph::units`] (document order).
    pub unit: usize,
    pub byte_span: Span,
}

#[derive(Debug, Clone, Default)]
pub struct CodePropertyGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    /// Node id to AST location; synthesized nodes have no entry.
    pub ast_index: BTreeMap<NodeId, AstLocation>,
    /// Parsed units aligned with the snapshot's file order.
    pub units: Vec<AstUnit>,
    /// Decorator names per node, recorded for tool detection.
    pub decorators: BTreeMap<NodeId, Vec<String>>,
    /// Files that produced at least one syntax issue.
    pub parse_failures: Vec<(String, SyntaxIssue)>,
}

/// Structural equality is defined over nodes and edges; AST side tables
/// are derived data and excluded (an imported graph has none).
impl PartialEq for CodePropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl CodePropertyGraph {
    pub fn node(&self, id: NodeId) -> Option<&GraphNode> {
        self.nodes.get(id as usize).filter(|n| n.id == id)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn edges_from(&self, src: NodeId, kind: EdgeKind) -> impl Iterator<Item = &GraphEdge> {
        self.edges
            .iter()
            .filter(move |e| e.kind == kind && e.src == src)
    }

    pub fn edges_to(&self, dst: NodeId, kind: EdgeKind) -> impl Iterator<Item = &GraphEdge> {
        self.edges
            .iter()
            .filter(move |e| e.kind == kind && e.dst == dst)
    }

    /// Number of distinct files that produced syntax issues.
    pub fn parse_failure_count(&self) -> usize {
        let mut files: Vec<&str> = self
            .parse_failures
            .iter()
            .map(|(f, _)| f.as_str())
            .collect();
        files.dedup();
        files.sort_unstable();
        files.dedup();
        files.len()
    }

    /// Checks edge well-formedness; returns human-readable violations.
    /// Run after construction; an empty result is an invariant.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (idx, node) in self.nodes.iter().enumerate() {
            if node.id as usize != idx {
                problems.push(format!("node id {} at position {}", node.id, idx));
            }
        }
        for edge in &self.edges {
            let (src, dst) = match (self.node(edge.src), self.node(edge.dst)) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    problems.push(format!(
                        "edge {:?} {} -> {} references a missing node",
                        edge.kind, edge.src, edge.dst
                    ));
                    continue;
                }
            };
            let ok = match edge.kind {
                EdgeKind::Inherits => src.kind == NodeKind::Class && dst.kind == NodeKind::Class,
                EdgeKind::Contains => {
                    (src.kind == NodeKind::Class && dst.kind == NodeKind::Function)
                        || (src.kind == NodeKind::Function && dst.kind == NodeKind::Function)
                }
                EdgeKind::Calls => src.kind == NodeKind::Function && dst.kind == NodeKind::Function,
                EdgeKind::DefUse => {
                    src.kind == NodeKind::Assignment
                        && matches!(dst.kind, NodeKind::Call | NodeKind::Assignment)
                }
                EdgeKind::ImportsPackage => {
                    src.kind == NodeKind::Import && dst.kind == NodeKind::Import
                }
            };
            if !ok {
                problems.push(format!(
                    "edge {:?} connects {:?} {} -> {:?} {}",
                    edge.kind, src.kind, src.name, dst.kind, dst.name
                ));
            }
        }
        problems
    }
}
