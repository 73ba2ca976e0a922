//! Unified node relationship tree.
//!
//! Classes and functions are treated as equivalent search units, but the
//! tree keeps their three relationships apart: the class inheritance
//! forest forms the trunk, functions encapsulated in each class form
//! branches, and one-hop callees followed by one-hop callers of each
//! branch function form leaves. A function called from several branches
//! is duplicated under each of them, once per call.
//!
//! Layered search visits parts in trunk, branch, leaf order, each part
//! layer by layer, each layer in document order, handing nodes to the
//! predicate in fixed-size batches and stopping at the first match.

use crate::cpg::{CodePropertyGraph, EdgeKind, NodeId, NodeKind};
use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static TREE_COUNTER: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Trunk,
    Branch,
    Leaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafRole {
    Callee,
    Caller,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnifiedKind {
    Class,
    Function,
}

/// One occurrence in the tree. The same graph node may occur several
/// times as a leaf; `(graph_id, part, parent, occurrence)` is unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifiedNode {
    /// Arena index; also the global search position.
    pub id: usize,
    /// Token of the owning tree; guards against cross-tree queries.
    pub tree: u64,
    pub graph_id: NodeId,
    pub kind: UnifiedKind,
    pub name: String,
    pub file: String,
    pub span: (u32, u32),
    pub part: Part,
    pub layer: usize,
    /// Position within the parent's child list.
    pub occurrence: usize,
    pub leaf_role: Option<LeafRole>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnrtError {
    #[error("node is not an occurrence in this tree")]
    NodeNotInTree,
}

/// Predicate failure wrapper carrying the batch under evaluation.
#[derive(Debug, Error)]
#[error("predicate failed while evaluating [{subjects}]: {source}")]
pub struct SearchError<E: std::error::Error + 'static> {
    pub subjects: String,
    #[source]
    pub source: E,
}

#[derive(Debug, Clone)]
struct LayerGroup {
    part: Part,
    layer: usize,
    /// Arena indices, already in document order.
    members: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Unrt {
    token: u64,
    nodes: Vec<UnifiedNode>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    groups: Vec<LayerGroup>,
    /// Inheritance cycles found during construction; analysis continues
    /// with the participants placed at layer zero.
    pub cycle_warnings: Vec<String>,
}

impl Unrt {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Occurrences in global search order.
    pub fn nodes(&self) -> &[UnifiedNode] {
        &self.nodes
    }

    /// Parent occurrence of a node, when it has one.
    pub fn parent_of(&self, node: &UnifiedNode) -> Option<&UnifiedNode> {
        self.check_member(node)
            .ok()
            .and_then(|idx| self.parent[idx])
            .map(|p| &self.nodes[p])
    }

    fn check_member(&self, node: &UnifiedNode) -> Result<usize, UnrtError> {
        if node.tree != self.token {
            return Err(UnrtError::NodeNotInTree);
        }
        match self.nodes.get(node.id) {
            Some(found) if found == node => Ok(node.id),
            _ => Err(UnrtError::NodeNotInTree),
        }
    }

    /// All occurrences strictly below `node`, in the same global
    /// (part, layer, document) order used by the layered search.
    pub fn children_of(&self, node: &UnifiedNode) -> Result<Vec<&UnifiedNode>, UnrtError> {
        let root = self.check_member(node)?;
        let mut below = HashSet::new();
        let mut stack: Vec<usize> = self.children[root].clone();
        while let Some(idx) = stack.pop() {
            if below.insert(idx) {
                stack.extend(self.children[idx].iter().copied());
            }
        }
        let mut ordered: Vec<usize> = below.into_iter().collect();
        ordered.sort_unstable();
        Ok(ordered.into_iter().map(|i| &self.nodes[i]).collect())
    }

    /// Indented debug rendering, one line per occurrence.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        fn render(unrt: &Unrt, idx: usize, depth: usize, out: &mut String) {
            let n = &unrt.nodes[idx];
            let role = match n.leaf_role {
                Some(LeafRole::Callee) => " (callee)",
                Some(LeafRole::Caller) => " (caller)",
                None => "",
            };
            out.push_str(&format!(
                "{}{:?} L{} {}{}\n",
                "  ".repeat(depth),
                n.part,
                n.layer,
                n.name,
                role
            ));
            for &child in &unrt.children[idx] {
                render(unrt, child, depth + 1, out);
            }
        }
        for (idx, n) in self.nodes.iter().enumerate() {
            if n.part == Part::Trunk && self.parent[idx].is_none() {
                render(self, idx, 0, &mut out);
            }
        }
        out
    }
}

/// Builds the tree from a validated graph.
pub fn build_unrt(cpg: &CodePropertyGraph) -> Unrt {
    let token = TREE_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut unrt = Unrt {
        token,
        ..Unrt::default()
    };

    // ------------------------------------------------------------------
    // Trunk: inheritance forest, layered by depth.
    // ------------------------------------------------------------------
    let class_ids: Vec<NodeId> = cpg.nodes_of_kind(NodeKind::Class).map(|n| n.id).collect();
    let class_pos: HashMap<NodeId, usize> = class_ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i))
        .collect();
    let mut bases: Vec<Vec<usize>> = vec![Vec::new(); class_ids.len()];
    for edge in cpg.edges_of_kind(EdgeKind::Inherits) {
        if let (Some(&src), Some(&dst)) = (class_pos.get(&edge.src), class_pos.get(&edge.dst)) {
            bases[src].push(dst);
        }
    }

    let (depths, cycles) = inheritance_depths(&bases);
    for cycle in &cycles {
        let names: Vec<&str> = cycle
            .iter()
            .map(|&i| cpg.node(class_ids[i]).unwrap().name.as_str())
            .collect();
        let file = cycle
            .first()
            .map(|&i| cpg.node(class_ids[i]).unwrap().file.clone())
            .unwrap_or_default();
        unrt.cycle_warnings.push(format!(
            "inheritance cycle in {file}: {}",
            names.join(" -> ")
        ));
    }

    let max_depth = depths.iter().copied().max().unwrap_or(0);
    // Trunk parent: the deepest base one layer up, smallest id on ties.
    let mut trunk_parent: Vec<Option<usize>> = vec![None; class_ids.len()];
    for (i, base_list) in bases.iter().enumerate() {
        if depths[i] == 0 {
            continue;
        }
        let mut best: Option<usize> = None;
        for &b in base_list {
            if depths[b] == depths[i] - 1 {
                best = Some(match best {
                    Some(prev) if class_ids[prev] <= class_ids[b] => prev,
                    _ => b,
                });
            }
        }
        trunk_parent[i] = best;
    }

    let mut trunk_occurrence: HashMap<usize, usize> = HashMap::new();
    for layer in 0..=max_depth {
        let mut members: Vec<usize> = (0..class_ids.len())
            .filter(|&i| depths[i] == layer)
            .collect();
        members.sort_by_key(|&i| class_ids[i]);
        if members.is_empty() {
            continue;
        }
        let mut group = LayerGroup {
            part: Part::Trunk,
            layer,
            members: Vec::new(),
        };
        for class_idx in members {
            let node = cpg.node(class_ids[class_idx]).unwrap();
            let parent_occ = trunk_parent[class_idx]
                .and_then(|p| trunk_occurrence.get(&p))
                .copied();
            let arena_idx = push_occurrence(
                &mut unrt,
                parent_occ,
                UnifiedNode {
                    id: 0,
                    tree: token,
                    graph_id: node.id,
                    kind: UnifiedKind::Class,
                    name: node.name.clone(),
                    file: node.file.clone(),
                    span: node.span,
                    part: Part::Trunk,
                    layer,
                    occurrence: 0,
                    leaf_role: None,
                },
            );
            trunk_occurrence.insert(class_idx, arena_idx);
            group.members.push(arena_idx);
        }
        unrt.groups.push(group);
    }

    // ------------------------------------------------------------------
    // Branches: one occurrence per containment edge whose chain reaches
    // a class, attached under that class, in document order.
    // ------------------------------------------------------------------
    let mut container_of: HashMap<NodeId, NodeId> = HashMap::new();
    for edge in cpg.edges_of_kind(EdgeKind::Contains) {
        container_of.insert(edge.dst, edge.src);
    }
    let owner_class = |mut id: NodeId| -> Option<NodeId> {
        loop {
            let node = cpg.node(id)?;
            if node.kind == NodeKind::Class {
                return Some(id);
            }
            id = *container_of.get(&id)?;
        }
    };

    // (branch fn graph id, owner class graph id), document order.
    let mut branch_entries: Vec<(NodeId, NodeId)> = Vec::new();
    for edge in cpg.edges_of_kind(EdgeKind::Contains) {
        if let Some(owner) = owner_class(edge.src) {
            branch_entries.push((edge.dst, owner));
        }
    }
    branch_entries.sort_by_key(|&(f, _)| f);

    let mut branch_occurrence: HashMap<NodeId, usize> = HashMap::new();
    for layer in 0..=max_depth {
        let members: Vec<(NodeId, NodeId)> = branch_entries
            .iter()
            .copied()
            .filter(|&(_, owner)| class_pos.get(&owner).is_some_and(|&i| depths[i] == layer))
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut group = LayerGroup {
            part: Part::Branch,
            layer,
            members: Vec::new(),
        };
        for (fn_id, owner) in members {
            let node = cpg.node(fn_id).unwrap();
            let parent_occ = class_pos
                .get(&owner)
                .and_then(|i| trunk_occurrence.get(i))
                .copied();
            let arena_idx = push_occurrence(
                &mut unrt,
                parent_occ,
                UnifiedNode {
                    id: 0,
                    tree: token,
                    graph_id: fn_id,
                    kind: UnifiedKind::Function,
                    name: node.name.clone(),
                    file: node.file.clone(),
                    span: node.span,
                    part: Part::Branch,
                    layer,
                    occurrence: 0,
                    leaf_role: None,
                },
            );
            branch_occurrence.insert(fn_id, arena_idx);
            group.members.push(arena_idx);
        }
        unrt.groups.push(group);
    }

    // ------------------------------------------------------------------
    // Leaves: per branch, one-hop callees in call-site order (duplicated
    // per call), then one-hop callers in caller document order. A
    // self-call contributes a single occurrence.
    // ------------------------------------------------------------------
    let calls: Vec<(NodeId, NodeId)> = cpg
        .edges_of_kind(EdgeKind::Calls)
        .map(|e| (e.src, e.dst))
        .collect();

    for layer in 0..=max_depth {
        let branch_fns: Vec<NodeId> = unrt
            .groups
            .iter()
            .filter(|g| g.part == Part::Branch && g.layer == layer)
            .flat_map(|g| g.members.iter().map(|&m| unrt.nodes[m].graph_id))
            .collect();
        if branch_fns.is_empty() {
            continue;
        }
        let mut group = LayerGroup {
            part: Part::Leaf,
            layer,
            members: Vec::new(),
        };
        for fn_id in branch_fns {
            let parent_occ = branch_occurrence.get(&fn_id).copied();
            let mut self_call_seen = false;
            // Callees, call-site order.
            for &(src, dst) in calls.iter().filter(|&&(src, _)| src == fn_id) {
                if dst == src {
                    if self_call_seen {
                        continue;
                    }
                    self_call_seen = true;
                }
                let node = cpg.node(dst).unwrap();
                let arena_idx = push_occurrence(
                    &mut unrt,
                    parent_occ,
                    UnifiedNode {
                        id: 0,
                        tree: token,
                        graph_id: dst,
                        kind: UnifiedKind::Function,
                        name: node.name.clone(),
                        file: node.file.clone(),
                        span: node.span,
                        part: Part::Leaf,
                        layer,
                        occurrence: 0,
                        leaf_role: Some(LeafRole::Callee),
                    },
                );
                group.members.push(arena_idx);
            }
            // Callers, caller document order (edge emission order is
            // grouped by caller already).
            let mut callers: Vec<(NodeId, usize)> = calls
                .iter()
                .enumerate()
                .filter(|&(_, &(src, dst))| dst == fn_id && src != fn_id)
                .map(|(pos, &(src, _))| (src, pos))
                .collect();
            callers.sort_by_key(|&(src, pos)| (src, pos));
            for (src, _) in callers {
                let node = cpg.node(src).unwrap();
                let arena_idx = push_occurrence(
                    &mut unrt,
                    parent_occ,
                    UnifiedNode {
                        id: 0,
                        tree: token,
                        graph_id: src,
                        kind: UnifiedKind::Function,
                        name: node.name.clone(),
                        file: node.file.clone(),
                        span: node.span,
                        part: Part::Leaf,
                        layer,
                        occurrence: 0,
                        leaf_role: Some(LeafRole::Caller),
                    },
                );
                group.members.push(arena_idx);
            }
        }
        if !group.members.is_empty() {
            unrt.groups.push(group);
        }
    }

    // Groups were pushed trunk-first, then branches, then leaves, but
    // interleaved by the layer loops above; restore part-major order.
    unrt.groups.sort_by_key(|g| (g.part, g.layer));
    unrt
}

fn push_occurrence(unrt: &mut Unrt, parent: Option<usize>, mut node: UnifiedNode) -> usize {
    let idx = unrt.nodes.len();
    node.id = idx;
    node.occurrence = parent.map(|p| unrt.children[p].len()).unwrap_or(0);
    unrt.nodes.push(node);
    unrt.parent.push(parent);
    unrt.children.push(Vec::new());
    if let Some(p) = parent {
        unrt.children[p].push(idx);
    }
    idx
}

/// Inheritance depth per class: roots at zero, otherwise one past the
/// deepest resolvable base. Cycle participants are forced to layer zero
/// and reported.
fn inheritance_depths(bases: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = bases.len();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut cyclic: HashSet<usize> = HashSet::new();

    // Cycle detection: iterative three-color DFS.
    let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
    let mut stack_set: Vec<usize> = Vec::new();
    fn dfs(
        v: usize,
        bases: &[Vec<usize>],
        color: &mut [u8],
        stack_set: &mut Vec<usize>,
        cycles: &mut Vec<Vec<usize>>,
        cyclic: &mut HashSet<usize>,
    ) {
        color[v] = 1;
        stack_set.push(v);
        for &b in &bases[v] {
            match color[b] {
                0 => dfs(b, bases, color, stack_set, cycles, cyclic),
                1 => {
                    let start = stack_set.iter().position(|&x| x == b).unwrap();
                    let cycle: Vec<usize> = stack_set[start..].to_vec();
                    cyclic.extend(cycle.iter().copied());
                    cycles.push(cycle);
                }
                _ => {}
            }
        }
        stack_set.pop();
        color[v] = 2;
    }
    for v in 0..n {
        if color[v] == 0 {
            dfs(
                v,
                bases,
                &mut color,
                &mut stack_set,
                &mut cycles,
                &mut cyclic,
            );
        }
    }

    // Depths with cycle participants pinned to zero.
    let mut memo: Vec<Option<usize>> = vec![None; n];
    fn depth_of(
        v: usize,
        bases: &[Vec<usize>],
        cyclic: &HashSet<usize>,
        memo: &mut Vec<Option<usize>>,
    ) -> usize {
        if let Some(d) = memo[v] {
            return d;
        }
        if cyclic.contains(&v) {
            memo[v] = Some(0);
            return 0;
        }
        memo[v] = Some(0); // provisional; bases of acyclic nodes terminate
        let d = bases[v]
            .iter()
            .map(|&b| depth_of(b, bases, cyclic, memo) + 1)
            .max()
            .unwrap_or(0);
        memo[v] = Some(d);
        d
    }
    let depths: Vec<usize> = (0..n)
        .map(|v| depth_of(v, bases, &cyclic, &mut memo))
        .collect();
    (depths, cycles)
}

/// First-match traversal in (part, layer, document) order. Nodes are
/// handed to the predicate in batches of at most `batch_size`, never
/// crossing a (part, layer) group; the predicate answers with the first
/// matching index within the batch, and the search exits there.
pub fn layered_search<E: std::error::Error + 'static>(
    unrt: &Unrt,
    batch_size: usize,
    mut predicate: impl FnMut(&[&UnifiedNode]) -> Result<Option<usize>, E>,
) -> Result<Option<&UnifiedNode>, SearchError<E>> {
    let batch_size = batch_size.max(1);
    for group in &unrt.groups {
        for chunk in group.members.chunks(batch_size) {
            let batch: Vec<&UnifiedNode> = chunk.iter().map(|&i| &unrt.nodes[i]).collect();
            match predicate(&batch) {
                Ok(Some(index)) if index < batch.len() => {
                    return Ok(Some(batch[index]));
                }
                Ok(_) => {}
                Err(source) => {
                    let subjects = batch
                        .iter()
                        .map(|n| n.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ");
                    return Err(SearchError { subjects, source });
                }
            }
        }
    }
    Ok(None)
}
