//! Graph construction: one pre-order node pass per file in document
//! order (so ids are dense and stable), then edge passes for
//! inheritance, containment, calls, def-use, and package imports.
//!
//! Name resolution is purely syntactic with the precedence: same scope,
//! same class, same file (including imported project symbols), unique
//! project-global name. Unresolvable callees become stub nodes so the
//! relationship tree can still attach leaves.

use super::ast::*;
use super::{AstLocation, CodePropertyGraph, EdgeKind, GraphEdge, GraphNode, NodeId, NodeKind};
use crate::ingest::ProjectSnapshot;
use std::collections::{BTreeMap, HashMap, HashSet};

pub fn build_cpg(snapshot: &ProjectSnapshot) -> CodePropertyGraph {
    let units: Vec<AstUnit> = snapshot
        .files
        .iter()
        .map(super::parser::parse_source)
        .collect();
    let mut builder = Builder::new(snapshot, units);
    builder.collect_nodes();
    builder.link_inheritance();
    builder.link_containment();
    builder.link_calls();
    builder.link_def_use();
    builder.link_imports();
    builder.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Container {
    Module,
    Class(usize),
    Function(usize),
}

#[derive(Debug, Clone)]
struct ClassInfo {
    node: NodeId,
    unit: usize,
    simple: String,
    base_paths: Vec<String>,
    top_level: bool,
}

#[derive(Debug, Clone)]
struct FnInfo {
    node: NodeId,
    unit: usize,
    simple: String,
    container: Container,
    top_level: bool,
}

#[derive(Debug, Clone)]
struct CallInfo {
    node: NodeId,
    unit: usize,
    /// Index into `functions` of the nearest enclosing function.
    enclosing_fn: Option<usize>,
    /// Index into `classes` of the nearest enclosing class.
    enclosing_class: Option<usize>,
    path: String,
    terminal: Option<String>,
}

#[derive(Debug, Clone)]
struct ImportInfo {
    node: NodeId,
    /// Dotted module path; empty for bare relative imports.
    module: String,
    level: usize,
}

#[derive(Debug, Clone)]
struct ImportedSym {
    module: String,
    level: usize,
    /// `None` when the whole module was imported.
    symbol: Option<String>,
}

/// One def-use event inside a lexical scope, in document order.
struct UseEvent {
    node: NodeId,
    reads: Vec<String>,
    writes: Vec<String>,
}

struct Builder<'a> {
    snapshot: &'a ProjectSnapshot,
    units: Vec<AstUnit>,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    ast_index: BTreeMap<NodeId, AstLocation>,
    decorators: BTreeMap<NodeId, Vec<String>>,
    classes: Vec<ClassInfo>,
    functions: Vec<FnInfo>,
    calls: Vec<CallInfo>,
    imports: Vec<ImportInfo>,
    /// Per-unit map of locally visible imported names.
    import_maps: Vec<HashMap<String, ImportedSym>>,
    /// DefUse events per lexical scope, scopes in document order.
    scopes: Vec<Vec<UseEvent>>,
    /// Class-body attribute bindings: (class idx, attr, assignment node).
    class_attr_bindings: Vec<(usize, String, NodeId)>,
    stub_ids: HashMap<String, NodeId>,
    package_ids: HashMap<String, NodeId>,
    /// Names that resolve inside the project (directories and file stems).
    project_module_names: HashSet<String>,
}

impl<'a> Builder<'a> {
    fn new(snapshot: &'a ProjectSnapshot, units: Vec<AstUnit>) -> Self {
        let mut project_module_names = HashSet::new();
        for file in &snapshot.files {
            let parts: Vec<&str> = file.path.split('/').collect();
            for dir in &parts[..parts.len().saturating_sub(1)] {
                project_module_names.insert(dir.to_string());
            }
            if let Some(stem) = parts.last().and_then(|f| f.strip_suffix(".py")) {
                project_module_names.insert(stem.to_string());
            }
        }
        let unit_count = units.len();
        Builder {
            snapshot,
            units,
            nodes: Vec::new(),
            edges: Vec::new(),
            ast_index: BTreeMap::new(),
            decorators: BTreeMap::new(),
            classes: Vec::new(),
            functions: Vec::new(),
            calls: Vec::new(),
            imports: Vec::new(),
            import_maps: vec![HashMap::new(); unit_count],
            scopes: Vec::new(),
            class_attr_bindings: Vec::new(),
            stub_ids: HashMap::new(),
            package_ids: HashMap::new(),
            project_module_names,
        }
    }

    fn finish(mut self) -> CodePropertyGraph {
        let mut parse_failures = Vec::new();
        for unit in &self.units {
            for issue in &unit.issues {
                parse_failures.push((unit.path.clone(), issue.clone()));
            }
        }
        CodePropertyGraph {
            nodes: std::mem::take(&mut self.nodes),
            edges: std::mem::take(&mut self.edges),
            ast_index: std::mem::take(&mut self.ast_index),
            units: std::mem::take(&mut self.units),
            decorators: std::mem::take(&mut self.decorators),
            parse_failures,
        }
    }

    fn line_span(&self, unit: usize, span: Span) -> (u32, u32) {
        let file = &self.snapshot.files[unit];
        let end = span.end.saturating_sub(1).max(span.start);
        (file.line_of(span.start), file.line_of(end))
    }

    fn add_node(&mut self, unit: usize, kind: NodeKind, name: String, span: Span) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(GraphNode {
            id,
            kind,
            name,
            file: self.snapshot.files[unit].path.clone(),
            span: self.line_span(unit, span),
        });
        self.ast_index.insert(
            id,
            AstLocation {
                unit,
                byte_span: span,
            },
        );
        id
    }

    fn add_synthesized(&mut self, kind: NodeKind, name: String) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(GraphNode {
            id,
            kind,
            name,
            file: String::new(),
            span: (0, 0),
        });
        id
    }

    // ------------------------------------------------------------------
    // Node pass
    // ------------------------------------------------------------------

    fn collect_nodes(&mut self) {
        let units = std::mem::take(&mut self.units);
        for (unit_idx, unit) in units.iter().enumerate() {
            let mut walker = Walker {
                b: self,
                unit: unit_idx,
                qual: Vec::new(),
                containers: vec![Container::Module],
            };
            let events = walker.walk_body(&unit.body);
            self.scopes.push(events);
        }
        self.units = units;
    }

    // ------------------------------------------------------------------
    // Inheritance
    // ------------------------------------------------------------------

    fn link_inheritance(&mut self) {
        for idx in 0..self.classes.len() {
            let info = self.classes[idx].clone();
            for base in &info.base_paths {
                if let Some(target) = self.resolve_class(info.unit, base) {
                    if target != info.node {
                        self.edges.push(GraphEdge {
                            src: info.node,
                            dst: target,
                            kind: EdgeKind::Inherits,
                        });
                    }
                }
            }
        }
    }

    /// Resolves a base-class path: same file, imported name, then a
    /// unique project-global match.
    fn resolve_class(&self, unit: usize, base_path: &str) -> Option<NodeId> {
        let terminal = base_path.rsplit('.').next().unwrap_or(base_path);
        // Same file, top-level classes first.
        let mut same_file: Vec<&ClassInfo> = self
            .classes
            .iter()
            .filter(|c| c.unit == unit && c.simple == terminal)
            .collect();
        same_file.sort_by_key(|c| (!c.top_level, c.node));
        if let Some(c) = same_file.first() {
            return Some(c.node);
        }
        // Imported name: `from mod import Base` or `mod.Base` with
        // `import mod`.
        let first_seg = base_path.split('.').next().unwrap_or(base_path);
        if let Some(sym) = self.import_maps[unit].get(first_seg).cloned() {
            let symbol_name = sym.symbol.as_deref().unwrap_or(terminal);
            if let Some(target_unit) = self.resolve_module_unit(unit, sym.level, &sym.module) {
                if let Some(c) = self
                    .classes
                    .iter()
                    .find(|c| c.unit == target_unit && c.top_level && c.simple == symbol_name)
                {
                    return Some(c.node);
                }
                // `import pkg.mod` then `pkg.mod.Base`
                if let Some(c) = self
                    .classes
                    .iter()
                    .find(|c| c.unit == target_unit && c.top_level && c.simple == terminal)
                {
                    return Some(c.node);
                }
            }
        }
        // Unique project-global name.
        let global: Vec<&ClassInfo> = self
            .classes
            .iter()
            .filter(|c| c.simple == terminal)
            .collect();
        if global.len() == 1 {
            return Some(global[0].node);
        }
        None
    }

    /// Maps a dotted module path to a snapshot unit, trying root-relative
    /// paths, paths relative to the importing file, and explicit relative
    /// levels.
    fn resolve_module_unit(&self, from_unit: usize, level: usize, module: &str) -> Option<usize> {
        let rel = module.replace('.', "/");
        let from_dir = {
            let p = &self.snapshot.files[from_unit].path;
            match p.rfind('/') {
                Some(i) => &p[..i],
                None => "",
            }
        };
        let mut candidates = Vec::new();
        if level == 0 {
            candidates.push(format!("{rel}.py"));
            candidates.push(format!("{rel}/__init__.py"));
            if !from_dir.is_empty() {
                candidates.push(format!("{from_dir}/{rel}.py"));
                candidates.push(format!("{from_dir}/{rel}/__init__.py"));
            }
        } else {
            let mut dir = from_dir.to_string();
            for _ in 1..level {
                dir = match dir.rfind('/') {
                    Some(i) => dir[..i].to_string(),
                    None => String::new(),
                };
            }
            let prefix = if dir.is_empty() {
                String::new()
            } else {
                format!("{dir}/")
            };
            if module.is_empty() {
                candidates.push(format!("{prefix}__init__.py"));
            } else {
                candidates.push(format!("{prefix}{rel}.py"));
                candidates.push(format!("{prefix}{rel}/__init__.py"));
            }
        }
        for cand in candidates {
            if let Some(idx) = self.snapshot.file_index(&cand) {
                return Some(idx);
            }
        }
        None
    }

    // ------------------------------------------------------------------
    // Containment
    // ------------------------------------------------------------------

    fn link_containment(&mut self) {
        for f in &self.functions {
            let src = match f.container {
                Container::Class(c) => self.classes[c].node,
                Container::Function(p) => self.functions[p].node,
                Container::Module => continue,
            };
            self.edges.push(GraphEdge {
                src,
                dst: f.node,
                kind: EdgeKind::Contains,
            });
        }
    }

    // ------------------------------------------------------------------
    // Calls
    // ------------------------------------------------------------------

    fn link_calls(&mut self) {
        // Group call sites per enclosing function, in document order.
        let call_indices: Vec<usize> = (0..self.calls.len()).collect();
        for idx in call_indices {
            let call = self.calls[idx].clone();
            let Some(enclosing) = call.enclosing_fn else {
                continue;
            };
            let Some(terminal) = call.terminal.clone() else {
                continue;
            };
            let src = self.functions[enclosing].node;
            let dst = self
                .resolve_call(&call, &terminal, enclosing)
                .unwrap_or_else(|| self.stub_for(&call.path));
            self.edges.push(GraphEdge {
                src,
                dst,
                kind: EdgeKind::Calls,
            });
        }
    }

    fn stub_for(&mut self, path: &str) -> NodeId {
        if let Some(&id) = self.stub_ids.get(path) {
            return id;
        }
        let id = self.add_synthesized(NodeKind::Function, path.to_string());
        self.stub_ids.insert(path.to_string(), id);
        id
    }

    fn resolve_call(&self, call: &CallInfo, terminal: &str, enclosing: usize) -> Option<NodeId> {
        // 1. Same scope: nested defs, walking the enclosing chain.
        let mut chain = Some(enclosing);
        while let Some(fn_idx) = chain {
            if let Some(hit) = self
                .functions
                .iter()
                .find(|g| g.simple == terminal && g.container == Container::Function(fn_idx))
            {
                return Some(hit.node);
            }
            chain = match self.functions[fn_idx].container {
                Container::Function(p) => Some(p),
                _ => None,
            };
        }
        // 2. Same class: methods of the nearest enclosing class.
        if let Some(class_idx) = call.enclosing_class {
            if let Some(hit) = self
                .functions
                .iter()
                .find(|g| g.simple == terminal && g.container == Container::Class(class_idx))
            {
                return Some(hit.node);
            }
        }
        // 3. Same file: top-level functions, then imported project symbols.
        if let Some(hit) = self
            .functions
            .iter()
            .find(|g| g.unit == call.unit && g.top_level && g.simple == terminal)
        {
            return Some(hit.node);
        }
        let first_seg = call.path.split(['.', '[']).next().unwrap_or(terminal);
        if let Some(sym) = self.import_maps[call.unit].get(first_seg) {
            let symbol_name = sym.symbol.as_deref().unwrap_or(terminal);
            if let Some(target_unit) = self.resolve_module_unit(call.unit, sym.level, &sym.module) {
                if let Some(hit) = self
                    .functions
                    .iter()
                    .find(|g| g.unit == target_unit && g.top_level && g.simple == symbol_name)
                {
                    return Some(hit.node);
                }
                if let Some(hit) = self
                    .functions
                    .iter()
                    .find(|g| g.unit == target_unit && g.top_level && g.simple == terminal)
                {
                    return Some(hit.node);
                }
            }
        }
        // 4. Unique project-global name.
        let global: Vec<&FnInfo> = self
            .functions
            .iter()
            .filter(|g| g.simple == terminal)
            .collect();
        if global.len() == 1 {
            return Some(global[0].node);
        }
        None
    }

    // ------------------------------------------------------------------
    // Def-use
    // ------------------------------------------------------------------

    fn link_def_use(&mut self) {
        let scopes = std::mem::take(&mut self.scopes);
        for events in &scopes {
            let mut bindings: HashMap<&str, Vec<NodeId>> = HashMap::new();
            for event in events {
                for read in &event.reads {
                    if let Some(defs) = bindings.get(read.as_str()) {
                        for &def in defs {
                            if def != event.node {
                                self.edges.push(GraphEdge {
                                    src: def,
                                    dst: event.node,
                                    kind: EdgeKind::DefUse,
                                });
                            }
                        }
                    }
                }
                for write in &event.writes {
                    bindings.entry(write.as_str()).or_default().push(event.node);
                }
            }
        }
        self.scopes = scopes;

        // Class-attribute constant bindings: class-body assignments feed
        // `self.<attr>` reads inside the class's methods.
        let bindings = self.class_attr_bindings.clone();
        let mut method_reads: Vec<(usize, NodeId, Vec<String>)> = Vec::new();
        for call in &self.calls {
            if let Some(class_idx) = call.enclosing_class {
                if call.enclosing_fn.is_some() {
                    if let Some(loc) = self.ast_index.get(&call.node) {
                        let reads = self.attr_reads_at(loc.unit, loc.byte_span);
                        method_reads.push((class_idx, call.node, reads));
                    }
                }
            }
        }
        for (class_idx, attr, def_node) in bindings {
            let needle = format!("self.{attr}");
            for (read_class, node, reads) in &method_reads {
                if *read_class == class_idx && reads.iter().any(|r| r == &needle) {
                    self.edges.push(GraphEdge {
                        src: def_node,
                        dst: *node,
                        kind: EdgeKind::DefUse,
                    });
                }
            }
        }
    }

    fn attr_reads_at(&self, unit: usize, span: Span) -> Vec<String> {
        let mut out = Vec::new();
        visit_exprs(&self.units[unit].body, &mut |e| {
            if e.span == span {
                out.extend(e.read_attr_paths());
            }
        });
        out
    }

    // ------------------------------------------------------------------
    // Package imports
    // ------------------------------------------------------------------

    fn link_imports(&mut self) {
        for idx in 0..self.imports.len() {
            let info = self.imports[idx].clone();
            if info.level > 0 {
                continue; // relative imports are project-internal
            }
            let top = info
                .module
                .split('.')
                .next()
                .unwrap_or(&info.module)
                .to_string();
            if top.is_empty() || self.project_module_names.contains(&top) {
                continue;
            }
            let hub = match self.package_ids.get(&top) {
                Some(&id) => id,
                None => {
                    let id = self.add_synthesized(NodeKind::Import, top.clone());
                    self.package_ids.insert(top, id);
                    id
                }
            };
            self.edges.push(GraphEdge {
                src: info.node,
                dst: hub,
                kind: EdgeKind::ImportsPackage,
            });
        }
    }
}

// ----------------------------------------------------------------------
// AST walker: creates nodes in document order and records def-use events
// ----------------------------------------------------------------------

struct Walker<'a, 'b> {
    b: &'b mut Builder<'a>,
    unit: usize,
    qual: Vec<String>,
    containers: Vec<Container>,
}

impl Walker<'_, '_> {
    fn qualname(&self, name: &str) -> String {
        if self.qual.is_empty() {
            name.to_string()
        } else {
            format!("{}.{}", self.qual.join("."), name)
        }
    }

    fn current_container(&self) -> Container {
        *self.containers.last().unwrap()
    }

    fn enclosing_fn(&self) -> Option<usize> {
        self.containers.iter().rev().find_map(|c| match c {
            Container::Function(i) => Some(*i),
            _ => None,
        })
    }

    fn enclosing_class(&self) -> Option<usize> {
        self.containers.iter().rev().find_map(|c| match c {
            Container::Class(i) => Some(*i),
            _ => None,
        })
    }

    /// Walks a lexical scope body; returns its def-use events.
    fn walk_body(&mut self, body: &[Stmt]) -> Vec<UseEvent> {
        let mut events = Vec::new();
        for stmt in body {
            self.walk_stmt(stmt, &mut events);
        }
        events
    }

    fn walk_stmt(&mut self, stmt: &Stmt, events: &mut Vec<UseEvent>) {
        match &stmt.kind {
            StmtKind::ClassDef(def) => self.walk_classdef(def, stmt.span, events),
            StmtKind::FunctionDef(def) => self.walk_funcdef(def, stmt.span, events),
            StmtKind::Import(aliases) => {
                for alias in aliases {
                    let node =
                        self.b
                            .add_node(self.unit, NodeKind::Import, alias.name.clone(), stmt.span);
                    self.b.imports.push(ImportInfo {
                        node,
                        module: alias.name.clone(),
                        level: 0,
                    });
                    let local = alias
                        .asname
                        .clone()
                        .unwrap_or_else(|| alias.name.split('.').next().unwrap().to_string());
                    self.b.import_maps[self.unit].insert(
                        local,
                        ImportedSym {
                            module: alias.name.clone(),
                            level: 0,
                            symbol: None,
                        },
                    );
                }
            }
            StmtKind::ImportFrom {
                level,
                module,
                names,
            } => {
                let display = format!("{}{}", ".".repeat(*level), module);
                let node = self
                    .b
                    .add_node(self.unit, NodeKind::Import, display, stmt.span);
                self.b.imports.push(ImportInfo {
                    node,
                    module: module.clone(),
                    level: *level,
                });
                for alias in names {
                    if alias.name == "*" {
                        continue;
                    }
                    let local = alias.asname.clone().unwrap_or_else(|| alias.name.clone());
                    self.b.import_maps[self.unit].insert(
                        local,
                        ImportedSym {
                            module: module.clone(),
                            level: *level,
                            symbol: Some(alias.name.clone()),
                        },
                    );
                }
            }
            StmtKind::Assign { targets, value } => {
                self.walk_assignment(stmt.span, targets, Some(value), None, events);
            }
            StmtKind::AnnAssign { target, value, .. } => {
                if let Some(value) = value {
                    self.walk_assignment(
                        stmt.span,
                        std::slice::from_ref(target),
                        Some(value),
                        None,
                        events,
                    );
                }
            }
            StmtKind::AugAssign { target, value, .. } => {
                // Augmented assignment both reads and writes the target.
                self.walk_assignment(
                    stmt.span,
                    std::slice::from_ref(target),
                    Some(value),
                    Some(target),
                    events,
                );
            }
            StmtKind::Expr(e) => {
                self.walk_expr(e, events);
            }
            StmtKind::Return { value } => {
                if let Some(v) = value {
                    self.walk_expr(v, events);
                }
            }
            StmtKind::Assert { test, msg } => {
                self.walk_expr(test, events);
                if let Some(m) = msg {
                    self.walk_expr(m, events);
                }
            }
            StmtKind::If { test, body, orelse } | StmtKind::While { test, body, orelse } => {
                self.walk_expr(test, events);
                for s in body {
                    self.walk_stmt(s, events);
                }
                for s in orelse {
                    self.walk_stmt(s, events);
                }
            }
            StmtKind::For {
                target,
                iter,
                body,
                orelse,
            } => {
                self.walk_expr(iter, events);
                // Loop targets bind names but have no assignment node, so
                // they do not participate in def-use edges.
                let _ = target;
                for s in body {
                    self.walk_stmt(s, events);
                }
                for s in orelse {
                    self.walk_stmt(s, events);
                }
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                for s in body {
                    self.walk_stmt(s, events);
                }
                for h in handlers {
                    if let Some(t) = &h.typ {
                        self.walk_expr(t, events);
                    }
                    for s in &h.body {
                        self.walk_stmt(s, events);
                    }
                }
                for s in orelse {
                    self.walk_stmt(s, events);
                }
                for s in finalbody {
                    self.walk_stmt(s, events);
                }
            }
            StmtKind::With { items, body } => {
                for i in items {
                    self.walk_expr(i, events);
                }
                for s in body {
                    self.walk_stmt(s, events);
                }
            }
            StmtKind::Raise { exc } => {
                if let Some(e) = exc {
                    self.walk_expr(e, events);
                }
            }
            StmtKind::Pass | StmtKind::Break | StmtKind::Continue | StmtKind::Opaque => {}
        }
    }

    fn walk_classdef(&mut self, def: &ClassDef, span: Span, events: &mut Vec<UseEvent>) {
        for d in &def.decorators {
            self.walk_expr(d, events);
        }
        let qualname = self.qualname(&def.name);
        let node = self
            .b
            .add_node(self.unit, NodeKind::Class, qualname.clone(), span);
        let decos: Vec<String> = def.decorators.iter().map(|d| d.path_string()).collect();
        if !decos.is_empty() {
            self.b.decorators.insert(node, decos);
        }
        let class_idx = self.b.classes.len();
        self.b.classes.push(ClassInfo {
            node,
            unit: self.unit,
            simple: def.name.clone(),
            base_paths: def.bases.iter().map(|b| b.path_string()).collect(),
            top_level: self.qual.is_empty(),
        });
        for b in &def.bases {
            self.walk_expr(b, events);
        }
        for (_, v) in &def.keywords {
            self.walk_expr(v, events);
        }
        // Class body is its own def-use scope.
        self.qual.push(def.name.clone());
        self.containers.push(Container::Class(class_idx));
        let class_events = self.walk_body(&def.body);
        self.containers.pop();
        self.qual.pop();

        // Record class-body attribute literal bindings.
        for event in &class_events {
            for write in &event.writes {
                if !write.contains('.') {
                    self.b
                        .class_attr_bindings
                        .push((class_idx, write.clone(), event.node));
                }
            }
        }
        self.b.scopes.push(class_events);
    }

    fn walk_funcdef(&mut self, def: &FunctionDef, span: Span, events: &mut Vec<UseEvent>) {
        for d in &def.decorators {
            self.walk_expr(d, events);
        }
        let qualname = self.qualname(&def.name);
        let node = self
            .b
            .add_node(self.unit, NodeKind::Function, qualname, span);
        let decos: Vec<String> = def.decorators.iter().map(|d| d.path_string()).collect();
        if !decos.is_empty() {
            self.b.decorators.insert(node, decos);
        }
        let fn_idx = self.b.functions.len();
        self.b.functions.push(FnInfo {
            node,
            unit: self.unit,
            simple: def.name.clone(),
            container: self.current_container(),
            top_level: self.qual.is_empty(),
        });
        for p in &def.params {
            if let Some(d) = &p.default {
                self.walk_expr(d, events);
            }
        }
        self.qual.push(def.name.clone());
        self.containers.push(Container::Function(fn_idx));
        let fn_events = self.walk_body(&def.body);
        self.containers.pop();
        self.qual.pop();
        self.b.scopes.push(fn_events);
    }

    fn walk_assignment(
        &mut self,
        span: Span,
        targets: &[Expr],
        value: Option<&Expr>,
        aug_target: Option<&Expr>,
        events: &mut Vec<UseEvent>,
    ) {
        let name = targets.first().map(|t| t.path_string()).unwrap_or_default();
        let node = self.b.add_node(self.unit, NodeKind::Assignment, name, span);

        let mut reads = Vec::new();
        if let Some(v) = value {
            reads.extend(v.read_names());
            // Calls and literals inside the value get their own nodes.
            self.walk_value_expr(v, events);
        }
        if let Some(t) = aug_target {
            reads.extend(t.read_names());
        }
        let mut writes = Vec::new();
        for t in targets {
            collect_write_names(t, &mut writes);
        }
        events.push(UseEvent {
            node,
            reads,
            writes,
        });
    }

    /// Walks an assignment RHS: creates a Literal node for a direct
    /// literal and Call nodes for any embedded calls.
    fn walk_value_expr(&mut self, value: &Expr, events: &mut Vec<UseEvent>) {
        match &value.kind {
            ExprKind::Str(s) if !s.is_fstring => {
                let repr = literal_repr(&s.value);
                self.b
                    .add_node(self.unit, NodeKind::Literal, repr, value.span);
            }
            ExprKind::Num { repr, .. } => {
                let repr = repr.clone();
                self.b
                    .add_node(self.unit, NodeKind::Literal, repr, value.span);
            }
            ExprKind::Bool(v) => {
                let repr = if *v { "True" } else { "False" }.to_string();
                self.b
                    .add_node(self.unit, NodeKind::Literal, repr, value.span);
            }
            ExprKind::NoneLit => {
                self.b
                    .add_node(self.unit, NodeKind::Literal, "None".to_string(), value.span);
            }
            _ => self.walk_expr(value, events),
        }
    }

    /// Creates Call nodes for every call expression, pre-order.
    fn walk_expr(&mut self, expr: &Expr, events: &mut Vec<UseEvent>) {
        let unit = self.unit;
        let enclosing_fn = self.enclosing_fn();
        let enclosing_class = self.enclosing_class();
        let mut calls = Vec::new();
        collect_calls(expr, &mut calls);
        for call in calls {
            let (func, span) = call;
            let node = self
                .b
                .add_node(unit, NodeKind::Call, func.path_string(), span);
            self.b.calls.push(CallInfo {
                node,
                unit,
                enclosing_fn,
                enclosing_class,
                path: func.path_string(),
                terminal: func.terminal_name().map(str::to_string),
            });
            events.push(UseEvent {
                node,
                reads: read_names_of_call(func, span, expr),
                writes: Vec::new(),
            });
        }
    }
}

/// Pre-order list of `(callee expr, call span)` pairs inside `expr`.
fn collect_calls<'e>(expr: &'e Expr, out: &mut Vec<(&'e Expr, Span)>) {
    if let ExprKind::Call { func, .. } = &expr.kind {
        out.push((func, expr.span));
    }
    match &expr.kind {
        ExprKind::Attribute { value, .. } => collect_calls(value, out),
        ExprKind::Subscript { value, index } => {
            collect_calls(value, out);
            collect_calls(index, out);
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            collect_calls(func, out);
            for a in args {
                collect_calls(a, out);
            }
            for k in keywords {
                collect_calls(&k.value, out);
            }
        }
        ExprKind::Str(s) if s.is_fstring => {
            for part in &s.parts {
                if let FStringPart::Expr(e) = part {
                    collect_calls(e, out);
                }
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                collect_calls(e, out);
            }
        }
        ExprKind::Dict { keys, values } => {
            for k in keys.iter().flatten() {
                collect_calls(k, out);
            }
            for v in values {
                collect_calls(v, out);
            }
        }
        ExprKind::BinOp { left, right, .. } => {
            collect_calls(left, out);
            collect_calls(right, out);
        }
        ExprKind::UnaryOp { operand, .. } => collect_calls(operand, out),
        ExprKind::BoolOp { values, .. } => {
            for v in values {
                collect_calls(v, out);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            collect_calls(left, out);
            for c in comparators {
                collect_calls(c, out);
            }
        }
        ExprKind::IfExp { body, test, orelse } => {
            collect_calls(body, out);
            collect_calls(test, out);
            collect_calls(orelse, out);
        }
        ExprKind::Slice { lower, upper, step } => {
            for part in [lower, upper, step].into_iter().flatten() {
                collect_calls(part, out);
            }
        }
        ExprKind::Starred(inner) => collect_calls(inner, out),
        ExprKind::Yield(Some(inner)) => collect_calls(inner, out),
        _ => {}
    }
}

/// Names read by a specific call: finds the call expression in the
/// enclosing expression tree and takes its full read set.
fn read_names_of_call(func: &Expr, call_span: Span, root: &Expr) -> Vec<String> {
    let mut found = Vec::new();
    find_call_reads(root, call_span, &mut found);
    if found.is_empty() {
        func.read_names()
    } else {
        found
    }
}

fn find_call_reads(expr: &Expr, call_span: Span, out: &mut Vec<String>) {
    if expr.span == call_span {
        if let ExprKind::Call { .. } = expr.kind {
            out.extend(expr.read_names());
            return;
        }
    }
    match &expr.kind {
        ExprKind::Attribute { value, .. } => find_call_reads(value, call_span, out),
        ExprKind::Subscript { value, index } => {
            find_call_reads(value, call_span, out);
            find_call_reads(index, call_span, out);
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            find_call_reads(func, call_span, out);
            for a in args {
                find_call_reads(a, call_span, out);
            }
            for k in keywords {
                find_call_reads(&k.value, call_span, out);
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                find_call_reads(e, call_span, out);
            }
        }
        ExprKind::BinOp { left, right, .. } => {
            find_call_reads(left, call_span, out);
            find_call_reads(right, call_span, out);
        }
        ExprKind::BoolOp { values, .. } => {
            for v in values {
                find_call_reads(v, call_span, out);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            find_call_reads(left, call_span, out);
            for c in comparators {
                find_call_reads(c, call_span, out);
            }
        }
        ExprKind::Str(s) if s.is_fstring => {
            for part in &s.parts {
                if let FStringPart::Expr(e) = part {
                    find_call_reads(e, call_span, out);
                }
            }
        }
        _ => {}
    }
}

fn collect_write_names(target: &Expr, out: &mut Vec<String>) {
    match &target.kind {
        ExprKind::Name(n) => out.push(n.clone()),
        ExprKind::Attribute { .. } => out.push(target.path_string()),
        ExprKind::Subscript { value, .. } => collect_write_names(value, out),
        ExprKind::Tuple(elts) | ExprKind::List(elts) => {
            for e in elts {
                collect_write_names(e, out);
            }
        }
        ExprKind::Starred(inner) => collect_write_names(inner, out),
        _ => {}
    }
}

fn literal_repr(value: &str) -> String {
    let mut repr = format!("{value:?}");
    if repr.len() > 64 {
        repr.truncate(61);
        repr.push_str("...");
    }
    repr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::snapshot_from_sources;

    fn graph(sources: &[(&str, &str)]) -> CodePropertyGraph {
        let snap = snapshot_from_sources("/proj", sources);
        let cpg = build_cpg(&snap);
        assert!(cpg.validate().is_empty(), "{:?}", cpg.validate());
        cpg
    }

    fn find_node<'g>(cpg: &'g CodePropertyGraph, kind: NodeKind, name: &str) -> &'g GraphNode {
        cpg.nodes
            .iter()
            .find(|n| n.kind == kind && n.name == name)
            .unwrap_or_else(|| panic!("no {kind:?} node named {name}"))
    }

    #[test]
    fn derived_relations_example() {
        // { class B; class A(B); A.m calls f; def f } must produce
        // exactly {A Inherits B, A Contains m, m Calls f}.
        let cpg = graph(&[(
            "m.py",
            "class B:\n    pass\n\nclass A(B):\n    def m(self):\n        return f()\n\ndef f():\n    return 1\n",
        )]);
        let a = find_node(&cpg, NodeKind::Class, "A").id;
        let b = find_node(&cpg, NodeKind::Class, "B").id;
        let m = find_node(&cpg, NodeKind::Function, "A.m").id;
        let f = find_node(&cpg, NodeKind::Function, "f").id;

        let rel: Vec<(EdgeKind, NodeId, NodeId)> = cpg
            .edges
            .iter()
            .filter(|e| {
                matches!(
                    e.kind,
                    EdgeKind::Inherits | EdgeKind::Contains | EdgeKind::Calls
                )
            })
            .map(|e| (e.kind, e.src, e.dst))
            .collect();
        assert_eq!(
            rel,
            vec![
                (EdgeKind::Inherits, a, b),
                (EdgeKind::Contains, a, m),
                (EdgeKind::Calls, m, f),
            ]
        );

        // Independent token-stream relation check: class/def/call tokens.
        let text = &crate::ingest::snapshot_from_sources(
            "/proj",
            &[("m.py", "class B:\n    pass\n\nclass A(B):\n    def m(self):\n        return f()\n\ndef f():\n    return 1\n")],
        )
        .files[0]
            .text
            .clone();
        let classes: Vec<&str> = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix("class "))
            .map(|rest| rest.split(['(', ':']).next().unwrap().trim())
            .collect();
        assert_eq!(classes, vec!["B", "A"]);
        assert!(text.contains("f()"));
    }

    #[test]
    fn imports_package_edges_from_both_files() {
        let cpg = graph(&[
            (
                "Path/Agent.py",
                "from pydantic import BaseModel\nclass Agent(BaseModel):\n    pass\n",
            ),
            (
                "Path/Tools/Python_repl.py",
                "from pydantic import BaseModel\nclass PythonREPL(BaseModel):\n    pass\n",
            ),
        ]);
        let hub = cpg
            .nodes
            .iter()
            .find(|n| n.kind == NodeKind::Import && n.name == "pydantic" && n.is_synthesized())
            .expect("package hub node");
        let srcs: Vec<&str> = cpg
            .edges_of_kind(EdgeKind::ImportsPackage)
            .map(|e| cpg.node(e.src).unwrap().file.as_str())
            .collect();
        assert_eq!(srcs, vec!["Path/Agent.py", "Path/Tools/Python_repl.py"]);
        assert!(cpg
            .edges_of_kind(EdgeKind::ImportsPackage)
            .all(|e| e.dst == hub.id));
    }

    #[test]
    fn empty_file_builds_empty_graph() {
        let snap = snapshot_from_sources("/proj", &[("a.py", "\n")]);
        let cpg = build_cpg(&snap);
        assert!(cpg.nodes.is_empty());
        assert!(cpg.edges.is_empty());
    }

    #[test]
    fn node_ids_dense_and_stable() {
        let sources = [
            ("a.py", "class A:\n    def run(self):\n        return helper()\n\ndef helper():\n    return 1\n"),
            ("b.py", "import json\nx = 1\n"),
        ];
        let g1 = graph(&sources);
        let g2 = graph(&sources);
        assert_eq!(g1.nodes, g2.nodes);
        assert_eq!(g1.edges, g2.edges);
        for (i, n) in g1.nodes.iter().enumerate() {
            assert_eq!(n.id as usize, i);
        }
    }

    #[test]
    fn unresolved_callee_becomes_stub() {
        let cpg = graph(&[(
            "a.py",
            "class Agent:\n    def run(self):\n        return initialize_agent(handle_parsing_error=False)\n",
        )]);
        let stub = find_node(&cpg, NodeKind::Function, "initialize_agent");
        assert!(stub.is_synthesized());
        let run = find_node(&cpg, NodeKind::Function, "Agent.run").id;
        assert!(cpg
            .edges_of_kind(EdgeKind::Calls)
            .any(|e| e.src == run && e.dst == stub.id));
    }

    #[test]
    fn call_resolution_precedence_same_class_over_global() {
        let cpg = graph(&[(
            "a.py",
            "def work():\n    return 1\n\nclass C:\n    def work(self):\n        return 2\n    def go(self):\n        return self.work()\n",
        )]);
        let method = find_node(&cpg, NodeKind::Function, "C.work").id;
        let go = find_node(&cpg, NodeKind::Function, "C.go").id;
        let callees: Vec<NodeId> = cpg
            .edges_of_kind(EdgeKind::Calls)
            .filter(|e| e.src == go)
            .map(|e| e.dst)
            .collect();
        assert_eq!(callees, vec![method]);
    }

    #[test]
    fn cross_file_inheritance_through_import() {
        let cpg = graph(&[
            ("base.py", "class Base:\n    pass\n"),
            (
                "impl.py",
                "from base import Base\nclass Impl(Base):\n    pass\n",
            ),
        ]);
        let base = find_node(&cpg, NodeKind::Class, "Base").id;
        let imp = find_node(&cpg, NodeKind::Class, "Impl").id;
        assert!(cpg
            .edges_of_kind(EdgeKind::Inherits)
            .any(|e| e.src == imp && e.dst == base));
    }

    #[test]
    fn def_use_edges_from_assignment_to_call() {
        let cpg = graph(&[(
            "a.py",
            "def f():\n    token = \"Observation:\"\n    return generate(stop=[token])\n",
        )]);
        let assign = find_node(&cpg, NodeKind::Assignment, "token").id;
        let call = cpg
            .nodes
            .iter()
            .find(|n| n.kind == NodeKind::Call && n.name == "generate")
            .unwrap()
            .id;
        assert!(cpg
            .edges_of_kind(EdgeKind::DefUse)
            .any(|e| e.src == assign && e.dst == call));
    }

    #[test]
    fn class_attribute_binding_def_use() {
        let cpg = graph(&[(
            "a.py",
            "class ChatLLM:\n    api_key = \"\"\n    def generate(self):\n        return OpenAI(api_key=self.api_key)\n",
        )]);
        let assign = find_node(&cpg, NodeKind::Assignment, "api_key").id;
        assert!(cpg.edges_of_kind(EdgeKind::DefUse).any(|e| e.src == assign));
    }

    #[test]
    fn parse_failures_recorded_not_fatal() {
        let snap = snapshot_from_sources("/proj", &[("bad.py", "(\n"), ("ok.py", "x = 1\n")]);
        let cpg = build_cpg(&snap);
        assert_eq!(cpg.parse_failure_count(), 1);
        assert!(cpg.parse_failures.iter().all(|(f, _)| f == "bad.py"));
        assert_eq!(cpg.parse_failures[0].1.line, 1);
        assert!(cpg.nodes.iter().any(|n| n.file == "ok.py"));
    }

    #[test]
    fn decorated_function_keeps_decorator_metadata() {
        let cpg = graph(&[(
            "a.py",
            "@tool\ndef calculator(expression):\n    return eval(expression)\n",
        )]);
        let f = find_node(&cpg, NodeKind::Function, "calculator");
        assert_eq!(
            cpg.decorators.get(&f.id).unwrap(),
            &vec!["tool".to_string()]
        );
    }
}
