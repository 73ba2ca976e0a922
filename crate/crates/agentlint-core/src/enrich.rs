//! Semantic enrichment: recovers what the graph abstraction drops.
//!
//! Sources, per the detection needs: exact definition snippets,
//! class-attribute initialization facts, string-literal resolution
//! through def-use chains, call-context windows with structural guard
//! facts, return-path analysis, and per-partition external import sets.

use crate::cpg::ast::*;
use crate::cpg::{CodePropertyGraph, EdgeKind, NodeId, NodeKind};
use crate::ingest::ProjectSnapshot;
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

pub const DEFAULT_RESOLVE_DEPTH: usize = 8;

const STDLIB_LIST: &str = include_str!("../data/python_stdlib.txt");

pub fn stdlib_modules() -> BTreeSet<&'static str> {
    STDLIB_LIST
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnrichError {
    #[error("stale span: {file} is not part of the analyzed snapshot")]
    StaleSpan { file: String },
    #[error("node {0} is not a class")]
    NotAClass(String),
    #[error("node {0} is not a function")]
    NotAFunction(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSnippet {
    pub file: String,
    /// Byte span within the file; text equals the file bytes over it.
    pub span: Span,
    pub line_span: (u32, u32),
    pub text: String,
    pub enclosing_qualname: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrValue {
    Str(String),
    Int(String),
    Float(String),
    Bool(bool),
    None,
    /// Initializer exists but is not a literal.
    NonLiteral,
    /// Declared without an initializer.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Str,
    Int,
    Float,
    Bool,
    NoneType,
    List,
    Tuple,
    Dict,
    Set,
    Unknown,
}

impl ValueType {
    pub fn as_str(&self) -> &'static str {
        match self {
            ValueType::Str => "string",
            ValueType::Int => "int",
            ValueType::Float => "float",
            ValueType::Bool => "bool",
            ValueType::NoneType => "none",
            ValueType::List => "list",
            ValueType::Tuple => "tuple",
            ValueType::Dict => "dict",
            ValueType::Set => "set",
            ValueType::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeFact {
    pub class_qualname: String,
    pub name: String,
    pub init_value: AttrValue,
    pub value_type: ValueType,
}

impl AttributeFact {
    /// Statically known string value, when there is one.
    pub fn literal_str(&self) -> Option<&str> {
        match &self.init_value {
            AttrValue::Str(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideGuards {
    pub asserts: Vec<String>,
    pub type_checks: Vec<String>,
}

impl SideGuards {
    pub fn is_empty(&self) -> bool {
        self.asserts.is_empty() && self.type_checks.is_empty()
    }

    pub fn describe(&self) -> Vec<String> {
        self.asserts
            .iter()
            .chain(self.type_checks.iter())
            .cloned()
            .collect()
    }
}

/// Context around one call site, for fault-tolerance questions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow {
    pub call_site: SourceSnippet,
    pub callee_path: String,
    /// Statements feeding the call's arguments, intraprocedural.
    pub input_scope: Vec<String>,
    /// Statements consuming the call's result.
    pub output_scope: Vec<String>,
    pub in_try_block: bool,
    pub input_guards: SideGuards,
    pub output_guards: SideGuards,
    pub input_vars: Vec<String>,
    pub output_vars: Vec<String>,
}

impl ContextWindow {
    pub fn has_input_fault_tolerance(&self) -> bool {
        self.in_try_block || !self.input_guards.is_empty()
    }

    pub fn has_output_fault_tolerance(&self) -> bool {
        self.in_try_block || !self.output_guards.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiteralResolution {
    pub literals: BTreeSet<String>,
    /// Some reachable part could not be resolved statically.
    pub incomplete: bool,
    /// The depth cap cut the walk short.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingReturnReason {
    NoReturn,
    /// A bare `return` directly followed by a free-standing expression
    /// statement (the value ended up on the next line).
    BareReturnSplit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingReturn {
    pub function: NodeId,
    pub qualname: String,
    pub line_span: (u32, u32),
    pub reason: MissingReturnReason,
}

/// Enrichment facade over one snapshot and its graph.
pub struct Enricher<'a> {
    pub snapshot: &'a ProjectSnapshot,
    pub cpg: &'a CodePropertyGraph,
}

impl<'a> Enricher<'a> {
    pub fn new(snapshot: &'a ProjectSnapshot, cpg: &'a CodePropertyGraph) -> Self {
        Enricher { snapshot, cpg }
    }

    // ------------------------------------------------------------------
    // snippet
    // ------------------------------------------------------------------

    pub fn snippet(&self, node_id: NodeId) -> Result<SourceSnippet, EnrichError> {
        let node = self.cpg.node(node_id).ok_or(EnrichError::StaleSpan {
            file: format!("<node {node_id}>"),
        })?;
        let loc = self
            .cpg
            .ast_index
            .get(&node_id)
            .ok_or(EnrichError::StaleSpan {
                file: node.file.clone(),
            })?;
        let file = self
            .snapshot
            .file(&node.file)
            .ok_or(EnrichError::StaleSpan {
                file: node.file.clone(),
            })?;
        let span = loc.byte_span;
        if span.end > file.text.len() || span.start > span.end {
            return Err(EnrichError::StaleSpan {
                file: node.file.clone(),
            });
        }
        Ok(SourceSnippet {
            file: node.file.clone(),
            span,
            line_span: node.span,
            text: file.text[span.start..span.end].to_string(),
            enclosing_qualname: node.name.clone(),
        })
    }

    // ------------------------------------------------------------------
    // AST lookups
    // ------------------------------------------------------------------

    pub fn class_def(&self, class_id: NodeId) -> Result<(&'a ClassDef, usize), EnrichError> {
        let node = self
            .cpg
            .node(class_id)
            .ok_or_else(|| EnrichError::NotAClass(format!("<node {class_id}>")))?;
        if node.kind != NodeKind::Class {
            return Err(EnrichError::NotAClass(node.name.clone()));
        }
        let loc = self
            .cpg
            .ast_index
            .get(&class_id)
            .ok_or_else(|| EnrichError::NotAClass(node.name.clone()))?;
        find_classdef(&self.cpg.units[loc.unit].body, loc.byte_span)
            .map(|def| (def, loc.unit))
            .ok_or_else(|| EnrichError::NotAClass(node.name.clone()))
    }

    pub fn function_def(&self, fn_id: NodeId) -> Result<(&'a FunctionDef, usize), EnrichError> {
        let node = self
            .cpg
            .node(fn_id)
            .ok_or_else(|| EnrichError::NotAFunction(format!("<node {fn_id}>")))?;
        if node.kind != NodeKind::Function || node.is_synthesized() {
            return Err(EnrichError::NotAFunction(node.name.clone()));
        }
        let loc = self
            .cpg
            .ast_index
            .get(&fn_id)
            .ok_or_else(|| EnrichError::NotAFunction(node.name.clone()))?;
        find_funcdef(&self.cpg.units[loc.unit].body, loc.byte_span)
            .map(|def| (def, loc.unit))
            .ok_or_else(|| EnrichError::NotAFunction(node.name.clone()))
    }

    // ------------------------------------------------------------------
    // attribute_facts
    // ------------------------------------------------------------------

    pub fn attribute_facts(&self, class_id: NodeId) -> Result<Vec<AttributeFact>, EnrichError> {
        let (def, _) = self.class_def(class_id)?;
        let class_qualname = self.cpg.node(class_id).unwrap().name.clone();
        let mut facts = Vec::new();
        for stmt in &def.body {
            match &stmt.kind {
                StmtKind::AnnAssign {
                    target,
                    annotation,
                    value,
                } => {
                    if let ExprKind::Name(name) = &target.kind {
                        let (init_value, value_type) = match value {
                            Some(v) => classify_literal(v),
                            None => (AttrValue::Missing, annotated_type(annotation)),
                        };
                        facts.push(AttributeFact {
                            class_qualname: class_qualname.clone(),
                            name: name.clone(),
                            init_value,
                            value_type,
                        });
                    }
                }
                StmtKind::Assign { targets, value } => {
                    for target in targets {
                        if let ExprKind::Name(name) = &target.kind {
                            let (init_value, value_type) = classify_literal(value);
                            facts.push(AttributeFact {
                                class_qualname: class_qualname.clone(),
                                name: name.clone(),
                                init_value,
                                value_type,
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(facts)
    }

    // ------------------------------------------------------------------
    // resolve_literals
    // ------------------------------------------------------------------

    /// Resolves the string literals reachable from `expr` by walking
    /// def-use chains backward: local and module assignments, class
    /// attribute facts, parameter defaults, and one interprocedural hop
    /// into literal call arguments.
    pub fn resolve_literals(
        &self,
        unit: usize,
        expr: &Expr,
        enclosing_fn: Option<NodeId>,
    ) -> LiteralResolution {
        self.resolve_literals_capped(unit, expr, enclosing_fn, DEFAULT_RESOLVE_DEPTH)
    }

    pub fn resolve_literals_capped(
        &self,
        unit: usize,
        expr: &Expr,
        enclosing_fn: Option<NodeId>,
        depth_cap: usize,
    ) -> LiteralResolution {
        let mut resolution = LiteralResolution::default();
        let env = LiteralEnv {
            enricher: self,
            unit,
            enclosing_fn,
            allow_interproc: true,
        };
        resolve_expr(expr, &env, depth_cap, &mut resolution);
        resolution
    }

    // ------------------------------------------------------------------
    // call_context
    // ------------------------------------------------------------------

    /// One window per call inside `fn_id` whose callee terminal name is
    /// in `callee_names`.
    pub fn call_context(
        &self,
        fn_id: NodeId,
        callee_names: &BTreeSet<String>,
    ) -> Result<Vec<ContextWindow>, EnrichError> {
        let (def, unit) = self.function_def(fn_id)?;
        let file = &self.snapshot.files[unit];
        let qualname = self.cpg.node(fn_id).unwrap().name.clone();

        // Collect statements in document order with their try-depth.
        let mut stmts: Vec<(&Stmt, bool)> = Vec::new();
        collect_stmts_with_try(&def.body, false, &mut stmts);

        // Find matching call sites.
        struct Site<'e> {
            call: &'e Expr,
            func: &'e Expr,
            stmt_span: Span,
            in_try: bool,
            output_vars: Vec<String>,
        }
        let mut sites: Vec<Site> = Vec::new();
        for (stmt, in_try) in &stmts {
            let output_vars: Vec<String> = match &stmt.kind {
                StmtKind::Assign { targets, .. } => {
                    let mut names = Vec::new();
                    for t in targets {
                        collect_target_names(t, &mut names);
                    }
                    names
                }
                StmtKind::AnnAssign { target, .. } | StmtKind::AugAssign { target, .. } => {
                    let mut names = Vec::new();
                    collect_target_names(target, &mut names);
                    names
                }
                _ => Vec::new(),
            };
            each_call(stmt, &mut |call, func| {
                let matches = func
                    .terminal_name()
                    .is_some_and(|t| callee_names.contains(t));
                if matches {
                    sites.push(Site {
                        call,
                        func,
                        stmt_span: stmt.span,
                        in_try: *in_try,
                        output_vars: output_vars.clone(),
                    });
                }
            });
        }

        let mut windows = Vec::new();
        for site in sites {
            let input_vars: Vec<String> = site
                .call
                .read_names()
                .into_iter()
                .filter(|n| n != "self")
                .collect();
            let span = site.call.span;
            let call_site = SourceSnippet {
                file: file.path.clone(),
                span,
                line_span: (
                    file.line_of(span.start),
                    file.line_of(span.end.saturating_sub(1).max(span.start)),
                ),
                text: file.text[span.start..span.end.min(file.text.len())].to_string(),
                enclosing_qualname: qualname.clone(),
            };

            let mut input_scope = Vec::new();
            let mut output_scope = Vec::new();
            let mut input_guards = SideGuards::default();
            let mut output_guards = SideGuards::default();

            for (stmt, _) in &stmts {
                if stmt.span == site.stmt_span {
                    continue;
                }
                let before = stmt.span.start < site.stmt_span.start;
                let text =
                    file.text[stmt.span.start..stmt.span.end.min(file.text.len())].to_string();
                match &stmt.kind {
                    StmtKind::Assign { targets, value } => {
                        if before {
                            let mut writes = Vec::new();
                            for t in targets {
                                collect_target_names(t, &mut writes);
                            }
                            if writes.iter().any(|w| input_vars.contains(w)) {
                                input_scope.push(first_line(&text));
                            }
                            let _ = value;
                        } else {
                            let reads = stmt_read_names(stmt);
                            if reads.iter().any(|r| site.output_vars.contains(r)) {
                                output_scope.push(first_line(&text));
                            }
                        }
                    }
                    StmtKind::Assert { test, .. } => {
                        let reads = test.read_names();
                        let is_type_check = expr_is_type_check(test);
                        if before && reads.iter().any(|r| input_vars.contains(r)) {
                            push_guard(&mut input_guards, is_type_check, first_line(&text));
                        }
                        if !before && reads.iter().any(|r| site.output_vars.contains(r)) {
                            push_guard(&mut output_guards, is_type_check, first_line(&text));
                        }
                    }
                    StmtKind::If { test, .. } => {
                        if expr_is_type_check(test) {
                            let reads = test.read_names();
                            if before && reads.iter().any(|r| input_vars.contains(r)) {
                                push_guard(&mut input_guards, true, first_line(&text));
                            }
                            if !before && reads.iter().any(|r| site.output_vars.contains(r)) {
                                push_guard(&mut output_guards, true, first_line(&text));
                            }
                        }
                    }
                    _ => {
                        if !before {
                            let reads = stmt_read_names(stmt);
                            if !site.output_vars.is_empty()
                                && reads.iter().any(|r| site.output_vars.contains(r))
                            {
                                output_scope.push(first_line(&text));
                            }
                        }
                    }
                }
            }

            windows.push(ContextWindow {
                call_site,
                callee_path: site.func.path_string(),
                input_scope,
                output_scope,
                in_try_block: site.in_try,
                input_guards,
                output_guards,
                input_vars,
                output_vars: site.output_vars,
            });
        }
        Ok(windows)
    }

    // ------------------------------------------------------------------
    // functions_missing_return
    // ------------------------------------------------------------------

    /// Functions of `class_id` whose every completing path ends without
    /// a return value. Dunder methods are exempt (they conventionally
    /// return nothing), as are generators.
    pub fn functions_missing_return(
        &self,
        class_id: NodeId,
    ) -> Result<Vec<MissingReturn>, EnrichError> {
        let node = self
            .cpg
            .node(class_id)
            .ok_or_else(|| EnrichError::NotAClass(format!("<node {class_id}>")))?;
        if node.kind != NodeKind::Class {
            return Err(EnrichError::NotAClass(node.name.clone()));
        }
        let mut out = Vec::new();
        for fn_id in self.class_functions(class_id) {
            let Ok((def, _)) = self.function_def(fn_id) else {
                continue;
            };
            if def.name.starts_with("__") && def.name.ends_with("__") {
                continue;
            }
            if body_has_yield(&def.body) {
                continue;
            }
            if let Some(reason) = missing_return_reason(&def.body) {
                let gnode = self.cpg.node(fn_id).unwrap();
                out.push(MissingReturn {
                    function: fn_id,
                    qualname: gnode.name.clone(),
                    line_span: gnode.span,
                    reason,
                });
            }
        }
        Ok(out)
    }

    /// Functions contained in a class, transitively through nested defs.
    pub fn class_functions(&self, class_id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![class_id];
        let mut seen = HashSet::new();
        while let Some(id) = stack.pop() {
            for edge in self.cpg.edges_from(id, EdgeKind::Contains) {
                if seen.insert(edge.dst) {
                    out.push(edge.dst);
                    stack.push(edge.dst);
                }
            }
        }
        out.sort_unstable();
        out
    }

    // ------------------------------------------------------------------
    // import_sets
    // ------------------------------------------------------------------

    /// External top-level packages imported by the partition files
    /// versus the remaining files. Project-internal modules and the
    /// bundled standard-library list are excluded; unknown packages
    /// count as external.
    pub fn import_sets(
        &self,
        partition: &BTreeSet<String>,
    ) -> (BTreeSet<String>, BTreeSet<String>) {
        let stdlib = stdlib_modules();
        let internal = project_module_names(self.snapshot);
        let mut inside = BTreeSet::new();
        let mut outside = BTreeSet::new();
        for (idx, file) in self.snapshot.files.iter().enumerate() {
            let target = if partition.contains(&file.path) {
                &mut inside
            } else {
                &mut outside
            };
            for package in unit_external_packages(&self.cpg.units[idx], &internal, &stdlib) {
                target.insert(package);
            }
        }
        (inside, outside)
    }
}

// ----------------------------------------------------------------------
// helpers
// ----------------------------------------------------------------------

fn first_line(text: &str) -> String {
    text.lines().next().unwrap_or("").trim().to_string()
}

fn push_guard(guards: &mut SideGuards, is_type_check: bool, text: String) {
    if is_type_check {
        guards.type_checks.push(text);
    } else {
        guards.asserts.push(text);
    }
}

/// Expressions owned directly by a statement, excluding nested bodies
/// (those appear as their own entries in the flattened statement list).
fn own_exprs(stmt: &Stmt) -> Vec<&Expr> {
    match &stmt.kind {
        StmtKind::Assign { targets, value } => {
            let mut v: Vec<&Expr> = targets.iter().collect();
            v.push(value);
            v
        }
        StmtKind::AnnAssign { target, value, .. } => {
            let mut v = vec![target];
            if let Some(value) = value {
                v.push(value);
            }
            v
        }
        StmtKind::AugAssign { target, value, .. } => vec![target, value],
        StmtKind::Expr(e) => vec![e],
        StmtKind::Return { value } => value.iter().collect(),
        StmtKind::Assert { test, msg } => {
            let mut v = vec![test];
            if let Some(m) = msg {
                v.push(m);
            }
            v
        }
        StmtKind::If { test, .. } | StmtKind::While { test, .. } => vec![test],
        StmtKind::For { target, iter, .. } => vec![target, iter],
        StmtKind::With { items, .. } => items.iter().collect(),
        StmtKind::Raise { exc } => exc.iter().collect(),
        _ => Vec::new(),
    }
}

fn stmt_read_names(stmt: &Stmt) -> Vec<String> {
    let mut names = Vec::new();
    for e in own_exprs(stmt) {
        names.extend(e.read_names());
    }
    names.sort_unstable();
    names.dedup();
    names
}

/// True when the condition is an isinstance/type-comparison check.
fn expr_is_type_check(expr: &Expr) -> bool {
    let mut found = false;
    let mut visit = |e: &Expr| match &e.kind {
        ExprKind::Call { func, .. } => {
            if func.terminal_name() == Some("isinstance") {
                found = true;
            }
        }
        ExprKind::Compare { left, .. } => {
            if let ExprKind::Call { func, .. } = &left.kind {
                if func.terminal_name() == Some("type") {
                    found = true;
                }
            }
        }
        _ => {}
    };
    walk_expr_tree(expr, &mut visit);
    found
}

fn walk_expr_tree<'e>(expr: &'e Expr, f: &mut impl FnMut(&'e Expr)) {
    f(expr);
    match &expr.kind {
        ExprKind::Attribute { value, .. } => walk_expr_tree(value, f),
        ExprKind::Subscript { value, index } => {
            walk_expr_tree(value, f);
            walk_expr_tree(index, f);
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            walk_expr_tree(func, f);
            for a in args {
                walk_expr_tree(a, f);
            }
            for k in keywords {
                walk_expr_tree(&k.value, f);
            }
        }
        ExprKind::BinOp { left, right, .. } => {
            walk_expr_tree(left, f);
            walk_expr_tree(right, f);
        }
        ExprKind::UnaryOp { operand, .. } => walk_expr_tree(operand, f),
        ExprKind::BoolOp { values, .. } => {
            for v in values {
                walk_expr_tree(v, f);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            walk_expr_tree(left, f);
            for c in comparators {
                walk_expr_tree(c, f);
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                walk_expr_tree(e, f);
            }
        }
        ExprKind::Dict { keys, values } => {
            for k in keys.iter().flatten() {
                walk_expr_tree(k, f);
            }
            for v in values {
                walk_expr_tree(v, f);
            }
        }
        ExprKind::IfExp { body, test, orelse } => {
            walk_expr_tree(body, f);
            walk_expr_tree(test, f);
            walk_expr_tree(orelse, f);
        }
        ExprKind::Slice { lower, upper, step } => {
            for part in [lower, upper, step].into_iter().flatten() {
                walk_expr_tree(part, f);
            }
        }
        ExprKind::Str(s) if s.is_fstring => {
            for part in &s.parts {
                if let FStringPart::Expr(e) = part {
                    walk_expr_tree(e, f);
                }
            }
        }
        ExprKind::Starred(inner) => walk_expr_tree(inner, f),
        ExprKind::Yield(Some(inner)) => walk_expr_tree(inner, f),
        _ => {}
    }
}

/// Calls in a statement's own expressions, not entering nested bodies.
fn each_call<'e>(stmt: &'e Stmt, f: &mut impl FnMut(&'e Expr, &'e Expr)) {
    for root in own_exprs(stmt) {
        walk_expr_tree(root, &mut |e| {
            if let ExprKind::Call { func, .. } = &e.kind {
                f(e, func);
            }
        });
    }
}

fn collect_target_names(target: &Expr, out: &mut Vec<String>) {
    match &target.kind {
        ExprKind::Name(n) => out.push(n.clone()),
        ExprKind::Attribute { .. } => out.push(target.path_string()),
        ExprKind::Tuple(elts) | ExprKind::List(elts) => {
            for e in elts {
                collect_target_names(e, out);
            }
        }
        ExprKind::Starred(inner) => collect_target_names(inner, out),
        ExprKind::Subscript { value, .. } => collect_target_names(value, out),
        _ => {}
    }
}

/// Flattens block statements of one function body in document order,
/// tagging each with whether it sits inside a try body. Nested function
/// and class definitions are not entered.
fn collect_stmts_with_try<'s>(body: &'s [Stmt], in_try: bool, out: &mut Vec<(&'s Stmt, bool)>) {
    for stmt in body {
        out.push((stmt, in_try));
        match &stmt.kind {
            StmtKind::If { body, orelse, .. } | StmtKind::While { body, orelse, .. } => {
                collect_stmts_with_try(body, in_try, out);
                collect_stmts_with_try(orelse, in_try, out);
            }
            StmtKind::For { body, orelse, .. } => {
                collect_stmts_with_try(body, in_try, out);
                collect_stmts_with_try(orelse, in_try, out);
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                collect_stmts_with_try(body, true, out);
                for h in handlers {
                    collect_stmts_with_try(&h.body, in_try, out);
                }
                collect_stmts_with_try(orelse, in_try, out);
                collect_stmts_with_try(finalbody, in_try, out);
            }
            StmtKind::With { body, .. } => {
                collect_stmts_with_try(body, in_try, out);
            }
            _ => {}
        }
    }
}

fn classify_literal(expr: &Expr) -> (AttrValue, ValueType) {
    match &expr.kind {
        ExprKind::Str(s) if !s.is_fstring => (AttrValue::Str(s.value.clone()), ValueType::Str),
        ExprKind::Str(s) => {
            // An f-string with only literal parts folds to its text.
            if s.parts.iter().all(|p| matches!(p, FStringPart::Literal(_))) {
                (AttrValue::Str(s.value.clone()), ValueType::Str)
            } else {
                (AttrValue::NonLiteral, ValueType::Str)
            }
        }
        ExprKind::Num { repr, is_int } => {
            if *is_int {
                (AttrValue::Int(repr.clone()), ValueType::Int)
            } else {
                (AttrValue::Float(repr.clone()), ValueType::Float)
            }
        }
        ExprKind::Bool(v) => (AttrValue::Bool(*v), ValueType::Bool),
        ExprKind::NoneLit => (AttrValue::None, ValueType::NoneType),
        ExprKind::List(_) => (AttrValue::NonLiteral, ValueType::List),
        ExprKind::Tuple(_) => (AttrValue::NonLiteral, ValueType::Tuple),
        ExprKind::Dict { .. } => (AttrValue::NonLiteral, ValueType::Dict),
        ExprKind::Set(_) => (AttrValue::NonLiteral, ValueType::Set),
        _ => (AttrValue::NonLiteral, ValueType::Unknown),
    }
}

fn annotated_type(annotation: &Expr) -> ValueType {
    match &annotation.kind {
        ExprKind::Name(n) => match n.as_str() {
            "str" => ValueType::Str,
            "int" => ValueType::Int,
            "float" => ValueType::Float,
            "bool" => ValueType::Bool,
            "list" => ValueType::List,
            "tuple" => ValueType::Tuple,
            "dict" => ValueType::Dict,
            "set" => ValueType::Set,
            _ => ValueType::Unknown,
        },
        ExprKind::Subscript { value, .. } => annotated_type(value),
        _ => ValueType::Unknown,
    }
}

// ----------------------------------------------------------------------
// literal resolution
// ----------------------------------------------------------------------

struct LiteralEnv<'a, 'e> {
    enricher: &'e Enricher<'a>,
    unit: usize,
    enclosing_fn: Option<NodeId>,
    allow_interproc: bool,
}

fn resolve_expr(expr: &Expr, env: &LiteralEnv, depth: usize, out: &mut LiteralResolution) {
    if depth == 0 {
        out.truncated = true;
        return;
    }
    match &expr.kind {
        ExprKind::Str(s) if !s.is_fstring => {
            out.literals.insert(s.value.clone());
        }
        ExprKind::Str(s) => {
            for part in &s.parts {
                match part {
                    FStringPart::Literal(text) if !text.is_empty() => {
                        out.literals.insert(text.clone());
                    }
                    FStringPart::Expr(e) => resolve_expr(e, env, depth - 1, out),
                    _ => {}
                }
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                resolve_expr(e, env, depth - 1, out);
            }
        }
        ExprKind::BinOp { left, op, right } if op == "+" || op == "%" => {
            resolve_expr(left, env, depth - 1, out);
            resolve_expr(right, env, depth - 1, out);
        }
        ExprKind::Name(name) => resolve_name(name, env, depth, out),
        ExprKind::Attribute { value, attr } => {
            if matches!(&value.kind, ExprKind::Name(base) if base == "self") {
                resolve_self_attr(attr, env, out);
            } else {
                out.incomplete = true;
            }
        }
        ExprKind::Num { .. } | ExprKind::Bool(_) | ExprKind::NoneLit => {
            // Known non-strings contribute nothing.
        }
        _ => {
            out.incomplete = true;
        }
    }
}

fn resolve_name(name: &str, env: &LiteralEnv, depth: usize, out: &mut LiteralResolution) {
    let mut found = false;

    // Local assignments inside the enclosing function.
    if let Some(fn_id) = env.enclosing_fn {
        if let Ok((def, _)) = env.enricher.function_def(fn_id) {
            for value in assignments_to(&def.body, name) {
                found = true;
                resolve_expr(value, env, depth - 1, out);
            }
            // Parameter: default value plus one interprocedural hop into
            // literal call arguments.
            if let Some(pos) = def.params.iter().position(|p| p.name == name) {
                if let Some(default) = &def.params[pos].default {
                    found = true;
                    resolve_expr(default, env, depth - 1, out);
                }
                if env.allow_interproc {
                    for (caller, caller_unit, arg) in
                        call_arguments_for(env.enricher, fn_id, pos, name)
                    {
                        // Resolve the argument in the caller's context,
                        // without a further interprocedural hop.
                        let inner = LiteralEnv {
                            enricher: env.enricher,
                            unit: caller_unit,
                            enclosing_fn: Some(caller),
                            allow_interproc: false,
                        };
                        found = true;
                        resolve_expr(arg, &inner, depth - 1, out);
                    }
                }
            }
        }
    }

    // Module-level constants.
    let module_body = &env.enricher.cpg.units[env.unit].body;
    for value in assignments_to(module_body, name) {
        found = true;
        resolve_expr(value, env, depth - 1, out);
    }

    if !found {
        out.incomplete = true;
    }
}

fn resolve_self_attr(attr: &str, env: &LiteralEnv, out: &mut LiteralResolution) {
    let Some(fn_id) = env.enclosing_fn else {
        out.incomplete = true;
        return;
    };
    // Walk containment up to the owning class.
    let mut current = fn_id;
    let class_id = loop {
        let Some(edge) = env
            .enricher
            .cpg
            .edges_to(current, EdgeKind::Contains)
            .next()
        else {
            out.incomplete = true;
            return;
        };
        let src = edge.src;
        match env.enricher.cpg.node(src).map(|n| n.kind) {
            Some(NodeKind::Class) => break src,
            _ => current = src,
        }
    };
    match env.enricher.attribute_facts(class_id) {
        Ok(facts) => {
            let mut found = false;
            for fact in facts.iter().filter(|f| f.name == attr) {
                found = true;
                match &fact.init_value {
                    AttrValue::Str(s) => {
                        out.literals.insert(s.clone());
                    }
                    _ => out.incomplete = true,
                }
            }
            if !found {
                out.incomplete = true;
            }
        }
        Err(_) => out.incomplete = true,
    }
}

/// Values assigned to `name` anywhere in a statement block, not entering
/// nested definitions.
fn assignments_to<'s>(body: &'s [Stmt], name: &str) -> Vec<&'s Expr> {
    let mut flat = Vec::new();
    collect_stmts_with_try(body, false, &mut flat);
    let mut values = Vec::new();
    for (stmt, _) in flat {
        match &stmt.kind {
            StmtKind::Assign { targets, value } => {
                if targets
                    .iter()
                    .any(|t| matches!(&t.kind, ExprKind::Name(n) if n == name))
                {
                    values.push(value);
                }
            }
            StmtKind::AnnAssign {
                target,
                value: Some(value),
                ..
            } => {
                if matches!(&target.kind, ExprKind::Name(n) if n == name) {
                    values.push(value);
                }
            }
            StmtKind::AugAssign { target, value, .. } => {
                if matches!(&target.kind, ExprKind::Name(n) if n == name) {
                    values.push(value);
                }
            }
            _ => {}
        }
    }
    values
}

/// Argument expressions passed for parameter `pos` / keyword `name` at
/// call sites of `fn_id`, with the calling function and its unit.
fn call_arguments_for<'a>(
    enricher: &Enricher<'a>,
    fn_id: NodeId,
    mut pos: usize,
    name: &str,
) -> Vec<(NodeId, usize, &'a Expr)> {
    let mut out = Vec::new();
    let Ok((def, _)) = enricher.function_def(fn_id) else {
        return out;
    };
    // Methods receive self implicitly; drop it from the position count.
    if def.params.first().is_some_and(|p| p.name == "self") && pos > 0 {
        pos -= 1;
    }
    let callers: BTreeSet<NodeId> = enricher
        .cpg
        .edges_to(fn_id, EdgeKind::Calls)
        .map(|e| e.src)
        .collect();
    let terminal = def.name.clone();
    for caller in callers {
        let Ok((caller_def, unit)) = enricher.function_def(caller) else {
            continue;
        };
        let mut flat = Vec::new();
        collect_stmts_with_try(&caller_def.body, false, &mut flat);
        for (stmt, _) in flat {
            each_call(stmt, &mut |call, func| {
                if func.terminal_name() != Some(terminal.as_str()) {
                    return;
                }
                if let ExprKind::Call { args, keywords, .. } = &call.kind {
                    if let Some(kw) = keywords.iter().find(|k| k.name.as_deref() == Some(name)) {
                        out.push((caller, unit, &kw.value));
                    } else if let Some(arg) = args.get(pos) {
                        out.push((caller, unit, arg));
                    }
                }
            });
        }
    }
    out
}

// ----------------------------------------------------------------------
// return-path analysis
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
struct Flow {
    falls_through: bool,
    has_valued_return: bool,
    has_bare_return: bool,
    bare_return_split: bool,
}

/// None when some path returns a value; otherwise the reason every
/// completing path is value-less.
pub fn missing_return_reason(body: &[Stmt]) -> Option<MissingReturnReason> {
    let flow = analyze_block(body);
    if flow.has_valued_return {
        return None;
    }
    if flow.bare_return_split {
        return Some(MissingReturnReason::BareReturnSplit);
    }
    if flow.falls_through || flow.has_bare_return {
        return Some(MissingReturnReason::NoReturn);
    }
    // Every path raises; not a missing return.
    None
}

fn analyze_block(body: &[Stmt]) -> Flow {
    let mut flow = Flow {
        falls_through: true,
        ..Flow::default()
    };
    let mut idx = 0;
    while idx < body.len() {
        if !flow.falls_through {
            // Unreachable tail. The bare-return-then-expression pattern
            // lives exactly here: the value ended up after the return.
            if flow.has_bare_return {
                if let StmtKind::Expr(_) = body[idx].kind {
                    flow.bare_return_split = true;
                }
            }
            break;
        }
        let stmt = &body[idx];
        match &stmt.kind {
            StmtKind::Return { value } => {
                if value.is_some() {
                    flow.has_valued_return = true;
                } else {
                    flow.has_bare_return = true;
                }
                flow.falls_through = false;
            }
            StmtKind::Raise { .. } => {
                flow.falls_through = false;
            }
            StmtKind::If { body, orelse, .. } => {
                let then_flow = analyze_block(body);
                let else_flow = analyze_block(orelse);
                flow.has_valued_return |= then_flow.has_valued_return | else_flow.has_valued_return;
                flow.has_bare_return |= then_flow.has_bare_return | else_flow.has_bare_return;
                flow.bare_return_split |= then_flow.bare_return_split | else_flow.bare_return_split;
                // With no else, the false path falls through.
                let else_falls = orelse.is_empty() || else_flow.falls_through;
                flow.falls_through = then_flow.falls_through || else_falls;
            }
            StmtKind::While { body, orelse, .. } | StmtKind::For { body, orelse, .. } => {
                let body_flow = analyze_block(body);
                let else_flow = analyze_block(orelse);
                flow.has_valued_return |= body_flow.has_valued_return | else_flow.has_valued_return;
                flow.has_bare_return |= body_flow.has_bare_return | else_flow.has_bare_return;
                flow.bare_return_split |= body_flow.bare_return_split | else_flow.bare_return_split;
                // The loop may run zero times.
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                let mut parts = vec![
                    analyze_block(body),
                    analyze_block(orelse),
                    analyze_block(finalbody),
                ];
                for h in handlers {
                    parts.push(analyze_block(&h.body));
                }
                for part in &parts {
                    flow.has_valued_return |= part.has_valued_return;
                    flow.has_bare_return |= part.has_bare_return;
                    flow.bare_return_split |= part.bare_return_split;
                }
            }
            StmtKind::With { body, .. } => {
                let inner = analyze_block(body);
                flow.has_valued_return |= inner.has_valued_return;
                flow.has_bare_return |= inner.has_bare_return;
                flow.bare_return_split |= inner.bare_return_split;
                flow.falls_through = inner.falls_through;
            }
            _ => {}
        }
        idx += 1;
    }
    flow
}

fn body_has_yield(body: &[Stmt]) -> bool {
    let mut found = false;
    visit_exprs(body, &mut |e| {
        if matches!(e.kind, ExprKind::Yield(_)) {
            found = true;
        }
    });
    found
}

// ----------------------------------------------------------------------
// import analysis
// ----------------------------------------------------------------------

pub fn project_module_names(snapshot: &ProjectSnapshot) -> HashSet<String> {
    let mut names = HashSet::new();
    for file in &snapshot.files {
        let parts: Vec<&str> = file.path.split('/').collect();
        for dir in &parts[..parts.len().saturating_sub(1)] {
            names.insert(dir.to_string());
        }
        if let Some(stem) = parts.last().and_then(|f| f.strip_suffix(".py")) {
            names.insert(stem.to_string());
        }
    }
    names
}

fn unit_external_packages(
    unit: &AstUnit,
    internal: &HashSet<String>,
    stdlib: &BTreeSet<&str>,
) -> BTreeSet<String> {
    let mut packages = BTreeSet::new();
    let mut flat = Vec::new();
    collect_stmts_with_try(&unit.body, false, &mut flat);
    for (stmt, _) in flat {
        match &stmt.kind {
            StmtKind::Import(aliases) => {
                for alias in aliases {
                    let top = alias.name.split('.').next().unwrap_or(&alias.name);
                    if !top.is_empty() && !internal.contains(top) && !stdlib.contains(top) {
                        packages.insert(top.to_string());
                    }
                }
            }
            StmtKind::ImportFrom { level, module, .. } => {
                if *level > 0 {
                    continue;
                }
                let top = module.split('.').next().unwrap_or(module);
                if !top.is_empty() && !internal.contains(top) && !stdlib.contains(top) {
                    packages.insert(top.to_string());
                }
            }
            _ => {}
        }
    }
    packages
}

// ----------------------------------------------------------------------
// AST refind
// ----------------------------------------------------------------------

pub fn find_classdef(body: &[Stmt], span: Span) -> Option<&ClassDef> {
    for stmt in body {
        if let StmtKind::ClassDef(def) = &stmt.kind {
            if stmt.span == span {
                return Some(def);
            }
        }
        if let Some(found) = stmt_bodies(stmt)
            .into_iter()
            .find_map(|b| find_classdef(b, span))
        {
            return Some(found);
        }
    }
    None
}

pub fn find_funcdef(body: &[Stmt], span: Span) -> Option<&FunctionDef> {
    for stmt in body {
        if let StmtKind::FunctionDef(def) = &stmt.kind {
            if stmt.span == span {
                return Some(def);
            }
        }
        if let Some(found) = stmt_bodies(stmt)
            .into_iter()
            .find_map(|b| find_funcdef(b, span))
        {
            return Some(found);
        }
    }
    None
}

fn stmt_bodies(stmt: &Stmt) -> Vec<&[Stmt]> {
    match &stmt.kind {
        StmtKind::FunctionDef(def) => vec![&def.body],
        StmtKind::ClassDef(def) => vec![&def.body],
        StmtKind::If { body, orelse, .. } | StmtKind::While { body, orelse, .. } => {
            vec![body, orelse]
        }
        StmtKind::For { body, orelse, .. } => vec![body, orelse],
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
        } => {
            let mut parts: Vec<&[Stmt]> = vec![body, orelse, finalbody];
            for h in handlers {
                parts.push(&h.body);
            }
            parts
        }
        StmtKind::With { body, .. } => vec![body],
        _ => Vec::new(),
    }
}
