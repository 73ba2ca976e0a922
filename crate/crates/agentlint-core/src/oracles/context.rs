//! Shared oracle context: the pipeline artifacts plus write-once caches
//! for intermediate results that later oracles reuse (init nodes, tool
//! instances, exec function names, trigger words).

use super::registry::ModelCapabilityRegistry;
use super::OracleError;
use crate::config::AnalyzerConfig;
use crate::cpg::ast::{Expr, ExprKind, Stmt, StmtKind};
use crate::cpg::{CodePropertyGraph, EdgeKind, NodeId, NodeKind};
use crate::enrich::Enricher;
use crate::ingest::ProjectSnapshot;
use crate::reasoner::{facts, Answer, QuestionItem, Reasoner, ReasonerQuestion, TemplateId};
use crate::unrt::{layered_search, UnifiedKind, UnifiedNode, Unrt};
use std::cell::RefCell;
use std::collections::BTreeSet;

/// A tool instance located in the project: a class reachable from the
/// tool init node or a decorator-marked function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolInstance {
    pub graph_id: NodeId,
    pub qualname: String,
    pub file: String,
    pub span: (u32, u32),
    pub is_class: bool,
    /// Registered name value, when statically known.
    pub name_value: Option<String>,
    /// True when no name registration exists at all.
    pub name_missing: bool,
    pub description_value: Option<String>,
    /// Lowercased identifier tokens from the implementation.
    pub impl_tokens: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct TriggerWords {
    pub words: BTreeSet<String>,
    pub incomplete: bool,
}

/// Which locators found what; recorded in the report.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LocatorSummary {
    pub llm_init: Option<String>,
    pub agent_init: Option<String>,
    pub tool_init: Option<String>,
    pub tool_instances: Vec<String>,
    pub llm_exec_fn: Option<String>,
    pub tool_exec_fn: Option<String>,
    pub trigger_words: Vec<String>,
}

pub struct OracleContext<'a> {
    pub snapshot: &'a ProjectSnapshot,
    pub cpg: &'a CodePropertyGraph,
    pub unrt: &'a Unrt,
    pub reasoner: &'a Reasoner,
    pub registry: &'a ModelCapabilityRegistry,
    pub config: &'a AnalyzerConfig,
    pub enricher: Enricher<'a>,

    // Write-once caches: `None` = not yet computed. An oracle may fill
    // an empty slot; filled slots are never overwritten.
    llm_init: RefCell<Option<Option<UnifiedNode>>>,
    agent_init: RefCell<Option<Option<UnifiedNode>>>,
    tool_init: RefCell<Option<Option<UnifiedNode>>>,
    tool_instances: RefCell<Option<Vec<ToolInstance>>>,
    llm_exec_fn: RefCell<Option<Option<String>>>,
    tool_exec_fn: RefCell<Option<Option<String>>>,
    trigger_words: RefCell<Option<TriggerWords>>,
    model_names: RefCell<Option<Vec<String>>>,
}

impl<'a> OracleContext<'a> {
    pub fn new(
        snapshot: &'a ProjectSnapshot,
        cpg: &'a CodePropertyGraph,
        unrt: &'a Unrt,
        reasoner: &'a Reasoner,
        registry: &'a ModelCapabilityRegistry,
        config: &'a AnalyzerConfig,
    ) -> Self {
        OracleContext {
            snapshot,
            cpg,
            unrt,
            reasoner,
            registry,
            config,
            enricher: Enricher::new(snapshot, cpg),
            llm_init: RefCell::new(None),
            agent_init: RefCell::new(None),
            tool_init: RefCell::new(None),
            tool_instances: RefCell::new(None),
            llm_exec_fn: RefCell::new(None),
            tool_exec_fn: RefCell::new(None),
            trigger_words: RefCell::new(None),
            model_names: RefCell::new(None),
        }
    }

    pub fn locator_summary(&self) -> LocatorSummary {
        let name_of = |slot: &RefCell<Option<Option<UnifiedNode>>>| {
            slot.borrow()
                .as_ref()
                .and_then(|v| v.as_ref().map(|n| n.name.clone()))
        };
        LocatorSummary {
            llm_init: name_of(&self.llm_init),
            agent_init: name_of(&self.agent_init),
            tool_init: name_of(&self.tool_init),
            tool_instances: self
                .tool_instances
                .borrow()
                .as_ref()
                .map(|v| v.iter().map(|t| t.qualname.clone()).collect())
                .unwrap_or_default(),
            llm_exec_fn: self.llm_exec_fn.borrow().clone().flatten(),
            tool_exec_fn: self.tool_exec_fn.borrow().clone().flatten(),
            trigger_words: self
                .trigger_words
                .borrow()
                .as_ref()
                .map(|t| t.words.iter().cloned().collect())
                .unwrap_or_default(),
        }
    }

    // ------------------------------------------------------------------
    // Locators
    // ------------------------------------------------------------------

    /// LLM initialization node, searching IS_LLM_INIT first and falling
    /// back to IS_AGENT_INIT (the model setup may be embedded in the
    /// agent's own init code).
    pub fn ensure_llm_init(&self) -> Result<Option<UnifiedNode>, OracleError> {
        if let Some(cached) = self.llm_init.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let mut found = self.search(TemplateId::IsLlmInit)?;
        if found.is_none() {
            found = self.search(TemplateId::IsAgentInit)?;
        }
        self.llm_init.borrow_mut().get_or_insert(found.clone());
        Ok(found)
    }

    pub fn ensure_agent_init(&self) -> Result<Option<UnifiedNode>, OracleError> {
        if let Some(cached) = self.agent_init.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let found = self.search(TemplateId::IsAgentInit)?;
        self.agent_init.borrow_mut().get_or_insert(found.clone());
        Ok(found)
    }

    pub fn ensure_tool_init(&self) -> Result<Option<UnifiedNode>, OracleError> {
        if let Some(cached) = self.tool_init.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let found = self.search(TemplateId::IsToolInit)?;
        self.tool_init.borrow_mut().get_or_insert(found.clone());
        Ok(found)
    }

    /// Tool instances: the tool init class itself, class nodes among its
    /// tree descendants, and decorator-marked functions anywhere.
    pub fn ensure_tool_instances(&self) -> Result<Vec<ToolInstance>, OracleError> {
        if let Some(cached) = self.tool_instances.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let mut instance_ids: Vec<NodeId> = Vec::new();
        if let Some(init) = self.ensure_tool_init()? {
            if init.kind == UnifiedKind::Class {
                instance_ids.push(init.graph_id);
            }
            for child in self.unrt.children_of(&init).map_err(OracleError::tree)? {
                if child.kind == UnifiedKind::Class && !instance_ids.contains(&child.graph_id) {
                    instance_ids.push(child.graph_id);
                }
            }
        }
        // Decorator-marked functions count as instances regardless.
        for (node_id, decorators) in &self.cpg.decorators {
            let node = self.cpg.node(*node_id).unwrap();
            if node.kind == NodeKind::Function
                && decorators
                    .iter()
                    .any(|d| self.reasoner.markers().is_tool_decorator(d))
                && !instance_ids.contains(node_id)
            {
                instance_ids.push(*node_id);
            }
        }

        let mut instances = Vec::new();
        for id in instance_ids {
            instances.push(self.tool_instance_facts(id)?);
        }
        self.tool_instances
            .borrow_mut()
            .get_or_insert(instances.clone());
        Ok(instances)
    }

    fn tool_instance_facts(&self, graph_id: NodeId) -> Result<ToolInstance, OracleError> {
        let node = self.cpg.node(graph_id).unwrap();
        let markers = self.reasoner.markers();
        let mut impl_tokens: BTreeSet<String> = BTreeSet::new();
        let mut name_value = None;
        let mut name_missing = true;
        let mut description_value = None;

        if node.kind == NodeKind::Class {
            let facts = self.enricher.attribute_facts(graph_id)?;
            for fact in &facts {
                if fact.name == "name" {
                    name_missing = false;
                    name_value = fact.literal_str().map(str::to_string);
                }
                if fact.name == "description" {
                    description_value = fact.literal_str().map(str::to_string);
                }
                impl_tokens.extend(markers.identifier_tokens(&fact.name));
            }
            impl_tokens.extend(markers.identifier_tokens(node.simple_name()));
            let (def, _) = self.enricher.class_def(graph_id)?;
            for stmt in &def.body {
                if let StmtKind::FunctionDef(f) = &stmt.kind {
                    impl_tokens.extend(markers.identifier_tokens(&f.name));
                    for p in &f.params {
                        impl_tokens.extend(markers.identifier_tokens(&p.name));
                    }
                }
            }
            collect_call_tokens(&def.body, markers, &mut impl_tokens);
            // The docstring stands in for a missing description attribute.
            if description_value.is_none() {
                description_value = docstring(&def.body);
            }
        } else {
            // Function tool: the function name registers the tool, the
            // docstring describes it.
            let (def, _) = self.enricher.function_def(graph_id)?;
            name_missing = false;
            name_value = Some(def.name.clone());
            description_value = docstring(&def.body);
            impl_tokens.extend(markers.identifier_tokens(&def.name));
            for p in &def.params {
                impl_tokens.extend(markers.identifier_tokens(&p.name));
            }
            collect_call_tokens(&def.body, markers, &mut impl_tokens);
        }
        // The registered name is part of the tool's identifier surface:
        // a description agreeing with the name agrees with the tool.
        if let Some(name) = &name_value {
            impl_tokens.extend(markers.identifier_tokens(name));
        }

        Ok(ToolInstance {
            graph_id,
            qualname: node.name.clone(),
            file: node.file.clone(),
            span: node.span,
            is_class: node.kind == NodeKind::Class,
            name_value,
            name_missing,
            description_value,
            impl_tokens: impl_tokens.into_iter().collect(),
        })
    }

    /// Name of the function executed to invoke the model, asked of the
    /// LLM init node's methods.
    pub fn ensure_llm_exec_fn(&self) -> Result<Option<String>, OracleError> {
        if let Some(cached) = self.llm_exec_fn.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let found = match self.ensure_llm_init()? {
            Some(init) => self.exec_fn_for(&init, TemplateId::LlmExecFunctionName)?,
            None => None,
        };
        self.llm_exec_fn.borrow_mut().get_or_insert(found.clone());
        Ok(found)
    }

    pub fn ensure_tool_exec_fn(&self) -> Result<Option<String>, OracleError> {
        if let Some(cached) = self.tool_exec_fn.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let found = match self.ensure_tool_init()? {
            Some(init) => self.exec_fn_for(&init, TemplateId::ToolExecFunctionName)?,
            None => None,
        };
        self.tool_exec_fn.borrow_mut().get_or_insert(found.clone());
        Ok(found)
    }

    fn exec_fn_for(
        &self,
        init: &UnifiedNode,
        template: TemplateId,
    ) -> Result<Option<String>, OracleError> {
        if init.kind != UnifiedKind::Class {
            // A function node executes itself.
            let simple = init.name.rsplit('.').next().unwrap_or(&init.name);
            return Ok(Some(simple.to_string()));
        }
        let item = self.describe_graph_node(init.graph_id)?;
        let question = ReasonerQuestion {
            template_id: template,
            items: vec![item],
        };
        let verdict = self
            .reasoner
            .ask(&question)
            .map_err(OracleError::Reasoner)?;
        Ok(verdict
            .answers
            .first()
            .and_then(|a| a.ident().map(str::to_string)))
    }

    /// Trigger words: stop-list literals flowing into model calls under
    /// the agent and LLM init scopes, plus comparison literals guarding
    /// tool dispatch.
    pub fn ensure_trigger_words(&self) -> Result<TriggerWords, OracleError> {
        if let Some(cached) = self.trigger_words.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let mut result = TriggerWords::default();
        let markers = self.reasoner.markers();

        let mut scope_fns: Vec<NodeId> = Vec::new();
        if let Some(agent) = self.ensure_agent_init()? {
            if agent.kind == UnifiedKind::Class {
                scope_fns.extend(self.enricher.class_functions(agent.graph_id));
            } else {
                scope_fns.push(agent.graph_id);
            }
        }
        if let Some(llm) = self.ensure_llm_init()? {
            if llm.kind == UnifiedKind::Class {
                scope_fns.extend(self.enricher.class_functions(llm.graph_id));
            } else {
                scope_fns.push(llm.graph_id);
            }
        }
        scope_fns.sort_unstable();
        scope_fns.dedup();

        for fn_id in scope_fns {
            let Ok((def, unit)) = self.enricher.function_def(fn_id) else {
                continue;
            };
            // Stop-list keyword arguments anywhere in the function.
            let mut stop_exprs: Vec<&Expr> = Vec::new();
            let mut dispatch_reads: BTreeSet<String> = BTreeSet::new();
            each_call_in_body(&def.body, &mut |call, func| {
                if let ExprKind::Call { keywords, .. } = &call.kind {
                    for kw in keywords {
                        if let Some(name) = &kw.name {
                            if markers.stop_kwargs.iter().any(|s| s == name) {
                                stop_exprs.push(&kw.value);
                            }
                        }
                    }
                }
                let path = func.path_string();
                let terminal = func.terminal_name().unwrap_or_default();
                let is_dispatch = markers.is_tool_collection_name(&path)
                    || markers.tool_exec_names.iter().any(|e| e == terminal);
                if is_dispatch {
                    for name in call.read_names() {
                        if name != "self" {
                            dispatch_reads.insert(name);
                        }
                    }
                }
            });
            for expr in stop_exprs {
                let res = self.enricher.resolve_literals(unit, expr, Some(fn_id));
                result.words.extend(res.literals);
                result.incomplete |= res.incomplete || res.truncated;
            }
            // Comparison literals over variables that feed dispatch.
            if !dispatch_reads.is_empty() {
                collect_comparison_literals(&def.body, &dispatch_reads, &mut result.words);
            }
        }

        self.trigger_words
            .borrow_mut()
            .get_or_insert(result.clone());
        Ok(result)
    }

    /// Model-name literals extracted from completion calls and model
    /// attributes of the LLM init node.
    pub fn ensure_model_names(&self) -> Result<Vec<String>, OracleError> {
        if let Some(cached) = self.model_names.borrow().as_ref() {
            return Ok(cached.clone());
        }
        let mut names: BTreeSet<String> = BTreeSet::new();
        if let Some(init) = self.ensure_llm_init()? {
            let markers = self.reasoner.markers();
            let fn_ids: Vec<NodeId> = if init.kind == UnifiedKind::Class {
                self.enricher.class_functions(init.graph_id)
            } else {
                vec![init.graph_id]
            };
            for fn_id in fn_ids {
                let Ok((def, unit)) = self.enricher.function_def(fn_id) else {
                    continue;
                };
                each_call_in_body(&def.body, &mut |call, func| {
                    let path = func.path_string();
                    if !markers.is_llm_call_path(&path)
                        && !markers.is_llm_call_path(&format!("{path}("))
                    {
                        return;
                    }
                    if let ExprKind::Call { keywords, .. } = &call.kind {
                        for kw in keywords {
                            if let Some(name) = &kw.name {
                                if markers.model_kwargs.iter().any(|m| m == name) {
                                    let res = self.enricher.resolve_literals(
                                        unit,
                                        &kw.value,
                                        Some(fn_id),
                                    );
                                    names.extend(res.literals);
                                }
                            }
                        }
                    }
                });
            }
            // Model attribute on the init class.
            if init.kind == UnifiedKind::Class {
                if let Ok(facts) = self.enricher.attribute_facts(init.graph_id) {
                    for fact in facts {
                        if self.reasoner.markers().model_kwargs.contains(&fact.name) {
                            if let Some(value) = fact.literal_str() {
                                if !value.is_empty() {
                                    names.insert(value.to_string());
                                }
                            }
                        }
                    }
                }
            }
        }
        let names: Vec<String> = names.into_iter().collect();
        self.model_names.borrow_mut().get_or_insert(names.clone());
        Ok(names)
    }

    /// Functions in the agent's scope: contained in the agent init class
    /// when one was found, otherwise none.
    pub fn agent_scope_functions(&self) -> Result<Vec<NodeId>, OracleError> {
        match self.ensure_agent_init()? {
            Some(agent) if agent.kind == UnifiedKind::Class => {
                Ok(self.enricher.class_functions(agent.graph_id))
            }
            Some(agent) => Ok(vec![agent.graph_id]),
            None => Ok(Vec::new()),
        }
    }

    // ------------------------------------------------------------------
    // Search plumbing
    // ------------------------------------------------------------------

    fn search(&self, template: TemplateId) -> Result<Option<UnifiedNode>, OracleError> {
        let result = layered_search(
            self.unrt,
            self.config.batch_size,
            |batch| -> Result<Option<usize>, OracleError> {
                let mut items = Vec::with_capacity(batch.len());
                for node in batch {
                    items.push(self.describe_unified(node)?);
                }
                let question = ReasonerQuestion {
                    template_id: template,
                    items,
                };
                let verdict = self
                    .reasoner
                    .ask(&question)
                    .map_err(OracleError::Reasoner)?;
                Ok(verdict.answers.iter().position(Answer::is_yes))
            },
        );
        match result {
            Ok(found) => Ok(found.cloned()),
            Err(err) => Err(OracleError::Search {
                template: template.as_str(),
                detail: err.to_string(),
            }),
        }
    }

    pub fn describe_unified(&self, node: &UnifiedNode) -> Result<QuestionItem, OracleError> {
        self.describe_graph_node(node.graph_id)
    }

    /// Builds the question payload for one graph node: definition
    /// snippet plus the structured facts the heuristic rules consume.
    pub fn describe_graph_node(&self, graph_id: NodeId) -> Result<QuestionItem, OracleError> {
        let node = self.cpg.node(graph_id).unwrap();
        let markers = self.reasoner.markers();
        let snippet_text = match self.enricher.snippet(graph_id) {
            Ok(s) => s.text,
            // Synthesized stubs have no source; describe them by name.
            Err(_) => format!("# external: {}", node.name),
        };
        let mut item = QuestionItem::new(node.name.clone(), snippet_text);

        match node.kind {
            NodeKind::Class => {
                let (def, _) = self.enricher.class_def(graph_id)?;
                item = item.with_facts(facts::BASE, def.bases.iter().map(|b| b.path_string()));
                item = item.with_facts(
                    facts::DECORATOR,
                    def.decorators.iter().map(|d| d.path_string()),
                );
                let mut methods = Vec::new();
                let mut completion_methods = Vec::new();
                let mut constructor_methods = Vec::new();
                for stmt in &def.body {
                    if let StmtKind::FunctionDef(f) = &stmt.kind {
                        methods.push(f.name.clone());
                        // Dunders wire clients up; they are not the entry
                        // point the agent executes.
                        if f.name.starts_with("__") && f.name.ends_with("__") {
                            continue;
                        }
                        let mut has_completion_call = false;
                        let mut has_constructor = false;
                        each_call_in_body(&f.body, &mut |_, func| {
                            let path = func.path_string();
                            if markers.is_llm_call_path(&path) {
                                has_completion_call = true;
                            } else if markers.is_llm_call_path(&format!("{path}(")) {
                                has_constructor = true;
                            }
                        });
                        if has_completion_call {
                            completion_methods.push(f.name.clone());
                        } else if has_constructor {
                            constructor_methods.push(f.name.clone());
                        }
                    }
                }
                item = item.with_facts(facts::METHOD, methods);
                // Methods with a completion call outrank ones that only
                // construct a client.
                item = item.with_facts(facts::LLM_CALL_METHOD, completion_methods);
                item = item.with_facts(facts::LLM_CALL_METHOD, constructor_methods);

                let mut calls = Vec::new();
                collect_call_paths(&def.body, &mut calls);
                item = item.with_facts(facts::CALL, calls);

                // Tool-collection attributes: class body plus self.X
                // assignment targets in methods.
                let mut collections = Vec::new();
                if let Ok(attr_facts) = self.enricher.attribute_facts(graph_id) {
                    for fact in attr_facts {
                        if markers.is_tool_collection_name(&fact.name) {
                            collections.push(fact.name);
                        }
                    }
                }
                collect_self_attr_writes(&def.body, &mut |attr| {
                    if markers.is_tool_collection_name(attr)
                        && !collections.contains(&attr.to_string())
                    {
                        collections.push(attr.to_string());
                    }
                });
                item = item.with_facts(facts::TOOL_COLLECTION, collections);

                // Does this class call into the located LLM init node?
                // Only derivable once that locator has run.
                if let Some(Some(llm)) = self.llm_init.borrow().as_ref() {
                    if llm.graph_id != graph_id {
                        let llm_fns: BTreeSet<NodeId> = if llm.kind == UnifiedKind::Class {
                            self.enricher
                                .class_functions(llm.graph_id)
                                .into_iter()
                                .collect()
                        } else {
                            [llm.graph_id].into_iter().collect()
                        };
                        let calls_llm = self
                            .enricher
                            .class_functions(graph_id)
                            .iter()
                            .flat_map(|&f| self.cpg.edges_from(f, EdgeKind::Calls))
                            .any(|e| llm_fns.contains(&e.dst));
                        if calls_llm {
                            item = item.with_fact(facts::CALLS_LLM, "true");
                        }
                    }
                }
            }
            NodeKind::Function => {
                if let Some(decorators) = self.cpg.decorators.get(&graph_id) {
                    item = item.with_facts(facts::DECORATOR, decorators.iter().cloned());
                }
                if let Ok((def, _)) = self.enricher.function_def(graph_id) {
                    let mut calls = Vec::new();
                    collect_call_paths(&def.body, &mut calls);
                    item = item.with_facts(facts::CALL, calls);
                }
            }
            _ => {}
        }
        Ok(item)
    }
}

// ----------------------------------------------------------------------
// AST helpers local to the oracle layer
// ----------------------------------------------------------------------

/// Visits every call in a statement block, nested definitions included
/// (they belong to the same implementation for fact purposes).
pub fn each_call_in_body<'s>(body: &'s [Stmt], f: &mut impl FnMut(&'s Expr, &'s Expr)) {
    crate::cpg::ast::visit_exprs(body, &mut |e| {
        if let ExprKind::Call { func, .. } = &e.kind {
            f(e, func);
        }
    });
}

fn collect_call_paths(body: &[Stmt], out: &mut Vec<String>) {
    each_call_in_body(body, &mut |_, func| {
        out.push(func.path_string());
    });
}

fn collect_call_tokens(
    body: &[Stmt],
    markers: &crate::reasoner::MarkerConfig,
    out: &mut BTreeSet<String>,
) {
    each_call_in_body(body, &mut |_, func| {
        if let Some(terminal) = func.terminal_name() {
            out.extend(markers.identifier_tokens(terminal));
        }
    });
}

fn collect_self_attr_writes(body: &[Stmt], f: &mut impl FnMut(&str)) {
    fn visit_stmt(stmt: &Stmt, f: &mut impl FnMut(&str)) {
        let mut handle_target = |target: &Expr| {
            if let ExprKind::Attribute { value, attr } = &target.kind {
                if matches!(&value.kind, ExprKind::Name(base) if base == "self") {
                    f(attr);
                }
            }
        };
        match &stmt.kind {
            StmtKind::Assign { targets, .. } => {
                for t in targets {
                    handle_target(t);
                }
            }
            StmtKind::AnnAssign { target, .. } | StmtKind::AugAssign { target, .. } => {
                handle_target(target)
            }
            StmtKind::FunctionDef(def) => {
                for s in &def.body {
                    visit_stmt(s, f);
                }
            }
            StmtKind::If { body, orelse, .. } | StmtKind::While { body, orelse, .. } => {
                for s in body.iter().chain(orelse) {
                    visit_stmt(s, f);
                }
            }
            StmtKind::For { body, orelse, .. } => {
                for s in body.iter().chain(orelse) {
                    visit_stmt(s, f);
                }
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                for s in body.iter().chain(orelse).chain(finalbody) {
                    visit_stmt(s, f);
                }
                for h in handlers {
                    for s in &h.body {
                        visit_stmt(s, f);
                    }
                }
            }
            StmtKind::With { body, .. } => {
                for s in body {
                    visit_stmt(s, f);
                }
            }
            _ => {}
        }
    }
    for stmt in body {
        visit_stmt(stmt, f);
    }
}

/// Docstring of a definition body: a leading string expression.
pub fn docstring(body: &[Stmt]) -> Option<String> {
    match body.first().map(|s| &s.kind) {
        Some(StmtKind::Expr(e)) => match &e.kind {
            ExprKind::Str(s) if !s.is_fstring => {
                let trimmed = s.value.trim().to_string();
                (!trimmed.is_empty()).then_some(trimmed)
            }
            _ => None,
        },
        _ => None,
    }
}

/// String literals compared against any of `names` in conditions of the
/// given body: `if tool == 'Final'` contributes `Final`.
fn collect_comparison_literals(
    body: &[Stmt],
    names: &BTreeSet<String>,
    out: &mut BTreeSet<String>,
) {
    fn scan_condition(test: &Expr, names: &BTreeSet<String>, out: &mut BTreeSet<String>) {
        if let ExprKind::Compare {
            left, comparators, ..
        } = &test.kind
        {
            let sides: Vec<&Expr> = std::iter::once(left.as_ref())
                .chain(comparators.iter())
                .collect();
            let involves_name = sides
                .iter()
                .any(|e| matches!(&e.kind, ExprKind::Name(n) if names.contains(n)));
            if involves_name {
                for side in sides {
                    if let ExprKind::Str(s) = &side.kind {
                        if !s.is_fstring {
                            out.insert(s.value.clone());
                        }
                    }
                }
            }
        }
        if let ExprKind::BoolOp { values, .. } = &test.kind {
            for v in values {
                scan_condition(v, names, out);
            }
        }
    }
    fn visit(stmt: &Stmt, names: &BTreeSet<String>, out: &mut BTreeSet<String>) {
        match &stmt.kind {
            StmtKind::If { test, body, orelse } | StmtKind::While { test, body, orelse } => {
                scan_condition(test, names, out);
                for s in body.iter().chain(orelse) {
                    visit(s, names, out);
                }
            }
            StmtKind::For { body, orelse, .. } => {
                for s in body.iter().chain(orelse) {
                    visit(s, names, out);
                }
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                for s in body.iter().chain(orelse).chain(finalbody) {
                    visit(s, names, out);
                }
                for h in handlers {
                    for s in &h.body {
                        visit(s, names, out);
                    }
                }
            }
            StmtKind::With { body, .. } => {
                for s in body {
                    visit(s, names, out);
                }
            }
            _ => {}
        }
    }
    for stmt in body {
        visit(stmt, names, out);
    }
}
