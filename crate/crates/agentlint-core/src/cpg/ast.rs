//! AST for the analyzed Python subset.
//!
//! The grammar covers what the defect oracles consume: definitions,
//! calls, assignments, literals, imports, try/except, assert, if, and
//! return statements. Anything else is preserved as an opaque statement
//! so analysis degrades instead of aborting.

use serde::{Deserialize, Serialize};

/// Byte range within one source file, end-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// One parsed file plus the syntax issues hit while parsing it.
#[derive(Debug, Clone, PartialEq)]
pub struct AstUnit {
    pub path: String,
    pub body: Vec<Stmt>,
    pub issues: Vec<SyntaxIssue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxIssue {
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    FunctionDef(FunctionDef),
    ClassDef(ClassDef),
    /// `import a.b, c as d`
    Import(Vec<ImportAlias>),
    /// `from .mod import x as y`
    ImportFrom {
        /// Number of leading dots (relative import level).
        level: usize,
        module: String,
        names: Vec<ImportAlias>,
    },
    Assign {
        targets: Vec<Expr>,
        value: Expr,
    },
    /// `x: T = v` / `x: T`
    AnnAssign {
        target: Expr,
        annotation: Expr,
        value: Option<Expr>,
    },
    AugAssign {
        target: Expr,
        op: String,
        value: Expr,
    },
    Return {
        value: Option<Expr>,
    },
    Assert {
        test: Expr,
        msg: Option<Expr>,
    },
    If {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
    },
    While {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
    },
    For {
        target: Expr,
        iter: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
    },
    Try {
        body: Vec<Stmt>,
        handlers: Vec<ExceptHandler>,
        orelse: Vec<Stmt>,
        finalbody: Vec<Stmt>,
    },
    With {
        items: Vec<Expr>,
        body: Vec<Stmt>,
    },
    Raise {
        exc: Option<Expr>,
    },
    Expr(Expr),
    Pass,
    Break,
    Continue,
    /// Statement we do not model; span covers the original text.
    Opaque,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportAlias {
    pub name: String,
    pub asname: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub name_span: Span,
    pub params: Vec<Param>,
    pub decorators: Vec<Expr>,
    pub returns: Option<Expr>,
    pub body: Vec<Stmt>,
    pub is_async: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub annotation: Option<Expr>,
    pub default: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub name_span: Span,
    /// Base-class expressions in declaration order.
    pub bases: Vec<Expr>,
    /// `metaclass=...`-style keywords in the class header.
    pub keywords: Vec<(String, Expr)>,
    pub decorators: Vec<Expr>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptHandler {
    pub typ: Option<Expr>,
    pub name: Option<String>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Name(String),
    Attribute {
        value: Box<Expr>,
        attr: String,
    },
    Subscript {
        value: Box<Expr>,
        index: Box<Expr>,
    },
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        keywords: Vec<Keyword>,
    },
    Str(StrLit),
    Num {
        repr: String,
        is_int: bool,
    },
    Bool(bool),
    NoneLit,
    Ellipsis,
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    Set(Vec<Expr>),
    Dict {
        keys: Vec<Option<Expr>>,
        values: Vec<Expr>,
    },
    BinOp {
        left: Box<Expr>,
        op: String,
        right: Box<Expr>,
    },
    UnaryOp {
        op: String,
        operand: Box<Expr>,
    },
    BoolOp {
        op: String,
        values: Vec<Expr>,
    },
    Compare {
        left: Box<Expr>,
        ops: Vec<String>,
        comparators: Vec<Expr>,
    },
    IfExp {
        body: Box<Expr>,
        test: Box<Expr>,
        orelse: Box<Expr>,
    },
    Slice {
        lower: Option<Box<Expr>>,
        upper: Option<Box<Expr>>,
        step: Option<Box<Expr>>,
    },
    Starred(Box<Expr>),
    Yield(Option<Box<Expr>>),
    /// Expression we do not model (lambda, comprehension, walrus, ...).
    Opaque,
}

/// String literal; f-strings keep their decomposed parts.
#[derive(Debug, Clone, PartialEq)]
pub struct StrLit {
    /// Decoded value. For f-strings this is the literal text with
    /// interpolations elided.
    pub value: String,
    pub is_fstring: bool,
    /// Present for f-strings: alternating literal and expression parts.
    pub parts: Vec<FStringPart>,
}

impl StrLit {
    pub fn plain(value: impl Into<String>) -> Self {
        StrLit {
            value: value.into(),
            is_fstring: false,
            parts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FStringPart {
    Literal(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyword {
    /// `None` for `*args` / `**kwargs` spreads.
    pub name: Option<String>,
    pub value: Expr,
}

impl Expr {
    pub fn opaque(span: Span) -> Expr {
        Expr {
            kind: ExprKind::Opaque,
            span,
        }
    }

    /// Dotted path rendering of a callee or target expression, e.g.
    /// `self.tool_by_names[tool].use`. Subscript indices render as their
    /// source-ish text when simple, `...` otherwise.
    pub fn path_string(&self) -> String {
        match &self.kind {
            ExprKind::Name(n) => n.clone(),
            ExprKind::Attribute { value, attr } => {
                format!("{}.{}", value.path_string(), attr)
            }
            ExprKind::Subscript { value, index } => {
                let idx = match &index.kind {
                    ExprKind::Name(n) => n.clone(),
                    ExprKind::Str(s) if !s.is_fstring => format!("{:?}", s.value),
                    ExprKind::Num { repr, .. } => repr.clone(),
                    _ => "...".to_string(),
                };
                format!("{}[{}]", value.path_string(), idx)
            }
            ExprKind::Call { func, .. } => format!("{}()", func.path_string()),
            ExprKind::Str(s) => format!("{:?}", s.value),
            ExprKind::Num { repr, .. } => repr.clone(),
            _ => "<expr>".to_string(),
        }
    }

    /// Terminal identifier of a call target: `a.b.c` -> `c`, `f` -> `f`.
    pub fn terminal_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            ExprKind::Attribute { attr, .. } => Some(attr),
            ExprKind::Subscript { value, .. } => value.terminal_name(),
            _ => None,
        }
    }

    /// All simple identifiers read by this expression, in syntax order.
    pub fn read_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_read_names(&mut out);
        out
    }

    /// Two-segment attribute paths read by this expression, e.g.
    /// `self.api_key`. Used for class-attribute def-use tracking.
    pub fn read_attr_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_attr_paths(&mut out);
        out
    }

    fn collect_attr_paths(&self, out: &mut Vec<String>) {
        if let ExprKind::Attribute { value, attr } = &self.kind {
            if let ExprKind::Name(base) = &value.kind {
                out.push(format!("{base}.{attr}"));
            }
        }
        match &self.kind {
            ExprKind::Attribute { value, .. } => value.collect_attr_paths(out),
            ExprKind::Subscript { value, index } => {
                value.collect_attr_paths(out);
                index.collect_attr_paths(out);
            }
            ExprKind::Call {
                func,
                args,
                keywords,
            } => {
                func.collect_attr_paths(out);
                for a in args {
                    a.collect_attr_paths(out);
                }
                for k in keywords {
                    k.value.collect_attr_paths(out);
                }
            }
            ExprKind::Str(s) if s.is_fstring => {
                for part in &s.parts {
                    if let FStringPart::Expr(e) = part {
                        e.collect_attr_paths(out);
                    }
                }
            }
            ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
                for e in elts {
                    e.collect_attr_paths(out);
                }
            }
            ExprKind::Dict { keys, values } => {
                for k in keys.iter().flatten() {
                    k.collect_attr_paths(out);
                }
                for v in values {
                    v.collect_attr_paths(out);
                }
            }
            ExprKind::BinOp { left, right, .. } => {
                left.collect_attr_paths(out);
                right.collect_attr_paths(out);
            }
            ExprKind::UnaryOp { operand, .. } => operand.collect_attr_paths(out),
            ExprKind::BoolOp { values, .. } => {
                for v in values {
                    v.collect_attr_paths(out);
                }
            }
            ExprKind::Compare {
                left, comparators, ..
            } => {
                left.collect_attr_paths(out);
                for c in comparators {
                    c.collect_attr_paths(out);
                }
            }
            ExprKind::IfExp { body, test, orelse } => {
                body.collect_attr_paths(out);
                test.collect_attr_paths(out);
                orelse.collect_attr_paths(out);
            }
            ExprKind::Starred(inner) => inner.collect_attr_paths(out),
            ExprKind::Yield(Some(inner)) => inner.collect_attr_paths(out),
            _ => {}
        }
    }

    fn collect_read_names(&self, out: &mut Vec<String>) {
        match &self.kind {
            ExprKind::Name(n) => out.push(n.clone()),
            ExprKind::Attribute { value, .. } => value.collect_read_names(out),
            ExprKind::Subscript { value, index } => {
                value.collect_read_names(out);
                index.collect_read_names(out);
            }
            ExprKind::Call {
                func,
                args,
                keywords,
            } => {
                func.collect_read_names(out);
                for a in args {
                    a.collect_read_names(out);
                }
                for k in keywords {
                    k.value.collect_read_names(out);
                }
            }
            ExprKind::Str(s) if s.is_fstring => {
                for part in &s.parts {
                    if let FStringPart::Expr(e) = part {
                        e.collect_read_names(out);
                    }
                }
            }
            ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
                for e in elts {
                    e.collect_read_names(out);
                }
            }
            ExprKind::Dict { keys, values } => {
                for k in keys.iter().flatten() {
                    k.collect_read_names(out);
                }
                for v in values {
                    v.collect_read_names(out);
                }
            }
            ExprKind::BinOp { left, right, .. } => {
                left.collect_read_names(out);
                right.collect_read_names(out);
            }
            ExprKind::UnaryOp { operand, .. } => operand.collect_read_names(out),
            ExprKind::BoolOp { values, .. } => {
                for v in values {
                    v.collect_read_names(out);
                }
            }
            ExprKind::Compare {
                left, comparators, ..
            } => {
                left.collect_read_names(out);
                for c in comparators {
                    c.collect_read_names(out);
                }
            }
            ExprKind::IfExp { body, test, orelse } => {
                body.collect_read_names(out);
                test.collect_read_names(out);
                orelse.collect_read_names(out);
            }
            ExprKind::Slice { lower, upper, step } => {
                for part in [lower, upper, step].into_iter().flatten() {
                    part.collect_read_names(out);
                }
            }
            ExprKind::Starred(inner) => inner.collect_read_names(out),
            ExprKind::Yield(Some(inner)) => inner.collect_read_names(out),
            _ => {}
        }
    }
}

/// Walks every expression in a statement tree, call sites included.
pub fn visit_exprs<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Expr)) {
    for stmt in stmts {
        visit_stmt_exprs(stmt, f);
    }
}

fn visit_stmt_exprs<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(&'a Expr)) {
    match &stmt.kind {
        StmtKind::FunctionDef(def) => {
            for d in &def.decorators {
                visit_expr(d, f);
            }
            for p in &def.params {
                if let Some(d) = &p.default {
                    visit_expr(d, f);
                }
            }
            visit_exprs(&def.body, f);
        }
        StmtKind::ClassDef(def) => {
            for d in &def.decorators {
                visit_expr(d, f);
            }
            for b in &def.bases {
                visit_expr(b, f);
            }
            for (_, v) in &def.keywords {
                visit_expr(v, f);
            }
            visit_exprs(&def.body, f);
        }
        StmtKind::Assign { targets, value } => {
            for t in targets {
                visit_expr(t, f);
            }
            visit_expr(value, f);
        }
        StmtKind::AnnAssign {
            target,
            value: Some(v),
            ..
        } => {
            visit_expr(target, f);
            visit_expr(v, f);
        }
        StmtKind::AnnAssign { target, .. } => visit_expr(target, f),
        StmtKind::AugAssign { target, value, .. } => {
            visit_expr(target, f);
            visit_expr(value, f);
        }
        StmtKind::Return { value: Some(v) } => visit_expr(v, f),
        StmtKind::Assert { test, msg } => {
            visit_expr(test, f);
            if let Some(m) = msg {
                visit_expr(m, f);
            }
        }
        StmtKind::If { test, body, orelse } | StmtKind::While { test, body, orelse } => {
            visit_expr(test, f);
            visit_exprs(body, f);
            visit_exprs(orelse, f);
        }
        StmtKind::For {
            target,
            iter,
            body,
            orelse,
        } => {
            visit_expr(target, f);
            visit_expr(iter, f);
            visit_exprs(body, f);
            visit_exprs(orelse, f);
        }
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
        } => {
            visit_exprs(body, f);
            for h in handlers {
                if let Some(t) = &h.typ {
                    visit_expr(t, f);
                }
                visit_exprs(&h.body, f);
            }
            visit_exprs(orelse, f);
            visit_exprs(finalbody, f);
        }
        StmtKind::With { items, body } => {
            for i in items {
                visit_expr(i, f);
            }
            visit_exprs(body, f);
        }
        StmtKind::Raise { exc: Some(e) } => visit_expr(e, f),
        StmtKind::Expr(e) => visit_expr(e, f),
        _ => {}
    }
}

fn visit_expr<'a>(expr: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(expr);
    match &expr.kind {
        ExprKind::Attribute { value, .. } => visit_expr(value, f),
        ExprKind::Subscript { value, index } => {
            visit_expr(value, f);
            visit_expr(index, f);
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            visit_expr(func, f);
            for a in args {
                visit_expr(a, f);
            }
            for k in keywords {
                visit_expr(&k.value, f);
            }
        }
        ExprKind::Str(s) if s.is_fstring => {
            for part in &s.parts {
                if let FStringPart::Expr(e) = part {
                    visit_expr(e, f);
                }
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                visit_expr(e, f);
            }
        }
        ExprKind::Dict { keys, values } => {
            for k in keys.iter().flatten() {
                visit_expr(k, f);
            }
            for v in values {
                visit_expr(v, f);
            }
        }
        ExprKind::BinOp { left, right, .. } => {
            visit_expr(left, f);
            visit_expr(right, f);
        }
        ExprKind::UnaryOp { operand, .. } => visit_expr(operand, f),
        ExprKind::BoolOp { values, .. } => {
            for v in values {
                visit_expr(v, f);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            visit_expr(left, f);
            for c in comparators {
                visit_expr(c, f);
            }
        }
        ExprKind::IfExp { body, test, orelse } => {
            visit_expr(body, f);
            visit_expr(test, f);
            visit_expr(orelse, f);
        }
        ExprKind::Slice { lower, upper, step } => {
            for part in [lower, upper, step].into_iter().flatten() {
                visit_expr(part, f);
            }
        }
        ExprKind::Starred(inner) => visit_expr(inner, f),
        ExprKind::Yield(Some(inner)) => visit_expr(inner, f),
        _ => {}
    }
}
