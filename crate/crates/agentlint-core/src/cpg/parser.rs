//! Recursive-descent parser producing [`AstUnit`] trees.
//!
//! Statement-level recovery: when a statement cannot be parsed, the
//! issue is recorded with its line, tokens are skipped to the end of the
//! logical line (plus any indented suite that follows), and an opaque
//! statement holding the original span is emitted.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::ingest::SourceFile;

pub fn parse_source(file: &SourceFile) -> AstUnit {
    let (tokens, mut issues) = tokenize(file);
    let mut parser = Parser {
        tokens,
        pos: 0,
        issues: Vec::new(),
    };
    let body = parser.parse_block_until_eof();
    issues.extend(parser.issues);
    issues.sort_by_key(|i| i.line);
    AstUnit {
        path: file.path.clone(),
        body,
        issues,
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    issues: Vec<SyntaxIssue>,
}

#[derive(Debug)]
struct ParseAbort {
    line: u32,
    message: String,
}

type PResult<T> = Result<T, ParseAbort>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn peek2_kind(&self) -> &TokenKind {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek_kind(), TokenKind::Op(o) if *o == op)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.at_op(op) {
            Ok(self.advance())
        } else {
            Err(self.abort(format!("expected {:?}", op)))
        }
    }

    fn at_name(&self, kw: &str) -> bool {
        matches!(self.peek_kind(), TokenKind::Name(n) if n == kw)
    }

    fn eat_name(&mut self, kw: &str) -> bool {
        if self.at_name(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match self.peek_kind().clone() {
            TokenKind::Name(n) if !is_keyword(&n) => {
                let tok = self.advance();
                Ok((n, tok.span))
            }
            _ => Err(self.abort("expected identifier")),
        }
    }

    fn abort(&self, message: impl Into<String>) -> ParseAbort {
        ParseAbort {
            line: self.peek().line,
            message: message.into(),
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek_kind() {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::Eof | TokenKind::Dedent => Ok(()),
            _ => Err(self.abort("expected end of line")),
        }
    }

    // ------------------------------------------------------------------
    // Blocks and statements
    // ------------------------------------------------------------------

    fn parse_block_until_eof(&mut self) -> Vec<Stmt> {
        let mut body = Vec::new();
        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent => {
                    // Stray structure at module level: indentation errors
                    // were already reported by the lexer.
                    self.advance();
                }
                _ => self.parse_statement_into(&mut body),
            }
        }
        body
    }

    fn parse_statement_into(&mut self, out: &mut Vec<Stmt>) {
        let start_pos = self.pos;
        match self.parse_statement() {
            Ok(mut stmts) => out.append(&mut stmts),
            Err(abort) => {
                self.issues.push(SyntaxIssue {
                    line: abort.line,
                    message: abort.message,
                });
                let span = self.recover(start_pos);
                out.push(Stmt {
                    kind: StmtKind::Opaque,
                    span,
                });
            }
        }
    }

    /// Skips to the end of the broken logical line, consuming a trailing
    /// indented suite if one follows.
    fn recover(&mut self, start_pos: usize) -> Span {
        if self.pos == start_pos {
            // Ensure progress even if the error was at the first token.
            if !matches!(self.peek_kind(), TokenKind::Eof) {
                self.advance();
            }
        }
        let start = self.tokens[start_pos].span.start;
        let mut end = start;
        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::Newline => {
                    self.advance();
                    if matches!(self.peek_kind(), TokenKind::Indent) {
                        self.skip_suite();
                    }
                    break;
                }
                TokenKind::Dedent => break,
                _ => {
                    end = self.peek().span.end;
                    self.advance();
                }
            }
        }
        Span::new(start, end.max(start))
    }

    fn skip_suite(&mut self) {
        // Consume INDENT ... matching DEDENT.
        debug_assert!(matches!(self.peek_kind(), TokenKind::Indent));
        self.advance();
        let mut depth = 1usize;
        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::Indent => {
                    depth += 1;
                    self.advance();
                }
                TokenKind::Dedent => {
                    depth -= 1;
                    self.advance();
                    if depth == 0 {
                        break;
                    }
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    /// Parses one logical line, which may hold several `;`-separated
    /// simple statements or one compound statement.
    fn parse_statement(&mut self) -> PResult<Vec<Stmt>> {
        // Decorators bind to the def/class that follows.
        if self.at_op("@") {
            return Ok(vec![self.parse_decorated()?]);
        }
        if let TokenKind::Name(word) = self.peek_kind().clone() {
            match word.as_str() {
                "def" => return Ok(vec![self.parse_funcdef(Vec::new(), false)?]),
                "async" => {
                    if matches!(self.peek2_kind(), TokenKind::Name(n) if n == "def") {
                        self.advance();
                        return Ok(vec![self.parse_funcdef(Vec::new(), true)?]);
                    }
                    // async for / async with: treat as their sync forms.
                    if matches!(self.peek2_kind(), TokenKind::Name(n) if n == "for" || n == "with")
                    {
                        self.advance();
                        return self.parse_statement();
                    }
                }
                "class" => return Ok(vec![self.parse_classdef(Vec::new())?]),
                "if" => return Ok(vec![self.parse_if()?]),
                "while" => return Ok(vec![self.parse_while()?]),
                "for" => return Ok(vec![self.parse_for()?]),
                "try" => return Ok(vec![self.parse_try()?]),
                "with" => return Ok(vec![self.parse_with()?]),
                _ => {}
            }
        }
        // Simple statement line.
        let mut stmts = vec![self.parse_simple_statement()?];
        while self.eat_op(";") {
            if matches!(self.peek_kind(), TokenKind::Newline | TokenKind::Eof) {
                break;
            }
            stmts.push(self.parse_simple_statement()?);
        }
        self.expect_newline()?;
        Ok(stmts)
    }

    fn parse_decorated(&mut self) -> PResult<Stmt> {
        let mut decorators = Vec::new();
        while self.at_op("@") {
            self.advance();
            let expr = self.parse_expr()?;
            self.expect_newline()?;
            decorators.push(expr);
        }
        if self.eat_name("async") {
            return self.parse_funcdef(decorators, true);
        }
        if self.at_name("def") {
            return self.parse_funcdef(decorators, false);
        }
        if self.at_name("class") {
            return self.parse_classdef(decorators);
        }
        Err(self.abort("expected def or class after decorator"))
    }

    fn parse_funcdef(&mut self, decorators: Vec<Expr>, is_async: bool) -> PResult<Stmt> {
        let def_tok = self.advance(); // `def`
        let def_start = def_tok.span.start;
        let (name, name_span) = self.expect_ident()?;
        self.expect_op("(")?;
        let params = self.parse_params()?;
        self.expect_op(")")?;
        let returns = if self.eat_op("->") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        let body = self.parse_suite()?;
        let end = body.last().map(|s| s.span.end).unwrap_or(name_span.end);
        Ok(Stmt {
            kind: StmtKind::FunctionDef(FunctionDef {
                name,
                name_span,
                params,
                decorators,
                returns,
                body,
                is_async,
            }),
            span: Span::new(def_start, end),
        })
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        while !self.at_op(")") {
            // *, *args, **kwargs, / markers
            if self.eat_op("*") {
                if let TokenKind::Name(_) = self.peek_kind() {
                    let (name, _) = self.expect_ident()?;
                    params.push(Param {
                        name,
                        annotation: None,
                        default: None,
                    });
                }
            } else if self.eat_op("**") {
                let (name, _) = self.expect_ident()?;
                params.push(Param {
                    name,
                    annotation: None,
                    default: None,
                });
            } else if self.eat_op("/") {
                // positional-only marker
            } else {
                let (name, _) = self.expect_ident()?;
                let annotation = if self.eat_op(":") {
                    Some(self.parse_expr()?)
                } else {
                    None
                };
                let default = if self.eat_op("=") {
                    Some(self.parse_expr()?)
                } else {
                    None
                };
                params.push(Param {
                    name,
                    annotation,
                    default,
                });
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(params)
    }

    fn parse_classdef(&mut self, decorators: Vec<Expr>) -> PResult<Stmt> {
        let class_tok = self.advance(); // `class`
        let (name, name_span) = self.expect_ident()?;
        let mut bases = Vec::new();
        let mut keywords = Vec::new();
        if self.eat_op("(") {
            while !self.at_op(")") {
                if let TokenKind::Name(n) = self.peek_kind().clone() {
                    if !is_keyword(&n) && matches!(self.peek2_kind(), TokenKind::Op("=")) {
                        self.advance();
                        self.advance();
                        let value = self.parse_expr()?;
                        keywords.push((n, value));
                        if !self.eat_op(",") {
                            break;
                        }
                        continue;
                    }
                }
                bases.push(self.parse_expr()?);
                if !self.eat_op(",") {
                    break;
                }
            }
            self.expect_op(")")?;
        }
        let body = self.parse_suite()?;
        let end = body.last().map(|s| s.span.end).unwrap_or(name_span.end);
        Ok(Stmt {
            kind: StmtKind::ClassDef(ClassDef {
                name,
                name_span,
                bases,
                keywords,
                decorators,
                body,
            }),
            span: Span::new(class_tok.span.start, end),
        })
    }

    fn parse_suite(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_op(":")?;
        if matches!(self.peek_kind(), TokenKind::Newline) {
            self.advance();
            if !matches!(self.peek_kind(), TokenKind::Indent) {
                return Err(self.abort("expected an indented block"));
            }
            self.advance();
            let mut body = Vec::new();
            loop {
                match self.peek_kind() {
                    TokenKind::Dedent => {
                        self.advance();
                        break;
                    }
                    TokenKind::Eof => break,
                    TokenKind::Newline | TokenKind::Indent => {
                        self.advance();
                    }
                    _ => self.parse_statement_into(&mut body),
                }
            }
            Ok(body)
        } else {
            // Single-line suite: `if x: return 1`
            let mut body = vec![self.parse_simple_statement()?];
            while self.eat_op(";") {
                if matches!(self.peek_kind(), TokenKind::Newline | TokenKind::Eof) {
                    break;
                }
                body.push(self.parse_simple_statement()?);
            }
            self.expect_newline()?;
            Ok(body)
        }
    }

    fn parse_if(&mut self) -> PResult<Stmt> {
        let if_tok = self.advance();
        let test = self.parse_expr()?;
        let body = self.parse_suite()?;
        let mut orelse = Vec::new();
        if self.at_name("elif") {
            let nested = self.parse_if_from_elif()?;
            orelse.push(nested);
        } else if self.eat_name("else") {
            orelse = self.parse_suite()?;
        }
        let end = orelse
            .last()
            .map(|s| s.span.end)
            .or_else(|| body.last().map(|s| s.span.end))
            .unwrap_or(if_tok.span.end);
        Ok(Stmt {
            kind: StmtKind::If { test, body, orelse },
            span: Span::new(if_tok.span.start, end),
        })
    }

    fn parse_if_from_elif(&mut self) -> PResult<Stmt> {
        let tok = self.advance(); // `elif`
        let test = self.parse_expr()?;
        let body = self.parse_suite()?;
        let mut orelse = Vec::new();
        if self.at_name("elif") {
            orelse.push(self.parse_if_from_elif()?);
        } else if self.eat_name("else") {
            orelse = self.parse_suite()?;
        }
        let end = orelse
            .last()
            .map(|s| s.span.end)
            .or_else(|| body.last().map(|s| s.span.end))
            .unwrap_or(tok.span.end);
        Ok(Stmt {
            kind: StmtKind::If { test, body, orelse },
            span: Span::new(tok.span.start, end),
        })
    }

    fn parse_while(&mut self) -> PResult<Stmt> {
        let tok = self.advance();
        let test = self.parse_expr()?;
        let body = self.parse_suite()?;
        let orelse = if self.eat_name("else") {
            self.parse_suite()?
        } else {
            Vec::new()
        };
        let end = orelse
            .last()
            .or(body.last())
            .map(|s| s.span.end)
            .unwrap_or(tok.span.end);
        Ok(Stmt {
            kind: StmtKind::While { test, body, orelse },
            span: Span::new(tok.span.start, end),
        })
    }

    fn parse_for(&mut self) -> PResult<Stmt> {
        let tok = self.advance();
        let target = self.parse_target_list()?;
        if !self.eat_name("in") {
            return Err(self.abort("expected `in` in for statement"));
        }
        let iter = self.parse_expr_list()?;
        let body = self.parse_suite()?;
        let orelse = if self.eat_name("else") {
            self.parse_suite()?
        } else {
            Vec::new()
        };
        let end = orelse
            .last()
            .or(body.last())
            .map(|s| s.span.end)
            .unwrap_or(tok.span.end);
        Ok(Stmt {
            kind: StmtKind::For {
                target,
                iter,
                body,
                orelse,
            },
            span: Span::new(tok.span.start, end),
        })
    }

    fn parse_try(&mut self) -> PResult<Stmt> {
        let tok = self.advance();
        let body = self.parse_suite()?;
        let mut handlers = Vec::new();
        while self.at_name("except") {
            let h_tok = self.advance();
            let mut typ = None;
            let mut name = None;
            if !self.at_op(":") {
                typ = Some(self.parse_expr()?);
                if self.eat_name("as") {
                    name = Some(self.expect_ident()?.0);
                }
            }
            let h_body = self.parse_suite()?;
            let h_end = h_body.last().map(|s| s.span.end).unwrap_or(h_tok.span.end);
            handlers.push(ExceptHandler {
                typ,
                name,
                body: h_body,
                span: Span::new(h_tok.span.start, h_end),
            });
        }
        let orelse = if self.eat_name("else") {
            self.parse_suite()?
        } else {
            Vec::new()
        };
        let finalbody = if self.eat_name("finally") {
            self.parse_suite()?
        } else {
            Vec::new()
        };
        if handlers.is_empty() && finalbody.is_empty() {
            return Err(self.abort("try without except or finally"));
        }
        let end = finalbody
            .last()
            .map(|s| s.span.end)
            .or_else(|| orelse.last().map(|s| s.span.end))
            .or_else(|| handlers.last().map(|h| h.span.end))
            .or_else(|| body.last().map(|s| s.span.end))
            .unwrap_or(tok.span.end);
        Ok(Stmt {
            kind: StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            },
            span: Span::new(tok.span.start, end),
        })
    }

    fn parse_with(&mut self) -> PResult<Stmt> {
        let tok = self.advance();
        let mut items = Vec::new();
        loop {
            let expr = self.parse_expr()?;
            let item = if self.eat_name("as") {
                // keep only the context expression; the alias is a write
                let _alias = self.parse_expr()?;
                expr
            } else {
                expr
            };
            items.push(item);
            if !self.eat_op(",") {
                break;
            }
        }
        let body = self.parse_suite()?;
        let end = body.last().map(|s| s.span.end).unwrap_or(tok.span.end);
        Ok(Stmt {
            kind: StmtKind::With { items, body },
            span: Span::new(tok.span.start, end),
        })
    }

    fn parse_simple_statement(&mut self) -> PResult<Stmt> {
        let start = self.peek().span.start;
        if let TokenKind::Name(word) = self.peek_kind().clone() {
            match word.as_str() {
                "return" => {
                    let tok = self.advance();
                    let value = if matches!(
                        self.peek_kind(),
                        TokenKind::Newline | TokenKind::Eof | TokenKind::Dedent
                    ) || self.at_op(";")
                    {
                        None
                    } else {
                        Some(self.parse_expr_list()?)
                    };
                    let end = value.as_ref().map(|v| v.span.end).unwrap_or(tok.span.end);
                    return Ok(Stmt {
                        kind: StmtKind::Return { value },
                        span: Span::new(start, end),
                    });
                }
                "assert" => {
                    self.advance();
                    let test = self.parse_expr()?;
                    let msg = if self.eat_op(",") {
                        Some(self.parse_expr()?)
                    } else {
                        None
                    };
                    let end = msg.as_ref().map(|m| m.span.end).unwrap_or(test.span.end);
                    return Ok(Stmt {
                        kind: StmtKind::Assert { test, msg },
                        span: Span::new(start, end),
                    });
                }
                "pass" => {
                    let tok = self.advance();
                    return Ok(Stmt {
                        kind: StmtKind::Pass,
                        span: tok.span,
                    });
                }
                "break" => {
                    let tok = self.advance();
                    return Ok(Stmt {
                        kind: StmtKind::Break,
                        span: tok.span,
                    });
                }
                "continue" => {
                    let tok = self.advance();
                    return Ok(Stmt {
                        kind: StmtKind::Continue,
                        span: tok.span,
                    });
                }
                "raise" => {
                    let tok = self.advance();
                    let exc = if matches!(
                        self.peek_kind(),
                        TokenKind::Newline | TokenKind::Eof | TokenKind::Dedent
                    ) || self.at_op(";")
                    {
                        None
                    } else {
                        let e = self.parse_expr()?;
                        if self.eat_name("from") {
                            self.parse_expr()?;
                        }
                        Some(e)
                    };
                    let end = exc.as_ref().map(|e| e.span.end).unwrap_or(tok.span.end);
                    return Ok(Stmt {
                        kind: StmtKind::Raise { exc },
                        span: Span::new(start, end),
                    });
                }
                "import" => return self.parse_import(start),
                "from" => return self.parse_import_from(start),
                "global" | "nonlocal" | "del" => {
                    // Modeled as opaque: consume the rest of the line.
                    let mut end = start;
                    while !matches!(
                        self.peek_kind(),
                        TokenKind::Newline | TokenKind::Eof | TokenKind::Dedent
                    ) && !self.at_op(";")
                    {
                        end = self.peek().span.end;
                        self.advance();
                    }
                    return Ok(Stmt {
                        kind: StmtKind::Opaque,
                        span: Span::new(start, end),
                    });
                }
                _ => {}
            }
        }
        self.parse_expr_or_assign(start)
    }

    fn parse_import(&mut self, start: usize) -> PResult<Stmt> {
        self.advance(); // `import`
        let mut aliases = Vec::new();
        let mut end;
        loop {
            let (name, span) = self.parse_dotted_name()?;
            end = span.end;
            let asname = if self.eat_name("as") {
                let (alias, alias_span) = self.expect_ident()?;
                end = alias_span.end;
                Some(alias)
            } else {
                None
            };
            aliases.push(ImportAlias { name, asname });
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(Stmt {
            kind: StmtKind::Import(aliases),
            span: Span::new(start, end),
        })
    }

    fn parse_import_from(&mut self, start: usize) -> PResult<Stmt> {
        self.advance(); // `from`
        let mut level = 0usize;
        loop {
            if self.eat_op("...") {
                level += 3;
            } else if self.eat_op(".") {
                level += 1;
            } else {
                break;
            }
        }
        let module = if self.at_name("import") {
            String::new()
        } else {
            self.parse_dotted_name()?.0
        };
        if !self.eat_name("import") {
            return Err(self.abort("expected `import` in from-import"));
        }
        let mut names = Vec::new();
        let mut end = start;
        if self.eat_op("*") {
            names.push(ImportAlias {
                name: "*".to_string(),
                asname: None,
            });
            end = self.tokens[self.pos - 1].span.end;
        } else {
            let parenthesized = self.eat_op("(");
            loop {
                if parenthesized && self.at_op(")") {
                    break;
                }
                let (name, span) = self.expect_ident()?;
                end = span.end;
                let asname = if self.eat_name("as") {
                    let (alias, alias_span) = self.expect_ident()?;
                    end = alias_span.end;
                    Some(alias)
                } else {
                    None
                };
                names.push(ImportAlias { name, asname });
                if !self.eat_op(",") {
                    break;
                }
            }
            if parenthesized {
                self.expect_op(")")?;
            }
        }
        Ok(Stmt {
            kind: StmtKind::ImportFrom {
                level,
                module,
                names,
            },
            span: Span::new(start, end),
        })
    }

    fn parse_dotted_name(&mut self) -> PResult<(String, Span)> {
        let (first, first_span) = self.expect_ident()?;
        let mut name = first;
        let mut span = first_span;
        while self.at_op(".") && matches!(self.peek2_kind(), TokenKind::Name(_)) {
            self.advance();
            let (part, part_span) = self.expect_ident()?;
            name.push('.');
            name.push_str(&part);
            span = span.join(part_span);
        }
        Ok((name, span))
    }

    fn parse_expr_or_assign(&mut self, start: usize) -> PResult<Stmt> {
        let first = self.parse_expr_list()?;
        // Annotated assignment: `x: T` or `x: T = v`
        if self.at_op(":")
            && matches!(
                first.kind,
                ExprKind::Name(_) | ExprKind::Attribute { .. } | ExprKind::Subscript { .. }
            )
        {
            self.advance();
            let annotation = self.parse_expr()?;
            let value = if self.eat_op("=") {
                Some(self.parse_expr_list()?)
            } else {
                None
            };
            let end = value
                .as_ref()
                .map(|v| v.span.end)
                .unwrap_or(annotation.span.end);
            return Ok(Stmt {
                kind: StmtKind::AnnAssign {
                    target: first,
                    annotation,
                    value,
                },
                span: Span::new(start, end),
            });
        }
        // Augmented assignment.
        if let TokenKind::Op(op) = self.peek_kind() {
            let aug = *op;
            if matches!(
                aug,
                "+=" | "-="
                    | "*="
                    | "/="
                    | "//="
                    | "%="
                    | "**="
                    | "&="
                    | "|="
                    | "^="
                    | ">>="
                    | "<<="
                    | "@="
            ) {
                self.advance();
                let value = self.parse_expr_list()?;
                let end = value.span.end;
                return Ok(Stmt {
                    kind: StmtKind::AugAssign {
                        target: first,
                        op: aug.trim_end_matches('=').to_string(),
                        value,
                    },
                    span: Span::new(start, end),
                });
            }
        }
        // Chained plain assignment: a = b = expr
        if self.at_op("=") {
            let mut targets = vec![first];
            let mut value = None;
            while self.eat_op("=") {
                let next = self.parse_expr_list()?;
                if self.at_op("=") {
                    targets.push(next);
                } else {
                    value = Some(next);
                    break;
                }
            }
            let value = value.ok_or_else(|| self.abort("expected assignment value"))?;
            let end = value.span.end;
            return Ok(Stmt {
                kind: StmtKind::Assign { targets, value },
                span: Span::new(start, end),
            });
        }
        let end = first.span.end;
        Ok(Stmt {
            kind: StmtKind::Expr(first),
            span: Span::new(start, end),
        })
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    /// Comma-joined expression list: `a, b` parses to a tuple.
    fn parse_expr_list(&mut self) -> PResult<Expr> {
        let first = self.parse_expr()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.ends_expr() {
                break;
            }
            elts.push(self.parse_expr()?);
        }
        let span = elts.first().unwrap().span.join(elts.last().unwrap().span);
        Ok(Expr {
            kind: ExprKind::Tuple(elts),
            span,
        })
    }

    fn parse_target_list(&mut self) -> PResult<Expr> {
        self.parse_expr_list()
    }

    fn ends_expr(&self) -> bool {
        matches!(
            self.peek_kind(),
            TokenKind::Newline | TokenKind::Eof | TokenKind::Dedent
        ) || self.at_op("=")
            || self.at_op(")")
            || self.at_op("]")
            || self.at_op("}")
            || self.at_op(":")
            || self.at_op(";")
            || self.at_name("in")
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        if self.at_name("lambda") {
            return self.parse_lambda();
        }
        if self.at_name("yield") {
            let tok = self.advance();
            if self.eat_name("from") {
                let inner = self.parse_expr()?;
                let span = Span::new(tok.span.start, inner.span.end);
                return Ok(Expr {
                    kind: ExprKind::Yield(Some(Box::new(inner))),
                    span,
                });
            }
            if self.ends_expr() || self.at_op(",") {
                return Ok(Expr {
                    kind: ExprKind::Yield(None),
                    span: tok.span,
                });
            }
            let inner = self.parse_expr()?;
            let span = Span::new(tok.span.start, inner.span.end);
            return Ok(Expr {
                kind: ExprKind::Yield(Some(Box::new(inner))),
                span,
            });
        }
        let body = self.parse_or_test()?;
        // Walrus: the binding target is a write; the expression's value
        // is what flows onward.
        if self.at_op(":=") {
            self.advance();
            let value = self.parse_expr()?;
            let span = Span::new(body.span.start, value.span.end);
            return Ok(Expr {
                kind: value.kind,
                span,
            });
        }
        if self.at_name("if") {
            // Conditional expression.
            self.advance();
            let test = self.parse_or_test()?;
            if !self.eat_name("else") {
                return Err(self.abort("expected `else` in conditional expression"));
            }
            let orelse = self.parse_expr()?;
            let span = Span::new(body.span.start, orelse.span.end);
            return Ok(Expr {
                kind: ExprKind::IfExp {
                    body: Box::new(body),
                    test: Box::new(test),
                    orelse: Box::new(orelse),
                },
                span,
            });
        }
        Ok(body)
    }

    fn parse_lambda(&mut self) -> PResult<Expr> {
        let tok = self.advance(); // `lambda`
                                  // Parameters up to the colon, then the body expression; the whole
                                  // thing is opaque to the analysis.
        while !self.at_op(":") {
            if matches!(self.peek_kind(), TokenKind::Newline | TokenKind::Eof) {
                return Err(self.abort("unterminated lambda"));
            }
            self.advance();
        }
        self.advance(); // `:`
        let body = self.parse_expr()?;
        let span = Span::new(tok.span.start, body.span.end);
        Ok(Expr::opaque(span))
    }

    fn parse_or_test(&mut self) -> PResult<Expr> {
        let first = self.parse_and_test()?;
        if !self.at_name("or") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_name("or") {
            values.push(self.parse_and_test()?);
        }
        let span = values[0].span.join(values.last().unwrap().span);
        Ok(Expr {
            kind: ExprKind::BoolOp {
                op: "or".to_string(),
                values,
            },
            span,
        })
    }

    fn parse_and_test(&mut self) -> PResult<Expr> {
        let first = self.parse_not_test()?;
        if !self.at_name("and") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_name("and") {
            values.push(self.parse_not_test()?);
        }
        let span = values[0].span.join(values.last().unwrap().span);
        Ok(Expr {
            kind: ExprKind::BoolOp {
                op: "and".to_string(),
                values,
            },
            span,
        })
    }

    fn parse_not_test(&mut self) -> PResult<Expr> {
        if self.at_name("not") {
            let tok = self.advance();
            let operand = self.parse_not_test()?;
            let span = Span::new(tok.span.start, operand.span.end);
            return Ok(Expr {
                kind: ExprKind::UnaryOp {
                    op: "not".to_string(),
                    operand: Box::new(operand),
                },
                span,
            });
        }
        self.parse_comparison()
    }

    fn parse_comparison(&mut self) -> PResult<Expr> {
        let left = self.parse_arith()?;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        loop {
            let op = if self.at_op("<") {
                "<"
            } else if self.at_op(">") {
                ">"
            } else if self.at_op("<=") {
                "<="
            } else if self.at_op(">=") {
                ">="
            } else if self.at_op("==") {
                "=="
            } else if self.at_op("!=") {
                "!="
            } else if self.at_name("in") {
                "in"
            } else if self.at_name("not")
                && matches!(self.peek2_kind(), TokenKind::Name(n) if n == "in")
            {
                self.advance();
                "not in"
            } else if self.at_name("is") {
                if matches!(self.peek2_kind(), TokenKind::Name(n) if n == "not") {
                    self.advance();
                    "is not"
                } else {
                    "is"
                }
            } else {
                break;
            };
            self.advance();
            ops.push(op.to_string());
            comparators.push(self.parse_arith()?);
        }
        if ops.is_empty() {
            return Ok(left);
        }
        let span = left.span.join(comparators.last().unwrap().span);
        Ok(Expr {
            kind: ExprKind::Compare {
                left: Box::new(left),
                ops,
                comparators,
            },
            span,
        })
    }

    fn parse_arith(&mut self) -> PResult<Expr> {
        let mut left = self.parse_term()?;
        loop {
            let op = if self.at_op("+") {
                "+"
            } else if self.at_op("-") {
                "-"
            } else if self.at_op("|") {
                "|"
            } else if self.at_op("^") {
                "^"
            } else if self.at_op("&") {
                "&"
            } else if self.at_op("<<") {
                "<<"
            } else if self.at_op(">>") {
                ">>"
            } else {
                break;
            };
            self.advance();
            let right = self.parse_term()?;
            let span = left.span.join(right.span);
            left = Expr {
                kind: ExprKind::BinOp {
                    left: Box::new(left),
                    op: op.to_string(),
                    right: Box::new(right),
                },
                span,
            };
        }
        Ok(left)
    }

    fn parse_term(&mut self) -> PResult<Expr> {
        let mut left = self.parse_factor()?;
        loop {
            let op = if self.at_op("*") {
                "*"
            } else if self.at_op("/") {
                "/"
            } else if self.at_op("//") {
                "//"
            } else if self.at_op("%") {
                "%"
            } else if self.at_op("@") {
                "@"
            } else {
                break;
            };
            self.advance();
            let right = self.parse_factor()?;
            let span = left.span.join(right.span);
            left = Expr {
                kind: ExprKind::BinOp {
                    left: Box::new(left),
                    op: op.to_string(),
                    right: Box::new(right),
                },
                span,
            };
        }
        Ok(left)
    }

    fn parse_factor(&mut self) -> PResult<Expr> {
        if self.at_op("-") || self.at_op("+") || self.at_op("~") {
            let tok = self.advance();
            let op = match tok.kind {
                TokenKind::Op(o) => o.to_string(),
                _ => unreachable!(),
            };
            let operand = self.parse_factor()?;
            let span = Span::new(tok.span.start, operand.span.end);
            return Ok(Expr {
                kind: ExprKind::UnaryOp {
                    op,
                    operand: Box::new(operand),
                },
                span,
            });
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> PResult<Expr> {
        let base = self.parse_postfix()?;
        if self.eat_op("**") {
            let exp = self.parse_factor()?;
            let span = base.span.join(exp.span);
            return Ok(Expr {
                kind: ExprKind::BinOp {
                    left: Box::new(base),
                    op: "**".to_string(),
                    right: Box::new(exp),
                },
                span,
            });
        }
        Ok(base)
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_atom()?;
        loop {
            if self.at_op("(") {
                self.advance();
                let (args, keywords) = self.parse_call_args()?;
                let close = self.expect_op(")")?;
                let span = Span::new(expr.span.start, close.span.end);
                expr = Expr {
                    kind: ExprKind::Call {
                        func: Box::new(expr),
                        args,
                        keywords,
                    },
                    span,
                };
            } else if self.at_op(".") && matches!(self.peek2_kind(), TokenKind::Name(_)) {
                self.advance();
                let (attr, attr_span) = self.expect_ident()?;
                let span = Span::new(expr.span.start, attr_span.end);
                expr = Expr {
                    kind: ExprKind::Attribute {
                        value: Box::new(expr),
                        attr,
                    },
                    span,
                };
            } else if self.at_op("[") {
                self.advance();
                let index = self.parse_subscript_index()?;
                let close = self.expect_op("]")?;
                let span = Span::new(expr.span.start, close.span.end);
                expr = Expr {
                    kind: ExprKind::Subscript {
                        value: Box::new(expr),
                        index: Box::new(index),
                    },
                    span,
                };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn parse_subscript_index(&mut self) -> PResult<Expr> {
        let start = self.peek().span.start;
        let lower = if self.at_op(":") {
            None
        } else {
            Some(Box::new(self.parse_expr()?))
        };
        if !self.at_op(":") {
            let mut first = *lower.unwrap();
            if self.at_op(",") {
                let mut elts = vec![first];
                while self.eat_op(",") {
                    if self.at_op("]") {
                        break;
                    }
                    elts.push(self.parse_expr()?);
                }
                let span = Span::new(start, elts.last().unwrap().span.end);
                first = Expr {
                    kind: ExprKind::Tuple(elts),
                    span,
                };
            }
            return Ok(first);
        }
        self.advance(); // `:`
        let upper = if self.at_op("]") || self.at_op(":") {
            None
        } else {
            Some(Box::new(self.parse_expr()?))
        };
        let step = if self.eat_op(":") {
            if self.at_op("]") {
                None
            } else {
                Some(Box::new(self.parse_expr()?))
            }
        } else {
            None
        };
        let end = self.peek().span.start;
        Ok(Expr {
            kind: ExprKind::Slice { lower, upper, step },
            span: Span::new(start, end),
        })
    }

    fn parse_call_args(&mut self) -> PResult<(Vec<Expr>, Vec<Keyword>)> {
        let mut args = Vec::new();
        let mut keywords = Vec::new();
        while !self.at_op(")") {
            if self.eat_op("**") {
                let value = self.parse_expr()?;
                keywords.push(Keyword { name: None, value });
            } else if self.eat_op("*") {
                let value = self.parse_expr()?;
                let span = value.span;
                args.push(Expr {
                    kind: ExprKind::Starred(Box::new(value)),
                    span,
                });
            } else if let TokenKind::Name(n) = self.peek_kind().clone() {
                if !is_keyword(&n) && matches!(self.peek2_kind(), TokenKind::Op("=")) {
                    self.advance();
                    self.advance();
                    let value = self.parse_expr()?;
                    keywords.push(Keyword {
                        name: Some(n),
                        value,
                    });
                } else {
                    let expr = self.parse_expr()?;
                    if self.at_name("for") {
                        // Generator argument: consume to the closing paren.
                        let span = self.skip_comprehension(expr.span)?;
                        args.push(Expr::opaque(span));
                        break;
                    }
                    args.push(expr);
                }
            } else {
                let expr = self.parse_expr()?;
                if self.at_name("for") {
                    let span = self.skip_comprehension(expr.span)?;
                    args.push(Expr::opaque(span));
                    break;
                }
                args.push(expr);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok((args, keywords))
    }

    /// Consumes comprehension clauses up to (not including) the closing
    /// bracket at the current nesting level.
    fn skip_comprehension(&mut self, start_span: Span) -> PResult<Span> {
        let mut depth = 0usize;
        let mut end = start_span.end;
        loop {
            match self.peek_kind() {
                TokenKind::Eof => return Err(self.abort("unterminated comprehension")),
                TokenKind::Op("(") | TokenKind::Op("[") | TokenKind::Op("{") => {
                    depth += 1;
                    end = self.peek().span.end;
                    self.advance();
                }
                TokenKind::Op(")") | TokenKind::Op("]") | TokenKind::Op("}") => {
                    if depth == 0 {
                        return Ok(Span::new(start_span.start, end));
                    }
                    depth -= 1;
                    end = self.peek().span.end;
                    self.advance();
                }
                _ => {
                    end = self.peek().span.end;
                    self.advance();
                }
            }
        }
    }

    fn parse_atom(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Name(n) => {
                let name = n.clone();
                match name.as_str() {
                    "True" => {
                        self.advance();
                        Ok(Expr {
                            kind: ExprKind::Bool(true),
                            span: tok.span,
                        })
                    }
                    "False" => {
                        self.advance();
                        Ok(Expr {
                            kind: ExprKind::Bool(false),
                            span: tok.span,
                        })
                    }
                    "None" => {
                        self.advance();
                        Ok(Expr {
                            kind: ExprKind::NoneLit,
                            span: tok.span,
                        })
                    }
                    "await" => {
                        self.advance();
                        self.parse_expr()
                    }
                    _ if is_keyword(&name) => {
                        Err(self.abort(format!("unexpected keyword {:?} in expression", name)))
                    }
                    _ => {
                        self.advance();
                        Ok(Expr {
                            kind: ExprKind::Name(name),
                            span: tok.span,
                        })
                    }
                }
            }
            TokenKind::Number(repr) => {
                let repr = repr.clone();
                self.advance();
                let is_int = !repr.contains('.')
                    && !repr.contains('j')
                    && !repr.contains('J')
                    && !(repr.contains(['e', 'E'])
                        && !repr.starts_with("0x")
                        && !repr.starts_with("0X"));
                Ok(Expr {
                    kind: ExprKind::Num { repr, is_int },
                    span: tok.span,
                })
            }
            TokenKind::Str { .. } => self.parse_string_atom(),
            TokenKind::Op("...") => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Ellipsis,
                    span: tok.span,
                })
            }
            TokenKind::Op("(") => {
                self.advance();
                if self.at_op(")") {
                    let close = self.advance();
                    return Ok(Expr {
                        kind: ExprKind::Tuple(Vec::new()),
                        span: Span::new(tok.span.start, close.span.end),
                    });
                }
                let inner = self.parse_expr()?;
                if self.at_name("for") {
                    let span = self.skip_comprehension(inner.span)?;
                    let close = self.expect_op(")")?;
                    return Ok(Expr::opaque(
                        Span::new(tok.span.start, close.span.end).join(span),
                    ));
                }
                if self.at_op(",") {
                    let mut elts = vec![inner];
                    while self.eat_op(",") {
                        if self.at_op(")") {
                            break;
                        }
                        elts.push(self.parse_expr()?);
                    }
                    let close = self.expect_op(")")?;
                    return Ok(Expr {
                        kind: ExprKind::Tuple(elts),
                        span: Span::new(tok.span.start, close.span.end),
                    });
                }
                let close = self.expect_op(")")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: Span::new(tok.span.start, close.span.end),
                })
            }
            TokenKind::Op("[") => {
                self.advance();
                let mut elts = Vec::new();
                while !self.at_op("]") {
                    let elt = self.parse_expr()?;
                    if self.at_name("for") {
                        let span = self.skip_comprehension(elt.span)?;
                        let close = self.expect_op("]")?;
                        return Ok(Expr::opaque(
                            Span::new(tok.span.start, close.span.end).join(span),
                        ));
                    }
                    elts.push(elt);
                    if !self.eat_op(",") {
                        break;
                    }
                }
                let close = self.expect_op("]")?;
                Ok(Expr {
                    kind: ExprKind::List(elts),
                    span: Span::new(tok.span.start, close.span.end),
                })
            }
            TokenKind::Op("{") => {
                self.advance();
                let mut keys: Vec<Option<Expr>> = Vec::new();
                let mut values = Vec::new();
                let mut set_elts = Vec::new();
                let mut is_set = false;
                while !self.at_op("}") {
                    if self.eat_op("**") {
                        let v = self.parse_expr()?;
                        keys.push(None);
                        values.push(v);
                    } else {
                        let first = self.parse_expr()?;
                        if self.eat_op(":") {
                            let v = self.parse_expr()?;
                            if self.at_name("for") {
                                let span = self.skip_comprehension(v.span)?;
                                let close = self.expect_op("}")?;
                                return Ok(Expr::opaque(
                                    Span::new(tok.span.start, close.span.end).join(span),
                                ));
                            }
                            keys.push(Some(first));
                            values.push(v);
                        } else {
                            if self.at_name("for") {
                                let span = self.skip_comprehension(first.span)?;
                                let close = self.expect_op("}")?;
                                return Ok(Expr::opaque(
                                    Span::new(tok.span.start, close.span.end).join(span),
                                ));
                            }
                            is_set = true;
                            set_elts.push(first);
                        }
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                let close = self.expect_op("}")?;
                let span = Span::new(tok.span.start, close.span.end);
                if is_set {
                    Ok(Expr {
                        kind: ExprKind::Set(set_elts),
                        span,
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Dict { keys, values },
                        span,
                    })
                }
            }
            TokenKind::Op("*") => {
                self.advance();
                let inner = self.parse_expr()?;
                let span = Span::new(tok.span.start, inner.span.end);
                Ok(Expr {
                    kind: ExprKind::Starred(Box::new(inner)),
                    span,
                })
            }
            _ => Err(self.abort(format!("unexpected token {:?}", tok.kind))),
        }
    }

    /// One or more adjacent string literals, concatenated. F-strings are
    /// decomposed into literal and expression parts.
    fn parse_string_atom(&mut self) -> PResult<Expr> {
        let mut span = self.peek().span;
        let mut combined_value = String::new();
        let mut parts: Vec<FStringPart> = Vec::new();
        let mut any_fstring = false;
        while let TokenKind::Str {
            value, is_fstring, ..
        } = self.peek_kind().clone()
        {
            let tok = self.advance();
            span = span.join(tok.span);
            if is_fstring {
                any_fstring = true;
                let (literal_text, fparts) = split_fstring(&value, tok.span);
                combined_value.push_str(&literal_text);
                parts.extend(fparts);
            } else {
                combined_value.push_str(&value);
                parts.push(FStringPart::Literal(value));
            }
        }
        if any_fstring {
            Ok(Expr {
                kind: ExprKind::Str(StrLit {
                    value: combined_value,
                    is_fstring: true,
                    parts,
                }),
                span,
            })
        } else {
            Ok(Expr {
                kind: ExprKind::Str(StrLit::plain(combined_value)),
                span,
            })
        }
    }
}

/// Splits f-string content into literal runs and parsed interpolations.
/// `{{` and `}}` unescape to braces; format specs after `:` and the `!r`
/// conversions are dropped from the interpolated expression.
fn split_fstring(content: &str, span: Span) -> (String, Vec<FStringPart>) {
    let chars: Vec<char> = content.chars().collect();
    let mut parts = Vec::new();
    let mut literal = String::new();
    let mut all_literal = String::new();
    let mut i = 0usize;
    while i < chars.len() {
        match chars[i] {
            '{' if chars.get(i + 1) == Some(&'{') => {
                literal.push('{');
                i += 2;
            }
            '}' if chars.get(i + 1) == Some(&'}') => {
                literal.push('}');
                i += 2;
            }
            '{' => {
                if !literal.is_empty() {
                    all_literal.push_str(&literal);
                    parts.push(FStringPart::Literal(std::mem::take(&mut literal)));
                }
                let mut depth = 1usize;
                let mut inner = String::new();
                i += 1;
                while i < chars.len() && depth > 0 {
                    match chars[i] {
                        '{' => depth += 1,
                        '}' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    inner.push(chars[i]);
                    i += 1;
                }
                i += 1; // closing brace
                        // Strip conversions and format specs.
                let base = inner.split_once('!').map(|(e, _)| e).unwrap_or(&inner);
                let expr_text = base.split_once(':').map(|(e, _)| e).unwrap_or(base);
                let parsed = parse_embedded_expr(expr_text, span);
                parts.push(FStringPart::Expr(parsed));
            }
            c => {
                literal.push(c);
                i += 1;
            }
        }
    }
    if !literal.is_empty() {
        all_literal.push_str(&literal);
        parts.push(FStringPart::Literal(literal));
    }
    (all_literal, parts)
}

/// Parses the expression inside an f-string interpolation; falls back to
/// an opaque expression on failure.
fn parse_embedded_expr(text: &str, span: Span) -> Expr {
    let file = SourceFile::new("<fstring>", text.to_string());
    let unit = parse_source(&file);
    if unit.issues.is_empty() && unit.body.len() == 1 {
        if let StmtKind::Expr(mut e) = unit.body.into_iter().next().unwrap().kind {
            // Spans inside the synthetic file are meaningless; collapse to
            // the enclosing string's span.
            fix_spans(&mut e, span);
            return e;
        }
    }
    Expr::opaque(span)
}

fn fix_spans(expr: &mut Expr, span: Span) {
    expr.span = span;
    match &mut expr.kind {
        ExprKind::Attribute { value, .. } => fix_spans(value, span),
        ExprKind::Subscript { value, index } => {
            fix_spans(value, span);
            fix_spans(index, span);
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            fix_spans(func, span);
            for a in args {
                fix_spans(a, span);
            }
            for k in keywords {
                fix_spans(&mut k.value, span);
            }
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            for e in elts {
                fix_spans(e, span);
            }
        }
        ExprKind::BinOp { left, right, .. } => {
            fix_spans(left, span);
            fix_spans(right, span);
        }
        ExprKind::UnaryOp { operand, .. } => fix_spans(operand, span),
        ExprKind::BoolOp { values, .. } => {
            for v in values {
                fix_spans(v, span);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            fix_spans(left, span);
            for c in comparators {
                fix_spans(c, span);
            }
        }
        _ => {}
    }
}

fn is_keyword(word: &str) -> bool {
    matches!(
        word,
        "False"
            | "None"
            | "True"
            | "and"
            | "as"
            | "assert"
            | "async"
            | "await"
            | "break"
            | "class"
            | "continue"
            | "def"
            | "del"
            | "elif"
            | "else"
            | "except"
            | "finally"
            | "for"
            | "from"
            | "global"
            | "if"
            | "import"
            | "in"
            | "is"
            | "lambda"
            | "nonlocal"
            | "not"
            | "or"
            | "pass"
            | "raise"
            | "return"
            | "try"
            | "while"
            | "with"
            | "yield"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> AstUnit {
        parse_source(&SourceFile::new("t.py", text))
    }

    #[test]
    fn class_with_base_list() {
        let unit = parse("class GitHubAction(BaseTool):\n    pass\n");
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::ClassDef(def) => {
                assert_eq!(def.name, "GitHubAction");
                assert_eq!(def.bases.len(), 1);
                assert_eq!(def.bases[0].path_string(), "BaseTool");
            }
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn assignment_with_literal() {
        let unit = parse("x = 1\n");
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::Assign { targets, value } => {
                assert_eq!(targets[0].path_string(), "x");
                assert!(matches!(value.kind, ExprKind::Num { .. }));
            }
            other => panic!("expected assign, got {other:?}"),
        }
    }

    #[test]
    fn unmatched_paren_is_issue_at_line_one() {
        let unit = parse("(");
        assert!(!unit.issues.is_empty());
        assert_eq!(unit.issues[0].line, 1);
    }

    #[test]
    fn method_call_chain() {
        let unit = parse("tool_result = self.tool_by_names[tool].use(tool_input)\n");
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::Assign { value, .. } => match &value.kind {
                ExprKind::Call { func, args, .. } => {
                    assert_eq!(func.path_string(), "self.tool_by_names[tool].use");
                    assert_eq!(func.terminal_name(), Some("use"));
                    assert_eq!(args.len(), 1);
                }
                other => panic!("expected call, got {other:?}"),
            },
            other => panic!("expected assign, got {other:?}"),
        }
    }

    #[test]
    fn fstring_parts() {
        let unit =
            parse("generated += f\"\\n{OBSERVATION_TOKEN} {tool_result}\\n{THOUGHT_TOKEN}\"\n");
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::AugAssign { value, .. } => match &value.kind {
                ExprKind::Str(s) => {
                    assert!(s.is_fstring);
                    let exprs = s
                        .parts
                        .iter()
                        .filter(|p| matches!(p, FStringPart::Expr(_)))
                        .count();
                    assert_eq!(exprs, 3);
                }
                other => panic!("expected string, got {other:?}"),
            },
            other => panic!("expected augassign, got {other:?}"),
        }
    }

    #[test]
    fn decorated_classmethod_with_bare_return() {
        let text = "class SegmentExtractTool(ToolMessage):\n    @classmethod\n    def instructions(cls) -> str:\n        return\n        \"\"\"doc\"\"\"\n";
        let unit = parse(text);
        assert!(unit.issues.is_empty(), "{:?}", unit.issues);
        match &unit.body[0].kind {
            StmtKind::ClassDef(def) => match &def.body[0].kind {
                StmtKind::FunctionDef(f) => {
                    assert_eq!(f.decorators.len(), 1);
                    assert!(matches!(f.body[0].kind, StmtKind::Return { value: None }));
                    assert!(matches!(f.body[1].kind, StmtKind::Expr(_)));
                }
                other => panic!("expected function, got {other:?}"),
            },
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn try_except_and_assert() {
        let text = "try:\n    x = run()\nexcept ValueError as e:\n    x = None\nassert isinstance(x, str), \"bad\"\n";
        let unit = parse(text);
        assert!(unit.issues.is_empty(), "{:?}", unit.issues);
        assert!(matches!(unit.body[0].kind, StmtKind::Try { .. }));
        assert!(matches!(unit.body[1].kind, StmtKind::Assert { .. }));
    }

    #[test]
    fn keyword_arguments() {
        let text = "agent = initialize_agent(tools=tools, llm=llmm, verbose=True, handle_parsing_error=False)\n";
        let unit = parse(text);
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::Assign { value, .. } => match &value.kind {
                ExprKind::Call { keywords, .. } => {
                    assert_eq!(keywords.len(), 4);
                    assert_eq!(keywords[3].name.as_deref(), Some("handle_parsing_error"));
                    assert!(matches!(keywords[3].value.kind, ExprKind::Bool(false)));
                }
                other => panic!("expected call, got {other:?}"),
            },
            other => panic!("expected assign, got {other:?}"),
        }
    }

    #[test]
    fn broken_statement_recovers_as_opaque() {
        let text = "def f except\n    pass\nx = 1\n";
        let unit = parse(text);
        assert!(!unit.issues.is_empty());
        assert!(unit.body.iter().any(|s| matches!(s.kind, StmtKind::Opaque)));
        assert!(unit
            .body
            .iter()
            .any(|s| matches!(s.kind, StmtKind::Assign { .. })));
    }

    #[test]
    fn comprehension_becomes_opaque() {
        let unit = parse("xs = [x for x in range(10)]\ny = 2\n");
        assert!(unit.issues.is_empty(), "{:?}", unit.issues);
        assert_eq!(unit.body.len(), 2);
    }

    #[test]
    fn import_forms() {
        let unit = parse("import os\nimport numpy as np\nfrom pydantic import BaseModel\nfrom .local import helper\n");
        assert!(unit.issues.is_empty());
        assert!(matches!(&unit.body[0].kind, StmtKind::Import(a) if a[0].name == "os"));
        assert!(
            matches!(&unit.body[1].kind, StmtKind::Import(a) if a[0].asname.as_deref() == Some("np"))
        );
        assert!(matches!(
            &unit.body[2].kind,
            StmtKind::ImportFrom { module, .. } if module == "pydantic"
        ));
        assert!(matches!(
            &unit.body[3].kind,
            StmtKind::ImportFrom { level: 1, .. }
        ));
    }

    #[test]
    fn annotated_class_attributes() {
        let text = "class ChatLLM(BaseModel):\n    api_key:str = \"\"\n    model: str = 'gpt-4o'\n";
        let unit = parse(text);
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::ClassDef(def) => {
                assert_eq!(def.body.len(), 2);
                assert!(matches!(
                    &def.body[0].kind,
                    StmtKind::AnnAssign { value: Some(v), .. }
                        if matches!(&v.kind, ExprKind::Str(s) if s.value.is_empty())
                ));
            }
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn while_loop_with_condition() {
        let text = "def run(self, question: str):\n    while num_loops < self.max_loops:\n        if tool == 'Final':\n            return tool_input\n";
        let unit = parse(text);
        assert!(unit.issues.is_empty(), "{:?}", unit.issues);
    }

    #[test]
    fn chained_and_tuple_assignments() {
        let unit = parse("a = b = 1\nx, y = 1, 2\n");
        assert!(unit.issues.is_empty());
        match &unit.body[0].kind {
            StmtKind::Assign { targets, .. } => assert_eq!(targets.len(), 2),
            other => panic!("expected assign, got {other:?}"),
        }
        match &unit.body[1].kind {
            StmtKind::Assign { targets, value } => {
                assert!(matches!(targets[0].kind, ExprKind::Tuple(_)));
                assert!(matches!(value.kind, ExprKind::Tuple(_)));
            }
            other => panic!("expected assign, got {other:?}"),
        }
    }
}
