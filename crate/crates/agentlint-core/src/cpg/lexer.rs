//! Tokenizer for the Python subset: indentation-aware, with implicit
//! line joining inside brackets and triple-quoted strings.

use super::ast::{Span, SyntaxIssue};
use crate::ingest::SourceFile;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Name(String),
    Number(String),
    Str {
        value: String,
        is_fstring: bool,
        raw: bool,
    },
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    pub line: u32,
}

// Longest-match operator table; order within a length group is irrelevant.
const OPS3: &[&str] = &["**=", "//=", ">>=", "<<=", "..."];
const OPS2: &[&str] = &[
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "@=",
];
const OPS1: &[&str] = &[
    "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "+", "-", "*", "/", "%", "&", "|", "^", "~",
    "<", ">", "=", "@",
];

pub struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    file: &'a SourceFile,
    pos: usize,
    at_line_start: bool,
    indent_stack: Vec<usize>,
    /// Open bracket positions for implicit joining and error reporting.
    bracket_stack: Vec<usize>,
    pending: Vec<Token>,
    issues: Vec<SyntaxIssue>,
    emitted_eof: bool,
    last_was_newline: bool,
}

pub fn tokenize(file: &SourceFile) -> (Vec<Token>, Vec<SyntaxIssue>) {
    let mut lexer = Lexer::new(file);
    let mut tokens = Vec::new();
    loop {
        let tok = lexer.next_token();
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            break;
        }
    }
    (tokens, lexer.issues)
}

impl<'a> Lexer<'a> {
    fn new(file: &'a SourceFile) -> Self {
        Lexer {
            src: &file.text,
            bytes: file.text.as_bytes(),
            file,
            pos: 0,
            at_line_start: true,
            indent_stack: vec![0],
            bracket_stack: Vec::new(),
            pending: Vec::new(),
            issues: Vec::new(),
            emitted_eof: false,
            last_was_newline: true,
        }
    }

    fn issue(&mut self, offset: usize, message: impl Into<String>) {
        self.issues.push(SyntaxIssue {
            line: self.file.line_of(offset),
            message: message.into(),
        });
    }

    fn tok(&self, kind: TokenKind, start: usize, end: usize) -> Token {
        Token {
            kind,
            span: Span::new(start, end),
            line: self.file.line_of(start),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn next_token(&mut self) -> Token {
        if let Some(tok) = self.pending.pop() {
            return tok;
        }
        loop {
            if self.at_line_start && self.bracket_stack.is_empty() {
                if let Some(tok) = self.handle_indentation() {
                    return tok;
                }
                if self.at_line_start {
                    // A blank or comment-only line was consumed; measure
                    // the next line from scratch.
                    continue;
                }
            }
            match self.peek() {
                None => return self.finish(),
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                Some(b'\n') => {
                    let start = self.pos;
                    self.pos += 1;
                    if self.bracket_stack.is_empty() {
                        self.at_line_start = true;
                        if !self.last_was_newline {
                            self.last_was_newline = true;
                            return self.tok(TokenKind::Newline, start, start + 1);
                        }
                    }
                }
                Some(b'\\') if self.peek_at(1) == Some(b'\n') => {
                    self.pos += 2;
                }
                Some(b'\\') if self.peek_at(1) == Some(b'\r') && self.peek_at(2) == Some(b'\n') => {
                    self.pos += 3;
                }
                Some(b'\r') => {
                    self.pos += 1;
                }
                Some(b' ') | Some(b'\t') => {
                    self.pos += 1;
                }
                Some(_) => {
                    self.last_was_newline = false;
                    return self.lex_regular();
                }
            }
        }
    }

    /// Measures the indentation of the upcoming line; emits Indent or
    /// Dedent tokens as needed. Blank and comment-only lines produce no
    /// tokens at all.
    fn handle_indentation(&mut self) -> Option<Token> {
        let line_start = self.pos;
        let mut col = 0usize;
        let mut p = self.pos;
        while let Some(c) = self.bytes.get(p) {
            match c {
                b' ' => col += 1,
                b'\t' => col = (col / 8 + 1) * 8,
                _ => break,
            }
            p += 1;
        }
        match self.bytes.get(p) {
            None => {
                self.pos = p;
                self.at_line_start = false;
                return None;
            }
            Some(b'\n') | Some(b'\r') | Some(b'#') => {
                // Blank or comment-only: consume up to the newline and stay
                // at line start.
                while let Some(c) = self.bytes.get(p) {
                    if *c == b'\n' {
                        p += 1;
                        break;
                    }
                    p += 1;
                }
                self.pos = p;
                return None;
            }
            _ => {}
        }
        self.pos = p;
        self.at_line_start = false;

        let current = *self.indent_stack.last().unwrap();
        if col > current {
            self.indent_stack.push(col);
            return Some(self.tok(TokenKind::Indent, line_start, p));
        }
        if col < current {
            let mut dedents = 0;
            while *self.indent_stack.last().unwrap() > col {
                self.indent_stack.pop();
                dedents += 1;
            }
            if *self.indent_stack.last().unwrap() != col {
                self.issue(
                    line_start,
                    "unindent does not match any outer indentation level",
                );
                self.indent_stack.push(col);
            }
            for _ in 1..dedents {
                self.pending
                    .push(self.tok(TokenKind::Dedent, line_start, line_start));
            }
            return Some(self.tok(TokenKind::Dedent, line_start, line_start));
        }
        None
    }

    fn finish(&mut self) -> Token {
        if self.emitted_eof {
            return self.tok(TokenKind::Eof, self.pos, self.pos);
        }
        if let Some(&open) = self.bracket_stack.first() {
            self.issue(open, "unmatched bracket");
            self.bracket_stack.clear();
        }
        self.emitted_eof = true;
        let end = self.pos;
        self.pending.push(self.tok(TokenKind::Eof, end, end));
        while self.indent_stack.len() > 1 {
            self.indent_stack.pop();
            self.pending.push(self.tok(TokenKind::Dedent, end, end));
        }
        if !self.last_was_newline {
            self.pending.push(self.tok(TokenKind::Newline, end, end));
        }
        self.pending.pop().unwrap()
    }

    fn lex_regular(&mut self) -> Token {
        let start = self.pos;
        let c = self.bytes[self.pos];

        if c == b'"' || c == b'\'' {
            return self.lex_string(start, false, false);
        }
        if c.is_ascii_alphabetic() || c == b'_' || c >= 0x80 {
            // Possible string prefix: r, b, u, f and two-letter combos.
            if let Some(tok) = self.try_string_prefix(start) {
                return tok;
            }
            return self.lex_name(start);
        }
        if c.is_ascii_digit() || (c == b'.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
        {
            return self.lex_number(start);
        }
        self.lex_operator(start)
    }

    fn try_string_prefix(&mut self, start: usize) -> Option<Token> {
        let mut raw = false;
        let mut fstring = false;
        let mut len = 0usize;
        for i in 0..2 {
            match self.peek_at(i) {
                Some(b'r') | Some(b'R') => {
                    if raw {
                        return None;
                    }
                    raw = true;
                    len = i + 1;
                }
                Some(b'f') | Some(b'F') => {
                    if fstring {
                        return None;
                    }
                    fstring = true;
                    len = i + 1;
                }
                Some(b'b') | Some(b'B') | Some(b'u') | Some(b'U') => {
                    len = i + 1;
                }
                _ => break,
            }
        }
        if len == 0 {
            return None;
        }
        match self.peek_at(len) {
            Some(b'"') | Some(b'\'') => {
                self.pos += len;
                Some(self.lex_string(start, fstring, raw))
            }
            _ => None,
        }
    }

    fn lex_string(&mut self, start: usize, is_fstring: bool, raw: bool) -> Token {
        let quote = self.bytes[self.pos];
        let triple = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        let mut value = String::new();
        loop {
            match self.peek() {
                None => {
                    self.issue(start, "unterminated string literal");
                    break;
                }
                Some(b'\n') if !triple => {
                    self.issue(start, "unterminated string literal");
                    break;
                }
                Some(b'\\') if !raw => {
                    self.pos += 1;
                    match self.peek() {
                        Some(b'n') => value.push('\n'),
                        Some(b't') => value.push('\t'),
                        Some(b'r') => value.push('\r'),
                        Some(b'0') => value.push('\0'),
                        Some(b'\\') => value.push('\\'),
                        Some(b'\'') => value.push('\''),
                        Some(b'"') => value.push('"'),
                        Some(b'\n') => {} // line continuation inside string
                        Some(other) if other < 0x80 => {
                            value.push('\\');
                            value.push(other as char);
                        }
                        Some(_) => {
                            // Unknown escape of a multi-byte character:
                            // keep the backslash, copy the full scalar.
                            value.push('\\');
                            value.push_str(self.copy_scalar());
                            continue;
                        }
                        None => break,
                    }
                    self.pos += 1;
                }
                Some(b'\\') => {
                    // Raw string: backslash is literal, but still escapes
                    // the quote for termination purposes.
                    value.push('\\');
                    self.pos += 1;
                    if self.peek().is_some() {
                        value.push_str(self.copy_scalar());
                    }
                }
                Some(c) if c == quote => {
                    if triple {
                        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                            self.pos += 3;
                            break;
                        }
                        value.push(c as char);
                        self.pos += 1;
                    } else {
                        self.pos += 1;
                        break;
                    }
                }
                Some(_) => {
                    let scalar = self.copy_scalar();
                    value.push_str(scalar);
                }
            }
        }
        self.tok(
            TokenKind::Str {
                value,
                is_fstring,
                raw,
            },
            start,
            self.pos,
        )
    }

    /// Advances past one UTF-8 scalar and returns its text.
    fn copy_scalar(&mut self) -> &'a str {
        let ch_start = self.pos;
        let mut end = ch_start + 1;
        while end < self.bytes.len() && (self.bytes[end] & 0xC0) == 0x80 {
            end += 1;
        }
        self.pos = end;
        &self.src[ch_start..end]
    }

    fn lex_name(&mut self, start: usize) -> Token {
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' || c >= 0x80 {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = self.src[start..self.pos].to_string();
        self.tok(TokenKind::Name(text), start, self.pos)
    }

    fn lex_number(&mut self, start: usize) -> Token {
        let mut is_int = true;
        if self.peek() == Some(b'0')
            && matches!(
                self.peek_at(1),
                Some(b'x') | Some(b'X') | Some(b'o') | Some(b'O') | Some(b'b') | Some(b'B')
            )
        {
            self.pos += 2;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == b'_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        } else {
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() || c == b'_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(b'.') && self.peek_at(1) != Some(b'.') {
                is_int = false;
                self.pos += 1;
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() || c == b'_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            if matches!(self.peek(), Some(b'e') | Some(b'E')) {
                let mark = self.pos;
                self.pos += 1;
                if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    is_int = false;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                } else {
                    self.pos = mark;
                }
            }
            if matches!(self.peek(), Some(b'j') | Some(b'J')) {
                is_int = false;
                self.pos += 1;
            }
        }
        let repr = self.src[start..self.pos].to_string();
        let _ = is_int;
        self.tok(TokenKind::Number(repr), start, self.pos)
    }

    fn lex_operator(&mut self, start: usize) -> Token {
        let rest = &self.src[self.pos..];
        for table in [OPS3, OPS2, OPS1] {
            for op in table {
                if rest.starts_with(op) {
                    match *op {
                        "(" | "[" | "{" => self.bracket_stack.push(self.pos),
                        ")" | "]" | "}" => {
                            self.bracket_stack.pop();
                        }
                        _ => {}
                    }
                    self.pos += op.len();
                    return self.tok(TokenKind::Op(op), start, self.pos);
                }
            }
        }
        // Unknown byte: skip it and report once.
        self.issue(
            start,
            format!(
                "unexpected character {:?}",
                self.src[start..].chars().next().unwrap_or('?')
            ),
        );
        self.pos += 1;
        // Resume with the next token.
        self.next_token()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        let file = SourceFile::new("t.py", text);
        tokenize(&file).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn simple_assignment() {
        let toks = kinds("x = 1\n");
        assert_eq!(
            toks,
            vec![
                TokenKind::Name("x".into()),
                TokenKind::Op("="),
                TokenKind::Number("1".into()),
                TokenKind::Newline,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn indentation_blocks() {
        let toks = kinds("def f():\n    return 1\nx = 2\n");
        assert!(toks.contains(&TokenKind::Indent));
        assert!(toks.contains(&TokenKind::Dedent));
    }

    #[test]
    fn implicit_line_joining() {
        let toks = kinds("f(1,\n  2)\n");
        let newlines = toks.iter().filter(|k| **k == TokenKind::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn triple_quoted_string_spans_lines() {
        let toks = kinds("s = \"\"\"a\nb\"\"\"\n");
        assert!(matches!(
            &toks[2],
            TokenKind::Str { value, .. } if value == "a\nb"
        ));
    }

    #[test]
    fn fstring_flag_set() {
        let toks = kinds("s = f\"hi {name}\"\n");
        assert!(matches!(
            &toks[2],
            TokenKind::Str {
                is_fstring: true,
                ..
            }
        ));
    }

    #[test]
    fn unmatched_paren_reports_line_one() {
        let file = SourceFile::new("t.py", "(\n");
        let (_, issues) = tokenize(&file);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 1);
    }

    #[test]
    fn escapes_decoded() {
        let toks = kinds(r#"s = "\nObservation""#);
        assert!(matches!(
            &toks[2],
            TokenKind::Str { value, .. } if value == "\nObservation"
        ));
    }

    #[test]
    fn comment_only_lines_ignored() {
        let toks = kinds("# header\nx = 1\n# trailer\n");
        assert_eq!(toks.iter().filter(|k| **k == TokenKind::Newline).count(), 1);
    }

    #[test]
    fn blank_line_inside_block_keeps_indent() {
        let toks = kinds("def f():\n    a = 1\n\n    b = 2\n");
        let dedents = toks.iter().filter(|k| **k == TokenKind::Dedent).count();
        let indents = toks.iter().filter(|k| **k == TokenKind::Indent).count();
        assert_eq!(indents, 1);
        assert_eq!(dedents, 1);
    }
}
