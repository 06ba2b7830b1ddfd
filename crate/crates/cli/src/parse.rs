//! Lexer and parser for the descriptor language and for ordinal arguments.
//!
//! The parser is total: any input produces either a program or an error
//! carrying a byte offset rendered as line:column.  Numbers are checked
//! against overflow and nesting depth is bounded, so arbitrary input can
//! never take the process down.

use crate::ast::{
    Binding, CountExpr, DescriptorExpr, LayerExpr, Program, SeqItem, Span, TailExpr,
};
use propg_core::OrdinalCNF;
use std::fmt;

/// Deepest allowed parenthesis nesting.
const MAX_DEPTH: usize = 256;

/// Binding names that would shadow the language's own words.
const RESERVED: &[&str] = &[
    "let", "seq", "repeat", "C", "prod", "layer", "for", "in", "N", "zero", "aleph0", "rep",
    "Zp", "trivial", "w",
];

/// A parse failure at a source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// The 1-based line and column of a byte offset in `text`.
pub fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let mut line = 1;
    let mut column = 1;
    for b in text.as_bytes()[..offset].iter() {
        if *b == b'\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Star,
    Caret,
    Equals,
    Semicolon,
    Plus,
    End,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("`{name}`"),
            TokenKind::Nat(n) => format!("`{n}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Semicolon => "`;`".into(),
            TokenKind::Plus => "`+`".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    span: Span,
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(text, offset);
    ParseError { offset, line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let b = bytes[i];
        let kind = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'[' => TokenKind::LBracket,
            b']' => TokenKind::RBracket,
            b',' => TokenKind::Comma,
            b'*' => TokenKind::Star,
            b'^' => TokenKind::Caret,
            b'=' => TokenKind::Equals,
            b';' => TokenKind::Semicolon,
            b'+' => TokenKind::Plus,
            b'0'..=b'9' => {
                let mut value: u64 = 0;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(u64::from(bytes[i] - b'0')))
                        .ok_or_else(|| error_at(text, start, "number does not fit in 64 bits"))?;
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Nat(value), span: Span::new(start, i) });
                continue;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let name = text[start..i].to_string();
                tokens.push(Token { kind: TokenKind::Ident(name), span: Span::new(start, i) });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().expect("offset is on a char boundary");
                return Err(error_at(text, start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        tokens.push(Token { kind, span: Span::new(start, i) });
    }
    tokens.push(Token { kind: TokenKind::End, span: Span::new(bytes.len(), bytes.len()) });
    Ok(tokens)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        token
    }

    fn error(&self, span: Span, message: impl Into<String>) -> ParseError {
        error_at(self.text, span.start, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let token = self.peek();
        self.error(
            token.span,
            format!("expected {expected}, found {}", token.kind.describe()),
        )
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(name) if name == word)
    }

    fn enter(&mut self, span: Span) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(span, "expression is nested too deeply"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn nat(&mut self, what: &str) -> Result<(u64, Span), ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Nat(value) => {
                let token = self.bump();
                Ok((value, token.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn count(&mut self) -> Result<CountExpr, ParseError> {
        if self.at_ident("aleph0") {
            self.bump();
            return Ok(CountExpr::Aleph0);
        }
        let (value, _) = self.nat("a count (a natural number or `aleph0`)")?;
        Ok(CountExpr::Finite(value))
    }

    /// `[` count, ... `]` with an optional trailing comma.
    fn count_list(&mut self) -> Result<Vec<CountExpr>, ParseError> {
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut counts = Vec::new();
        if self.peek().kind != TokenKind::RBracket {
            loop {
                counts.push(self.count()?);
                if self.peek().kind == TokenKind::Comma {
                    self.bump();
                    if self.peek().kind == TokenKind::RBracket {
                        break;
                    }
                    continue;
                }
                break;
            }
        }
        self.expect(TokenKind::RBracket, "`]` or `,`")?;
        Ok(counts)
    }

    fn caret_count(&mut self) -> Result<Option<CountExpr>, ParseError> {
        if self.peek().kind == TokenKind::Caret {
            self.bump();
            Ok(Some(self.count()?))
        } else {
            Ok(None)
        }
    }

    /// `C` `(` p `,` e `)` `^count`?, with `C` already consumed.
    fn cyclic_rest(&mut self, start: Span) -> Result<LayerExpr, ParseError> {
        self.expect(TokenKind::LParen, "`(`")?;
        let (prime, _) = self.nat("a prime")?;
        self.expect(TokenKind::Comma, "`,`")?;
        let (exponent, _) = self.nat("an exponent")?;
        let close = self.expect(TokenKind::RParen, "`)`")?;
        let mut span = start.join(close.span);
        let count = self.caret_count()?;
        if count.is_some() {
            span = span.join(self.tokens[self.pos - 1].span);
        }
        Ok(LayerExpr::Cyclic { prime, exponent, count, span })
    }

    /// `prod` `(` `C` `(` p `,` i `)` `for` i `in` `N` `)` `^count`?.
    fn prod_all(&mut self) -> Result<LayerExpr, ParseError> {
        let start = self.bump().span;
        self.expect(TokenKind::LParen, "`(`")?;
        if !self.at_ident("C") {
            return Err(self.unexpected("`C`"));
        }
        self.bump();
        self.expect(TokenKind::LParen, "`(`")?;
        let (prime, _) = self.nat("a prime")?;
        self.expect(TokenKind::Comma, "`,`")?;
        let (index, index_span) = match self.bump() {
            Token { kind: TokenKind::Ident(name), span } => (name, span),
            token => {
                return Err(self.error(token.span, "expected an index variable"));
            }
        };
        self.expect(TokenKind::RParen, "`)`")?;
        if !self.at_ident("for") {
            return Err(self.unexpected("`for`"));
        }
        self.bump();
        let (bound, _) = match self.bump() {
            Token { kind: TokenKind::Ident(name), span } => (name, span),
            token => {
                return Err(self.error(token.span, "expected an index variable"));
            }
        };
        if bound != index {
            return Err(self.error(
                index_span,
                format!("index variable mismatch: `{index}` vs `{bound}`"),
            ));
        }
        if !self.at_ident("in") {
            return Err(self.unexpected("`in`"));
        }
        self.bump();
        if !self.at_ident("N") {
            return Err(self.unexpected("`N`"));
        }
        self.bump();
        let close = self.expect(TokenKind::RParen, "`)`")?;
        let mut span = start.join(close.span);
        let count = self.caret_count()?;
        if count.is_some() {
            span = span.join(self.tokens[self.pos - 1].span);
        }
        Ok(LayerExpr::ProdAll { prime, count, span })
    }

    /// `layer` `(` p `,` `[counts]` `,` tail `)`.
    fn general_layer(&mut self) -> Result<LayerExpr, ParseError> {
        let start = self.bump().span;
        self.expect(TokenKind::LParen, "`(`")?;
        let (prime, _) = self.nat("a prime")?;
        self.expect(TokenKind::Comma, "`,`")?;
        let prefix = self.count_list()?;
        self.expect(TokenKind::Comma, "`,`")?;
        let tail = if self.at_ident("zero") {
            self.bump();
            TailExpr::Zero
        } else if self.at_ident("aleph0") {
            self.bump();
            TailExpr::Aleph0
        } else if self.at_ident("rep") {
            self.bump();
            TailExpr::Rep(self.count_list()?)
        } else {
            return Err(self.unexpected("a tail: `zero`, `aleph0`, or `rep[...]`"));
        };
        let close = self.expect(TokenKind::RParen, "`)`")?;
        Ok(LayerExpr::General { prime, prefix, tail, span: start.join(close.span) })
    }

    fn layer_atom(&mut self) -> Result<LayerExpr, ParseError> {
        if self.at_ident("C") {
            let start = self.bump().span;
            return self.cyclic_rest(start);
        }
        if self.at_ident("prod") {
            return self.prod_all();
        }
        if self.at_ident("layer") {
            return self.general_layer();
        }
        if self.peek().kind == TokenKind::LParen {
            let open = self.bump().span;
            self.enter(open)?;
            let inner = self.layer();
            self.leave();
            let inner = inner?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(inner);
        }
        Err(self.unexpected("a layer: `C(...)`, `prod(...)`, `layer(...)`, or `(`"))
    }

    fn layer(&mut self) -> Result<LayerExpr, ParseError> {
        let first = self.layer_atom()?;
        if self.peek().kind != TokenKind::Star {
            return Ok(first);
        }
        let mut span = first.span();
        let mut factors = vec![first];
        while self.peek().kind == TokenKind::Star {
            self.bump();
            let next = self.layer_atom()?;
            span = span.join(next.span());
            factors.push(next);
        }
        Ok(LayerExpr::Product { factors, span })
    }

    /// `seq` `[` items `]`, with `seq` already consumed.
    fn seq_rest(&mut self, start: Span) -> Result<DescriptorExpr, ParseError> {
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut items = Vec::new();
        if self.peek().kind != TokenKind::RBracket {
            loop {
                if self.at_ident("repeat") {
                    let repeat_start = self.bump().span;
                    self.expect(TokenKind::LParen, "`(`")?;
                    let layer = self.layer()?;
                    let close = self.expect(TokenKind::RParen, "`)`")?;
                    items.push(SeqItem::Repeat(layer, repeat_start.join(close.span)));
                } else {
                    items.push(SeqItem::Layer(self.layer()?));
                }
                if self.peek().kind == TokenKind::Comma {
                    self.bump();
                    if self.peek().kind == TokenKind::RBracket {
                        break;
                    }
                    continue;
                }
                break;
            }
        }
        let close = self.expect(TokenKind::RBracket, "`]` or `,`")?;
        Ok(DescriptorExpr::Seq { items, span: start.join(close.span) })
    }

    fn term(&mut self) -> Result<DescriptorExpr, ParseError> {
        if self.at_ident("seq") {
            let start = self.bump().span;
            return self.seq_rest(start);
        }
        if self.at_ident("Zp") {
            let start = self.bump().span;
            self.expect(TokenKind::LParen, "`(`")?;
            let (prime, _) = self.nat("a prime")?;
            let close = self.expect(TokenKind::RParen, "`)`")?;
            let mut span = start.join(close.span);
            let rank = self.caret_count()?.unwrap_or(CountExpr::Finite(1));
            span = span.join(self.tokens[self.pos - 1].span);
            return Ok(DescriptorExpr::Free { prime, rank, span });
        }
        if self.at_ident("trivial") {
            let start = self.bump().span;
            self.expect(TokenKind::LParen, "`(`")?;
            let (prime, _) = self.nat("a prime")?;
            let close = self.expect(TokenKind::RParen, "`)`")?;
            return Ok(DescriptorExpr::Trivial { prime, span: start.join(close.span) });
        }
        if self.peek().kind == TokenKind::LParen {
            let open = self.bump().span;
            self.enter(open)?;
            let inner = self.expr();
            self.leave();
            let inner = inner?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(inner);
        }
        if let TokenKind::Ident(name) = self.peek().kind.clone() {
            if !RESERVED.contains(&name.as_str()) {
                let token = self.bump();
                return Ok(DescriptorExpr::Name { name, span: token.span });
            }
        }
        Err(self.unexpected(
            "a descriptor: `seq[...]`, `Zp(...)`, `trivial(...)`, a name, or `(`",
        ))
    }

    fn expr(&mut self) -> Result<DescriptorExpr, ParseError> {
        let first = self.term()?;
        if self.peek().kind != TokenKind::Star {
            return Ok(first);
        }
        let mut span = first.span();
        let mut factors = vec![first];
        while self.peek().kind == TokenKind::Star {
            self.bump();
            let next = self.term()?;
            span = span.join(next.span());
            factors.push(next);
        }
        Ok(DescriptorExpr::Product { factors, span })
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut bindings = Vec::new();
        while self.at_ident("let") {
            self.bump();
            let (name, name_span) = match self.bump() {
                Token { kind: TokenKind::Ident(name), span } => (name, span),
                token => return Err(self.error(token.span, "expected a binding name")),
            };
            if RESERVED.contains(&name.as_str()) {
                return Err(self.error(name_span, format!("`{name}` is a reserved word")));
            }
            self.expect(TokenKind::Equals, "`=`")?;
            let expr = self.expr()?;
            self.expect(TokenKind::Semicolon, "`;`")?;
            bindings.push(Binding { name, name_span, expr });
        }
        let expr = self.expr()?;
        if self.peek().kind != TokenKind::End {
            return Err(self.unexpected("end of input"));
        }
        Ok(Program { bindings, expr })
    }
}

/// Parse a complete program.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { text, tokens, pos: 0, depth: 0 };
    parser.program()
}

/// Parse an ordinal written in normal form, e.g. `w^2*3+w*1+4`.
///
/// Coefficients to the same power of `w` are merged with checked addition.
pub fn parse_ordinal(text: &str) -> Result<OrdinalCNF, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { text, tokens, pos: 0, depth: 0 };
    let mut merged: Vec<(u32, u64)> = Vec::new();
    loop {
        let (exp, coeff) = parser.ordinal_term()?;
        let slot = merged.iter_mut().find(|(e, _)| *e == exp);
        match slot {
            Some((_, c)) => {
                *c = c.checked_add(coeff).ok_or_else(|| {
                    error_at(text, 0, "ordinal coefficient does not fit in 64 bits")
                })?;
            }
            None => merged.push((exp, coeff)),
        }
        match parser.peek().kind {
            TokenKind::Plus => {
                parser.bump();
            }
            TokenKind::End => break,
            _ => return Err(parser.unexpected("`+` or end of input")),
        }
    }
    Ok(OrdinalCNF::from_terms(merged))
}

impl<'a> Parser<'a> {
    /// One ordinal term: `w^e*c`, `w^e`, `w*c`, `w`, or a natural number.
    fn ordinal_term(&mut self) -> Result<(u32, u64), ParseError> {
        if self.at_ident("w") {
            self.bump();
            let exp = if self.peek().kind == TokenKind::Caret {
                self.bump();
                let (value, span) = self.nat("an exponent")?;
                u32::try_from(value)
                    .map_err(|_| self.error(span, format!("exponent {value} is too large")))?
            } else {
                1
            };
            let coeff = if self.peek().kind == TokenKind::Star {
                self.bump();
                self.nat("a coefficient")?.0
            } else {
                1
            };
            Ok((exp, coeff))
        } else {
            let (value, _) = self.nat("an ordinal term: `w...` or a natural number")?;
            Ok((0, value))
        }
    }
}
