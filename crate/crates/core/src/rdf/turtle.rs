//! Reader and canonical writer for the supported Turtle subset.
//!
//! Supported: `@prefix`, IRIREFs, prefixed names, the `a` keyword,
//! labelled blank nodes, blank-node property lists, object lists,
//! predicate-object lists, plain/typed/language-tagged short string
//! literals, numeric and boolean shorthand. Collections, `@base`/`BASE`,
//! SPARQL-style `PREFIX`, and long (triple-quoted) strings are rejected.

use std::collections::{BTreeMap, BTreeSet};

use super::graph::Graph;
use super::term::{escape_string, BlankNode, Iri, Literal, Term, Triple};
use super::vocab::{rdf, xsd};
use super::RdfError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Prefix,
    IriRef(String),
    PName { prefix: String, local: String },
    Blank(String),
    A,
    Str(String),
    LangTag(String),
    Caret2,
    Integer(String),
    Decimal(String),
    Double(String),
    Bool(String),
    Dot,
    Semicolon,
    Comma,
    LBracket,
    RBracket,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn skip_ws_and_comments(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, RdfError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws_and_comments();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '.' if !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                    self.bump();
                    Tok::Dot
                }
                ';' => {
                    self.bump();
                    Tok::Semicolon
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '[' => {
                    self.bump();
                    Tok::LBracket
                }
                ']' => {
                    self.bump();
                    Tok::RBracket
                }
                '(' | ')' => return Err(self.error("collections are not supported")),
                '<' => self.iri_ref()?,
                '"' | '\'' => {
                    let s = self.string(c)?;
                    out.push(Spanned {
                        tok: Tok::Str(s),
                        line,
                        column,
                    });
                    // language tag or datatype must follow immediately
                    if self.peek() == Some('@') {
                        let (l, col) = (self.line, self.column);
                        self.bump();
                        let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                        if tag.is_empty() {
                            return Err(self.error("empty language tag"));
                        }
                        out.push(Spanned {
                            tok: Tok::LangTag(tag),
                            line: l,
                            column: col,
                        });
                    } else if self.peek() == Some('^') {
                        let (l, col) = (self.line, self.column);
                        self.bump();
                        if self.bump() != Some('^') {
                            return Err(self.error("expected '^^'"));
                        }
                        out.push(Spanned {
                            tok: Tok::Caret2,
                            line: l,
                            column: col,
                        });
                    }
                    continue;
                }
                '@' => {
                    self.bump();
                    let word = self.take_while(|c| c.is_ascii_alphabetic());
                    match word.as_str() {
                        "prefix" => Tok::Prefix,
                        "base" => return Err(self.error("@base is not supported")),
                        _ => return Err(self.error(format!("unexpected directive '@{word}'"))),
                    }
                }
                '_' if self.peek_at(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.take_local();
                    if label.is_empty() {
                        return Err(self.error("empty blank node label"));
                    }
                    Tok::Blank(label)
                }
                c if c == '+' || c == '-' || c.is_ascii_digit() || c == '.' => self.number()?,
                c if c == ':' || c.is_alphabetic() => self.name()?,
                other => return Err(self.error(format!("unexpected character '{other}'"))),
            };
            out.push(Spanned { tok, line, column });
        }
        Ok(out)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    /// PN_LOCAL-ish: alphanumerics, `_`, `-`, `.`, `:`, and backslash escapes;
    /// a trailing `.` is left for the statement terminator.
    fn take_local(&mut self) -> String {
        let mut s = String::new();
        loop {
            match self.peek() {
                Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | ':') => {
                    s.push(c);
                    self.bump();
                }
                Some('.') => {
                    let mut ahead = 1;
                    while self.peek_at(ahead) == Some('.') {
                        ahead += 1;
                    }
                    let next = self.peek_at(ahead);
                    if next.is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '\\')) {
                        for _ in 0..ahead {
                            s.push('.');
                            self.bump();
                        }
                    } else {
                        break;
                    }
                }
                Some('\\') => match self.peek_at(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        self.bump();
                        self.bump();
                        s.push(e);
                    }
                    _ => break,
                },
                _ => break,
            }
        }
        s
    }

    fn iri_ref(&mut self) -> Result<Tok, RdfError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    s.push(c);
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(format!("invalid character '{}' in IRI", c.escape_default())))
                }
                Some(c) => s.push(c),
            }
        }
        Ok(Tok::IriRef(s))
    }

    fn unicode_escape(&mut self) -> Result<char, RdfError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, RdfError> {
        let mut code = 0u32;
        for _ in 0..width {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid unicode escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.error("invalid unicode code point"))
    }

    fn string(&mut self, quote: char) -> Result<String, RdfError> {
        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
            return Err(self.error("long (triple-quoted) strings are not supported"));
        }
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated string")),
                Some('\n') | Some('\r') => return Err(self.error("newline in string literal")),
                Some(c) if c == quote => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.error("invalid escape in string")),
                    };
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
        Ok(s)
    }

    fn number(&mut self) -> Result<Tok, RdfError> {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut is_decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_decimal = true;
            s.push('.');
            self.bump();
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        let mut is_double = false;
        if let Some(e @ ('e' | 'E')) = self.peek() {
            is_double = true;
            s.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                s.push(c);
                self.bump();
            }
            let exp = self.take_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return Err(self.error("malformed exponent"));
            }
            s.push_str(&exp);
        }
        if !s.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.error(format!("malformed number '{s}'")));
        }
        Ok(if is_double {
            Tok::Double(s)
        } else if is_decimal {
            Tok::Decimal(s)
        } else {
            Tok::Integer(s)
        })
    }

    fn name(&mut self) -> Result<Tok, RdfError> {
        let prefix = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if self.peek() == Some(':') {
            if prefix.ends_with('.') || prefix.starts_with(|c: char| !c.is_alphabetic()) && !prefix.is_empty() {
                return Err(self.error(format!("invalid prefix name '{prefix}'")));
            }
            self.bump();
            let local = self.take_local();
            return Ok(Tok::PName { prefix, local });
        }
        match prefix.as_str() {
            "a" => Ok(Tok::A),
            "true" | "false" => Ok(Tok::Bool(prefix)),
            "PREFIX" | "prefix" | "BASE" | "base" => {
                Err(self.error(format!("'{prefix}' directive is not supported; use @prefix")))
            }
            _ => Err(self.error(format!("unexpected token '{prefix}'"))),
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    graph: Graph,
    used_blank: BTreeSet<String>,
    next_blank: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.column)).unwrap_or(self.eof)
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        let (line, column) = self.here();
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), RdfError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn fresh_blank(&mut self) -> BlankNode {
        loop {
            let label = format!("b{}", self.next_blank);
            self.next_blank += 1;
            if self.used_blank.insert(label.clone()) {
                return BlankNode::new(label).expect("generated label is valid");
            }
        }
    }

    fn document(&mut self) -> Result<(), RdfError> {
        while self.peek().is_some() {
            if self.peek() == Some(&Tok::Prefix) {
                self.prefix_directive()?;
            } else {
                self.triples()?;
                self.expect(Tok::Dot, "'.' at end of statement")?;
            }
        }
        Ok(())
    }

    fn prefix_directive(&mut self) -> Result<(), RdfError> {
        self.pos += 1;
        let prefix = match self.next() {
            Some(Tok::PName { prefix, local }) if local.is_empty() => prefix,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error("expected prefix name ending in ':'"));
            }
        };
        let iri = match self.next() {
            Some(Tok::IriRef(s)) => self.make_iri(s)?,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error("expected namespace IRI"));
            }
        };
        self.expect(Tok::Dot, "'.' after @prefix")?;
        self.graph.set_prefix(prefix, iri);
        Ok(())
    }

    fn make_iri(&self, s: String) -> Result<Iri, RdfError> {
        Iri::new(s).map_err(|e| match e {
            RdfError::InvalidIri(v) => {
                let (line, column) = if self.pos > 0 {
                    let t = &self.toks[self.pos - 1];
                    (t.line, t.column)
                } else {
                    self.here()
                };
                RdfError::Syntax {
                    line,
                    column,
                    message: format!("not an absolute IRI: '{v}'"),
                }
            }
            other => other,
        })
    }

    fn resolve(&self, prefix: &str, local: &str) -> Result<Iri, RdfError> {
        let ns = self
            .graph
            .prefixes()
            .get(prefix)
            .ok_or_else(|| RdfError::UnknownPrefix(prefix.to_string()))?;
        self.make_iri(format!("{}{}", ns.as_str(), local))
    }

    fn iri(&mut self) -> Result<Option<Iri>, RdfError> {
        match self.peek().cloned() {
            Some(Tok::IriRef(s)) => {
                self.pos += 1;
                self.make_iri(s).map(Some)
            }
            Some(Tok::PName { prefix, local }) => {
                self.pos += 1;
                self.resolve(&prefix, &local).map(Some)
            }
            _ => Ok(None),
        }
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        if self.peek() == Some(&Tok::LBracket) {
            let subject = self.blank_property_list()?;
            if !matches!(self.peek(), Some(Tok::Dot)) {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject: Term = if let Some(iri) = self.iri()? {
            iri.into()
        } else if let Some(Tok::Blank(label)) = self.peek().cloned() {
            self.pos += 1;
            self.blank(label)?.into()
        } else {
            return Err(self.error("expected subject"));
        };
        self.predicate_object_list(&subject)
    }

    fn blank(&self, label: String) -> Result<BlankNode, RdfError> {
        BlankNode::new(label).map_err(|e| self.error(e.to_string()))
    }

    fn blank_property_list(&mut self) -> Result<Term, RdfError> {
        self.expect(Tok::LBracket, "'['")?;
        let node: Term = self.fresh_blank().into();
        if self.peek() != Some(&Tok::RBracket) {
            self.predicate_object_list(&node)?;
        }
        self.expect(Tok::RBracket, "']'")?;
        Ok(node)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), RdfError> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            if self.peek() != Some(&Tok::Semicolon) {
                return Ok(());
            }
            while self.peek() == Some(&Tok::Semicolon) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBracket) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        if self.peek() == Some(&Tok::A) {
            self.pos += 1;
            return Ok(Iri::from_static(rdf::TYPE));
        }
        self.iri()?.ok_or_else(|| self.error("expected predicate"))
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> Result<(), RdfError> {
        loop {
            let object = self.object()?;
            let triple =
                Triple::new(subject.clone(), predicate.clone(), object).map_err(|e| self.error(e.to_string()))?;
            self.graph.insert(triple);
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        if let Some(iri) = self.iri()? {
            return Ok(iri.into());
        }
        match self.peek().cloned() {
            Some(Tok::Blank(label)) => {
                self.pos += 1;
                Ok(self.blank(label)?.into())
            }
            Some(Tok::LBracket) => self.blank_property_list(),
            Some(Tok::Str(s)) => {
                self.pos += 1;
                self.literal_tail(s)
            }
            Some(Tok::Integer(s)) => self.shorthand(s, xsd::INTEGER),
            Some(Tok::Decimal(s)) => self.shorthand(s, xsd::DECIMAL),
            Some(Tok::Double(s)) => self.shorthand(s, xsd::DOUBLE),
            Some(Tok::Bool(s)) => self.shorthand(s, xsd::BOOLEAN),
            _ => Err(self.error("expected object")),
        }
    }

    fn shorthand(&mut self, lexical: String, datatype: &'static str) -> Result<Term, RdfError> {
        let lit = Literal::typed(lexical, Iri::from_static(datatype)).map_err(|e| self.error(e.to_string()))?;
        self.pos += 1;
        Ok(lit.into())
    }

    fn literal_tail(&mut self, lexical: String) -> Result<Term, RdfError> {
        match self.peek().cloned() {
            Some(Tok::LangTag(tag)) => {
                self.pos += 1;
                Literal::lang(lexical, tag)
                    .map(Term::from)
                    .map_err(|e| self.error(e.to_string()))
            }
            Some(Tok::Caret2) => {
                self.pos += 1;
                let dt = self.iri()?.ok_or_else(|| self.error("expected datatype IRI"))?;
                Literal::typed(lexical, dt)
                    .map(Term::from)
                    .map_err(|e| self.error(e.to_string()))
            }
            _ => Ok(Literal::string(lexical).into()),
        }
    }
}

/// Parses a Turtle document in the supported subset.
pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    let toks = Lexer::new(text).tokenize()?;
    let used_blank = toks
        .iter()
        .filter_map(|t| match &t.tok {
            Tok::Blank(l) => Some(l.clone()),
            _ => None,
        })
        .collect();
    let eof = text
        .lines()
        .enumerate()
        .last()
        .map(|(i, l)| (i + 1, l.chars().count() + 1))
        .unwrap_or((1, 1));
    let mut parser = Parser {
        toks,
        pos: 0,
        graph: Graph::new(),
        used_blank,
        next_blank: 0,
        eof,
    };
    parser.document()?;
    Ok(parser.graph)
}

fn is_safe_local(local: &str) -> bool {
    let bytes = local.as_bytes();
    if bytes.is_empty() {
        return true;
    }
    let ok_char = |b: u8| b.is_ascii_alphanumeric() || b == b'_' || b == b'-';
    ok_char(bytes[0])
        && bytes[0] != b'-'
        && ok_char(bytes[bytes.len() - 1])
        && bytes.iter().all(|&b| ok_char(b) || b == b'.')
}

struct Compactor<'a> {
    // namespace -> prefix, longest namespaces first
    namespaces: Vec<(&'a str, &'a str)>,
}

impl<'a> Compactor<'a> {
    fn new(prefixes: &'a BTreeMap<String, Iri>) -> Self {
        let mut namespaces: Vec<(&str, &str)> = prefixes.iter().map(|(p, ns)| (ns.as_str(), p.as_str())).collect();
        namespaces.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(b.1)));
        Compactor { namespaces }
    }

    fn iri(&self, iri: &Iri) -> String {
        let s = iri.as_str();
        for (ns, prefix) in &self.namespaces {
            if let Some(local) = s.strip_prefix(ns) {
                if is_safe_local(local) {
                    return format!("{prefix}:{local}");
                }
            }
        }
        format!("<{s}>")
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Blank(b) => b.to_string(),
            Term::Literal(l) => {
                let body = format!("\"{}\"", escape_string(l.lexical()));
                match l.language() {
                    Some(tag) => format!("{body}@{tag}"),
                    None if l.datatype().as_str() == xsd::STRING => body,
                    None => format!("{body}^^{}", self.iri(l.datatype())),
                }
            }
        }
    }
}

/// Canonical Turtle: prefixes sorted by name, then one block per subject,
/// with subjects, predicates and objects ordered by their N-Triples form.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        out.push_str(&format!("@prefix {prefix}: <{}> .\n", ns.as_str()));
    }
    if graph.is_empty() {
        return out;
    }
    if !out.is_empty() {
        out.push('\n');
    }
    let compactor = Compactor::new(graph.prefixes());
    let mut keyed: Vec<(String, String, String, &Triple)> = graph
        .iter()
        .map(|t| {
            (
                t.subject().canonical(),
                t.predicate().to_string(),
                t.object().canonical(),
                t,
            )
        })
        .collect();
    keyed.sort_by(|a, b| (&a.0, &a.1, &a.2).cmp(&(&b.0, &b.1, &b.2)));

    let mut i = 0;
    let mut first_block = true;
    while i < keyed.len() {
        let subject_key = keyed[i].0.clone();
        if !first_block {
            out.push('\n');
        }
        first_block = false;
        out.push_str(&compactor.term(keyed[i].3.subject()));
        let mut first_pred = true;
        while i < keyed.len() && keyed[i].0 == subject_key {
            let pred_key = keyed[i].1.clone();
            let predicate = keyed[i].3.predicate();
            let pred_str = if predicate.as_str() == rdf::TYPE {
                "a".to_string()
            } else {
                compactor.iri(predicate)
            };
            if first_pred {
                out.push(' ');
            } else {
                out.push_str(" ;\n    ");
            }
            first_pred = false;
            out.push_str(&pred_str);
            let mut first_obj = true;
            while i < keyed.len() && keyed[i].0 == subject_key && keyed[i].1 == pred_key {
                out.push_str(if first_obj { " " } else { " , " });
                first_obj = false;
                out.push_str(&compactor.term(keyed[i].3.object()));
                i += 1;
            }
        }
        out.push_str(" .\n");
    }
    out
}
