//! Recursive-descent parser for PENMAN-notation AMR graphs.
//!
//! Accepted shape, with arbitrary surrounding whitespace and `#`-prefixed
//! comments:
//!
//! ```text
//! node   := '(' variable '/' concept relation* ')'
//! relation := ':' role target
//! target := node | variable | constant
//! ```
//!
//! A bare target token is resolved after the whole graph has been read: if it
//! names a declared variable (declarations may come later in the text, so
//! forward references work) it becomes a relation edge, otherwise it is an
//! attribute constant. Quoted strings, numbers and the polarity signs `-`/`+`
//! are always constants. Quotes are stripped from string constants.
//!
//! Inverse roles on relation edges are normalized while building the graph:
//! `:ARG0-of` becomes a reversed edge with role `ARG0`. Attribute roles are
//! kept verbatim since a constant cannot be an edge source.
//!
//! Errors carry the byte offset into the input where parsing failed.

use std::collections::HashMap;

use thiserror::Error;

use crate::amr::{strip_inverse_role, AmrGraph, AttributeEdge, RelationEdge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PenmanError {
    #[error("empty input: no graph found")]
    Empty,
    #[error("expected '(' at byte {offset}")]
    ExpectedOpen { offset: usize },
    #[error("expected a variable name at byte {offset}")]
    ExpectedVariable { offset: usize },
    #[error("expected '/' after variable '{var}' at byte {offset}")]
    MissingSlash { var: String, offset: usize },
    #[error("expected a concept after '/' at byte {offset}")]
    ExpectedConcept { offset: usize },
    #[error("duplicate declaration of variable '{var}' at byte {offset}")]
    DuplicateVariable { var: String, offset: usize },
    #[error("expected a role name after ':' at byte {offset}")]
    ExpectedRole { offset: usize },
    #[error("role ':{role}' at byte {offset} has no target")]
    DanglingRole { role: String, offset: usize },
    #[error("unbalanced parentheses: input ended at byte {offset}")]
    Unbalanced { offset: usize },
    #[error("unexpected character '{found}' at byte {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("unterminated string literal starting at byte {offset}")]
    UnterminatedString { offset: usize },
    #[error("trailing content after the graph at byte {offset}")]
    Trailing { offset: usize },
}

/// Parses one PENMAN graph from `text`.
pub fn parse(text: &str) -> Result<AmrGraph, PenmanError> {
    let mut parser = Parser::new(text);
    parser.skip_trivia();
    if parser.at_end() {
        return Err(PenmanError::Empty);
    }
    let mut builder = Builder::default();
    parser.parse_node(&mut builder)?;
    parser.skip_trivia();
    if !parser.at_end() {
        return Err(PenmanError::Trailing { offset: parser.pos });
    }
    Ok(builder.finish())
}

#[derive(Default)]
struct Builder {
    vars: Vec<String>,
    concepts: Vec<String>,
    index: HashMap<String, usize>,
    // Edges to inline child nodes are resolved immediately; bare tokens wait
    // until every declaration is known.
    resolved: Vec<(usize, String, usize)>,
    pending: Vec<(usize, String, String)>,
    constants: Vec<(usize, String, String)>,
}

impl Builder {
    fn declare(&mut self, var: &str) -> Option<usize> {
        if self.index.contains_key(var) {
            return None;
        }
        let id = self.vars.len();
        self.vars.push(var.to_string());
        self.concepts.push(String::new());
        self.index.insert(var.to_string(), id);
        Some(id)
    }

    fn finish(self) -> AmrGraph {
        let Builder {
            vars,
            concepts,
            index,
            resolved,
            pending,
            constants,
        } = self;
        let mut edges = resolved;
        let mut attrs = Vec::new();
        for (src, role, token) in pending {
            match index.get(&token) {
                Some(&dst) => edges.push((src, role, dst)),
                None => attrs.push((src, role, token)),
            }
        }
        attrs.extend(constants);
        let mut graph = AmrGraph::from_raw(vars, concepts, index, 0);
        for (src, role, dst) in edges {
            match strip_inverse_role(&role) {
                Some(canonical) => graph.push_edge(RelationEdge {
                    src: dst,
                    role: canonical.to_string(),
                    dst: src,
                }),
                None => graph.push_edge(RelationEdge { src, role, dst }),
            }
        }
        for (src, role, value) in attrs {
            graph.push_attr(AttributeEdge { src, role, value });
        }
        graph
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and comments running to the end of the line.
    fn skip_trivia(&mut self) {
        loop {
            while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
                self.pos += 1;
            }
            if self.peek() == Some(b'#') {
                while !self.at_end() && self.peek() != Some(b'\n') {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    /// Reads a bare token: everything up to whitespace or a structural
    /// character. Returns an empty token without advancing when the cursor
    /// already sits on a delimiter.
    fn read_token(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() || matches!(b, b'(' | b')' | b'/' | b':' | b'"' | b'#') {
                break;
            }
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn parse_node(&mut self, builder: &mut Builder) -> Result<usize, PenmanError> {
        self.skip_trivia();
        if self.peek() != Some(b'(') {
            return match self.peek() {
                None => Err(PenmanError::Unbalanced { offset: self.pos }),
                Some(_) => Err(PenmanError::ExpectedOpen { offset: self.pos }),
            };
        }
        self.pos += 1;
        self.skip_trivia();
        let var_offset = self.pos;
        let var = self.read_token();
        if var.is_empty() {
            return Err(PenmanError::ExpectedVariable { offset: var_offset });
        }
        let node = builder.declare(var).ok_or(PenmanError::DuplicateVariable {
            var: var.to_string(),
            offset: var_offset,
        })?;
        self.skip_trivia();
        if self.peek() != Some(b'/') {
            return Err(PenmanError::MissingSlash {
                var: var.to_string(),
                offset: self.pos,
            });
        }
        self.pos += 1;
        self.skip_trivia();
        let concept_offset = self.pos;
        let concept = self.read_token();
        if concept.is_empty() {
            return Err(PenmanError::ExpectedConcept {
                offset: concept_offset,
            });
        }
        builder.concepts[node] = concept.to_string();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    return Ok(node);
                }
                Some(b':') => {
                    self.pos += 1;
                    let role_offset = self.pos;
                    let role = self.read_token();
                    if role.is_empty() {
                        return Err(PenmanError::ExpectedRole {
                            offset: role_offset,
                        });
                    }
                    self.parse_target(builder, node, role, role_offset)?;
                }
                None => return Err(PenmanError::Unbalanced { offset: self.pos }),
                Some(b) => {
                    return Err(PenmanError::Unexpected {
                        found: char::from(b),
                        offset: self.pos,
                    })
                }
            }
        }
    }

    fn parse_target(
        &mut self,
        builder: &mut Builder,
        src: usize,
        role: &str,
        role_offset: usize,
    ) -> Result<(), PenmanError> {
        self.skip_trivia();
        match self.peek() {
            Some(b'(') => {
                let child = self.parse_node(builder)?;
                builder.resolved.push((src, role.to_string(), child));
                Ok(())
            }
            Some(b'"') => {
                let value = self.read_string()?;
                builder.constants.push((src, role.to_string(), value));
                Ok(())
            }
            None | Some(b')') | Some(b':') => Err(PenmanError::DanglingRole {
                role: role.to_string(),
                offset: role_offset,
            }),
            Some(b'/') => Err(PenmanError::Unexpected {
                found: '/',
                offset: self.pos,
            }),
            Some(_) => {
                let token = self.read_token();
                if looks_like_literal(token) {
                    builder
                        .constants
                        .push((src, role.to_string(), token.to_string()));
                } else {
                    builder
                        .pending
                        .push((src, role.to_string(), token.to_string()));
                }
                Ok(())
            }
        }
    }

    fn read_string(&mut self) -> Result<String, PenmanError> {
        let start = self.pos;
        self.pos += 1; // opening quote
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(PenmanError::UnterminatedString { offset: start }),
                Some(b'"') => {
                    self.pos += 1;
                    return Ok(value);
                }
                Some(b'\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(b'"') => {
                            value.push('"');
                            self.pos += 1;
                        }
                        Some(b'\\') => {
                            value.push('\\');
                            self.pos += 1;
                        }
                        _ => value.push('\\'),
                    }
                }
                Some(_) => {
                    // Advance one whole character so multi-byte input stays
                    // on UTF-8 boundaries.
                    let ch = self.src[self.pos..].chars().next().expect("in bounds");
                    value.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }
}

/// True for tokens that are constants regardless of declared variables:
/// numbers and the polarity/imperative signs.
fn looks_like_literal(token: &str) -> bool {
    if token == "-" || token == "+" {
        return true;
    }
    let rest = token.strip_prefix(['-', '+']).unwrap_or(token);
    rest.starts_with(|c: char| c.is_ascii_digit())
        || (rest.starts_with('.') && rest[1..].starts_with(|c: char| c.is_ascii_digit()))
}
