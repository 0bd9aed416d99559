//! Recursive-descent parser for the query subset:
//!
//! ```text
//! path      := ('/' | '//') step (('/' | '//') step)*
//! step      := 'text()' | nametest predicate*
//! nametest  := NCName | '*' | '*' NCName
//! predicate := '[' ( integer | '@' NCName '=' literal ) ']'
//! literal   := '"' [^"]* '"' | "'" [^']* "'"
//! ```
//!
//! `*name` is a local-name test that ignores namespaces. `text()` may only
//! appear as the last step.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("query syntax error at offset {offset}: {message}")]
pub struct QuerySyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Child,
    Descendant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeTest {
    /// `starred` records the `*name` spelling; matching is the same either way.
    Name { local: String, starred: bool },
    AnyElement,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    Position(usize),
    AttributeEquals { name: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub axis: Axis,
    pub test: NodeTest,
    pub predicates: Vec<Predicate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryAst {
    pub absolute: bool,
    pub steps: Vec<Step>,
}

impl QueryAst {
    pub fn selects_text(&self) -> bool {
        self.steps.last().is_some_and(|s| s.test == NodeTest::Text)
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            f.write_str(match step.axis {
                Axis::Child => "/",
                Axis::Descendant => "//",
            })?;
            match &step.test {
                NodeTest::Name { local, starred } => {
                    if *starred {
                        f.write_str("*")?;
                    }
                    f.write_str(local)?;
                }
                NodeTest::AnyElement => f.write_str("*")?,
                NodeTest::Text => f.write_str("text()")?,
            }
            for pred in &step.predicates {
                match pred {
                    Predicate::Position(n) => write!(f, "[{n}]")?,
                    Predicate::AttributeEquals { name, value } => {
                        if value.contains('\'') {
                            write!(f, "[@{name}=\"{value}\"]")?
                        } else {
                            write!(f, "[@{name}='{value}']")?
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn parse_query(src: &str) -> Result<QueryAst, QuerySyntaxError> {
    let mut parser = Parser { src, pos: 0 };
    parser.parse_path()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, QuerySyntaxError> {
        Err(QuerySyntaxError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.pos += 1;
        }
    }

    fn parse_path(&mut self) -> Result<QueryAst, QuerySyntaxError> {
        let mut steps: Vec<Step> = Vec::new();
        loop {
            if !self.eat('/') {
                return match self.peek() {
                    None if steps.is_empty() => self.error("empty query"),
                    None => unreachable!(),
                    Some('|') => self.error("unions are not supported"),
                    Some(c) if steps.is_empty() => self.error(format!("query must start with '/', found {c:?}")),
                    Some(c) => self.error(format!("unexpected {c:?} after step")),
                };
            }
            let axis = if self.eat('/') { Axis::Descendant } else { Axis::Child };
            if let Some(prev) = steps.last() {
                if prev.test == NodeTest::Text {
                    return self.error("text() must be the last step");
                }
            }
            steps.push(self.parse_step(axis)?);
            if self.peek().is_none() {
                return Ok(QueryAst { absolute: true, steps });
            }
        }
    }

    fn parse_step(&mut self, axis: Axis) -> Result<Step, QuerySyntaxError> {
        let test = if self.rest().starts_with("text()") {
            self.pos += "text()".len();
            NodeTest::Text
        } else if self.eat('*') {
            if self.peek().is_some_and(is_name_start) {
                NodeTest::Name {
                    local: self.parse_ncname()?,
                    starred: true,
                }
            } else {
                NodeTest::AnyElement
            }
        } else if self.peek().is_some_and(is_name_start) {
            let local = self.parse_ncname()?;
            match self.peek() {
                Some(':') if self.rest().starts_with("::") => return self.error("named axes are not supported"),
                Some(':') => return self.error("prefixed names are not supported; use *name"),
                Some('(') => return self.error(format!("function {local}() is not supported")),
                _ => {}
            }
            NodeTest::Name { local, starred: false }
        } else {
            return match self.peek() {
                None => self.error("expected a step"),
                Some('.') => self.error("abbreviated steps are not supported"),
                Some('@') => self.error("attribute steps are not supported"),
                Some(c) => self.error(format!("expected a step, found {c:?}")),
            };
        };

        let mut predicates = Vec::new();
        while self.peek() == Some('[') {
            if test == NodeTest::Text {
                return self.error("text() takes no predicates");
            }
            self.pos += 1;
            predicates.push(self.parse_predicate()?);
        }
        Ok(Step { axis, test, predicates })
    }

    fn parse_predicate(&mut self) -> Result<Predicate, QuerySyntaxError> {
        self.skip_ws();
        let pred = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: usize = match self.src[start..self.pos].parse() {
                    Ok(n) => n,
                    Err(_) => return self.error("position out of range"),
                };
                if n == 0 {
                    return Err(QuerySyntaxError {
                        offset: start,
                        message: "positions start at 1".into(),
                    });
                }
                Predicate::Position(n)
            }
            Some('@') => {
                self.pos += 1;
                if !self.peek().is_some_and(is_name_start) {
                    return self.error("expected attribute name");
                }
                let name = self.parse_ncname()?;
                self.skip_ws();
                if !self.eat('=') {
                    return self.error("expected '='");
                }
                self.skip_ws();
                let value = self.parse_literal()?;
                Predicate::AttributeEquals { name, value }
            }
            _ => return self.error("expected a position or @attribute='value'"),
        };
        self.skip_ws();
        if !self.eat(']') {
            return self.error("expected ']'");
        }
        Ok(pred)
    }

    fn parse_literal(&mut self) -> Result<String, QuerySyntaxError> {
        let quote = match self.peek() {
            Some(q @ ('\'' | '"')) => q,
            _ => return self.error("expected a quoted string"),
        };
        self.pos += 1;
        let start = self.pos;
        loop {
            match self.bump() {
                None => {
                    return Err(QuerySyntaxError {
                        offset: start - 1,
                        message: "unterminated string".into(),
                    })
                }
                Some(c) if c == quote => return Ok(self.src[start..self.pos - 1].to_string()),
                Some(_) => {}
            }
        }
    }

    fn parse_ncname(&mut self) -> Result<String, QuerySyntaxError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if is_name_start(c) => {
                self.bump();
            }
            _ => return self.error("expected a name"),
        }
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

fn is_name_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '-' || c == '.' || c.is_numeric()
}
