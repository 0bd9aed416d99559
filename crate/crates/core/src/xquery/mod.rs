//! Parser and evaluator for the XPath subset used by configuration objects
//! and collector object queries.

use std::fmt;

mod doc;
mod eval;
mod parse;

pub use doc::{escape_attr, escape_text, Element, XmlDoc, XmlError, XmlNode};
pub use eval::eval_query;
pub use parse::{parse_query, Axis, NodeTest, Predicate, QueryAst, QuerySyntaxError, Step};

/// A parsed query that remembers its source text.
#[derive(Debug, Clone)]
pub struct XPath {
    source: String,
    ast: QueryAst,
}

impl XPath {
    pub fn parse(source: &str) -> Result<XPath, QuerySyntaxError> {
        Ok(XPath {
            source: source.to_string(),
            ast: parse_query(source)?,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &QueryAst {
        &self.ast
    }

    pub fn eval(&self, doc: &XmlDoc) -> Vec<String> {
        eval_query(doc, &self.ast)
    }
}

impl PartialEq for XPath {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl fmt::Display for XPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
