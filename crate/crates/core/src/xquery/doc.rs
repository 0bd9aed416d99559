use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("xml syntax error at {line}:{column}: {message}")]
pub struct XmlError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlNode {
    Element(usize),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub namespace: Option<String>,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
    /// One past the last element index of this element's subtree.
    end: usize,
}

impl Element {
    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

/// Read-only element tree. Elements live in an arena in document order, so
/// index order is document order and a subtree is a contiguous index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDoc {
    elements: Vec<Element>,
}

impl XmlDoc {
    pub fn parse(text: &str) -> Result<XmlDoc, XmlError> {
        let options = roxmltree::ParsingOptions {
            allow_dtd: true,
            ..Default::default()
        };
        let doc = roxmltree::Document::parse_with_options(text, options).map_err(|err| {
            let pos = err.pos();
            XmlError {
                line: pos.row,
                column: pos.col,
                message: err.to_string(),
            }
        })?;
        let mut elements = Vec::new();
        build(doc.root_element(), &mut elements);
        Ok(XmlDoc { elements })
    }

    pub const ROOT: usize = 0;

    pub fn root(&self) -> &Element {
        &self.elements[Self::ROOT]
    }

    pub fn element(&self, idx: usize) -> &Element {
        &self.elements[idx]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `idx` followed by all its descendants, in document order.
    pub fn subtree(&self, idx: usize) -> std::ops::Range<usize> {
        idx..self.elements[idx].end
    }

    pub fn child_elements(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.elements[idx].children.iter().filter_map(|c| match c {
            XmlNode::Element(i) => Some(*i),
            XmlNode::Text(_) => None,
        })
    }

    /// Concatenation of the element's direct text children, trimmed.
    pub fn direct_text(&self, idx: usize) -> String {
        let mut out = String::new();
        for child in &self.elements[idx].children {
            if let XmlNode::Text(t) = child {
                out.push_str(t);
            }
        }
        out.trim().to_string()
    }

    /// Namespace-free rendering: local names, attributes sorted by name, text
    /// trimmed with empty runs dropped, childless elements self-closed.
    pub fn canonical(&self, idx: usize) -> String {
        let mut out = String::new();
        self.write_canonical(idx, &mut out);
        out
    }

    fn write_canonical(&self, idx: usize, out: &mut String) {
        let el = &self.elements[idx];
        out.push('<');
        out.push_str(&el.name);
        let mut attrs: Vec<&(String, String)> = el.attributes.iter().collect();
        attrs.sort();
        for (k, v) in attrs {
            let _ = write!(out, " {}=\"{}\"", k, escape_attr(v));
        }
        let body: Vec<&XmlNode> = el
            .children
            .iter()
            .filter(|c| match c {
                XmlNode::Text(t) => !t.trim().is_empty(),
                XmlNode::Element(_) => true,
            })
            .collect();
        if body.is_empty() {
            out.push_str("/>");
            return;
        }
        out.push('>');
        for child in body {
            match child {
                XmlNode::Element(i) => self.write_canonical(*i, out),
                XmlNode::Text(t) => out.push_str(&escape_text(t.trim())),
            }
        }
        let _ = write!(out, "</{}>", el.name);
    }
}

fn build(node: roxmltree::Node<'_, '_>, elements: &mut Vec<Element>) -> usize {
    let idx = elements.len();
    elements.push(Element {
        name: node.tag_name().name().to_string(),
        namespace: node.tag_name().namespace().map(str::to_string),
        attributes: node
            .attributes()
            .map(|a| (a.name().to_string(), a.value().to_string()))
            .collect(),
        children: Vec::new(),
        end: idx + 1,
    });
    let mut children = Vec::new();
    for child in node.children() {
        if child.is_element() {
            children.push(XmlNode::Element(build(child, elements)));
        } else if child.is_text() {
            let text = child.text().unwrap_or_default();
            // adjacent text and CDATA runs arrive as separate nodes
            if let Some(XmlNode::Text(prev)) = children.last_mut() {
                prev.push_str(text);
            } else {
                children.push(XmlNode::Text(text.to_string()));
            }
        }
    }
    let end = elements.len();
    let el = &mut elements[idx];
    el.children = children;
    el.end = end;
    idx
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arena_is_document_order() {
        let doc = XmlDoc::parse("<a><b><c/></b><d>x</d></a>").unwrap();
        let names: Vec<&str> = (0..doc.len()).map(|i| doc.element(i).name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c", "d"]);
        assert_eq!(doc.subtree(1), 1..3);
        assert_eq!(doc.direct_text(3), "x");
    }

    #[test]
    fn canonical_form() {
        let doc = XmlDoc::parse("<x:a xmlns:x='urn:x' z='1' b='&quot;'>\n  <c> t&amp;u </c>\n  <d></d>\n</x:a>").unwrap();
        assert_eq!(doc.canonical(0), r#"<a b="&quot;" z="1"><c>t&amp;u</c><d/></a>"#);
        assert_eq!(doc.root().namespace.as_deref(), Some("urn:x"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = XmlDoc::parse("<a>\n<b></a>").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
