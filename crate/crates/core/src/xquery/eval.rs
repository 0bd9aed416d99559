use std::collections::BTreeSet;

use super::doc::XmlDoc;
use super::parse::{Axis, NodeTest, Predicate, QueryAst, Step};

/// Context node: `None` is the document node, `Some(i)` an element.
type Node = Option<usize>;

/// Evaluates `q` against `doc` in document order. A final `text()` step
/// yields, per selected element, the trimmed concatenation of its direct text
/// (elements with none are skipped); otherwise each selected element is
/// returned in canonical form.
pub fn eval_query(doc: &XmlDoc, q: &QueryAst) -> Vec<String> {
    if doc.is_empty() {
        return Vec::new();
    }
    let mut context: BTreeSet<Node> = BTreeSet::from([None]);
    for step in &q.steps {
        if step.test == NodeTest::Text {
            let bases: BTreeSet<usize> = context
                .iter()
                .flat_map(|&c| bases(doc, c, step.axis))
                .flatten()
                .collect();
            return bases
                .into_iter()
                .map(|e| doc.direct_text(e))
                .filter(|t| !t.is_empty())
                .collect();
        }
        context = apply_step(doc, &context, step);
        if context.is_empty() {
            return Vec::new();
        }
    }
    context.into_iter().flatten().map(|e| doc.canonical(e)).collect()
}

fn bases(doc: &XmlDoc, node: Node, axis: Axis) -> Vec<Node> {
    match axis {
        Axis::Child => vec![node],
        Axis::Descendant => {
            let elements = match node {
                None => 0..doc.len(),
                Some(e) => doc.subtree(e),
            };
            let mut out: Vec<Node> = Vec::with_capacity(elements.len() + 1);
            if node.is_none() {
                out.push(None);
            }
            out.extend(elements.map(Some));
            out
        }
    }
}

fn apply_step(doc: &XmlDoc, context: &BTreeSet<Node>, step: &Step) -> BTreeSet<Node> {
    let mut out = BTreeSet::new();
    let mut seen_bases = BTreeSet::new();
    for &c in context {
        for base in bases(doc, c, step.axis) {
            if !seen_bases.insert(base) {
                continue;
            }
            let mut candidates: Vec<usize> = match base {
                None => vec![XmlDoc::ROOT],
                Some(e) => doc.child_elements(e).collect(),
            };
            candidates.retain(|&e| name_matches(doc, e, &step.test));
            for pred in &step.predicates {
                candidates = match pred {
                    Predicate::Position(n) => candidates.get(n - 1).copied().into_iter().collect(),
                    Predicate::AttributeEquals { name, value } => candidates
                        .into_iter()
                        .filter(|&e| doc.element(e).attribute(name) == Some(value.as_str()))
                        .collect(),
                };
            }
            out.extend(candidates.into_iter().map(Some));
        }
    }
    out
}

fn name_matches(doc: &XmlDoc, e: usize, test: &NodeTest) -> bool {
    match test {
        NodeTest::Name { local, .. } => doc.element(e).name == *local,
        NodeTest::AnyElement => true,
        NodeTest::Text => false,
    }
}
