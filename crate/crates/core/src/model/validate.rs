use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{CheckDefinition, RelationKind, TargetDefinition, TargetNode};
use crate::content::CheckBundle;
use crate::xquery;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// Structural problems found in a bundle element. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, subject: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            subject: subject.to_string(),
            message: message.into(),
        });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_target_definition(td: &TargetDefinition) -> ValidationReport {
    let mut report = ValidationReport::default();
    let subject = td.id.as_str();

    for id in td.components.keys() {
        if td.relations.contains_key(id) {
            report.push(subject, format!("id {id} is used by both a component and a relation"));
        }
    }

    for rel in td.relations.values() {
        for operand in [&rel.left, &rel.right] {
            match td.node(operand) {
                None => report.push(subject, format!("unresolved reference {operand} in {}", rel.id)),
                Some(TargetNode::Relation(_)) if rel.kind == RelationKind::CompOf => report.push(
                    subject,
                    format!("comp_of relation {} may only combine software components, not {operand}", rel.id),
                ),
                Some(_) => {}
            }
        }
    }

    for at in find_cycles(td) {
        report.push(subject, format!("cycle at {at}"));
    }

    if td.relations.is_empty() {
        if td.components.len() != 1 {
            report.push(
                subject,
                format!("|SCS| must be 1 when there are no relations (found {})", td.components.len()),
            );
        }
        if let Some(root) = &td.root {
            report.push(subject, format!("declared root {root} is not a relation"));
        }
        return report;
    }

    let unreferenced = td.unreferenced_relations();
    let root = match unreferenced.as_slice() {
        [] => {
            report.push(subject, "no root relation: every relation is referenced by another");
            None
        }
        [only] => Some(only.to_string()),
        many => {
            report.push(subject, format!("multiple root relations: {}", many.join(", ")));
            None
        }
    };

    if let Some(declared) = &td.root {
        if !td.relations.contains_key(declared) {
            report.push(subject, format!("declared root {declared} is not a relation"));
        } else if root.as_deref().is_some_and(|r| r != declared) || !unreferenced.contains(&declared.as_str()) {
            report.push(subject, format!("declared root {declared} is referenced by another relation"));
        }
    }

    if let Some(root) = root {
        let mut reached = BTreeSet::new();
        let mut stack = vec![root.as_str()];
        while let Some(id) = stack.pop() {
            if !reached.insert(id) {
                continue;
            }
            if let Some(rel) = td.relations.get(id) {
                stack.push(rel.left.as_str());
                stack.push(rel.right.as_str());
            }
        }
        for id in td.relations.keys() {
            if !reached.contains(id.as_str()) {
                report.push(subject, format!("relation {id} is unreachable from root {root}"));
            }
        }
    }

    report
}

/// Relation ids at which a back edge closes a directed cycle.
fn find_cycles(td: &TargetDefinition) -> Vec<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit<'a>(
        td: &'a TargetDefinition,
        id: &'a str,
        marks: &mut BTreeMap<&'a str, Mark>,
        found: &mut BTreeSet<String>,
    ) {
        match marks.get(id) {
            Some(Mark::Active) => {
                found.insert(id.to_string());
                return;
            }
            Some(Mark::Done) => return,
            None => {}
        }
        let Some(rel) = td.relations.get(id) else {
            return;
        };
        marks.insert(id, Mark::Active);
        for next in [rel.left.as_str(), rel.right.as_str()] {
            if td.relations.contains_key(next) {
                visit(td, next, marks, found);
            }
        }
        marks.insert(id, Mark::Done);
    }

    let mut marks = BTreeMap::new();
    let mut found = BTreeSet::new();
    for id in td.relations.keys() {
        visit(td, id, &mut marks, &mut found);
    }
    found.into_iter().collect()
}

pub fn validate_check_definition(cd: &CheckDefinition, bundle: &CheckBundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    let subject = cd.id.as_str();

    let definition = bundle.definitions.get(&cd.definition_ref);
    if definition.is_none() {
        report.push(subject, format!("unresolved definition {}", cd.definition_ref));
    }
    let target = bundle.targets.get(&cd.target_ref);
    if target.is_none() {
        report.push(subject, format!("unresolved target definition {}", cd.target_ref));
    }

    if let Some(def) = definition {
        if def.criteria.has_empty_node() {
            report.push(subject, format!("definition {} has an empty criteria node", def.id));
        }
        for test_id in def.tests() {
            match bundle.tests.get(test_id) {
                None => report.push(subject, format!("unresolved test {test_id} in definition {}", def.id)),
                Some(test) => {
                    match bundle.objects.get(&test.object_ref) {
                        None => report.push(
                            subject,
                            format!("unresolved object {} in test {test_id}", test.object_ref),
                        ),
                        Some(object) => {
                            if let Err(err) = xquery::parse_query(&object.query) {
                                report.push(subject, format!("object {} has an invalid query: {err}", object.id));
                            }
                        }
                    }
                    for state in &test.state_refs {
                        if !bundle.states.contains_key(state) {
                            report.push(subject, format!("unresolved state {state} in test {test_id}"));
                        }
                    }
                }
            }
            if !cd.tau.contains_key(test_id) {
                report.push(subject, format!("tau not total: test {test_id} has no software component"));
            }
        }
        let tests = def.tests();
        for test_id in cd.tau.keys() {
            if !tests.contains(test_id.as_str()) {
                report.push(subject, format!("tau maps test {test_id} which is not in definition {}", def.id));
            }
        }
    }

    if let Some(td) = target {
        for (test_id, sc) in &cd.tau {
            if !td.components.contains_key(sc) {
                report.push(subject, format!("dangling component {sc} for test {test_id}"));
            }
        }
    }

    report
}
