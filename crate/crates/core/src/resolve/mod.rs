//! Interpretation of target definitions over a data source.
//!
//! A target definition denotes a family of identifier groups (each group is
//! one installation satisfying the whole expression) together with an
//! assignment σ of each grouped identifier to the software component it plays.
//!
//! * a software component denotes the singletons `{i}` of its matches;
//! * `and` pairs every left group with every right group;
//! * `or` unions the two families;
//! * a named relation pairs groups `V`, `W` when some `v ∈ V`, `w ∈ W` are
//!   related in the data source.
//!
//! σ is built bottom-up with the right operand taking precedence; identifiers
//! where both operands disagree are reported as conflicts.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::datasource::DataSource;
use crate::model::{validate_target_definition, RelationKind, TargetDefinition, TargetNode, ValidationReport};

mod oracle;

pub use oracle::{brute_force_resolve, MAX_IDENTIFIERS, MAX_LEAVES};

pub type Group = BTreeSet<String>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Resolution {
    /// Canonically ordered (sorted identifier tuples), no duplicates.
    pub groups: BTreeSet<Group>,
    #[serde(rename = "sigma")]
    pub assignment: BTreeMap<String, String>,
    pub conflicts: Vec<String>,
}

impl Resolution {
    /// σ(i): the software component id identifier `i` was matched as.
    pub fn component_of(&self, identifier: &str) -> Option<&str> {
        self.assignment.get(identifier).map(String::as_str)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("resolution serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("invalid target definition {id}:\n{report}")]
    InvalidTd { id: String, report: ValidationReport },
    #[error("oracle limits exceeded: {0}")]
    Scale(String),
}

struct Partial {
    groups: BTreeSet<Group>,
    sigma: BTreeMap<String, String>,
    conflicts: BTreeSet<String>,
}

pub fn interpret_target_definition(ds: &DataSource, td: &TargetDefinition) -> Result<Resolution, ResolveError> {
    let report = validate_target_definition(td);
    let entry = match (report.is_valid(), td.entry()) {
        (true, Some(entry)) => entry,
        _ => {
            return Err(ResolveError::InvalidTd {
                id: td.id.clone(),
                report,
            })
        }
    };
    let partial = interpret(ds, td, entry);
    Ok(finish(partial.groups, partial.sigma, partial.conflicts))
}

/// Restricts σ and the conflict list to identifiers that occur in some group.
pub(crate) fn finish(
    groups: BTreeSet<Group>,
    sigma: BTreeMap<String, String>,
    conflicts: BTreeSet<String>,
) -> Resolution {
    let members: BTreeSet<&String> = groups.iter().flatten().collect();
    Resolution {
        assignment: sigma.into_iter().filter(|(i, _)| members.contains(i)).collect(),
        conflicts: conflicts.into_iter().filter(|i| members.contains(i)).collect(),
        groups,
    }
}

fn interpret(ds: &DataSource, td: &TargetDefinition, node: TargetNode<'_>) -> Partial {
    match node {
        TargetNode::Component(sc) => {
            let matches = ds.eval_software_component(&sc.conditions);
            Partial {
                groups: matches.iter().map(|i| Group::from([i.clone()])).collect(),
                sigma: matches.into_iter().map(|i| (i, sc.id.clone())).collect(),
                conflicts: BTreeSet::new(),
            }
        }
        TargetNode::Relation(rel) => {
            let resolve = |id: &str| td.node(id).expect("validated reference");
            let left = interpret(ds, td, resolve(&rel.left));
            let right = interpret(ds, td, resolve(&rel.right));

            let groups = match rel.kind {
                RelationKind::And => product(&left.groups, &right.groups, |_, _| true),
                RelationKind::Or => left.groups.union(&right.groups).cloned().collect(),
                named => join(ds, named, &left.groups, &right.groups),
            };

            let mut conflicts = left.conflicts;
            conflicts.extend(right.conflicts);
            let mut sigma = left.sigma;
            for (i, sc) in right.sigma {
                if let Some(previous) = sigma.insert(i.clone(), sc) {
                    if previous != sigma[&i] {
                        conflicts.insert(i);
                    }
                }
            }
            Partial {
                groups,
                sigma,
                conflicts,
            }
        }
    }
}

fn product(
    left: &BTreeSet<Group>,
    right: &BTreeSet<Group>,
    keep: impl Fn(&Group, &Group) -> bool,
) -> BTreeSet<Group> {
    let mut out = BTreeSet::new();
    for v in left {
        for w in right {
            if keep(v, w) {
                out.insert(v.union(w).cloned().collect());
            }
        }
    }
    out
}

/// Hash join on the relation table: a left group's successor set is computed
/// once, then each right group is tested for intersection.
fn join(ds: &DataSource, kind: RelationKind, left: &BTreeSet<Group>, right: &BTreeSet<Group>) -> BTreeSet<Group> {
    let mut successors: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (from, to) in ds.relation_pairs(kind) {
        successors.entry(from).or_default().push(to);
    }
    let mut out = BTreeSet::new();
    for v in left {
        let reachable: BTreeSet<&str> = v
            .iter()
            .filter_map(|i| successors.get(i.as_str()))
            .flatten()
            .copied()
            .collect();
        if reachable.is_empty() {
            continue;
        }
        for w in right {
            if w.iter().any(|i| reachable.contains(i.as_str())) {
                out.insert(v.union(w).cloned().collect());
            }
        }
    }
    out
}
