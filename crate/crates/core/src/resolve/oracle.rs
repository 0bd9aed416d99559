//! Enumerative reference semantics used to cross-check the interpreter.
//!
//! `or` nodes are expanded into alternative or-free expressions. For each
//! alternative every leaf occurrence is assigned one identifier, and an
//! assignment survives when every leaf's conditions hold and every named
//! relation has some related pair between the identifiers assigned under its
//! two operands. The group is the set of assigned identifiers.

use std::collections::{BTreeMap, BTreeSet};

use super::{finish, Group, Resolution, ResolveError};
use crate::datasource::DataSource;
use crate::model::{validate_target_definition, RelationKind, SoftwareComponent, TargetDefinition, TargetNode};

pub const MAX_LEAVES: usize = 6;
pub const MAX_IDENTIFIERS: usize = 32;

/// An or-free expression over leaf slots `0..n` numbered left to right.
enum Expr {
    Leaf(usize),
    And(Box<Expr>, Box<Expr>),
    Related(RelationKind, Box<Expr>, Box<Expr>),
}

struct Alternative<'a> {
    expr: Expr,
    leaves: Vec<&'a SoftwareComponent>,
}

pub fn brute_force_resolve(ds: &DataSource, td: &TargetDefinition) -> Result<Resolution, ResolveError> {
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

    let mut all_leaves = Vec::new();
    collect_leaves(td, entry, &mut all_leaves);
    if all_leaves.len() > MAX_LEAVES {
        return Err(ResolveError::Scale(format!("{} leaves > {MAX_LEAVES}", all_leaves.len())));
    }
    if ds.identifiers().len() > MAX_IDENTIFIERS {
        return Err(ResolveError::Scale(format!(
            "{} identifiers > {MAX_IDENTIFIERS}",
            ds.identifiers().len()
        )));
    }

    let mut groups = BTreeSet::new();
    for alt in alternatives(td, entry) {
        enumerate(ds, &alt, &mut groups);
    }

    // σ: among all leaves whose conditions the identifier meets, the last one
    // in left-to-right order wins.
    let satisfies = |i: &str, sc: &SoftwareComponent| sc.conditions.iter().all(|c| ds.eval_condition(i, c));
    let mut sigma = BTreeMap::new();
    let mut conflicts = BTreeSet::new();
    for i in groups.iter().flatten() {
        let matching: Vec<&str> = all_leaves
            .iter()
            .filter(|sc| satisfies(i, sc))
            .map(|sc| sc.id.as_str())
            .collect();
        if let Some(last) = matching.last() {
            sigma.insert(i.clone(), last.to_string());
        }
        if matching.iter().any(|sc| sc != matching.last().unwrap()) {
            conflicts.insert(i.clone());
        }
    }
    Ok(finish(groups, sigma, conflicts))
}

fn collect_leaves<'a>(td: &'a TargetDefinition, node: TargetNode<'a>, out: &mut Vec<&'a SoftwareComponent>) {
    match node {
        TargetNode::Component(sc) => out.push(sc),
        TargetNode::Relation(rel) => {
            collect_leaves(td, td.node(&rel.left).expect("validated"), out);
            collect_leaves(td, td.node(&rel.right).expect("validated"), out);
        }
    }
}

fn alternatives<'a>(td: &'a TargetDefinition, node: TargetNode<'a>) -> Vec<Alternative<'a>> {
    match node {
        TargetNode::Component(sc) => vec![Alternative {
            expr: Expr::Leaf(0),
            leaves: vec![sc],
        }],
        TargetNode::Relation(rel) => {
            let left = alternatives(td, td.node(&rel.left).expect("validated"));
            let right = alternatives(td, td.node(&rel.right).expect("validated"));
            if rel.kind == RelationKind::Or {
                return left.into_iter().chain(right).collect();
            }
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    let offset = l.leaves.len();
                    let lhs = Box::new(clone_shifted(&l.expr, 0));
                    let rhs = Box::new(clone_shifted(&r.expr, offset));
                    let expr = match rel.kind {
                        RelationKind::And => Expr::And(lhs, rhs),
                        named => Expr::Related(named, lhs, rhs),
                    };
                    let mut leaves = l.leaves.clone();
                    leaves.extend(r.leaves.iter().copied());
                    out.push(Alternative { expr, leaves });
                }
            }
            out
        }
    }
}

fn clone_shifted(expr: &Expr, offset: usize) -> Expr {
    match expr {
        Expr::Leaf(k) => Expr::Leaf(k + offset),
        Expr::And(l, r) => Expr::And(Box::new(clone_shifted(l, offset)), Box::new(clone_shifted(r, offset))),
        Expr::Related(kind, l, r) => Expr::Related(
            *kind,
            Box::new(clone_shifted(l, offset)),
            Box::new(clone_shifted(r, offset)),
        ),
    }
}

/// A relation constraint over two contiguous slot ranges.
struct Constraint {
    kind: RelationKind,
    left: std::ops::Range<usize>,
    right: std::ops::Range<usize>,
}

fn constraints(expr: &Expr, out: &mut Vec<Constraint>) -> std::ops::Range<usize> {
    match expr {
        Expr::Leaf(k) => *k..k + 1,
        Expr::And(l, r) => {
            let a = constraints(l, out);
            let b = constraints(r, out);
            a.start..b.end
        }
        Expr::Related(kind, l, r) => {
            let a = constraints(l, out);
            let b = constraints(r, out);
            out.push(Constraint {
                kind: *kind,
                left: a.clone(),
                right: b.clone(),
            });
            a.start..b.end
        }
    }
}

fn enumerate(ds: &DataSource, alt: &Alternative<'_>, groups: &mut BTreeSet<Group>) {
    let candidates: Vec<Vec<&str>> = alt
        .leaves
        .iter()
        .map(|sc| {
            ds.identifiers()
                .iter()
                .map(String::as_str)
                .filter(|i| sc.conditions.iter().all(|c| ds.eval_condition(i, c)))
                .collect()
        })
        .collect();
    let mut checks = Vec::new();
    constraints(&alt.expr, &mut checks);
    // a constraint can be decided once its last slot is assigned
    let mut due: Vec<Vec<&Constraint>> = vec![Vec::new(); alt.leaves.len()];
    for c in &checks {
        due[c.right.end - 1].push(c);
    }
    let mut assigned = Vec::with_capacity(alt.leaves.len());
    backtrack(ds, &candidates, &due, &mut assigned, groups);
}

fn backtrack<'a>(
    ds: &DataSource,
    candidates: &[Vec<&'a str>],
    due: &[Vec<&Constraint>],
    assigned: &mut Vec<&'a str>,
    groups: &mut BTreeSet<Group>,
) {
    let slot = assigned.len();
    if slot == candidates.len() {
        groups.insert(assigned.iter().map(|s| s.to_string()).collect());
        return;
    }
    for &id in &candidates[slot] {
        assigned.push(id);
        let ok = due[slot].iter().all(|c| {
            assigned[c.left.clone()]
                .iter()
                .any(|v| assigned[c.right.clone()].iter().any(|w| ds.related(c.kind, v, w)))
        });
        if ok {
            backtrack(ds, candidates, due, assigned, groups);
        }
        assigned.pop();
    }
}
