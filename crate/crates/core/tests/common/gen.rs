//! Seeded generators for inventories, target definitions and bundles.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use confcheck::content::CheckBundle;
use confcheck::datasource::{DataSource, PropertyRegistry};
use confcheck::model::{
    validate_target_definition, CheckDefinition, Condition, CriteriaChild, CriteriaNode, CriteriaOperator,
    DefinitionClass, Existence, ItemCheck, Operator, OvalDefinition, OvalTest, RelationKind, RelationNode,
    SoftwareComponent, StateEntry, StateOperation, TargetDefinition, XmlConfigObject, XmlConfigState,
};

const VENDORS: &[&str] = &["Apache", "Oracle", "IBM"];
const RELEASES: &[&str] = &["1.0", "2.5", "3", "3.0.0", "3.0.1", "10"];
const SPECS: &[&str] = &["Java_Servlet_2.5", "Java_Servlet_3.0", "Java_Servlet_3.1", "JSP_2.2"];
const NAMED: [RelationKind; 4] = [
    RelationKind::DeplIn,
    RelationKind::CommWith,
    RelationKind::CompOf,
    RelationKind::InstrSet,
];

pub struct Instance {
    pub ds: DataSource,
    pub td: TargetDefinition,
}

pub fn data_source<R: Rng>(rng: &mut R, identifiers: usize, density: f64) -> DataSource {
    let ids: Vec<String> = (0..identifiers).map(|n| format!("i{n}")).collect();
    let mut b = DataSource::builder(PropertyRegistry::default());
    for id in &ids {
        b = b.identifier(id);
        for (property, pool) in [("vendor", VENDORS), ("release", RELEASES), ("sup_spec", SPECS)] {
            let k = rng.gen_range(0..=2);
            for v in pool.choose_multiple(rng, k) {
                b = b.value(id, property, v);
            }
        }
    }
    for kind in NAMED {
        for from in &ids {
            for to in &ids {
                if rng.gen_bool(density) {
                    b = b.relate(kind, from, to);
                }
            }
        }
    }
    b.build().expect("generated data source is well formed")
}

pub fn condition<R: Rng>(rng: &mut R) -> Condition {
    let op = *Operator::ALL.choose(rng).unwrap();
    let (property, value) = match rng.gen_range(0..10) {
        0..=2 => ("vendor", *VENDORS.choose(rng).unwrap()),
        3..=5 => ("release", *RELEASES.choose(rng).unwrap()),
        6..=8 => ("sup_spec", *SPECS.choose(rng).unwrap()),
        _ => ("color", "blue"),
    };
    Condition::new(property, op, value)
}

fn component<R: Rng>(rng: &mut R, id: String) -> SoftwareComponent {
    let n = rng.gen_range(0..=2);
    SoftwareComponent {
        id,
        conditions: (0..n).map(|_| condition(rng)).collect(),
    }
}

/// A random valid target definition with `leaves` leaf occurrences.
pub fn target_definition<R: Rng>(rng: &mut R, leaves: usize) -> TargetDefinition {
    loop {
        let mut td = TargetDefinition {
            id: "td".into(),
            components: BTreeMap::new(),
            relations: BTreeMap::new(),
            root: None,
        };
        let root = build_node(rng, &mut td, leaves);
        if rng.gen_bool(0.3) && td.relations.contains_key(&root) {
            td.root = Some(root);
        }
        if validate_target_definition(&td).is_valid() {
            return td;
        }
    }
}

fn build_node<R: Rng>(rng: &mut R, td: &mut TargetDefinition, leaves: usize) -> String {
    if leaves == 1 {
        // occasionally reference an existing component a second time
        if !td.components.is_empty() && rng.gen_bool(0.2) {
            let ids: Vec<&String> = td.components.keys().collect();
            return ids.choose(rng).unwrap().to_string();
        }
        let id = format!("sc{}", td.components.len());
        let sc = component(rng, id.clone());
        td.components.insert(id.clone(), sc);
        return id;
    }
    let left_leaves = rng.gen_range(1..leaves);
    let left = build_node(rng, td, left_leaves);
    let right = build_node(rng, td, leaves - left_leaves);
    let mut kind = *RelationKind::ALL.choose(rng).unwrap();
    if kind == RelationKind::CompOf && (td.relations.contains_key(&left) || td.relations.contains_key(&right)) {
        kind = RelationKind::DeplIn;
    }
    let id = format!("r{}", td.relations.len());
    td.relations.insert(
        id.clone(),
        RelationNode {
            id: id.clone(),
            kind,
            left,
            right,
        },
    );
    id
}

/// An instance within the reference resolver's limits.
pub fn instance<R: Rng>(rng: &mut R) -> Instance {
    let leaves = rng.gen_range(1..=6);
    let identifiers = if leaves <= 3 { rng.gen_range(1..=32) } else { rng.gen_range(1..=9) };
    let density = rng.gen_range(0.02..0.3);
    Instance {
        ds: data_source(rng, identifiers, density),
        td: target_definition(rng, leaves),
    }
}

const TEXT_CHARS: &[char] = &[
    'a', 'b', 'z', 'Q', '0', '9', '_', '-', '.', ':', '/', ' ', '&', '<', '>', '"', '\'', 'é', 'ü', '€', '*', '[', ']',
];

/// Text without leading or trailing whitespace, safe for attributes and element content.
pub fn text<R: Rng>(rng: &mut R, max: usize) -> String {
    let len = rng.gen_range(1..=max);
    let s: String = (0..len).map(|_| *TEXT_CHARS.choose(rng).unwrap()).collect();
    let trimmed = s.trim();
    if trimmed.is_empty() {
        "x".to_string()
    } else {
        trimmed.to_string()
    }
}

fn criteria<R: Rng>(rng: &mut R, tests: &[String], depth: usize) -> CriteriaNode {
    let n = rng.gen_range(0..=3);
    CriteriaNode {
        operator: if rng.gen_bool(0.5) { CriteriaOperator::And } else { CriteriaOperator::Or },
        negate: rng.gen_bool(0.2),
        children: (0..n)
            .map(|_| {
                if depth > 0 && rng.gen_bool(0.3) {
                    CriteriaChild::Criteria(criteria(rng, tests, depth - 1))
                } else {
                    CriteriaChild::Test {
                        test_ref: tests.choose(rng).cloned().unwrap_or_else(|| "tst:none".into()),
                        negate: rng.gen_bool(0.2),
                    }
                }
            })
            .collect(),
    }
}

/// A random bundle. References need not resolve; ids are unique per section.
pub fn bundle<R: Rng>(rng: &mut R) -> CheckBundle {
    let mut b = CheckBundle::default();
    for n in 0..rng.gen_range(0..4) {
        let id = format!("obj:{n}:{}", text(rng, 4));
        b.objects.insert(
            id.clone(),
            XmlConfigObject {
                id,
                config_type: text(rng, 12),
                schema: if rng.gen_bool(0.3) { String::new() } else { text(rng, 20) },
                query: text(rng, 30),
            },
        );
    }
    for n in 0..rng.gen_range(0..3) {
        let id = format!("ste:{n}");
        let expected = (0..rng.gen_range(0..3))
            .map(|_| {
                let operation = *[StateOperation::Equals, StateOperation::NotEqual, StateOperation::PatternMatch]
                    .choose(rng)
                    .unwrap();
                let value = match operation {
                    StateOperation::PatternMatch => ["tr.e", "[0-9]+", "a|b", "x*"].choose(rng).unwrap().to_string(),
                    _ => text(rng, 10),
                };
                StateEntry { operation, value }
            })
            .collect();
        b.states.insert(id.clone(), XmlConfigState { id, expected });
    }
    let objects: Vec<String> = b.objects.keys().cloned().collect();
    let states: Vec<String> = b.states.keys().cloned().collect();
    for n in 0..rng.gen_range(0..4) {
        let id = format!("tst:{n}");
        b.tests.insert(
            id.clone(),
            OvalTest {
                id,
                object_ref: objects.choose(rng).cloned().unwrap_or_else(|| text(rng, 6)),
                state_refs: {
                    let k = rng.gen_range(0..=states.len());
                    states.choose_multiple(rng, k).cloned().collect()
                },
                existence: *[Existence::AtLeastOne, Existence::NoneExist, Existence::AllExist].choose(rng).unwrap(),
                item_check: *[ItemCheck::All, ItemCheck::AtLeastOne].choose(rng).unwrap(),
            },
        );
    }
    let tests: Vec<String> = b.tests.keys().cloned().collect();
    for n in 0..rng.gen_range(0..3) {
        let id = format!("def:{n}");
        b.definitions.insert(
            id.clone(),
            OvalDefinition {
                id,
                class: if rng.gen_bool(0.5) { DefinitionClass::Compliance } else { DefinitionClass::Vulnerability },
                criteria: criteria(rng, &tests, 2),
            },
        );
    }
    for n in 0..rng.gen_range(0..3) {
        let leaves = rng.gen_range(1..=4);
        let mut td = target_definition(rng, leaves);
        td.id = format!("td:{n}");
        for sc in td.components.values_mut() {
            // free-text condition values exercise escaping
            let extra: BTreeSet<Condition> = (0..rng.gen_range(0..2))
                .map(|_| Condition::new(text(rng, 8), *Operator::ALL.choose(rng).unwrap(), text(rng, 8)))
                .collect();
            sc.conditions.extend(extra);
        }
        b.targets.insert(td.id.clone(), td);
    }
    let definitions: Vec<String> = b.definitions.keys().cloned().collect();
    let targets: Vec<String> = b.targets.keys().cloned().collect();
    for n in 0..rng.gen_range(0..3) {
        let id = format!("cd:{n}");
        let k = rng.gen_range(0..=tests.len());
        let mapped: Vec<String> = tests.choose_multiple(rng, k).cloned().collect();
        let tau = mapped
            .into_iter()
            .map(|t| (t, format!("sc{}", rng.gen_range(0..3))))
            .collect();
        b.checks.insert(
            id.clone(),
            CheckDefinition {
                id,
                definition_ref: definitions.choose(rng).cloned().unwrap_or_else(|| "def:x".into()),
                target_ref: targets.choose(rng).cloned().unwrap_or_else(|| "td:x".into()),
                tau,
            },
        );
    }
    b
}
