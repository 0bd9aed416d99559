use std::collections::BTreeMap;

use regex::Regex;

use super::CollectedItem;
use crate::content::CheckBundle;
use crate::model::{
    CriteriaChild, CriteriaNode, CriteriaOperator, Existence, ItemCheck, OvalDefinition, OvalTest, StateOperation,
    Status, XmlConfigState,
};

/// A value satisfies a state when it meets every expected entry.
/// Pattern entries must match the whole value. An invalid pattern is `None`.
pub fn state_satisfied(state: &XmlConfigState, value: &str) -> Option<bool> {
    for entry in &state.expected {
        let ok = match entry.operation {
            StateOperation::Equals => value == entry.value,
            StateOperation::NotEqual => value != entry.value,
            StateOperation::PatternMatch => Regex::new(&format!("^(?:{})$", entry.value)).ok()?.is_match(value),
        };
        if !ok {
            return Some(false);
        }
    }
    Some(true)
}

pub fn evaluate_test(test: &OvalTest, item: &CollectedItem, bundle: &CheckBundle) -> Status {
    if item.is_error() {
        return Status::Error;
    }
    let values = &item.values;
    let exists = match test.existence {
        Existence::AtLeastOne | Existence::AllExist => !values.is_empty(),
        Existence::NoneExist => values.is_empty(),
    };
    if !exists {
        return Status::False;
    }
    if test.state_refs.is_empty() || values.is_empty() {
        return Status::True;
    }
    let mut states = Vec::with_capacity(test.state_refs.len());
    for r in &test.state_refs {
        match bundle.states.get(r) {
            Some(s) => states.push(s),
            None => return Status::Error,
        }
    }
    let mut per_value = Vec::with_capacity(values.len());
    for v in values {
        let mut all = true;
        for s in &states {
            match state_satisfied(s, v) {
                Some(true) => {}
                Some(false) => all = false,
                None => return Status::Error,
            }
        }
        per_value.push(all);
    }
    Status::from_bool(match test.item_check {
        ItemCheck::All => per_value.iter().all(|b| *b),
        ItemCheck::AtLeastOne => per_value.iter().any(|b| *b),
    })
}

/// Folds test statuses through the criteria tree. Tests without a status count as ERROR.
pub fn evaluate_definition(def: &OvalDefinition, statuses: &BTreeMap<String, Status>) -> Status {
    fold(&def.criteria, statuses)
}

fn fold(node: &CriteriaNode, statuses: &BTreeMap<String, Status>) -> Status {
    let children = node.children.iter().map(|child| match child {
        CriteriaChild::Criteria(inner) => fold(inner, statuses),
        CriteriaChild::Test { test_ref, negate } => {
            let s = statuses.get(test_ref).copied().unwrap_or(Status::Error);
            if *negate {
                s.negate()
            } else {
                s
            }
        }
    });
    let folded = match node.operator {
        CriteriaOperator::And => children.fold(Status::True, Status::and),
        CriteriaOperator::Or => children.fold(Status::False, Status::or),
    };
    if node.negate {
        folded.negate()
    } else {
        folded
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::parse_bundle;
    use crate::model::StateEntry;

    fn bundle() -> CheckBundle {
        parse_bundle(include_bytes!("../../fixtures/sans_bundle.xml")).unwrap()
    }

    fn item(values: &[&str]) -> CollectedItem {
        CollectedItem {
            test_id: "oval:sans.security:tst:1".into(),
            mapping_index: 0,
            values: values.iter().map(|s| s.to_string()).collect(),
            source: None,
            status: super::super::ItemStatus::Collected,
        }
    }

    #[test]
    fn http_only_test() {
        let b = bundle();
        let t = &b.tests["oval:sans.security:tst:1"];
        assert_eq!(evaluate_test(t, &item(&["true"]), &b), Status::True);
        assert_eq!(evaluate_test(t, &item(&["false"]), &b), Status::False);
        assert_eq!(evaluate_test(t, &item(&[]), &b), Status::False);
        let err = CollectedItem::error("oval:sans.security:tst:1", 0, None, "not found");
        assert_eq!(evaluate_test(t, &err, &b), Status::Error);
    }

    #[test]
    fn existence_and_item_check() {
        let b = bundle();
        let mut t = b.tests["oval:sans.security:tst:1"].clone();
        t.existence = Existence::NoneExist;
        assert_eq!(evaluate_test(&t, &item(&[]), &b), Status::True);
        assert_eq!(evaluate_test(&t, &item(&["true"]), &b), Status::False);
        t.existence = Existence::AtLeastOne;
        assert_eq!(evaluate_test(&t, &item(&["true", "false"]), &b), Status::False);
        t.item_check = ItemCheck::AtLeastOne;
        assert_eq!(evaluate_test(&t, &item(&["true", "false"]), &b), Status::True);
        t.state_refs.clear();
        assert_eq!(evaluate_test(&t, &item(&["anything"]), &b), Status::True);
        t.state_refs.push("missing".into());
        assert_eq!(evaluate_test(&t, &item(&["x"]), &b), Status::Error);
    }

    #[test]
    fn state_operations() {
        let st = |operation, value: &str| XmlConfigState {
            id: "s".into(),
            expected: vec![StateEntry {
                operation,
                value: value.into(),
            }],
        };
        assert_eq!(state_satisfied(&st(StateOperation::NotEqual, "a"), "b"), Some(true));
        assert_eq!(state_satisfied(&st(StateOperation::PatternMatch, "tr.e"), "true"), Some(true));
        assert_eq!(state_satisfied(&st(StateOperation::PatternMatch, "tr"), "true"), Some(false));
        assert_eq!(state_satisfied(&st(StateOperation::PatternMatch, "a|b"), "ab"), Some(false));
        assert_eq!(state_satisfied(&st(StateOperation::PatternMatch, "("), "x"), None);
    }

    #[test]
    fn sans_definition() {
        let b = bundle();
        let def = &b.definitions["oval:sans.security:def:1"];
        let st = |a, c| BTreeMap::from([("oval:sans.security:tst:1".to_string(), a), ("oval:sans.security:tst:2".to_string(), c)]);
        assert_eq!(evaluate_definition(def, &st(Status::True, Status::True)), Status::True);
        assert_eq!(evaluate_definition(def, &st(Status::True, Status::False)), Status::True);
        assert_eq!(evaluate_definition(def, &st(Status::False, Status::Error)), Status::Error);
        assert_eq!(evaluate_definition(def, &st(Status::True, Status::Error)), Status::True);
        assert_eq!(evaluate_definition(def, &BTreeMap::new()), Status::Error);
    }
}
