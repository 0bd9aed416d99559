use std::collections::BTreeMap;

use thiserror::Error;

use super::{collect, evaluate_definition, evaluate_test, CollectedItem, CollectionAdapter};
use crate::content::CheckBundle;
use crate::datasource::DataSource;
use crate::model::{CheckResult, Collector, MappingResult, Status, SystemTest};
use crate::planner::{generate_system_tests, unmapped_tests, Plan, PlanError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("check {check}: {source}")]
    Plan {
        check: String,
        #[source]
        source: PlanError,
    },
    #[error("plan refers to unknown check definition {0}")]
    UnknownCheck(String),
}

/// Collects and evaluates one system test.
pub fn execute_system_test(st: &SystemTest, bundle: &CheckBundle, adapters: &[CollectionAdapter]) -> CheckResult {
    let items = collect(st, bundle, adapters);
    assemble(st, bundle, items)
}

/// Re-evaluates a result from the items it recorded, without collecting.
pub fn replay(result: &CheckResult, bundle: &CheckBundle) -> CheckResult {
    let items = result.omega.iter().map(|m| m.item.clone()).collect();
    assemble(&result.system_test, bundle, items)
}

fn assemble(st: &SystemTest, bundle: &CheckBundle, items: Vec<CollectedItem>) -> CheckResult {
    let mut diagnostics = st.diagnostics.clone();
    let omega: Vec<MappingResult> = st
        .mappings
        .iter()
        .zip(items)
        .map(|(mapping, item)| {
            let status = match bundle.tests.get(&mapping.test) {
                Some(test) => evaluate_test(test, &item, bundle),
                None => Status::Error,
            };
            MappingResult {
                mapping: mapping.clone(),
                component: st.component_of(mapping).cloned(),
                status,
                item,
            }
        })
        .collect();

    let Some(definition) = bundle.definitions.get(&st.definition_ref) else {
        diagnostics.push(format!("unknown definition {}", st.definition_ref));
        return CheckResult {
            system_test: st.clone(),
            omega,
            test_statuses: BTreeMap::new(),
            definition_status: Status::Error,
            diagnostics,
        };
    };

    // per-test status is the AND over that test's mappings
    let mut test_statuses: BTreeMap<String, Status> = BTreeMap::new();
    for m in &omega {
        let entry = test_statuses.entry(m.mapping.test.clone()).or_insert(Status::True);
        *entry = entry.and(m.status);
    }
    let definition_tests = definition.tests();
    for test in unmapped_tests(st, &definition_tests) {
        diagnostics.push(format!("test {test} has no mapping in this system test"));
        test_statuses.insert(test.to_string(), Status::True);
    }
    let definition_status = evaluate_definition(definition, &test_statuses);
    CheckResult {
        system_test: st.clone(),
        omega,
        test_statuses,
        definition_status,
        diagnostics,
    }
}

/// Full pipeline for every check definition in the bundle: resolve, plan,
/// collect and evaluate. Results are ordered by check id, then group.
pub fn run_checks(
    ds: &DataSource,
    bundle: &CheckBundle,
    collectors: &[Collector],
    adapters: &[CollectionAdapter],
) -> Result<Vec<CheckResult>, RunError> {
    let mut plans = Vec::with_capacity(bundle.checks.len());
    for cd in bundle.checks.values() {
        let plan = generate_system_tests(ds, bundle, cd, collectors).map_err(|source| RunError::Plan {
            check: cd.id.clone(),
            source,
        })?;
        plans.push(plan);
    }
    run_plans(&plans, bundle, adapters)
}

/// Executes given plans, e.g. hand-written ones, bypassing resolution.
pub fn run_plans(plans: &[Plan], bundle: &CheckBundle, adapters: &[CollectionAdapter]) -> Result<Vec<CheckResult>, RunError> {
    let mut results = Vec::new();
    for plan in plans {
        let cd = bundle
            .checks
            .get(&plan.check_id)
            .ok_or_else(|| RunError::UnknownCheck(plan.check_id.clone()))?;
        for st in &plan.system_tests {
            let mut st = st.clone();
            if st.definition_ref.is_empty() {
                st.definition_ref = cd.definition_ref.clone();
            }
            results.push(execute_system_test(&st, bundle, adapters));
        }
    }
    results.sort_by(|a, b| {
        (a.check_id(), &a.system_test.group, &a.system_test.id).cmp(&(b.check_id(), &b.system_test.group, &b.system_test.id))
    });
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::parse_bundle;
    use crate::model::{SystemComponent, TestMapping};

    #[test]
    fn unplanned_mappings_are_errors() {
        let bundle = parse_bundle(include_bytes!("../../fixtures/sans_bundle.xml")).unwrap();
        let st = SystemTest {
            id: "CD_sans#1".into(),
            check_id: "CD_sans".into(),
            group: ["w_c".to_string(), "t2".to_string()].into(),
            components: Vec::new(),
            definition_ref: "oval:sans.security:def:1".into(),
            mappings: ["oval:sans.security:tst:1", "oval:sans.security:tst:2"]
                .iter()
                .map(|t| TestMapping {
                    test: t.to_string(),
                    component: None,
                    identifier: Some("w_c".into()),
                })
                .collect(),
            diagnostics: Vec::new(),
        };
        let result = execute_system_test(&st, &bundle, &[]);
        assert_eq!(result.definition_status, Status::Error);
        assert!(result.omega.iter().all(|m| m.item.error_message() == Some("unplanned")));
        assert_eq!(replay(&result, &bundle), result);
    }

    #[test]
    fn missing_adapter_and_unmapped_test() {
        let bundle = parse_bundle(include_bytes!("../../fixtures/sans_bundle.xml")).unwrap();
        let st = SystemTest {
            id: "x#1".into(),
            check_id: "CD_sans".into(),
            group: ["w_b".to_string()].into(),
            components: vec![SystemComponent::new([("unc_path", r"\\h\web.xml")])],
            definition_ref: "oval:sans.security:def:1".into(),
            mappings: vec![TestMapping {
                test: "oval:sans.security:tst:1".into(),
                component: Some(0),
                identifier: Some("w_b".into()),
            }],
            diagnostics: Vec::new(),
        };
        let result = execute_system_test(&st, &bundle, &[]);
        assert_eq!(result.omega[0].item.error_message(), Some("no adapter"));
        assert_eq!(result.test_statuses["oval:sans.security:tst:2"], Status::True);
        // OR(ERROR, TRUE)
        assert_eq!(result.definition_status, Status::True);
        assert!(result.diagnostics.iter().any(|d| d.contains("oval:sans.security:tst:2")));
    }

    #[test]
    fn empty_bundle_has_no_results() {
        let bundle = CheckBundle::default();
        let ds = DataSource::builder(Default::default()).build().unwrap();
        assert!(run_checks(&ds, &bundle, &[], &[]).unwrap().is_empty());
    }
}
