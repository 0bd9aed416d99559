//! System-test planning: one system test per resolved identifier group, with
//! each test mapped to the system component of the identifier it applies to.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::content::{serialize_object, CheckBundle};
use crate::datasource::DataSource;
use crate::model::{validate_check_definition, CheckDefinition, Collector, SystemComponent, SystemTest, TestMapping};
use crate::resolve::{interpret_target_definition, Resolution, ResolveError};
use crate::xquery::XmlDoc;

pub const UNPLANNED: &str = "UNPLANNED";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("property {property} is undefined for {identifier}")]
    MissingAttribute { property: String, identifier: String },
    #[error("property {property} has {count} values for {identifier}")]
    MultiValued {
        property: String,
        identifier: String,
        count: usize,
    },
    #[error("invalid check definition {id}:\n{report}")]
    InvalidCd {
        id: String,
        report: crate::model::ValidationReport,
    },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub check_id: String,
    pub system_tests: Vec<SystemTest>,
}

/// Projects the data source onto `properties` for one identifier. Every
/// property must have exactly one value.
pub fn resolve_attributes(ds: &DataSource, properties: &[String], identifier: &str) -> Result<SystemComponent, PlanError> {
    let mut attributes = BTreeMap::new();
    for property in properties {
        let values = ds.property_values(identifier, property);
        let mut iter = values.iter();
        match (iter.next(), values.len()) {
            (None, _) => {
                return Err(PlanError::MissingAttribute {
                    property: property.clone(),
                    identifier: identifier.to_string(),
                })
            }
            (Some(v), 1) => {
                attributes.insert(property.clone(), v.clone());
            }
            (Some(_), count) => {
                return Err(PlanError::MultiValued {
                    property: property.clone(),
                    identifier: identifier.to_string(),
                    count,
                })
            }
        }
    }
    Ok(SystemComponent { attributes })
}

/// Whether collector `k` can collect for `identifier`: the identifier meets
/// the collector's conditions, every collector property is defined for it,
/// and the object of every test τ assigns to σ(identifier) satisfies the
/// collector's object query.
pub fn collector_matches(
    ds: &DataSource,
    bundle: &CheckBundle,
    cd: &CheckDefinition,
    sigma: &BTreeMap<String, String>,
    k: &Collector,
    identifier: &str,
) -> bool {
    let mut objects = ObjectCache::default();
    matches_with(ds, bundle, cd, sigma, k, identifier, &mut objects)
}

#[derive(Default)]
struct ObjectCache {
    docs: BTreeMap<String, Option<XmlDoc>>,
}

impl ObjectCache {
    fn doc(&mut self, bundle: &CheckBundle, object_id: &str) -> Option<&XmlDoc> {
        self.docs
            .entry(object_id.to_string())
            .or_insert_with(|| {
                let object = bundle.objects.get(object_id)?;
                XmlDoc::parse(&serialize_object(object)).ok()
            })
            .as_ref()
    }
}

fn matches_with(
    ds: &DataSource,
    bundle: &CheckBundle,
    cd: &CheckDefinition,
    sigma: &BTreeMap<String, String>,
    k: &Collector,
    identifier: &str,
    objects: &mut ObjectCache,
) -> bool {
    if !k.conditions.iter().all(|c| ds.eval_condition(identifier, c)) {
        return false;
    }
    if !k
        .properties
        .iter()
        .all(|p| !ds.property_values(identifier, p).is_empty())
    {
        return false;
    }
    let Some(sc) = sigma.get(identifier) else {
        return false;
    };
    cd.tests_for(sc).into_iter().all(|test_id| {
        let Some(test) = bundle.tests.get(test_id) else {
            return false;
        };
        match objects.doc(bundle, &test.object_ref) {
            Some(doc) => !k.object_query.eval(doc).is_empty(),
            None => false,
        }
    })
}

/// Resolves the check's target definition and plans one system test per group.
pub fn generate_system_tests(
    ds: &DataSource,
    bundle: &CheckBundle,
    cd: &CheckDefinition,
    collectors: &[Collector],
) -> Result<Plan, PlanError> {
    let mut report = validate_check_definition(cd, bundle);
    if let Some(td) = bundle.targets.get(&cd.target_ref) {
        report.extend(crate::model::validate_target_definition(td));
    }
    if !report.is_valid() {
        return Err(PlanError::InvalidCd {
            id: cd.id.clone(),
            report,
        });
    }
    let resolution = interpret_target_definition(ds, &bundle.targets[&cd.target_ref])?;
    Ok(plan_resolution(ds, bundle, cd, collectors, &resolution))
}

/// Plans against an already computed resolution.
pub fn plan_resolution(
    ds: &DataSource,
    bundle: &CheckBundle,
    cd: &CheckDefinition,
    collectors: &[Collector],
    resolution: &Resolution,
) -> Plan {
    let mut ordered: Vec<&Collector> = collectors.iter().collect();
    ordered.sort_by_key(|k| k.priority);

    let mut objects = ObjectCache::default();
    let mut plan = Plan {
        check_id: cd.id.clone(),
        system_tests: Vec::new(),
    };

    for group in &resolution.groups {
        let mut components: Vec<SystemComponent> = Vec::new();
        let mut mappings = Vec::new();
        let mut diagnostics = Vec::new();

        for identifier in group {
            let Some(sc) = resolution.component_of(identifier) else {
                continue;
            };
            let tests = cd.tests_for(sc);
            if tests.is_empty() {
                continue;
            }
            let matched = ordered.iter().find(|k| {
                matches_with(ds, bundle, cd, &resolution.assignment, k, identifier, &mut objects)
            });
            let component = match matched {
                Some(k) => match resolve_attributes(ds, &k.properties, identifier) {
                    Ok(si) => Some(match components.iter().position(|c| *c == si) {
                        Some(idx) => idx,
                        None => {
                            components.push(si);
                            components.len() - 1
                        }
                    }),
                    Err(err) => {
                        diagnostics.push(format!(
                            "{UNPLANNED}: collector {} matched {identifier} but {err}; tests {}",
                            k.id,
                            tests.join(", ")
                        ));
                        None
                    }
                },
                None => {
                    diagnostics.push(format!(
                        "{UNPLANNED}: no matching collector for {identifier} ({sc}); tests {}",
                        tests.join(", ")
                    ));
                    None
                }
            };
            for test in tests {
                mappings.push(TestMapping {
                    test: test.to_string(),
                    component,
                    identifier: Some(identifier.clone()),
                });
            }
        }

        let n = plan.system_tests.len() + 1;
        plan.system_tests.push(SystemTest {
            id: format!("{}#{n}", cd.id),
            check_id: cd.id.clone(),
            group: group.clone(),
            components,
            definition_ref: cd.definition_ref.clone(),
            mappings,
            diagnostics,
        });
    }
    plan
}

/// Tests of the definition that have no mapping in `st`.
pub fn unmapped_tests<'a>(st: &SystemTest, definition_tests: &BTreeSet<&'a str>) -> Vec<&'a str> {
    definition_tests
        .iter()
        .copied()
        .filter(|t| !st.mappings.iter().any(|m| m.test == *t))
        .collect()
}
