use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ContentError;
use crate::model::{Collector, Condition, SystemComponent, SystemTest, TestMapping};
use crate::planner::Plan;
use crate::xquery::XPath;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectorJson {
    id: String,
    #[serde(default)]
    conditions: Vec<Condition>,
    properties: Vec<String>,
    object_query: String,
    #[serde(default)]
    priority: i64,
}

/// Parses a collector list, returned in (priority, declaration) order.
pub fn parse_collectors(bytes: &[u8]) -> Result<Vec<Collector>, ContentError> {
    let raw: Vec<CollectorJson> = serde_json::from_slice(bytes).map_err(ContentError::from_json)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for k in raw {
        if !seen.insert(k.id.clone()) {
            return Err(ContentError::schema(format!("duplicate collector id {}", k.id)));
        }
        if k.properties.is_empty() {
            return Err(ContentError::schema(format!("collector {} has no properties", k.id)));
        }
        let mut props = BTreeSet::new();
        for p in &k.properties {
            if p.is_empty() || !props.insert(p) {
                return Err(ContentError::schema(format!(
                    "collector {} has an empty or repeated property `{p}`",
                    k.id
                )));
            }
        }
        let object_query = XPath::parse(&k.object_query)
            .map_err(|e| ContentError::schema(format!("collector {}: {e}", k.id)))?;
        let mut conditions = BTreeSet::new();
        for c in k.conditions {
            if c.property.is_empty() {
                return Err(ContentError::schema(format!("collector {} has an empty property name", k.id)));
            }
            if !conditions.insert(c) {
                return Err(ContentError::schema(format!("collector {} repeats a condition", k.id)));
            }
        }
        out.push(Collector {
            id: k.id,
            conditions,
            properties: k.properties,
            object_query,
            priority: k.priority,
        });
    }
    out.sort_by_key(|k| k.priority);
    Ok(out)
}

pub fn serialize_collectors(collectors: &[Collector]) -> String {
    let raw: Vec<CollectorJson> = collectors
        .iter()
        .map(|k| CollectorJson {
            id: k.id.clone(),
            conditions: k.conditions.iter().cloned().collect(),
            properties: k.properties.clone(),
            object_query: k.object_query.source().to_string(),
            priority: k.priority,
        })
        .collect();
    serde_json::to_string_pretty(&raw).expect("collectors serialize")
}

/// On-disk form of a plan: one check's system tests, editable by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub check_id: String,
    pub system_tests: Vec<PlanTestJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanTestJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub group: Vec<String>,
    #[serde(default)]
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub mappings: Vec<MappingJson>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingJson {
    pub test: String,
    pub component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identifier: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PlanFile),
    Many(Vec<PlanFile>),
}

impl PlanFile {
    pub fn from_plan(plan: &Plan) -> PlanFile {
        PlanFile {
            check_id: plan.check_id.clone(),
            system_tests: plan
                .system_tests
                .iter()
                .map(|st| PlanTestJson {
                    id: Some(st.id.clone()),
                    group: st.group.iter().cloned().collect(),
                    components: st
                        .components
                        .iter()
                        .map(|c| ComponentJson {
                            attrs: c.attributes.clone(),
                        })
                        .collect(),
                    mappings: st
                        .mappings
                        .iter()
                        .map(|m| MappingJson {
                            test: m.test.clone(),
                            component: m.component,
                            identifier: m.identifier.clone(),
                        })
                        .collect(),
                    diagnostics: st.diagnostics.clone(),
                })
                .collect(),
        }
    }

    /// The definition reference is filled in later from the check definition.
    pub fn into_plan(self) -> Result<Plan, ContentError> {
        let mut system_tests = Vec::with_capacity(self.system_tests.len());
        for (n, st) in self.system_tests.into_iter().enumerate() {
            let id = st.id.unwrap_or_else(|| format!("{}#{}", self.check_id, n + 1));
            for m in &st.mappings {
                if let Some(idx) = m.component {
                    if idx >= st.components.len() {
                        return Err(ContentError::schema(format!(
                            "system test {id}: mapping for {} points at component {idx}, but only {} exist",
                            m.test,
                            st.components.len()
                        )));
                    }
                }
            }
            system_tests.push(SystemTest {
                check_id: self.check_id.clone(),
                group: st.group.into_iter().collect(),
                components: st
                    .components
                    .into_iter()
                    .map(|c| SystemComponent { attributes: c.attrs })
                    .collect(),
                definition_ref: String::new(),
                mappings: st
                    .mappings
                    .into_iter()
                    .map(|m| TestMapping {
                        test: m.test,
                        component: m.component,
                        identifier: m.identifier,
                    })
                    .collect(),
                diagnostics: st.diagnostics,
                id,
            });
        }
        Ok(Plan {
            check_id: self.check_id,
            system_tests,
        })
    }
}

/// Accepts a single plan object or an array of them.
pub fn parse_plans(bytes: &[u8]) -> Result<Vec<Plan>, ContentError> {
    let files = match serde_json::from_slice::<OneOrMany>(bytes) {
        Ok(OneOrMany::One(p)) => vec![p],
        Ok(OneOrMany::Many(ps)) => ps,
        // untagged enums swallow the precise error; reparse for a useful one
        Err(_) => match serde_json::from_slice::<serde_json::Value>(bytes) {
            Err(e) => return Err(ContentError::from_json(e)),
            Ok(serde_json::Value::Array(_)) => {
                serde_json::from_slice::<Vec<PlanFile>>(bytes).map_err(ContentError::from_json)?
            }
            Ok(_) => vec![serde_json::from_slice::<PlanFile>(bytes).map_err(ContentError::from_json)?],
        },
    };
    files.into_iter().map(PlanFile::into_plan).collect()
}

pub fn serialize_plan(plan: &Plan) -> String {
    serde_json::to_string_pretty(&PlanFile::from_plan(plan)).expect("plan serializes")
}

pub fn serialize_plans(plans: &[Plan]) -> String {
    let files: Vec<PlanFile> = plans.iter().map(PlanFile::from_plan).collect();
    serde_json::to_string_pretty(&files).expect("plans serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_collector_list() {
        assert!(parse_collectors(b"[]").unwrap().is_empty());
    }

    #[test]
    fn collector_without_properties() {
        let json = br#"[{"id":"k","properties":[],"object_query":"/a"}]"#;
        assert!(matches!(parse_collectors(json), Err(ContentError::Schema(_))));
    }

    #[test]
    fn collector_errors_are_classified() {
        assert!(matches!(parse_collectors(b"[{"), Err(ContentError::Syntax { .. })));
        assert!(matches!(
            parse_collectors(br#"[{"id":"k","properties":["p"],"object_query":"a"}]"#),
            Err(ContentError::Schema(_))
        ));
        assert!(matches!(
            parse_collectors(br#"[{"id":"k","properties":["p"],"object_query":"/a","extra":1}]"#),
            Err(ContentError::Schema(_))
        ));
    }

    #[test]
    fn collectors_sorted_by_priority_then_declaration() {
        let json = br#"[
            {"id":"late","properties":["p"],"object_query":"/a","priority":5},
            {"id":"first","properties":["p"],"object_query":"/a"},
            {"id":"second","properties":["p"],"object_query":"/a"},
            {"id":"urgent","properties":["p"],"object_query":"/a","priority":-1}
        ]"#;
        let ids: Vec<String> = parse_collectors(json).unwrap().into_iter().map(|k| k.id).collect();
        assert_eq!(ids, ["urgent", "first", "second", "late"]);
    }

    #[test]
    fn plan_component_index_checked() {
        let json = br#"{"check_id":"c","system_tests":[{"components":[],"mappings":[{"test":"t","component":0}]}]}"#;
        assert!(matches!(parse_plans(json), Err(ContentError::Schema(_))));
    }

    #[test]
    fn plan_ids_default_to_position() {
        let json = br#"[{"check_id":"c","system_tests":[{"components":[{"attrs":{"a":"b"}}],"mappings":[{"test":"t","component":0}]}]}]"#;
        let plans = parse_plans(json).unwrap();
        assert_eq!(plans[0].system_tests[0].id, "c#1");
    }
}
