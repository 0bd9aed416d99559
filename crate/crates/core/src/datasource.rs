//! Federated view of the managed domain: property tables and relation tables
//! over software component identifiers.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Condition, RelationKind, ValueKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataSourceError {
    #[error("syntax error in source {source_index} at {line}:{column}: {message}")]
    Syntax {
        source_index: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value `{value}` of {property}({identifier}) is not a valid {kind}")]
    Kind {
        property: String,
        identifier: String,
        value: String,
        kind: ValueKind,
    },
}

/// Maps property names to value kinds; unknown properties are strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyRegistry {
    kinds: BTreeMap<String, ValueKind>,
}

impl Default for PropertyRegistry {
    fn default() -> Self {
        use ValueKind::*;
        let kinds = [
            ("product", String),
            ("vendor", String),
            ("release", Version),
            ("sup_spec", Spec),
            ("req_spec", Spec),
            ("unc_path", String),
            ("ctx_root", String),
            ("ip_jmx", String),
            ("port_jmx", Version),
        ];
        PropertyRegistry {
            kinds: kinds.into_iter().map(|(p, k)| (p.to_string(), k)).collect(),
        }
    }
}

impl PropertyRegistry {
    pub fn kind_of(&self, property: &str) -> ValueKind {
        self.kinds.get(property).copied().unwrap_or(ValueKind::String)
    }

    pub fn set(&mut self, property: impl Into<String>, kind: ValueKind) {
        self.kinds.insert(property.into(), kind);
    }

    /// Extends the defaults with `{"property": "string" | "version" | "spec"}`.
    pub fn extend_from_json(&mut self, bytes: &[u8]) -> Result<(), DataSourceError> {
        let extra: BTreeMap<String, ValueKind> = serde_json::from_slice(bytes).map_err(|e| json_error(0, e))?;
        self.kinds.extend(extra);
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataSource {
    identifiers: BTreeSet<String>,
    properties: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
    relations: BTreeMap<RelationKind, BTreeSet<(String, String)>>,
    registry: PropertyRegistry,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceJson {
    #[serde(default)]
    identifiers: Vec<String>,
    #[serde(default)]
    properties: BTreeMap<String, BTreeMap<String, OneOrMany>>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<(String, String)>>,
}

fn json_error(source_index: usize, err: serde_json::Error) -> DataSourceError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Data => DataSourceError::Schema(format!("source {source_index}: {err}")),
        _ => DataSourceError::Syntax {
            source_index,
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
    }
}

/// Federates `sources` by plain union of identifiers, property values and
/// relation pairs, then checks every value against `registry`.
pub fn load_data_source<B: AsRef<[u8]>>(sources: &[B], registry: PropertyRegistry) -> Result<DataSource, DataSourceError> {
    let mut ds = DataSource {
        registry,
        ..DataSource::default()
    };
    for (n, bytes) in sources.iter().enumerate() {
        let raw: SourceJson = serde_json::from_slice(bytes.as_ref()).map_err(|e| json_error(n, e))?;
        ds.identifiers.extend(raw.identifiers);
        for (property, table) in raw.properties {
            for (identifier, values) in table {
                let values = match values {
                    OneOrMany::One(v) => vec![v],
                    OneOrMany::Many(vs) => vs,
                };
                ds.add_values(&property, &identifier, values);
            }
        }
        for (kind, pairs) in raw.relations {
            let kind: RelationKind = kind.parse().map_err(DataSourceError::Schema)?;
            if !kind.is_named() {
                return Err(DataSourceError::Schema(format!(
                    "relation kind `{kind}` cannot be stored in a data source"
                )));
            }
            ds.relations.entry(kind).or_default().extend(pairs);
        }
    }
    ds.check()?;
    Ok(ds)
}

impl DataSource {
    /// Builds a data source in code; values are checked against the registry.
    pub fn builder(registry: PropertyRegistry) -> DataSourceBuilder {
        DataSourceBuilder {
            ds: DataSource {
                registry,
                ..DataSource::default()
            },
        }
    }

    fn add_values(&mut self, property: &str, identifier: &str, values: impl IntoIterator<Item = String>) {
        self.properties
            .entry(property.to_string())
            .or_default()
            .entry(identifier.to_string())
            .or_default()
            .extend(values);
    }

    fn check(&self) -> Result<(), DataSourceError> {
        for (property, table) in &self.properties {
            let kind = self.registry.kind_of(property);
            for (identifier, values) in table {
                if !self.identifiers.contains(identifier) {
                    return Err(DataSourceError::Schema(format!(
                        "{property} lists unknown identifier {identifier}"
                    )));
                }
                if let Some(bad) = values.iter().find(|v| !kind.accepts(v)) {
                    return Err(DataSourceError::Kind {
                        property: property.clone(),
                        identifier: identifier.clone(),
                        value: bad.clone(),
                        kind,
                    });
                }
            }
        }
        for (kind, pairs) in &self.relations {
            for (a, b) in pairs {
                for id in [a, b] {
                    if !self.identifiers.contains(id) {
                        return Err(DataSourceError::Schema(format!("{kind} lists unknown identifier {id}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identifiers(&self) -> &BTreeSet<String> {
        &self.identifiers
    }

    pub fn registry(&self) -> &PropertyRegistry {
        &self.registry
    }

    pub fn property_names(&self) -> impl Iterator<Item = &str> {
        self.properties.keys().map(String::as_str)
    }

    /// π_P(i); empty where the property is undefined for `identifier`.
    pub fn property_values(&self, identifier: &str, property: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.properties
            .get(property)
            .and_then(|table| table.get(identifier))
            .unwrap_or(&EMPTY)
    }

    pub fn relation_pairs(&self, kind: RelationKind) -> impl Iterator<Item = (&str, &str)> {
        self.relations
            .get(&kind)
            .into_iter()
            .flatten()
            .map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn related(&self, kind: RelationKind, from: &str, to: &str) -> bool {
        self.relations
            .get(&kind)
            .is_some_and(|pairs| pairs.contains(&(from.to_string(), to.to_string())))
    }

    /// Holds iff some value of the property satisfies the condition.
    pub fn eval_condition(&self, identifier: &str, condition: &Condition) -> bool {
        let kind = self.registry.kind_of(&condition.property);
        self.property_values(identifier, &condition.property)
            .iter()
            .any(|v| kind.satisfies(v, condition.op, &condition.value))
    }

    /// Identifiers satisfying every condition; all identifiers for the empty set.
    pub fn eval_software_component<'a>(&self, conditions: impl IntoIterator<Item = &'a Condition>) -> BTreeSet<String> {
        let conditions: Vec<&Condition> = conditions.into_iter().collect();
        self.identifiers
            .iter()
            .filter(|i| conditions.iter().all(|c| self.eval_condition(i, c)))
            .cloned()
            .collect()
    }
}

pub struct DataSourceBuilder {
    ds: DataSource,
}

impl DataSourceBuilder {
    pub fn identifier(mut self, id: &str) -> Self {
        self.ds.identifiers.insert(id.to_string());
        self
    }

    pub fn value(mut self, identifier: &str, property: &str, value: &str) -> Self {
        self.ds.identifiers.insert(identifier.to_string());
        self.ds.add_values(property, identifier, [value.to_string()]);
        self
    }

    pub fn relate(mut self, kind: RelationKind, from: &str, to: &str) -> Self {
        self.ds.identifiers.insert(from.to_string());
        self.ds.identifiers.insert(to.to_string());
        self.ds
            .relations
            .entry(kind)
            .or_default()
            .insert((from.to_string(), to.to_string()));
        self
    }

    pub fn build(self) -> Result<DataSource, DataSourceError> {
        self.ds.check()?;
        Ok(self.ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Operator;

    const ACME: &str = include_str!("../fixtures/acme_ds.json");
    const ACME_EXT: &str = include_str!("../fixtures/acme_ds_ext.json");

    fn ds1() -> DataSource {
        load_data_source(&[ACME], PropertyRegistry::default()).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn acme_identifiers() {
        assert_eq!(ds1().identifiers(), &set(&["a", "l", "t1", "t2", "w_a", "w_b", "w_c"]));
    }

    #[test]
    fn property_lookup() {
        let ds = ds1();
        assert_eq!(
            ds.property_values("t1", "sup_spec"),
            &set(&["Java_Servlet_2.5", "Java_Servlet_3.0"])
        );
        assert!(ds.property_values("a", "sup_spec").is_empty());
        assert_eq!(ds.property_values("w_a", "vendor"), &set(&["ACME"]));
    }

    #[test]
    fn conditions() {
        let ds = ds1();
        let spec = Condition::new("sup_spec", Operator::Ge, "Java_Servlet_3.0");
        assert!(ds.eval_condition("t1", &spec));
        assert!(!ds.eval_condition("w_a", &spec));
        assert!(ds.eval_condition("t1", &Condition::new("vendor", Operator::Eq, "Apache")));
        assert!(!ds.eval_condition("t1", &Condition::new("release", Operator::Lt, "7.0.2")));
        assert!(ds.eval_condition("l", &Condition::new("release", Operator::Gt, "2.4.4")));
    }

    #[test]
    fn software_components() {
        let ds = ds1();
        assert_eq!(ds.eval_software_component([]), set(&["a", "l", "t1", "t2", "w_a", "w_b", "w_c"]));
        let cont = Condition::new("sup_spec", Operator::Ge, "Java_Servlet_3.0");
        assert_eq!(ds.eval_software_component([&cont]), set(&["t1", "t2"]));
        let none = Condition::new("product", Operator::Eq, "Nonexistent");
        assert!(ds.eval_software_component([&none]).is_empty());
    }

    #[test]
    fn split_sources_federate_to_the_same_view() {
        let whole: serde_json::Value = serde_json::from_str(ACME).unwrap();
        let mut first = whole.clone();
        let mut second = whole.clone();
        first["relations"] = serde_json::json!({});
        for p in ["release", "sup_spec"] {
            first["properties"].as_object_mut().unwrap().remove(p);
        }
        second["identifiers"] = serde_json::json!([]);
        for p in ["vendor", "product"] {
            second["properties"].as_object_mut().unwrap().remove(p);
        }
        let split = load_data_source(
            &[first.to_string(), second.to_string()],
            PropertyRegistry::default(),
        )
        .unwrap();
        assert_eq!(split, ds1());
    }

    #[test]
    fn extension_adds_collection_attributes() {
        let ds = load_data_source(&[ACME, ACME_EXT], PropertyRegistry::default()).unwrap();
        assert_eq!(ds.property_values("w_a", "ctx_root"), &set(&["/manager/*"]));
        assert_eq!(ds.property_values("w_a", "ip_jmx"), &set(&["192.168.2.2"]));
        assert_eq!(ds.property_values("w_a", "port_jmx"), &set(&["8059"]));
        assert_eq!(
            ds.property_values("w_b", "unc_path"),
            &set(&[r"\\192.168.2.3\path\to\web.xml"])
        );
        assert!(ds.property_values("w_c", "unc_path").is_empty());
    }

    #[test]
    fn load_errors() {
        let reg = PropertyRegistry::default;
        assert!(matches!(
            load_data_source(&["{"], reg()),
            Err(DataSourceError::Syntax { .. })
        ));
        assert!(matches!(
            load_data_source(&[r#"{"identifiers":["a","b"],"relations":{"next_to":[["a","b"]]}}"#], reg()),
            Err(DataSourceError::Schema(_))
        ));
        assert!(matches!(
            load_data_source(&[r#"{"identifiers":["a","b"],"relations":{"and":[["a","b"]]}}"#], reg()),
            Err(DataSourceError::Schema(_))
        ));
        assert!(matches!(
            load_data_source(&[r#"{"identifiers":["a"],"properties":{"release":{"a":"two"}}}"#], reg()),
            Err(DataSourceError::Kind { .. })
        ));
        assert!(matches!(
            load_data_source(&[r#"{"identifiers":["a"],"properties":{"vendor":{"b":"x"}}}"#], reg()),
            Err(DataSourceError::Schema(_))
        ));
    }

    #[test]
    fn registry_extension() {
        let mut reg = PropertyRegistry::default();
        reg.extend_from_json(br#"{"tls":"version"}"#).unwrap();
        assert_eq!(reg.kind_of("tls"), ValueKind::Version);
        assert_eq!(reg.kind_of("unknown"), ValueKind::String);
        assert!(reg.extend_from_json(br#"{"tls":"float"}"#).is_err());
    }
}
