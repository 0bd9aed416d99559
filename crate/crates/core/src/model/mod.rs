//! Domain types of the check language.
//!
//! The check area (objects, states, tests, definitions) follows OVAL; the
//! target area (software components, relations, target definitions) and the
//! system area (collectors, system components, system tests, results) are the
//! extensions that bind checks to installed software.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::oval::CollectedItem;
use crate::xquery::XPath;

mod validate;
pub mod value;

pub use validate::{validate_check_definition, validate_target_definition, ValidationReport, Violation};
pub use value::ValueKind;

/// Comparison operator of a condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "GT")]
    Gt,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "LE")]
    Le,
}

impl Operator {
    pub const ALL: [Operator; 5] = [Operator::Eq, Operator::Lt, Operator::Gt, Operator::Ge, Operator::Le];

    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Eq => "EQ",
            Operator::Lt => "LT",
            Operator::Gt => "GT",
            Operator::Ge => "GE",
            Operator::Le => "LE",
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Operator::Eq => ord == Ordering::Equal,
            Operator::Lt => ord == Ordering::Less,
            Operator::Gt => ord == Ordering::Greater,
            Operator::Ge => ord != Ordering::Less,
            Operator::Le => ord != Ordering::Greater,
        }
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Operator::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

/// `⟨property, op, value⟩`. The value stays raw; its kind comes from the
/// property registry at evaluation time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub property: String,
    pub op: Operator,
    pub value: String,
}

impl Condition {
    pub fn new(property: impl Into<String>, op: Operator, value: impl Into<String>) -> Self {
        Condition {
            property: property.into(),
            op,
            value: value.into(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.property, self.op.as_str(), self.value)
    }
}

/// A conjunction of conditions. The empty set matches every identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftwareComponent {
    pub id: String,
    pub conditions: BTreeSet<Condition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    #[serde(rename = "depl_in")]
    DeplIn,
    #[serde(rename = "comm_with")]
    CommWith,
    #[serde(rename = "comp_of")]
    CompOf,
    #[serde(rename = "instr_set")]
    InstrSet,
    #[serde(rename = "and")]
    And,
    #[serde(rename = "or")]
    Or,
}

impl RelationKind {
    pub const ALL: [RelationKind; 6] = [
        RelationKind::DeplIn,
        RelationKind::CommWith,
        RelationKind::CompOf,
        RelationKind::InstrSet,
        RelationKind::And,
        RelationKind::Or,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::DeplIn => "depl_in",
            RelationKind::CommWith => "comm_with",
            RelationKind::CompOf => "comp_of",
            RelationKind::InstrSet => "instr_set",
            RelationKind::And => "and",
            RelationKind::Or => "or",
        }
    }

    /// Named relations are backed by a table in the data source; boolean ones are not.
    pub fn is_named(self) -> bool {
        !matches!(self, RelationKind::And | RelationKind::Or)
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        RelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == lower)
            .ok_or_else(|| format!("unknown relation kind `{s}`"))
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A numbered relation. `left` and `right` name a software component or
/// another relation of the same target definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationNode {
    pub id: String,
    pub kind: RelationKind,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetDefinition {
    pub id: String,
    pub components: BTreeMap<String, SoftwareComponent>,
    pub relations: BTreeMap<String, RelationNode>,
    pub root: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub enum TargetNode<'a> {
    Component(&'a SoftwareComponent),
    Relation(&'a RelationNode),
}

impl TargetDefinition {
    pub fn node(&self, id: &str) -> Option<TargetNode<'_>> {
        if let Some(rel) = self.relations.get(id) {
            return Some(TargetNode::Relation(rel));
        }
        self.components.get(id).map(TargetNode::Component)
    }

    /// Relations no other relation points at.
    pub fn unreferenced_relations(&self) -> Vec<&str> {
        let referenced: BTreeSet<&str> = self
            .relations
            .values()
            .flat_map(|r| [r.left.as_str(), r.right.as_str()])
            .collect();
        self.relations
            .keys()
            .map(String::as_str)
            .filter(|id| !referenced.contains(id))
            .collect()
    }

    /// Entry point of interpretation: the declared root, else the unique
    /// unreferenced relation, else the sole component when there are no relations.
    pub fn entry(&self) -> Option<TargetNode<'_>> {
        if self.relations.is_empty() {
            if self.components.len() == 1 {
                return self.components.values().next().map(TargetNode::Component);
            }
            return None;
        }
        if let Some(root) = &self.root {
            return self.relations.get(root).map(TargetNode::Relation);
        }
        match self.unreferenced_relations().as_slice() {
            [only] => self.relations.get(*only).map(TargetNode::Relation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlConfigObject {
    pub id: String,
    pub config_type: String,
    pub schema: String,
    pub query: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateOperation {
    Equals,
    NotEqual,
    PatternMatch,
}

impl StateOperation {
    pub fn as_str(self) -> &'static str {
        match self {
            StateOperation::Equals => "equals",
            StateOperation::NotEqual => "not equal",
            StateOperation::PatternMatch => "pattern match",
        }
    }
}

impl FromStr for StateOperation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equals" => Ok(StateOperation::Equals),
            "not equal" => Ok(StateOperation::NotEqual),
            "pattern match" => Ok(StateOperation::PatternMatch),
            other => Err(format!("unknown state operation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEntry {
    pub operation: StateOperation,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlConfigState {
    pub id: String,
    pub expected: Vec<StateEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Existence {
    AtLeastOne,
    NoneExist,
    AllExist,
}

impl Existence {
    pub fn as_str(self) -> &'static str {
        match self {
            Existence::AtLeastOne => "at_least_one_exists",
            Existence::NoneExist => "none_exist",
            Existence::AllExist => "all_exist",
        }
    }
}

impl FromStr for Existence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "at_least_one_exists" => Ok(Existence::AtLeastOne),
            "none_exist" => Ok(Existence::NoneExist),
            "all_exist" => Ok(Existence::AllExist),
            other => Err(format!("unknown check_existence `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemCheck {
    All,
    AtLeastOne,
}

impl ItemCheck {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemCheck::All => "all",
            ItemCheck::AtLeastOne => "at_least_one",
        }
    }
}

impl FromStr for ItemCheck {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(ItemCheck::All),
            "at_least_one" => Ok(ItemCheck::AtLeastOne),
            other => Err(format!("unknown check `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OvalTest {
    pub id: String,
    pub object_ref: String,
    pub state_refs: Vec<String>,
    pub existence: Existence,
    pub item_check: ItemCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriteriaOperator {
    And,
    Or,
}

impl CriteriaOperator {
    pub fn as_str(self) -> &'static str {
        match self {
            CriteriaOperator::And => "AND",
            CriteriaOperator::Or => "OR",
        }
    }
}

impl FromStr for CriteriaOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "AND" => Ok(CriteriaOperator::And),
            "OR" => Ok(CriteriaOperator::Or),
            other => Err(format!("unknown criteria operator `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriteriaChild {
    Criteria(CriteriaNode),
    Test { test_ref: String, negate: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriteriaNode {
    pub operator: CriteriaOperator,
    pub negate: bool,
    pub children: Vec<CriteriaChild>,
}

impl CriteriaNode {
    pub fn collect_test_refs<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        for child in &self.children {
            match child {
                CriteriaChild::Criteria(node) => node.collect_test_refs(out),
                CriteriaChild::Test { test_ref, .. } => {
                    out.insert(test_ref.as_str());
                }
            }
        }
    }

    pub(crate) fn has_empty_node(&self) -> bool {
        self.children.is_empty()
            || self.children.iter().any(|c| match c {
                CriteriaChild::Criteria(node) => node.has_empty_node(),
                CriteriaChild::Test { .. } => false,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefinitionClass {
    Vulnerability,
    Compliance,
}

impl DefinitionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DefinitionClass::Vulnerability => "vulnerability",
            DefinitionClass::Compliance => "compliance",
        }
    }
}

impl FromStr for DefinitionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vulnerability" => Ok(DefinitionClass::Vulnerability),
            "compliance" => Ok(DefinitionClass::Compliance),
            other => Err(format!("unknown definition class `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OvalDefinition {
    pub id: String,
    pub class: DefinitionClass,
    pub criteria: CriteriaNode,
}

impl OvalDefinition {
    /// The definition's test set: every test reachable from its criteria.
    pub fn tests(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.criteria.collect_test_refs(&mut out);
        out
    }
}

/// An OVAL definition bound to a target definition; `tau` maps each test id
/// to the software component id it inspects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckDefinition {
    pub id: String,
    pub definition_ref: String,
    pub target_ref: String,
    pub tau: BTreeMap<String, String>,
}

impl CheckDefinition {
    /// Inverse of `tau`: the tests that apply to software component `sc`.
    pub fn tests_for(&self, sc: &str) -> Vec<&str> {
        self.tau
            .iter()
            .filter(|(_, target)| target.as_str() == sc)
            .map(|(test, _)| test.as_str())
            .collect()
    }
}

/// Site-specific recipe for retrieving configurations of matching components.
#[derive(Debug, Clone, PartialEq)]
pub struct Collector {
    pub id: String,
    pub conditions: BTreeSet<Condition>,
    pub properties: Vec<String>,
    pub object_query: XPath,
    pub priority: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemComponent {
    pub attributes: BTreeMap<String, String>,
}

impl SystemComponent {
    pub fn new<K: Into<String>, V: Into<String>>(attrs: impl IntoIterator<Item = (K, V)>) -> Self {
        SystemComponent {
            attributes: attrs.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }

    pub fn get(&self, property: &str) -> Option<&str> {
        self.attributes.get(property).map(String::as_str)
    }
}

/// `component` indexes into the system test's components; `None` marks a
/// mapping no collector could be found for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestMapping {
    pub test: String,
    pub component: Option<usize>,
    pub identifier: Option<String>,
}

impl TestMapping {
    pub fn is_unplanned(&self) -> bool {
        self.component.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemTest {
    pub id: String,
    pub check_id: String,
    pub group: BTreeSet<String>,
    pub components: Vec<SystemComponent>,
    pub definition_ref: String,
    pub mappings: Vec<TestMapping>,
    pub diagnostics: Vec<String>,
}

impl SystemTest {
    pub fn component_of(&self, mapping: &TestMapping) -> Option<&SystemComponent> {
        mapping.component.and_then(|idx| self.components.get(idx))
    }
}

/// Outcome of a test mapping, a test, or a definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    True,
    False,
    Error,
}

impl Status {
    pub const ALL: [Status; 3] = [Status::True, Status::False, Status::Error];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::True => "true",
            Status::False => "false",
            Status::Error => "error",
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Status::True
        } else {
            Status::False
        }
    }

    /// FALSE dominates, then ERROR.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::False, _) | (_, Status::False) => Status::False,
            (Status::Error, _) | (_, Status::Error) => Status::Error,
            _ => Status::True,
        }
    }

    /// TRUE dominates, then ERROR.
    pub fn or(self, other: Status) -> Status {
        match (self, other) {
            (Status::True, _) | (_, Status::True) => Status::True,
            (Status::Error, _) | (_, Status::Error) => Status::Error,
            _ => Status::False,
        }
    }

    pub fn negate(self) -> Status {
        match self {
            Status::True => Status::False,
            Status::False => Status::True,
            Status::Error => Status::Error,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// ω for one test mapping, with the item it was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingResult {
    pub mapping: TestMapping,
    pub component: Option<SystemComponent>,
    pub status: Status,
    pub item: CollectedItem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub system_test: SystemTest,
    pub omega: Vec<MappingResult>,
    pub test_statuses: BTreeMap<String, Status>,
    pub definition_status: Status,
    pub diagnostics: Vec<String>,
}

impl CheckResult {
    pub fn check_id(&self) -> &str {
        &self.system_test.check_id
    }
}
