//! Serialization of check bundles (XML), collectors and system-test plans
//! (JSON), and scan reports (JSON).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    CheckDefinition, OvalDefinition, OvalTest, TargetDefinition, XmlConfigObject, XmlConfigState,
};

mod bundle;
mod json;

pub use bundle::{parse_bundle, serialize_bundle, serialize_object};
pub use json::{
    parse_collectors, parse_plans, serialize_collectors, serialize_plan, serialize_plans, PlanFile,
};

pub use crate::report::serialize_report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContentError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: u32, column: u32, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("reference error: {0}")]
    Ref(String),
}

impl ContentError {
    pub(crate) fn schema(message: impl Into<String>) -> Self {
        ContentError::Schema(message.into())
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Data => ContentError::Schema(err.to_string()),
            _ => ContentError::Syntax {
                line: err.line() as u32,
                column: err.column() as u32,
                message: err.to_string(),
            },
        }
    }
}

/// Security content: every collection is keyed by element id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckBundle {
    pub objects: BTreeMap<String, XmlConfigObject>,
    pub states: BTreeMap<String, XmlConfigState>,
    pub tests: BTreeMap<String, OvalTest>,
    pub definitions: BTreeMap<String, OvalDefinition>,
    pub targets: BTreeMap<String, TargetDefinition>,
    pub checks: BTreeMap<String, CheckDefinition>,
}

impl CheckBundle {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
            && self.states.is_empty()
            && self.tests.is_empty()
            && self.definitions.is_empty()
            && self.targets.is_empty()
            && self.checks.is_empty()
    }

    /// Runs both validators over every target and check definition.
    pub fn validate(&self) -> crate::model::ValidationReport {
        let mut report = crate::model::ValidationReport::default();
        for td in self.targets.values() {
            report.extend(crate::model::validate_target_definition(td));
        }
        for cd in self.checks.values() {
            report.extend(crate::model::validate_check_definition(cd, self));
        }
        report
    }
}
