//! Collection and evaluation of system tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::content::CheckBundle;
use crate::model::SystemTest;
use crate::xquery::XmlDoc;

mod adapter;
mod evaluate;
mod run;

pub use adapter::{parse_adapters, remap_path, validate_adapters, AdapterKind, CollectionAdapter, UrlTemplate, HTTP_TIMEOUT};
pub use evaluate::{evaluate_definition, evaluate_test, state_satisfied};
pub use run::{execute_system_test, replay, run_checks, run_plans, RunError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "message", rename_all = "snake_case")]
pub enum ItemStatus {
    Collected,
    CollectionError(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemSource {
    pub adapter: String,
    pub location: String,
}

/// The configuration collected for one test mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectedItem {
    pub test_id: String,
    pub mapping_index: usize,
    pub values: Vec<String>,
    pub source: Option<ItemSource>,
    pub status: ItemStatus,
}

impl CollectedItem {
    pub fn error(test_id: &str, mapping_index: usize, source: Option<ItemSource>, message: impl Into<String>) -> Self {
        CollectedItem {
            test_id: test_id.to_string(),
            mapping_index,
            values: Vec::new(),
            source,
            status: ItemStatus::CollectionError(message.into()),
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.status, ItemStatus::CollectionError(_))
    }

    pub fn error_message(&self) -> Option<&str> {
        match &self.status {
            ItemStatus::CollectionError(m) => Some(m),
            ItemStatus::Collected => None,
        }
    }
}

/// Collects one item per mapping of `st`, in mapping order. Fetches run in parallel.
pub fn collect(st: &SystemTest, bundle: &CheckBundle, adapters: &[CollectionAdapter]) -> Vec<CollectedItem> {
    st.mappings
        .par_iter()
        .enumerate()
        .map(|(idx, mapping)| {
            let fail = |source, msg: String| CollectedItem::error(&mapping.test, idx, source, msg);
            let Some(si) = st.component_of(mapping) else {
                return fail(None, "unplanned".into());
            };
            let Some(object) = bundle
                .tests
                .get(&mapping.test)
                .and_then(|t| bundle.objects.get(&t.object_ref))
            else {
                return fail(None, format!("no object for test {}", mapping.test));
            };
            let Some(adapter) = adapters.iter().find(|a| a.can_serve(&object.config_type, si)) else {
                return fail(None, "no adapter".into());
            };
            let location = match adapter.locate(si) {
                Ok(loc) => loc,
                Err(msg) => return fail(None, msg),
            };
            let source = Some(ItemSource {
                adapter: adapter.id.clone(),
                location: location.clone(),
            });
            let text = match adapter.fetch(&location) {
                Ok(text) => text,
                Err(msg) => return fail(source, msg),
            };
            let doc = match XmlDoc::parse(&text) {
                Ok(doc) => doc,
                Err(e) => return fail(source, format!("xml parse error: {e}")),
            };
            let query = match crate::xquery::XPath::parse(&object.query) {
                Ok(q) => q,
                Err(e) => return fail(source, format!("invalid query: {e}")),
            };
            CollectedItem {
                test_id: mapping.test.clone(),
                mapping_index: idx,
                values: query.eval(&doc),
                source,
                status: ItemStatus::Collected,
            }
        })
        .collect()
}
