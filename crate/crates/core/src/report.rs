//! Scan report model, summary counts and JSON rendering.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{CheckResult, Status};
use crate::oval::ItemSource;

pub const ENGINE: &str = concat!("confcheck ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    #[serde(rename = "true")]
    pub true_count: usize,
    #[serde(rename = "false")]
    pub false_count: usize,
    #[serde(rename = "error")]
    pub error_count: usize,
}

impl Summary {
    pub fn total(&self) -> usize {
        self.true_count + self.false_count + self.error_count
    }
}

pub fn summarize(results: &[CheckResult]) -> Summary {
    let mut s = Summary::default();
    for r in results {
        match r.definition_status {
            Status::True => s.true_count += 1,
            Status::False => s.false_count += 1,
            Status::Error => s.error_count += 1,
        }
    }
    s
}

/// 1 if any definition is FALSE, else 2 if any is ERROR, else 0.
pub fn exit_code(summary: &Summary) -> i32 {
    if summary.false_count > 0 {
        1
    } else if summary.error_count > 0 {
        2
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub engine: String,
    /// Seconds since the Unix epoch, when known.
    pub started_at: Option<u64>,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl ScanReport {
    /// Sorts results by check id, then group.
    pub fn new(mut results: Vec<CheckResult>) -> Self {
        results.sort_by(|a, b| {
            (a.check_id(), &a.system_test.group, &a.system_test.id).cmp(&(
                b.check_id(),
                &b.system_test.group,
                &b.system_test.id,
            ))
        });
        ScanReport {
            engine: ENGINE.to_string(),
            started_at: None,
            summary: summarize(&results),
            results,
        }
    }

    pub fn started_at(mut self, epoch_seconds: u64) -> Self {
        self.started_at = Some(epoch_seconds);
        self
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(&self.summary)
    }

    pub fn to_json(&self) -> String {
        let view = ReportJson {
            engine: &self.engine,
            started_at: self.started_at,
            summary: self.summary,
            results: self.results.iter().map(ResultJson::from).collect(),
        };
        let mut out = serde_json::to_string_pretty(&view).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Renders results as a JSON report without a timestamp.
pub fn serialize_report(results: &[CheckResult]) -> Vec<u8> {
    ScanReport::new(results.to_vec()).to_json().into_bytes()
}

#[derive(Serialize)]
struct ReportJson<'a> {
    engine: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    started_at: Option<u64>,
    summary: Summary,
    results: Vec<ResultJson<'a>>,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    check_id: &'a str,
    system_test_id: &'a str,
    definition_ref: &'a str,
    group: Vec<&'a str>,
    definition_status: Status,
    test_statuses: &'a BTreeMap<String, Status>,
    mappings: Vec<MappingJson<'a>>,
    diagnostics: &'a [String],
}

#[derive(Serialize)]
struct MappingJson<'a> {
    test_id: &'a str,
    identifier: Option<&'a str>,
    component_attrs: Option<&'a BTreeMap<String, String>>,
    status: Status,
    items: &'a [String],
    source: Option<&'a ItemSource>,
    diagnostic: Option<&'a str>,
}

impl<'a> From<&'a CheckResult> for ResultJson<'a> {
    fn from(r: &'a CheckResult) -> Self {
        ResultJson {
            check_id: r.check_id(),
            system_test_id: &r.system_test.id,
            definition_ref: &r.system_test.definition_ref,
            group: r.system_test.group.iter().map(String::as_str).collect(),
            definition_status: r.definition_status,
            test_statuses: &r.test_statuses,
            mappings: r
                .omega
                .iter()
                .map(|m| MappingJson {
                    test_id: &m.mapping.test,
                    identifier: m.mapping.identifier.as_deref(),
                    component_attrs: m.component.as_ref().map(|c| &c.attributes),
                    status: m.status,
                    items: &m.item.values,
                    source: m.item.source.as_ref(),
                    diagnostic: m.item.error_message(),
                })
                .collect(),
            diagnostics: &r.diagnostics,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemTest;

    fn result(check: &str, id: &str, status: Status) -> CheckResult {
        CheckResult {
            system_test: SystemTest {
                id: id.into(),
                check_id: check.into(),
                group: [id.to_string()].into(),
                components: Vec::new(),
                definition_ref: "def:1".into(),
                mappings: Vec::new(),
                diagnostics: Vec::new(),
            },
            omega: Vec::new(),
            test_statuses: BTreeMap::new(),
            definition_status: status,
            diagnostics: Vec::new(),
        }
    }

    #[test]
    fn summary_and_exit_codes() {
        let rs = vec![
            result("c", "a", Status::True),
            result("c", "b", Status::False),
            result("c", "d", Status::Error),
        ];
        let s = summarize(&rs);
        assert_eq!((s.true_count, s.false_count, s.error_count), (1, 1, 1));
        assert_eq!(exit_code(&s), 1);
        assert_eq!(exit_code(&summarize(&rs[..1])), 0);
        assert_eq!(exit_code(&summarize(&[rs[0].clone(), rs[2].clone()])), 2);
        assert_eq!(summarize(&[]), Summary::default());
    }

    #[test]
    fn empty_report() {
        let json: serde_json::Value = serde_json::from_slice(&serialize_report(&[])).unwrap();
        assert_eq!(json["results"], serde_json::json!([]));
        assert_eq!(json["engine"], ENGINE);
        assert!(json.get("started_at").is_none());
    }

    #[test]
    fn ordering_is_canonical() {
        let a = vec![result("z", "b", Status::True), result("a", "c", Status::False)];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(serialize_report(&a), serialize_report(&b));
        let text = String::from_utf8(serialize_report(&a)).unwrap();
        assert!(text.contains("\"definition_status\": \"true\""));
        assert!(text.find("\"check_id\": \"a\"").unwrap() < text.find("\"check_id\": \"z\"").unwrap());
    }
}
