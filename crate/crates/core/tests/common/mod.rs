#![allow(dead_code)]

use std::path::{Path, PathBuf};

use confcheck::content::{parse_bundle, parse_collectors, CheckBundle};
use confcheck::datasource::{load_data_source, DataSource, PropertyRegistry};
use confcheck::model::Collector;

#[path = "../../examples/support/mock_server.rs"]
pub mod mock_server;

pub mod gen;

pub use mock_server::MockConfigServer;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The inventory without collection attributes.
pub fn acme_ds() -> DataSource {
    load_data_source(&[read("acme_ds.json")], PropertyRegistry::default()).unwrap()
}

/// The inventory extended with requirement specs and collection attributes.
pub fn acme_ds_ext() -> DataSource {
    load_data_source(&[read("acme_ds.json"), read("acme_ds_ext.json")], PropertyRegistry::default()).unwrap()
}

pub fn sans_bundle() -> CheckBundle {
    parse_bundle(&read("sans_bundle.xml")).unwrap()
}

pub fn collectors() -> Vec<Collector> {
    parse_collectors(&read("collectors.json")).unwrap()
}

pub const MANAGER_PATH: &str = "/192.168.2.2/8059/config/manager/*";

/// Serves the manager descriptor at the path the test adapters produce for w_a.
pub fn start_config_server() -> MockConfigServer {
    let body = String::from_utf8(read("http/manager_web.xml")).unwrap();
    MockConfigServer::start([(MANAGER_PATH.to_string(), body)])
}

/// Adapter configuration pointing the HTTP adapter at `server` and the file
/// adapter at `fs_root`.
pub fn adapters_json(server: &MockConfigServer, fs_root: &Path) -> String {
    format!(
        r#"[
  {{"id": "files", "kind": "file", "path_attr": "unc_path", "remap_root": {}, "accepts": ["deployment descriptor"]}},
  {{"id": "jmx", "kind": "http", "url_template": "{}/{{ip_jmx}}/{{port_jmx}}/config{{ctx_root}}", "accepts": ["deployment descriptor"]}}
]
"#,
        serde_json::to_string(&fs_root.display().to_string()).unwrap(),
        server.base_url()
    )
}

/// Replaces the value of `"started_at"` so reports from different runs compare equal.
pub fn mask_timestamp(report: &str) -> String {
    let re = regex::Regex::new(r#""started_at": \d+"#).unwrap();
    re.replace_all(report, r#""started_at": 0"#).into_owned()
}
