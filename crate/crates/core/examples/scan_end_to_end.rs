//! Full pipeline: resolve, plan, collect and evaluate the SANS check.
//!
//! The manager application's descriptor is served over HTTP by a local mock
//! configuration server; the storefront's descriptor is read from a remapped
//! UNC path. The third installation has no collector data and ends in ERROR.

#[path = "support/mock_server.rs"]
mod mock_server;

use confcheck::content::{parse_bundle, parse_collectors};
use confcheck::datasource::{load_data_source, PropertyRegistry};
use confcheck::oval::{parse_adapters, run_checks};
use confcheck::report::ScanReport;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn read(name: &str) -> Vec<u8> {
    std::fs::read(format!("{FIXTURES}/{name}")).unwrap()
}

fn run() -> (String, i32) {
    let server = mock_server::MockConfigServer::start([(
        "/192.168.2.2/8059/config/manager/*".to_string(),
        String::from_utf8(read("http/manager_web.xml")).unwrap(),
    )]);
    let adapters = format!(
        r#"[
            {{"id":"files","kind":"file","path_attr":"unc_path","remap_root":"fs","accepts":["deployment descriptor"]}},
            {{"id":"jmx","kind":"http","url_template":"{}/{{ip_jmx}}/{{port_jmx}}/config{{ctx_root}}","accepts":["deployment descriptor"]}}
        ]"#,
        server.base_url()
    );
    let adapters = parse_adapters(adapters.as_bytes(), FIXTURES.as_ref()).unwrap();

    let ds = load_data_source(&[read("acme_ds.json"), read("acme_ds_ext.json")], PropertyRegistry::default()).unwrap();
    let bundle = parse_bundle(&read("sans_bundle.xml")).unwrap();
    let collectors = parse_collectors(&read("collectors.json")).unwrap();

    let results = run_checks(&ds, &bundle, &collectors, &adapters).unwrap();
    let report = ScanReport::new(results);
    let mut out = String::new();
    for r in &report.results {
        let group: Vec<&str> = r.system_test.group.iter().map(String::as_str).collect();
        out.push_str(&format!("{} {{{}}}: {}\n", r.system_test.id, group.join(","), r.definition_status));
    }
    out.push_str(&report.to_json());
    (out, report.exit_code())
}

fn main() {
    let (out, code) = run();
    print!("{out}");
    std::process::exit(code);
}
