//! Resolves the web-application target definition over the inventory and
//! cross-checks the result with the enumerative reference resolver.

use confcheck::content::parse_bundle;
use confcheck::datasource::{load_data_source, PropertyRegistry};
use confcheck::resolve::{brute_force_resolve, interpret_target_definition};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run() -> String {
    let ds = load_data_source(
        &[std::fs::read(format!("{FIXTURES}/acme_ds.json")).unwrap()],
        PropertyRegistry::default(),
    )
    .unwrap();
    let bundle = parse_bundle(&std::fs::read(format!("{FIXTURES}/sans_bundle.xml")).unwrap()).unwrap();
    let td = &bundle.targets["TD_sans"];

    let resolution = interpret_target_definition(&ds, td).unwrap();
    let reference = brute_force_resolve(&ds, td).unwrap();
    assert_eq!(resolution, reference);

    let mut out = String::new();
    for group in &resolution.groups {
        let members: Vec<String> = group
            .iter()
            .map(|i| format!("{i} as {}", resolution.component_of(i).unwrap_or("?")))
            .collect();
        out.push_str(&format!("group: {}\n", members.join(", ")));
    }
    out.push_str(&format!("conflicts: {:?}\n", resolution.conflicts));
    out.push_str(&resolution.to_json());
    out.push('\n');
    out
}

fn main() {
    print!("{}", run());
}
