//! Builds system tests for the SANS check: matches collectors against each
//! resolved identifier and prints the editable plan JSON.

use confcheck::content::{parse_bundle, parse_collectors, serialize_plan};
use confcheck::datasource::{load_data_source, PropertyRegistry};
use confcheck::planner::{collector_matches, generate_system_tests, resolve_attributes};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn read(name: &str) -> Vec<u8> {
    std::fs::read(format!("{FIXTURES}/{name}")).unwrap()
}

fn run() -> String {
    let ds = load_data_source(&[read("acme_ds.json"), read("acme_ds_ext.json")], PropertyRegistry::default()).unwrap();
    let bundle = parse_bundle(&read("sans_bundle.xml")).unwrap();
    let collectors = parse_collectors(&read("collectors.json")).unwrap();
    let cd = &bundle.checks["CD_sans"];

    let mut out = String::new();
    let resolution = confcheck::resolve::interpret_target_definition(&ds, &bundle.targets[&cd.target_ref]).unwrap();
    for k in &collectors {
        for id in ["w_a", "w_b", "w_c"] {
            if collector_matches(&ds, &bundle, cd, &resolution.assignment, k, id) {
                let si = resolve_attributes(&ds, &k.properties, id).unwrap();
                out.push_str(&format!("{} matches {id}: {:?}\n", k.id, si.attributes));
            }
        }
    }
    let plan = generate_system_tests(&ds, &bundle, cd, &collectors).unwrap();
    for st in &plan.system_tests {
        for d in &st.diagnostics {
            out.push_str(&format!("{}: {d}\n", st.id));
        }
    }
    out.push_str(&serialize_plan(&plan));
    out.push('\n');
    out
}

fn main() {
    print!("{}", run());
}

#[cfg(test)]
mod tests {
    #[test]
    fn plans_three_system_tests() {
        let out = super::run();
        assert!(out.contains("K_unc matches w_b"), "{out}");
        assert!(out.contains("K_jmx matches w_a"), "{out}");
        assert!(out.contains("CD_sans#3: UNPLANNED"), "{out}");
    }
}
